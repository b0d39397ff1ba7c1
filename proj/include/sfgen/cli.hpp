#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sfgen {

enum class ExitCode : int {
  Ok = 0,
  ValidationErrors = 1,
  Conflicts = 2,
  IoFailure = 3,
  TemplateOrPack = 4,
  Usage = 5,
};

/// Entry point behind the `sfgen` executable. `args` excludes argv[0].
///
///   validate <model>
///   generate --model <file> --pack <dir> --out <dir> [--lang <name>] [--dry-run] [--force]
///   stats --out <dir> [--json]
///   lint --model <file>
ExitCode run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfgen
