#include "sfgen/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sfgen/loader.hpp"
#include "sfgen/ownership.hpp"
#include "sfgen/packs.hpp"
#include "sfgen/stats.hpp"

namespace sfgen {

namespace fs = std::filesystem;

namespace {

void report_error(std::ostream& err, std::string_view code, const std::string& message,
                  const std::string& subject = {}) {
  err << "error " << code;
  if (!subject.empty()) err << " [" << subject << "]";
  err << ": " << message << "\n";
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Loads and validates, printing diagnostics. Returns null on errors.
std::shared_ptr<const ApplicationModel> load_checked(const std::string& path, std::ostream& err,
                                                     int* error_count = nullptr,
                                                     int* warning_count = nullptr) {
  const LoadResult result = load_model(read_input(path));
  int errors = 0;
  int warnings = 0;
  for (const Diagnostic& d : result.diagnostics) {
    err << path << ":" << format(d) << "\n";
    (d.severity == Severity::Error ? errors : warnings)++;
  }
  if (error_count) *error_count = errors;
  if (warning_count) *warning_count = warnings;
  return errors == 0 ? result.model : nullptr;
}

struct GenerateOptions {
  std::string model;
  std::string pack;
  std::string out;
  std::string lang;
  bool dry_run = false;
  bool force = false;
};

ExitCode cmd_validate(const std::string& model_path, std::ostream& out, std::ostream& err) {
  int errors = 0;
  int warnings = 0;
  load_checked(model_path, err, &errors, &warnings);
  out << errors << (errors == 1 ? " error" : " errors") << ", " << warnings
      << (warnings == 1 ? " warning" : " warnings") << "\n";
  return errors ? ExitCode::ValidationErrors : ExitCode::Ok;
}

ExitCode cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  auto model = load_checked(opt.model, err);
  if (!model) {
    report_error(err, "E_VALIDATION", "model has errors; nothing generated", opt.model);
    return ExitCode::ValidationErrors;
  }

  GenConfig config{opt.lang.empty() ? default_language(*model) : opt.lang};
  if (!opt.lang.empty() && !model->languages.empty() &&
      std::find(model->languages.begin(), model->languages.end(), opt.lang) ==
          model->languages.end()) {
    report_error(err, "E_USAGE", "language '" + opt.lang + "' is not used by the model");
    return ExitCode::Usage;
  }

  std::vector<Artifact> artifacts;
  try {
    const TemplatePack pack = load_pack(read_pack_directory(opt.pack));
    artifacts = generate_all(model, pack, config);
  } catch (const PackError& e) {
    report_error(err, "E_PACK", e.what(), opt.pack);
    return ExitCode::TemplateOrPack;
  } catch (const PathCollision& e) {
    report_error(err, "E_PATH_COLLISION", e.what(), e.path());
    return ExitCode::TemplateOrPack;
  } catch (const ArtifactError& e) {
    report_error(err, "E_TEMPLATE", e.what(), e.artifact_path());
    return ExitCode::TemplateOrPack;
  }

  const fs::path root(opt.out);
  std::error_code ec;
  if (fs::exists(root, ec) && !fs::is_directory(root, ec)) {
    report_error(err, "E_IO", "output path exists and is not a directory", opt.out);
    return ExitCode::IoFailure;
  }
  std::optional<Manifest> manifest;
  try {
    manifest = read_manifest(root);
  } catch (const ManifestError& e) {
    report_error(err, "E_MANIFEST", e.what(), opt.out);
    return ExitCode::IoFailure;
  }
  const WritePlan plan = plan_writes(artifacts, read_existing(artifacts, root), manifest, opt.force);

  std::map<WriteAction, int> counts;
  for (const PlannedWrite& w : plan.actions) ++counts[w.action];
  auto summary = [&] {
    bool first = true;
    for (const auto& [action, n] : counts) {
      out << (first ? "" : ", ") << n << " " << to_string(action);
      first = false;
    }
    out << "\n";
  };

  if (opt.dry_run) {
    for (const PlannedWrite& w : plan.actions) {
      out << to_string(w.action) << " " << w.path << " (" << w.reason << ")\n";
    }
    summary();
  }
  if (plan.has_conflicts()) {
    for (const PlannedWrite& w : plan.actions) {
      if (w.action == WriteAction::Conflict) report_error(err, "E_CONFLICT", w.reason, w.path);
    }
    err << "hand-edited generated files would be overwritten; use --force to regenerate them\n";
    return ExitCode::Conflicts;
  }
  if (opt.dry_run) return ExitCode::Ok;

  apply_plan(plan, artifacts, root, manifest);
  summary();
  return ExitCode::Ok;
}

ExitCode cmd_stats(const std::string& out_dir, bool json, std::ostream& out, std::ostream& err) {
  const fs::path root(out_dir);
  std::optional<Manifest> manifest;
  try {
    manifest = read_manifest(root);
  } catch (const ManifestError& e) {
    report_error(err, "E_MANIFEST", e.what(), out_dir);
    return ExitCode::IoFailure;
  }
  if (!manifest) {
    report_error(err, "E_MANIFEST", "no " + std::string(kManifestFileName) + " found", out_dir);
    return ExitCode::IoFailure;
  }
  const auto listing = read_tree(root);
  const StatsReport report = build_report(listing, classify_files(listing, *manifest));
  out << (json ? report_to_json(report) : report_to_table(report));
  return ExitCode::Ok;
}

ExitCode cmd_lint(const std::string& model_path, std::ostream& out, std::ostream& err) {
  auto model = load_checked(model_path, err);
  if (!model) {
    report_error(err, "E_VALIDATION", "model has errors; lint skipped", model_path);
    return ExitCode::ValidationErrors;
  }
  const auto advisories = lint_model(*model);
  for (const Advisory& a : advisories) {
    out << "advice " << a.code << " [" << a.subject << "]: " << a.message << "\n";
  }
  out << advisories.size() << (advisories.size() == 1 ? " advisory" : " advisories") << "\n";
  return ExitCode::Ok;
}

}  // namespace

ExitCode run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-driven application scaffold generator", "sfgen"};
  app.require_subcommand(1);

  std::string validate_model_path;
  auto* validate = app.add_subcommand("validate", "Check a domain model for errors");
  validate->add_option("model", validate_model_path, "Domain model document")->required();

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Render a template pack into an output tree");
  generate->add_option("--model", gen.model, "Domain model document")->required();
  generate->add_option("--pack", gen.pack, "Template pack directory")->required();
  generate->add_option("--out", gen.out, "Output root")->required();
  generate->add_option("--lang", gen.lang, "Language for labels and messages");
  generate->add_flag("--dry-run", gen.dry_run, "Print the write plan without writing");
  generate->add_flag("--force", gen.force, "Overwrite hand-edited generated files");

  std::string stats_out;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Report generated vs handcrafted code");
  stats->add_option("--out", stats_out, "Output root")->required();
  stats->add_flag("--json", stats_json, "Machine-readable output");

  std::string lint_model_path;
  auto* lint = app.add_subcommand("lint", "Advisories for a valid model");
  lint->add_option("--model", lint_model_path, "Domain model document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::Ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, "E_USAGE", e.what());
    return ExitCode::Usage;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_model_path, out, err);
    if (generate->parsed()) return cmd_generate(gen, out, err);
    if (stats->parsed()) return cmd_stats(stats_out, stats_json, out, err);
    if (lint->parsed()) return cmd_lint(lint_model_path, out, err);
  } catch (const IoError& e) {
    report_error(err, "E_IO", e.what(), e.path());
    return ExitCode::IoFailure;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "E_IO", e.what());
    return ExitCode::IoFailure;
  }
  report_error(err, "E_USAGE", "no subcommand given");
  return ExitCode::Usage;
}

}  // namespace sfgen
