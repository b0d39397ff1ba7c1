#pragma once

// Regeneration safety. ALWAYS outputs are rewritten on every run unless the
// file on disk no longer matches what the generator last wrote; ONCE outputs
// are created a single time and then belong to the developer.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfgen/packs.hpp"

namespace sfgen {

inline constexpr std::string_view kManifestFileName = ".sfgen-manifest.json";

struct ManifestEntry {
  std::string path;
  Ownership ownership = Ownership::Always;
  std::string sha256;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  int version = 1;
  std::vector<ManifestEntry> entries;  // sorted by path

  const ManifestEntry* find(std::string_view path) const;
  bool operator==(const Manifest&) const = default;
};

enum class WriteAction { Create, Overwrite, SkipOnce, SkipUnchanged, Conflict };

std::string_view to_string(WriteAction action);

struct PlannedWrite {
  std::string path;
  WriteAction action = WriteAction::Create;
  std::string reason;

  bool operator==(const PlannedWrite&) const = default;
};

struct WritePlan {
  std::vector<PlannedWrite> actions;  // artifact order

  bool has_conflicts() const;
  std::vector<std::string> conflicts() const;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, std::string reason);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SHA-256, lowercase hex.
std::string digest(std::string_view content);

/// Pure planning over a snapshot of the output root (`existing` needs only
/// the artifact paths that exist on disk).
WritePlan plan_writes(const std::vector<Artifact>& artifacts,
                      const std::map<std::string, std::string>& existing,
                      const std::optional<Manifest>& manifest, bool force);

/// Executes CREATE/OVERWRITE actions (temp file + rename per file), then
/// writes the new manifest. Throws std::logic_error if the plan still holds
/// a conflict, before touching the filesystem.
Manifest apply_plan(const WritePlan& plan, const std::vector<Artifact>& artifacts,
                    const std::filesystem::path& out_root,
                    const std::optional<Manifest>& previous = std::nullopt);

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(std::string_view text);

/// Reads `<out_root>/.sfgen-manifest.json`; std::nullopt when absent.
std::optional<Manifest> read_manifest(const std::filesystem::path& out_root);

/// Contents of the artifact paths that exist under `out_root`.
std::map<std::string, std::string> read_existing(const std::vector<Artifact>& artifacts,
                                                 const std::filesystem::path& out_root);

/// Writes `content` to `path` via a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sfgen
