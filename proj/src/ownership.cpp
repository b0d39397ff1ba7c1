#include "sfgen/ownership.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sfgen {

namespace fs = std::filesystem;

std::string_view to_string(WriteAction action) {
  switch (action) {
    case WriteAction::Create:
      return "CREATE";
    case WriteAction::Overwrite:
      return "OVERWRITE";
    case WriteAction::SkipOnce:
      return "SKIP_ONCE";
    case WriteAction::SkipUnchanged:
      return "SKIP_UNCHANGED";
    case WriteAction::Conflict:
      return "CONFLICT";
  }
  return "?";
}

const ManifestEntry* Manifest::find(std::string_view path) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), path,
                             [](const ManifestEntry& e, std::string_view p) { return e.path < p; });
  return it != entries.end() && it->path == path ? &*it : nullptr;
}

bool WritePlan::has_conflicts() const {
  return std::any_of(actions.begin(), actions.end(),
                     [](const PlannedWrite& w) { return w.action == WriteAction::Conflict; });
}

std::vector<std::string> WritePlan::conflicts() const {
  std::vector<std::string> out;
  for (const PlannedWrite& w : actions) {
    if (w.action == WriteAction::Conflict) out.push_back(w.path);
  }
  return out;
}

IoError::IoError(std::string path, std::string reason)
    : std::runtime_error(path + ": " + reason), path_(std::move(path)) {}

std::string digest(std::string_view content) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

WritePlan plan_writes(const std::vector<Artifact>& artifacts,
                      const std::map<std::string, std::string>& existing,
                      const std::optional<Manifest>& manifest, bool force) {
  WritePlan plan;
  plan.actions.reserve(artifacts.size());
  for (const Artifact& a : artifacts) {
    auto on_disk = existing.find(a.path);
    if (on_disk == existing.end()) {
      plan.actions.push_back({a.path, WriteAction::Create, "new file"});
      continue;
    }
    if (a.ownership == Ownership::Once) {
      plan.actions.push_back({a.path, WriteAction::SkipOnce, "exists; owned by the developer"});
      continue;
    }
    const ManifestEntry* entry = manifest ? manifest->find(a.path) : nullptr;
    if (entry && digest(on_disk->second) == entry->sha256) {
      if (on_disk->second == a.content) {
        plan.actions.push_back({a.path, WriteAction::SkipUnchanged, "up to date"});
      } else {
        plan.actions.push_back({a.path, WriteAction::Overwrite, "regenerated"});
      }
      continue;
    }
    const std::string why =
        entry ? "modified since last generation" : "exists but was not generated by sfgen";
    if (force) {
      plan.actions.push_back({a.path, WriteAction::Overwrite, "forced (" + why + ")"});
    } else {
      plan.actions.push_back({a.path, WriteAction::Conflict, why});
    }
  }
  return plan;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return buf.str();
}

std::string temp_suffix() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream s;
  s << std::hex << rng();
  return s.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.string(), "cannot create directory: " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".sfgen-tmp-" + temp_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open temp file for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw IoError(path.string(), "write failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError(path.string(), "rename failed: " + ec.message());
  }
}

Manifest apply_plan(const WritePlan& plan, const std::vector<Artifact>& artifacts,
                    const fs::path& out_root, const std::optional<Manifest>& previous) {
  if (plan.has_conflicts()) {
    throw std::logic_error("apply_plan: plan contains conflicts; resolve them or use force");
  }
  std::map<std::string_view, const Artifact*> by_path;
  for (const Artifact& a : artifacts) by_path[a.path] = &a;

  Manifest manifest;
  for (const PlannedWrite& w : plan.actions) {
    auto it = by_path.find(w.path);
    if (it == by_path.end()) throw std::logic_error("apply_plan: no artifact for " + w.path);
    const Artifact& a = *it->second;
    ManifestEntry entry{a.path, a.ownership, {}};
    switch (w.action) {
      case WriteAction::Create:
      case WriteAction::Overwrite:
        write_file_atomic(out_root / a.path, a.content);
        entry.sha256 = digest(a.content);
        break;
      case WriteAction::SkipUnchanged:
        entry.sha256 = digest(a.content);
        break;
      case WriteAction::SkipOnce: {
        // The scaffold's recorded digest survives so later edits stay visible.
        const ManifestEntry* old = previous ? previous->find(a.path) : nullptr;
        entry.sha256 = old ? old->sha256 : digest(read_file(out_root / a.path));
        break;
      }
      case WriteAction::Conflict:
        break;
    }
    manifest.entries.push_back(std::move(entry));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& x, const ManifestEntry& y) { return x.path < y.path; });
  write_file_atomic(out_root / kManifestFileName, manifest_to_json(manifest));
  return manifest;
}

std::string manifest_to_json(const Manifest& manifest) {
  nlohmann::ordered_json doc;
  doc["version"] = manifest.version;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["path"] = e.path;
    j["ownership"] = std::string(to_string(e.ownership));
    j["sha256"] = e.sha256;
    doc["entries"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError(std::string("manifest: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer() ||
      !doc.contains("entries") || !doc["entries"].is_array()) {
    throw ManifestError("manifest: expected {\"version\": int, \"entries\": [...]}");
  }
  Manifest m;
  m.version = doc["version"].get<int>();
  if (m.version != 1) throw ManifestError("manifest: unsupported version " + std::to_string(m.version));
  std::set<std::string> seen;
  for (const auto& j : doc["entries"]) {
    if (!j.is_object() || !j.contains("path") || !j["path"].is_string() ||
        !j.contains("ownership") || !j["ownership"].is_string() || !j.contains("sha256") ||
        !j["sha256"].is_string()) {
      throw ManifestError("manifest: malformed entry");
    }
    auto ownership = parse_ownership(j["ownership"].get<std::string>());
    if (!ownership) throw ManifestError("manifest: bad ownership");
    ManifestEntry e{j["path"].get<std::string>(), *ownership, j["sha256"].get<std::string>()};
    const bool hex = e.sha256.size() == 64 &&
                     std::all_of(e.sha256.begin(), e.sha256.end(), [](char c) {
                       return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                     });
    if (!hex) throw ManifestError("manifest: bad digest for " + e.path);
    if (!seen.insert(e.path).second) throw ManifestError("manifest: duplicate path " + e.path);
    m.entries.push_back(std::move(e));
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& x, const ManifestEntry& y) { return x.path < y.path; });
  return m;
}

std::optional<Manifest> read_manifest(const fs::path& out_root) {
  const fs::path path = out_root / kManifestFileName;
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  return manifest_from_json(read_file(path));
}

std::map<std::string, std::string> read_existing(const std::vector<Artifact>& artifacts,
                                                 const fs::path& out_root) {
  std::map<std::string, std::string> existing;
  for (const Artifact& a : artifacts) {
    const fs::path p = out_root / a.path;
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) existing[a.path] = read_file(p);
  }
  return existing;
}

}  // namespace sfgen
