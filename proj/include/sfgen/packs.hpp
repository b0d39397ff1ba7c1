#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfgen/atl.hpp"
#include "sfgen/model.hpp"

namespace sfgen {

enum class Ownership { Always, Once };
enum class RuleScope { Model, Entity };

std::string_view to_string(Ownership ownership);
std::optional<Ownership> parse_ownership(std::string_view token);

struct OutputRule {
  std::string templateName;
  std::string pathPattern;  // may contain {entity.name} / {entity.tableName}
  RuleScope per = RuleScope::Model;
  Ownership ownership = Ownership::Always;
  bool activeOnly = true;
  std::map<std::string, atl::Value, std::less<>> flags;
};

struct TemplatePack {
  std::string name;
  std::string version;
  std::vector<OutputRule> outputs;
  std::map<std::string, atl::TemplateAst, std::less<>> templates;
};

struct Artifact {
  std::string path;
  std::string content;
  Ownership ownership = Ownership::Always;

  bool operator==(const Artifact&) const = default;
};

struct GenConfig {
  std::string lang;
};

class PackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PathCollision : public std::runtime_error {
 public:
  explicit PathCollision(const std::string& path);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A template failure while rendering one artifact.
class ArtifactError : public atl::TemplateRuntimeError {
 public:
  ArtifactError(std::string artifact_path, const atl::TemplateError& cause);
  const std::string& artifact_path() const { return artifact_path_; }

 private:
  std::string artifact_path_;
};

/// Relative path ('/'-separated) -> file contents.
using PackListing = std::map<std::string, std::string>;

PackListing read_pack_directory(const std::filesystem::path& dir);

/// Parses pack.json and every template it references.
TemplatePack load_pack(const PackListing& listing);

struct Expansion {
  std::string path;
  atl::Context context;
};

/// Binds `model` (and `entity` for per-entity rules) plus `flags`. Throws
/// PathCollision when two expansions share a path.
std::vector<Expansion> expand_output_rule(const OutputRule& rule,
                                          const std::shared_ptr<const ApplicationModel>& model);

/// Renders every rule; order is rule order, then entity document order.
/// Templates also see `lang`.
std::vector<Artifact> generate_all(const std::shared_ptr<const ApplicationModel>& model,
                                   const TemplatePack& pack, const GenConfig& config);

/// `--lang` default: settings.defaultLanguage, else the first language.
std::string default_language(const ApplicationModel& model);

}  // namespace sfgen
