#include "sfgen/packs.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sfgen {

std::string_view to_string(Ownership ownership) {
  return ownership == Ownership::Always ? "always" : "once";
}

std::optional<Ownership> parse_ownership(std::string_view token) {
  if (token == "always") return Ownership::Always;
  if (token == "once") return Ownership::Once;
  return std::nullopt;
}

PathCollision::PathCollision(const std::string& path)
    : std::runtime_error("two outputs map to the same path '" + path + "'"), path_(path) {}

ArtifactError::ArtifactError(std::string artifact_path, const atl::TemplateError& cause)
    : atl::TemplateRuntimeError(cause.template_name(), cause.location(),
                                cause.reason() + " (while generating " + artifact_path + ")"),
      artifact_path_(std::move(artifact_path)) {}

namespace {

constexpr std::string_view kManifestName = "pack.json";
constexpr std::string_view kOutputManifest = ".sfgen-manifest.json";

std::string normalize_newlines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      out += '\n';
      if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

struct Placeholder {
  std::size_t begin;
  std::size_t end;  // one past '}'
  std::string member;
};

// Splits a path pattern into {entity.<member>} placeholders.
std::vector<Placeholder> placeholders(const std::string& pattern) {
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find_first_of("{}", pos);
    if (open == std::string::npos) break;
    if (pattern[open] == '}') throw PackError("unbalanced '}' in path '" + pattern + "'");
    const std::size_t close = pattern.find('}', open);
    if (close == std::string::npos) throw PackError("unbalanced '{' in path '" + pattern + "'");
    const std::string inner = pattern.substr(open + 1, close - open - 1);
    if (!inner.starts_with("entity.")) {
      throw PackError("unknown placeholder {" + inner + "} in path '" + pattern + "'");
    }
    std::string member = inner.substr(7);
    if (member != "name" && member != "tableName") {
      throw PackError("unknown placeholder {" + inner + "} in path '" + pattern +
                      "'; use {entity.name} or {entity.tableName}");
    }
    out.push_back({open, close + 1, std::move(member)});
    pos = close + 1;
  }
  return out;
}

void check_relative_path(const std::string& path, const std::string& what) {
  if (path.empty()) throw PackError(what + ": empty path");
  if (path.front() == '/' || path.find('\\') != std::string::npos ||
      path.find(':') != std::string::npos) {
    throw PackError(what + ": path '" + path + "' must be relative and '/'-separated");
  }
  std::stringstream ss(path);
  std::string segment;
  while (std::getline(ss, segment, '/')) {
    if (segment.empty() || segment == "." || segment == "..") {
      throw PackError(what + ": path '" + path + "' must not contain empty, '.' or '..' segments");
    }
  }
  if (path.back() == '/') throw PackError(what + ": path '" + path + "' names a directory");
  if (path == kOutputManifest) throw PackError(what + ": path '" + path + "' is reserved");
}

atl::Value flag_value(const nlohmann::json& j, const std::string& where) {
  if (j.is_boolean()) return atl::Value(j.get<bool>());
  if (j.is_number_integer()) return atl::Value(j.get<std::int64_t>());
  if (j.is_string()) return atl::Value(j.get<std::string>());
  throw PackError(where + ": flag values must be boolean, integer or string");
}

std::string expand_path(const std::string& pattern, const Entity* entity) {
  std::string out;
  std::size_t pos = 0;
  for (const Placeholder& p : placeholders(pattern)) {
    out.append(pattern, pos, p.begin - pos);
    out += p.member == "name" ? entity->name : entity->tableName;
    pos = p.end;
  }
  out.append(pattern, pos);
  return out;
}

}  // namespace

PackListing read_pack_directory(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw PackError("pack directory not found: " + dir.string());
  PackListing listing;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw PackError("cannot read " + entry.path().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    listing[fs::relative(entry.path(), dir).generic_string()] = buf.str();
  }
  return listing;
}

TemplatePack load_pack(const PackListing& listing) {
  auto manifest_it = listing.find(std::string(kManifestName));
  if (manifest_it == listing.end()) throw PackError("pack has no pack.json");

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(manifest_it->second);
  } catch (const nlohmann::json::parse_error& e) {
    throw PackError(std::string("pack.json: ") + e.what());
  }
  if (!doc.is_object()) throw PackError("pack.json: top level must be an object");

  auto require_string = [](const nlohmann::json& obj, const char* key,
                           const std::string& where) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw PackError(where + ": '" + key + "' must be a string");
    }
    return it->get<std::string>();
  };

  TemplatePack pack;
  pack.name = require_string(doc, "name", "pack.json");
  pack.version = require_string(doc, "version", "pack.json");
  auto outputs = doc.find("outputs");
  if (outputs == doc.end() || !outputs->is_array()) {
    throw PackError("pack.json: 'outputs' must be an array");
  }

  std::set<std::string> model_paths;
  for (std::size_t i = 0; i < outputs->size(); ++i) {
    const nlohmann::json& o = (*outputs)[i];
    const std::string where = "pack.json outputs[" + std::to_string(i) + "]";
    if (!o.is_object()) throw PackError(where + ": must be an object");
    OutputRule rule;
    rule.templateName = require_string(o, "template", where);
    rule.pathPattern = require_string(o, "path", where);
    const std::string per = require_string(o, "per", where);
    if (per == "model") {
      rule.per = RuleScope::Model;
    } else if (per == "entity") {
      rule.per = RuleScope::Entity;
    } else {
      throw PackError(where + ": 'per' must be \"model\" or \"entity\"");
    }
    auto ownership = parse_ownership(require_string(o, "ownership", where));
    if (!ownership) throw PackError(where + ": 'ownership' must be \"always\" or \"once\"");
    rule.ownership = *ownership;
    if (auto it = o.find("activeOnly"); it != o.end()) {
      if (!it->is_boolean()) throw PackError(where + ": 'activeOnly' must be a boolean");
      rule.activeOnly = it->get<bool>();
    }
    if (auto it = o.find("flags"); it != o.end()) {
      if (!it->is_object()) throw PackError(where + ": 'flags' must be an object");
      for (const auto& [key, value] : it->items()) rule.flags[key] = flag_value(value, where);
    }

    const std::string rule_name = where + " (" + rule.templateName + ")";
    check_relative_path(rule.pathPattern, rule_name);
    const auto holes = placeholders(rule.pathPattern);
    if (rule.per == RuleScope::Model && !holes.empty()) {
      throw PackError(rule_name + ": per-model path '" + rule.pathPattern +
                      "' must not contain entity placeholders");
    }
    if (rule.per == RuleScope::Model && !model_paths.insert(rule.pathPattern).second) {
      throw PackError(rule_name + ": path '" + rule.pathPattern + "' used twice");
    }

    if (!pack.templates.contains(rule.templateName)) {
      auto source = listing.find(rule.templateName);
      if (source == listing.end()) {
        throw PackError(rule_name + ": template '" + rule.templateName + "' not found in pack");
      }
      try {
        pack.templates.emplace(rule.templateName,
                               atl::parse_template(normalize_newlines(source->second),
                                                   rule.templateName));
      } catch (const atl::TemplateSyntaxError& e) {
        throw PackError(std::string("template syntax error: ") + e.what());
      }
    }
    pack.outputs.push_back(std::move(rule));
  }
  return pack;
}

std::vector<Expansion> expand_output_rule(const OutputRule& rule,
                                          const std::shared_ptr<const ApplicationModel>& model) {
  const atl::Value model_node = atl::model_value(model);
  const atl::Value flags(std::make_shared<const atl::MapNode>(
      std::map<std::string, atl::Value, std::less<>>(rule.flags.begin(), rule.flags.end())));

  std::vector<Expansion> out;
  if (rule.per == RuleScope::Model) {
    out.push_back({rule.pathPattern, {{"model", model_node}, {"flags", flags}}});
    return out;
  }
  std::set<std::string> seen;
  for (const Entity& e : model->entities) {
    if (rule.activeOnly && !e.isActive) continue;
    std::string path = expand_path(rule.pathPattern, &e);
    if (!seen.insert(path).second) throw PathCollision(path);
    out.push_back({std::move(path),
                   {{"model", model_node},
                    {"entity", atl::entity_value(model, e)},
                    {"flags", flags}}});
  }
  return out;
}

std::vector<Artifact> generate_all(const std::shared_ptr<const ApplicationModel>& model,
                                   const TemplatePack& pack, const GenConfig& config) {
  std::vector<Artifact> artifacts;
  std::set<std::string> seen;
  for (const OutputRule& rule : pack.outputs) {
    const atl::TemplateAst& ast = pack.templates.find(rule.templateName)->second;
    for (Expansion& x : expand_output_rule(rule, model)) {
      if (!seen.insert(x.path).second) throw PathCollision(x.path);
      x.context["lang"] = atl::Value(config.lang);
      std::string content;
      try {
        content = atl::render(ast, x.context);
      } catch (const atl::TemplateError& e) {
        throw ArtifactError(x.path, e);
      }
      artifacts.push_back({std::move(x.path), normalize_newlines(content), rule.ownership});
    }
  }
  return artifacts;
}

std::string default_language(const ApplicationModel& model) {
  if (model.settings.defaultLanguage) return *model.settings.defaultLanguage;
  return model.languages.empty() ? std::string() : model.languages.front();
}

}  // namespace sfgen
