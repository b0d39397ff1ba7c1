#include "sfgen/loader.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>

namespace sfgen {

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Error:
      return "error";
    case Severity::Warning:
      return "warning";
    case Severity::Advice:
      return "advice";
  }
  return "error";
}

std::string format(const Diagnostic& d) {
  std::string out;
  if (d.location && d.location->known()) {
    out += std::to_string(d.location->line) + ":" + std::to_string(d.location->column) + ": ";
  }
  out += to_string(d.severity);
  out += ' ';
  out += d.code;
  if (!d.subject.empty()) out += " [" + d.subject + "]";
  out += ": ";
  out += d.message;
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
  std::stable_sort(diagnostics.begin(), diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     const SourceLocation la = a.location.value_or(SourceLocation{});
                     const SourceLocation lb = b.location.value_or(SourceLocation{});
                     return std::tie(la.line, la.column, a.code) <
                            std::tie(lb.line, lb.column, b.code);
                   });
}

namespace {

Diagnostic make_diag(std::string_view code, std::string message, SourceLocation at,
                     std::string subject) {
  const Severity severity = code.starts_with("W_") ? Severity::Warning : Severity::Error;
  return Diagnostic{std::string(code), severity, std::move(message),
                    at.known() ? std::optional<SourceLocation>(at) : std::nullopt,
                    std::move(subject)};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string entity_subject(const std::string& name, std::size_t index) {
  return name.empty() ? "Entity[#" + std::to_string(index + 1) + "]" : "Entity[" + name + "]";
}

std::string field_subject(const std::string& entity, const std::string& field,
                          std::size_t index) {
  return entity + (field.empty() ? "/Field[#" + std::to_string(index + 1) + "]"
                                 : "/Field[" + field + "]");
}

std::string constraint_subject(const std::string& entity, std::size_t index) {
  return entity + "/Constraint[" + std::to_string(index + 1) + "]";
}

class Binder {
 public:
  std::pair<ApplicationModel, std::vector<Diagnostic>> run(const XmlNode& root) {
    if (root.tag != "xsource") {
      report(diag::kBadRoot, "root element must be <xsource>, found <" + root.tag + ">",
             root.location, "");
      return {std::move(model_), std::move(diags_)};
    }
    check_attributes(root, {}, "xsource");
    bool have_settings = false;
    for (const XmlNode& child : root.children) {
      if (child.tag == "Settings") {
        if (have_settings) {
          report(diag::kDuplicateSettings, "only the first <Settings> element is used",
                 child.location, "Settings");
          continue;
        }
        have_settings = true;
        bind_settings(child);
      } else if (child.tag == "EntityConfig") {
        check_attributes(child, {}, "EntityConfig");
        for (const XmlNode& e : child.children) {
          if (e.tag == "Entity") {
            bind_entity(e);
          } else {
            unknown_element(e, "EntityConfig");
          }
        }
      } else {
        unknown_element(child, "xsource");
      }
    }
    return {std::move(model_), std::move(diags_)};
  }

 private:
  void report(std::string_view code, std::string message, SourceLocation at,
              std::string subject) {
    diags_.push_back(make_diag(code, std::move(message), at, std::move(subject)));
  }

  void unknown_element(const XmlNode& node, const std::string& subject) {
    report(diag::kUnknownElement, "unknown element <" + node.tag + "> ignored", node.location,
           subject);
  }

  void check_attributes(const XmlNode& node, std::initializer_list<std::string_view> known,
                        const std::string& subject) {
    for (const XmlAttribute& a : node.attributes) {
      if (std::find(known.begin(), known.end(), a.name) == known.end()) {
        report(diag::kUnknownAttr, "unknown attribute '" + a.name + "' on <" + node.tag + ">",
               a.location, subject);
      }
    }
  }

  void note_language(const std::string& lang) {
    if (lang.empty()) return;
    if (std::find(model_.languages.begin(), model_.languages.end(), lang) ==
        model_.languages.end()) {
      model_.languages.push_back(lang);
    }
  }

  std::optional<std::string> text_attr(const XmlNode& node, std::string_view name) {
    if (const XmlAttribute* a = node.attribute(name)) return a->value;
    return std::nullopt;
  }

  void bool_attr(const XmlNode& node, std::string_view name, bool& out,
                 const std::string& subject) {
    const XmlAttribute* a = node.attribute(name);
    if (!a) return;
    if (a->value == "true") {
      out = true;
    } else if (a->value == "false") {
      out = false;
    } else {
      report(diag::kBadBool,
             "attribute '" + a->name + "' must be \"true\" or \"false\", found \"" + a->value +
                 "\"",
             a->location, subject);
    }
  }

  void int_attr(const XmlNode& node, std::string_view name, int min, int max,
                std::optional<int>& out, const std::string& subject) {
    const XmlAttribute* a = node.attribute(name);
    if (!a) return;
    int value = 0;
    const char* first = a->value.data();
    const char* last = first + a->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || a->value.empty() || value < min || value > max) {
      report(diag::kBadInt,
             "attribute '" + a->name + "' must be an integer in [" + std::to_string(min) + ", " +
                 std::to_string(max) + "], found \"" + a->value + "\"",
             a->location, subject);
      return;
    }
    out = value;
  }

  void bind_settings(const XmlNode& node) {
    check_attributes(node, {"appName", "defaultLanguage", "connectionStringName"}, "Settings");
    for (const XmlNode& child : node.children) unknown_element(child, "Settings");
    Settings& s = model_.settings;
    s.location = node.location;
    s.appName = text_attr(node, "appName").value_or("");
    s.defaultLanguage = text_attr(node, "defaultLanguage");
    s.connectionStringName = text_attr(node, "connectionStringName");
  }

  // <Language name="..."> with the given text children, e.g. DisplayName.
  void bind_language(const XmlNode& node, const std::string& subject,
                     std::initializer_list<std::pair<std::string_view, LocalizedText*>> slots,
                     std::set<std::pair<std::string, std::string>>& seen) {
    check_attributes(node, {"name"}, subject);
    const XmlAttribute* name = node.attribute("name");
    if (!name || name->value.empty()) {
      report(diag::kMissingAttr, "<Language> requires a non-empty 'name' attribute",
             node.location, subject);
      return;
    }
    note_language(name->value);
    for (const XmlNode& child : node.children) {
      LocalizedText* target = nullptr;
      for (const auto& [tag, slot] : slots) {
        if (child.tag == tag) target = slot;
      }
      if (!target) {
        unknown_element(child, subject);
        continue;
      }
      if (!seen.emplace(child.tag, name->value).second) {
        report(diag::kDuplicateLanguage,
               "duplicate <" + child.tag + "> for language '" + name->value + "'", child.location,
               subject);
        continue;
      }
      target->set(name->value, trim(child.text));
    }
  }

  void bind_entity(const XmlNode& node) {
    const std::size_t index = model_.entities.size();
    Entity e;
    e.location = node.location;
    e.name = text_attr(node, "name").value_or("");
    e.tableName = text_attr(node, "tableName").value_or("");
    const std::string subject = entity_subject(e.name, index);
    check_attributes(node, {"name", "tableName", "caching", "isAudited", "isLogged", "isActive"},
                     subject);
    if (const XmlAttribute* a = node.attribute("caching")) {
      if (auto c = parse_caching(a->value)) {
        e.caching = *c;
      } else {
        report(diag::kBadEnum,
               "attribute 'caching' must be \"enabled\" or \"disabled\", found \"" + a->value +
                   "\"",
               a->location, subject);
      }
    }
    bool_attr(node, "isAudited", e.isAudited, subject);
    bool_attr(node, "isLogged", e.isLogged, subject);
    bool_attr(node, "isActive", e.isActive, subject);

    std::set<std::pair<std::string, std::string>> seen;
    for (const XmlNode& child : node.children) {
      if (child.tag == "Language") {
        bind_language(child, subject,
                      {{"DisplayName", &e.displayNames}, {"PluralName", &e.pluralNames}}, seen);
      } else if (child.tag == "Field") {
        e.fields.push_back(bind_field(child, subject, e.fields.size()));
      } else if (child.tag == "Constraint") {
        e.constraints.push_back(bind_constraint(child, subject, e.constraints.size()));
      } else {
        unknown_element(child, subject);
      }
    }
    model_.entities.push_back(std::move(e));
  }

  Field bind_field(const XmlNode& node, const std::string& entity, std::size_t index) {
    Field f;
    f.location = node.location;
    f.name = text_attr(node, "name").value_or("");
    const std::string subject = field_subject(entity, f.name, index);
    check_attributes(node,
                     {"name", "type", "length", "nullable", "isPK", "isIdentity", "isFK",
                      "fkEntityName", "fkName", "nameName", "isLookup", "createLookup", "isOVN",
                      "isAudited", "isShownInList", "isShownInEdit", "isShownInHistory",
                      "description", "defaultValue", "displayFormat", "numberOfRows",
                      "numberOfCols", "displayName"},
                     subject);
    f.typeToken = text_attr(node, "type").value_or("");
    f.type = parse_field_type(f.typeToken);
    int_attr(node, "length", 1, 1'000'000, f.length, subject);
    bool_attr(node, "nullable", f.nullable, subject);
    bool_attr(node, "isPK", f.isPK, subject);
    bool_attr(node, "isIdentity", f.isIdentity, subject);
    bool_attr(node, "isFK", f.isFK, subject);
    f.fkEntityName = text_attr(node, "fkEntityName");
    f.fkName = text_attr(node, "fkName");
    if (!f.fkName) f.fkName = text_attr(node, "nameName");
    bool_attr(node, "isLookup", f.isLookup, subject);
    bool_attr(node, "createLookup", f.createLookup, subject);
    bool_attr(node, "isOVN", f.isOVN, subject);
    bool_attr(node, "isAudited", f.isAudited, subject);
    bool_attr(node, "isShownInList", f.isShownInList, subject);
    bool_attr(node, "isShownInEdit", f.isShownInEdit, subject);
    bool_attr(node, "isShownInHistory", f.isShownInHistory, subject);
    f.description = text_attr(node, "description");
    f.defaultValue = text_attr(node, "defaultValue");
    f.displayFormat = text_attr(node, "displayFormat");
    int_attr(node, "numberOfRows", 0, 255, f.numberOfRows, subject);
    int_attr(node, "numberOfCols", 0, 255, f.numberOfCols, subject);
    f.displayNameAttr = text_attr(node, "displayName");

    std::set<std::pair<std::string, std::string>> seen;
    for (const XmlNode& child : node.children) {
      if (child.tag == "Language") {
        bind_language(child, subject, {{"DisplayName", &f.displayNames}}, seen);
      } else {
        unknown_element(child, subject);
      }
    }
    return f;
  }

  Constraint bind_constraint(const XmlNode& node, const std::string& entity, std::size_t index) {
    Constraint c;
    c.location = node.location;
    const std::string subject = constraint_subject(entity, index);
    check_attributes(node, {"type", "relationship"}, subject);
    c.kindToken = text_attr(node, "type").value_or("");
    c.kind = parse_constraint_kind(c.kindToken);
    c.relationshipToken = text_attr(node, "relationship").value_or("");
    c.relationship = parse_relationship(c.relationshipToken);

    std::set<std::pair<std::string, std::string>> seen;
    for (const XmlNode& child : node.children) {
      if (child.tag == "Language") {
        bind_language(child, subject, {{"ErrorMessage", &c.errorMessages}}, seen);
      } else if (child.tag == "CField") {
        check_attributes(child, {"name"}, subject);
        const XmlAttribute* name = child.attribute("name");
        if (!name || name->value.empty()) {
          report(diag::kMissingAttr, "<CField> requires a 'name' attribute", child.location,
                 subject);
          continue;
        }
        c.cfields.push_back(name->value);
      } else {
        unknown_element(child, subject);
      }
    }
    return c;
  }

  ApplicationModel model_;
  std::vector<Diagnostic> diags_;
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!start(s.front())) return false;
  return std::all_of(s.begin(), s.end(),
                     [&](char c) { return start(c) || (c >= '0' && c <= '9'); });
}

class Validator {
 public:
  explicit Validator(const ApplicationModel& model) : model_(model) {}

  std::vector<Diagnostic> run() {
    const Settings& s = model_.settings;
    if (s.defaultLanguage &&
        std::find(model_.languages.begin(), model_.languages.end(), *s.defaultLanguage) ==
            model_.languages.end()) {
      report(diag::kDefaultLanguage,
             "defaultLanguage '" + *s.defaultLanguage + "' is not used by any <Language>",
             s.location, "Settings");
    }
    std::set<std::string> names;
    std::set<std::string> tables;
    for (std::size_t i = 0; i < model_.entities.size(); ++i) {
      const Entity& e = model_.entities[i];
      const std::string subject = entity_subject(e.name, i);
      identifier(e.name, "name", "<Entity>", e.location, subject);
      identifier(e.tableName, "tableName", "<Entity>", e.location, subject);
      if (!e.name.empty() && !names.insert(e.name).second) {
        report(diag::kDuplicateEntity, "duplicate entity name '" + e.name + "'", e.location,
               subject);
      }
      if (!e.tableName.empty() && !tables.insert(e.tableName).second) {
        report(diag::kDuplicateTable, "duplicate tableName '" + e.tableName + "'", e.location,
               subject);
      }
      check_entity(e, subject);
    }
    return std::move(diags_);
  }

 private:
  void report(std::string_view code, std::string message, SourceLocation at,
              std::string subject) {
    diags_.push_back(make_diag(code, std::move(message), at, std::move(subject)));
  }

  void identifier(const std::string& value, const char* attr, const char* element,
                  SourceLocation at, const std::string& subject) {
    if (value.empty()) {
      report(diag::kMissingAttr, std::string(element) + " requires attribute '" + attr + "'", at,
             subject);
    } else if (!is_identifier(value)) {
      report(diag::kBadIdentifier,
             std::string("attribute '") + attr + "' must be an identifier ([A-Za-z_][A-Za-z0-9_]*), found \"" +
                 value + "\"",
             at, subject);
    }
  }

  void check_entity(const Entity& e, const std::string& subject) {
    if (e.fields.empty()) {
      report(diag::kNoFields, "entity must declare at least one <Field>", e.location, subject);
    }
    std::set<std::string> field_names;
    int pk_count = 0;
    int identity_count = 0;
    for (std::size_t i = 0; i < e.fields.size(); ++i) {
      const Field& f = e.fields[i];
      const std::string fs = field_subject(subject, f.name, i);
      identifier(f.name, "name", "<Field>", f.location, fs);
      if (!f.name.empty() && !field_names.insert(f.name).second) {
        report(diag::kDuplicateField, "duplicate field name '" + f.name + "'", f.location, fs);
      }
      if (f.isPK) ++pk_count;
      if (f.isIdentity) ++identity_count;
      check_field(f, fs);
    }
    if (!e.fields.empty() && pk_count != 1) {
      report(diag::kPkCount,
             "entity must have exactly one field with isPK=\"true\", found " +
                 std::to_string(pk_count),
             e.location, subject);
    }
    if (identity_count > 1) {
      report(diag::kIdentity,
             "at most one identity field allowed, found " + std::to_string(identity_count),
             e.location, subject);
    }
    std::set<std::pair<std::string, std::vector<std::string>>> constraint_keys;
    for (std::size_t i = 0; i < e.constraints.size(); ++i) {
      const Constraint& c = e.constraints[i];
      check_constraint(e, c, constraint_subject(subject, i));
      if (c.kind && !c.cfields.empty() &&
          !constraint_keys.emplace(c.kindToken, c.cfields).second) {
        report(diag::kDuplicateConstraint,
               "another " + c.kindToken + " constraint already covers the same fields",
               c.location, constraint_subject(subject, i));
      }
    }
  }

  void check_field(const Field& f, const std::string& subject) {
    if (f.typeToken.empty()) {
      report(diag::kMissingAttr, "<Field> requires attribute 'type'", f.location, subject);
    } else if (!f.type) {
      report(diag::kBadFieldType, "unknown field type \"" + f.typeToken + "\"", f.location,
             subject);
    }
    if (f.type) {
      const FieldType t = *f.type;
      if (is_sized(t) && !f.length) {
        report(diag::kLength, "type " + f.typeToken + " requires attribute 'length'", f.location,
               subject);
      } else if (!is_sized(t) && f.length) {
        report(diag::kLength, "type " + f.typeToken + " does not take a 'length'", f.location,
               subject);
      }
      if (f.isIdentity && t != FieldType::Int) {
        report(diag::kIdentity, "identity field must have type int", f.location, subject);
      }
      if ((f.numberOfRows || f.numberOfCols) && !is_textual(t)) {
        report(diag::kRowsCols, "numberOfRows/numberOfCols apply only to textual types",
               f.location, subject);
      }
    }
    if (f.isIdentity && !f.isPK) {
      report(diag::kIdentity, "identity field must also be the primary key", f.location,
             subject);
    }
    if (f.isFK) {
      if (!f.fkEntityName || f.fkEntityName->empty()) {
        report(diag::kFkTarget, "isFK=\"true\" requires attribute 'fkEntityName'", f.location,
               subject);
      } else if (!find_entity(model_, *f.fkEntityName)) {
        report(diag::kFkTarget, "fkEntityName '" + *f.fkEntityName + "' names no entity",
               f.location, subject);
      }
    }
  }

  void check_constraint(const Entity& e, const Constraint& c, const std::string& subject) {
    if (c.kindToken.empty()) {
      report(diag::kMissingAttr, "<Constraint> requires attribute 'type'", c.location, subject);
      return;
    }
    if (!c.kind) {
      report(diag::kBadConstraintType, "unknown constraint type \"" + c.kindToken + "\"",
             c.location, subject);
      return;
    }
    std::vector<const Field*> resolved;
    for (const std::string& name : c.cfields) {
      const Field* f = e.find_field(name);
      if (!f) {
        report(diag::kConstraintField, "CField '" + name + "' names no field of the entity",
               c.location, subject);
      }
      resolved.push_back(f);
    }
    if (*c.kind == ConstraintKind::Unique) {
      if (c.cfields.empty()) {
        report(diag::kConstraintArity, "Unique constraint needs at least one <CField>",
               c.location, subject);
      }
      return;
    }
    if (c.relationshipToken.empty()) {
      report(diag::kMissingAttr, "TwoFields constraint requires attribute 'relationship'",
             c.location, subject);
    } else if (!c.relationship) {
      report(diag::kBadRelationship,
             "relationship must be one of lt, le, gt, ge, eq, neq; found \"" +
                 c.relationshipToken + "\"",
             c.location, subject);
    }
    if (c.cfields.size() != 2) {
      report(diag::kConstraintArity,
             "TwoFields constraint needs exactly 2 <CField>, found " +
                 std::to_string(c.cfields.size()),
             c.location, subject);
      return;
    }
    if (resolved[0] && resolved[1] && resolved[0]->type && resolved[1]->type &&
        is_date(*resolved[0]->type) != is_date(*resolved[1]->type)) {
      report(diag::kConstraintFamily,
             "fields '" + c.cfields[0] + "' and '" + c.cfields[1] +
                 "' must both be dates or both be non-dates",
             c.location, subject);
    }
  }

  const ApplicationModel& model_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::pair<ApplicationModel, std::vector<Diagnostic>> bind_model(const XmlNode& root) {
  return Binder().run(root);
}

std::vector<Diagnostic> validate_model(const ApplicationModel& model) {
  return Validator(model).run();
}

LoadResult load_model(std::string_view bytes) {
  LoadResult result;
  XmlNode root;
  try {
    root = parse_document(bytes);
  } catch (const ParseError& e) {
    result.diagnostics.push_back(Diagnostic{std::string(diag::kParse), Severity::Error,
                                            e.reason(),
                                            SourceLocation{e.line(), e.column()}, ""});
    return result;
  }
  auto [model, diagnostics] = bind_model(root);
  auto more = validate_model(model);
  diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  sort_diagnostics(diagnostics);
  result.model = std::make_shared<const ApplicationModel>(std::move(model));
  result.diagnostics = std::move(diagnostics);
  return result;
}

}  // namespace sfgen
