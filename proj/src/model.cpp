#include "sfgen/model.hpp"

#include <algorithm>
#include <array>

namespace sfgen {

namespace {

constexpr std::array<std::pair<FieldType, std::string_view>, 10> kFieldTypes{{
    {FieldType::Int, "int"},
    {FieldType::BigInt, "bigint"},
    {FieldType::Decimal, "decimal"},
    {FieldType::Bit, "bit"},
    {FieldType::Float, "float"},
    {FieldType::DateTime, "datetime"},
    {FieldType::Date, "date"},
    {FieldType::NVarChar, "nvarchar"},
    {FieldType::VarChar, "varchar"},
    {FieldType::Text, "text"},
}};

constexpr std::array<std::pair<RelationshipOp, std::string_view>, 6> kRelationships{{
    {RelationshipOp::Lt, "lt"},
    {RelationshipOp::Le, "le"},
    {RelationshipOp::Gt, "gt"},
    {RelationshipOp::Ge, "ge"},
    {RelationshipOp::Eq, "eq"},
    {RelationshipOp::Neq, "neq"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                         Enum value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return {};
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                             std::string_view token) {
  for (const auto& [e, name] : table) {
    if (name == token) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(FieldType type) { return name_of(kFieldTypes, type); }
std::string_view to_string(RelationshipOp op) { return name_of(kRelationships, op); }

std::string_view to_string(ConstraintKind kind) {
  return kind == ConstraintKind::Unique ? "Unique" : "TwoFields";
}

std::string_view to_string(Caching caching) {
  return caching == Caching::Enabled ? "enabled" : "disabled";
}

std::optional<FieldType> parse_field_type(std::string_view token) {
  return value_of(kFieldTypes, token);
}

std::optional<RelationshipOp> parse_relationship(std::string_view token) {
  return value_of(kRelationships, token);
}

std::optional<ConstraintKind> parse_constraint_kind(std::string_view token) {
  if (token == "Unique") return ConstraintKind::Unique;
  if (token == "TwoFields") return ConstraintKind::TwoFields;
  return std::nullopt;
}

std::optional<Caching> parse_caching(std::string_view token) {
  if (token == "enabled") return Caching::Enabled;
  if (token == "disabled") return Caching::Disabled;
  return std::nullopt;
}

bool is_sized(FieldType type) {
  return type == FieldType::NVarChar || type == FieldType::VarChar;
}

bool is_textual(FieldType type) { return is_sized(type) || type == FieldType::Text; }

bool is_date(FieldType type) { return type == FieldType::DateTime || type == FieldType::Date; }

void LocalizedText::set(std::string lang, std::string text) {
  for (auto& [l, t] : entries_) {
    if (l == lang) {
      t = std::move(text);
      return;
    }
  }
  entries_.emplace_back(std::move(lang), std::move(text));
}

const std::string* LocalizedText::find(std::string_view lang) const {
  for (const auto& [l, t] : entries_) {
    if (l == lang) return &t;
  }
  return nullptr;
}

const Field* Entity::find_field(std::string_view field_name) const {
  auto it = std::find_if(fields.begin(), fields.end(),
                         [&](const Field& f) { return f.name == field_name; });
  return it == fields.end() ? nullptr : &*it;
}

const Field* Entity::primary_key() const {
  auto it = std::find_if(fields.begin(), fields.end(), [](const Field& f) { return f.isPK; });
  return it == fields.end() ? nullptr : &*it;
}

std::vector<ColumnSpec> effective_columns(const Entity& entity) {
  std::vector<ColumnSpec> columns;
  columns.reserve(entity.fields.size() + 2);
  for (const Field& f : entity.fields) {
    columns.push_back(ColumnSpec{
        .name = f.name,
        .type = f.type.value(),
        .length = f.length,
        .nullable = f.nullable,
        .identity = f.isIdentity,
        .audit = false,
    });
  }
  if (entity.isLogged) {
    columns.push_back(ColumnSpec{.name = "changedAt",
                                 .type = FieldType::DateTime,
                                 .length = std::nullopt,
                                 .nullable = false,
                                 .identity = false,
                                 .audit = true});
    columns.push_back(ColumnSpec{.name = "changedBy",
                                 .type = FieldType::VarChar,
                                 .length = 50,
                                 .nullable = false,
                                 .identity = false,
                                 .audit = true});
  }
  return columns;
}

std::string resolve_localized(const LocalizedText& text, std::string_view lang,
                              const Settings& settings, std::string_view fallback) {
  if (const std::string* s = text.find(lang); s && !s->empty()) return *s;
  if (settings.defaultLanguage) {
    if (const std::string* s = text.find(*settings.defaultLanguage); s && !s->empty()) return *s;
  }
  for (const auto& [l, t] : text.entries()) {
    if (!t.empty()) return t;
  }
  return std::string(fallback);
}

std::string display_name(const ApplicationModel& model, const Entity& entity,
                         std::string_view lang) {
  return resolve_localized(entity.displayNames, lang, model.settings, entity.name);
}

std::string plural_name(const ApplicationModel& model, const Entity& entity,
                        std::string_view lang) {
  return resolve_localized(entity.pluralNames, lang, model.settings, entity.name);
}

std::string display_name(const ApplicationModel& model, const Field& field,
                         std::string_view lang) {
  const std::string& fallback =
      field.displayNameAttr && !field.displayNameAttr->empty() ? *field.displayNameAttr
                                                               : field.name;
  return resolve_localized(field.displayNames, lang, model.settings, fallback);
}

std::string display_name(const ApplicationModel& model, const Constraint& constraint,
                         std::string_view lang) {
  return resolve_localized(constraint.errorMessages, lang, model.settings,
                           structural_name(constraint));
}

std::string structural_name(const Constraint& constraint) {
  std::string out = constraint.kindToken.empty() ? "Constraint" : constraint.kindToken;
  out += '(';
  for (std::size_t i = 0; i < constraint.cfields.size(); ++i) {
    if (i) out += ", ";
    out += constraint.cfields[i];
  }
  out += ')';
  return out;
}

const Entity* find_entity(const ApplicationModel& model, std::string_view name) {
  auto it = std::find_if(model.entities.begin(), model.entities.end(),
                         [&](const Entity& e) { return e.name == name; });
  return it == model.entities.end() ? nullptr : &*it;
}

}  // namespace sfgen
