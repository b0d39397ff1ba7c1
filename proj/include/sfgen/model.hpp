#pragma once

// Semantic model of a domain-model document: entities, fields, constraints
// and localized text. Values are plain aggregates; once bound they are shared
// as `std::shared_ptr<const ApplicationModel>` and never mutated.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sfgen {

struct SourceLocation {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  bool operator==(const SourceLocation&) const = default;
};

enum class FieldType {
  Int,
  BigInt,
  Decimal,
  Bit,
  Float,
  DateTime,
  Date,
  NVarChar,
  VarChar,
  Text,
};

enum class RelationshipOp { Lt, Le, Gt, Ge, Eq, Neq };

enum class ConstraintKind { Unique, TwoFields };

enum class Caching { Enabled, Disabled };

std::string_view to_string(FieldType type);
std::string_view to_string(RelationshipOp op);
std::string_view to_string(ConstraintKind kind);
std::string_view to_string(Caching caching);

std::optional<FieldType> parse_field_type(std::string_view token);
std::optional<RelationshipOp> parse_relationship(std::string_view token);
std::optional<ConstraintKind> parse_constraint_kind(std::string_view token);
std::optional<Caching> parse_caching(std::string_view token);

/// nvarchar and varchar: the types that carry a length.
bool is_sized(FieldType type);
/// Types for which numberOfRows/numberOfCols make sense (multi-line editors).
bool is_textual(FieldType type);
bool is_date(FieldType type);

/// Language name -> text, kept in document order.
class LocalizedText {
 public:
  using Entry = std::pair<std::string, std::string>;

  LocalizedText() = default;
  explicit LocalizedText(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  /// Replaces an existing entry for `lang` in place, otherwise appends.
  void set(std::string lang, std::string text);
  const std::string* find(std::string_view lang) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const LocalizedText&) const = default;

 private:
  std::vector<Entry> entries_;
};

struct Settings {
  std::string appName;
  std::optional<std::string> defaultLanguage;
  std::optional<std::string> connectionStringName;
  SourceLocation location;

  bool operator==(const Settings&) const = default;
};

struct Field {
  std::string name;
  // Raw attribute token; `type` is empty when the token is missing or unknown.
  std::string typeToken;
  std::optional<FieldType> type;
  std::optional<int> length;
  bool nullable = false;
  bool isPK = false;
  bool isIdentity = false;
  bool isFK = false;
  std::optional<std::string> fkEntityName;
  std::optional<std::string> fkName;
  bool isLookup = false;
  bool createLookup = false;
  bool isOVN = false;
  bool isAudited = false;
  bool isShownInList = true;
  bool isShownInEdit = true;
  bool isShownInHistory = true;
  std::optional<std::string> description;
  std::optional<std::string> defaultValue;
  std::optional<std::string> displayFormat;
  std::optional<int> numberOfRows;
  std::optional<int> numberOfCols;
  std::optional<std::string> displayNameAttr;
  LocalizedText displayNames;
  SourceLocation location;

  bool operator==(const Field&) const = default;
};

struct Constraint {
  std::string kindToken;
  std::optional<ConstraintKind> kind;
  std::string relationshipToken;
  std::optional<RelationshipOp> relationship;
  std::vector<std::string> cfields;
  LocalizedText errorMessages;
  SourceLocation location;

  bool operator==(const Constraint&) const = default;
};

struct Entity {
  std::string name;
  std::string tableName;
  Caching caching = Caching::Disabled;
  bool isAudited = false;
  bool isLogged = false;
  bool isActive = true;
  LocalizedText displayNames;
  LocalizedText pluralNames;
  std::vector<Field> fields;
  std::vector<Constraint> constraints;
  SourceLocation location;

  const Field* find_field(std::string_view field_name) const;
  const Field* primary_key() const;

  bool operator==(const Entity&) const = default;
};

struct ApplicationModel {
  Settings settings;
  std::vector<Entity> entities;
  std::vector<std::string> languages;

  bool operator==(const ApplicationModel&) const = default;
};

struct ColumnSpec {
  std::string name;
  FieldType type = FieldType::Int;
  std::optional<int> length;
  bool nullable = false;
  bool identity = false;
  bool audit = false;

  bool operator==(const ColumnSpec&) const = default;
};

/// Entity columns in declaration order, followed by the changedAt/changedBy
/// audit pair when the entity is logged. Requires every field to have a type.
std::vector<ColumnSpec> effective_columns(const Entity& entity);

/// Localized lookup with fallback: requested language, then the model's
/// default language, then the first entry, then `fallback` (usually the
/// structural name). Never returns empty text unless `fallback` is empty.
std::string resolve_localized(const LocalizedText& text, std::string_view lang,
                              const Settings& settings, std::string_view fallback);

std::string display_name(const ApplicationModel& model, const Entity& entity,
                         std::string_view lang);
std::string plural_name(const ApplicationModel& model, const Entity& entity,
                        std::string_view lang);
/// Falls back to the `displayName` attribute before the structural name.
std::string display_name(const ApplicationModel& model, const Field& field,
                         std::string_view lang);
/// Constraint error message; the structural name is e.g. "Unique(strName)".
std::string display_name(const ApplicationModel& model, const Constraint& constraint,
                         std::string_view lang);

std::string structural_name(const Constraint& constraint);

const Entity* find_entity(const ApplicationModel& model, std::string_view name);

}  // namespace sfgen
