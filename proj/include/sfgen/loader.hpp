#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sfgen/model.hpp"
#include "sfgen/xml.hpp"

namespace sfgen {

enum class Severity { Error, Warning, Advice };

std::string_view to_string(Severity severity);

// Stable diagnostic codes. E_* are errors, W_* warnings.
namespace diag {
inline constexpr std::string_view kParse = "E_PARSE";
inline constexpr std::string_view kBadRoot = "E_BAD_ROOT";
inline constexpr std::string_view kBadBool = "E_BAD_BOOL";
inline constexpr std::string_view kBadInt = "E_BAD_INT";
inline constexpr std::string_view kBadEnum = "E_BAD_ENUM";
inline constexpr std::string_view kDuplicateLanguage = "E_DUPLICATE_LANGUAGE";
inline constexpr std::string_view kMissingAttr = "E_MISSING_ATTR";
inline constexpr std::string_view kBadIdentifier = "E_BAD_IDENTIFIER";
inline constexpr std::string_view kBadFieldType = "E_BAD_FIELD_TYPE";
inline constexpr std::string_view kBadConstraintType = "E_BAD_CONSTRAINT_TYPE";
inline constexpr std::string_view kBadRelationship = "E_BAD_RELATIONSHIP";
inline constexpr std::string_view kDuplicateEntity = "E_DUPLICATE_ENTITY";
inline constexpr std::string_view kDuplicateTable = "E_DUPLICATE_TABLE";
inline constexpr std::string_view kDuplicateField = "E_DUPLICATE_FIELD";
inline constexpr std::string_view kNoFields = "E_NO_FIELDS";
inline constexpr std::string_view kPkCount = "E_PK_COUNT";
inline constexpr std::string_view kIdentity = "E_IDENTITY";
inline constexpr std::string_view kLength = "E_LENGTH";
inline constexpr std::string_view kRowsCols = "E_ROWS_COLS";
inline constexpr std::string_view kFkTarget = "E_FK_TARGET";
inline constexpr std::string_view kConstraintArity = "E_CONSTRAINT_ARITY";
inline constexpr std::string_view kConstraintField = "E_CONSTRAINT_FIELD";
inline constexpr std::string_view kConstraintFamily = "E_CONSTRAINT_FAMILY";
inline constexpr std::string_view kDuplicateConstraint = "E_DUPLICATE_CONSTRAINT";
inline constexpr std::string_view kDefaultLanguage = "E_DEFAULT_LANGUAGE";
inline constexpr std::string_view kUnknownElement = "W_UNKNOWN_ELEMENT";
inline constexpr std::string_view kUnknownAttr = "W_UNKNOWN_ATTR";
inline constexpr std::string_view kDuplicateSettings = "W_DUPLICATE_SETTINGS";
}  // namespace diag

struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::string message;
  std::optional<SourceLocation> location;
  std::string subject;

  bool operator==(const Diagnostic&) const = default;
};

/// "line:col: error E_CODE [subject]: message"
std::string format(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Stable order for printing: by location (unlocated first), then code.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

/// Maps the document tree onto the model. Never throws on content problems;
/// the best-effort model is returned with every problem found.
std::pair<ApplicationModel, std::vector<Diagnostic>> bind_model(const XmlNode& root);

/// Schema and cross-reference checks. Empty result means the model is valid.
std::vector<Diagnostic> validate_model(const ApplicationModel& model);

struct LoadResult {
  std::shared_ptr<const ApplicationModel> model;  // null only on parse failure
  std::vector<Diagnostic> diagnostics;            // bind + validate, sorted

  bool ok() const { return model && !has_errors(diagnostics); }
};

/// parse_document + bind_model + validate_model; a ParseError becomes an
/// E_PARSE diagnostic.
LoadResult load_model(std::string_view bytes);

}  // namespace sfgen
