#pragma once

// Artifact template language.
//
//   literal text
//   {{ expr }}                       output
//   {% for x in expr %} ... {% endfor %}
//   {% if expr %} ... {% elif expr %} ... {% else %} ... {% endif %}
//   {# comment #}
//
// `{{-`, `{%-` strip horizontal whitespace and at most one newline from the
// end of the preceding text; `-}}`, `-%}` do the same at the start of the
// following text.
//
// Expressions: dotted paths, 'string' or "string" literals (backslash escapes
// \\ \' \" \n \t), integers, true/false, == != < <= > >=, and/or/not, and
// calls to built-in functions. Member access on Null yields Null.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sfgen/model.hpp"

namespace sfgen::atl {

class Node;

class Value {
 public:
  enum class Kind { Null, Bool, Int, Text, Sequence, Node };
  using Sequence = std::vector<Value>;

  Value() = default;
  Value(bool b) : data_(b) {}  // NOLINT(google-explicit-constructor)
  Value(std::int64_t i) : data_(i) {}  // NOLINT
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}  // NOLINT
  Value(std::string s) : data_(std::move(s)) {}  // NOLINT
  Value(std::string_view s) : data_(std::string(s)) {}  // NOLINT
  Value(const char* s) : data_(std::string(s)) {}  // NOLINT
  Value(Sequence seq) : data_(std::make_shared<const Sequence>(std::move(seq))) {}  // NOLINT
  Value(std::shared_ptr<const Node> node) : data_(std::move(node)) {}  // NOLINT

  template <typename T>
  static Value optional(const std::optional<T>& v) {
    return v ? Value(*v) : Value();
  }

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_null() const { return kind() == Kind::Null; }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  const std::string& as_text() const { return std::get<std::string>(data_); }
  const Sequence& as_sequence() const { return *std::get<std::shared_ptr<const Sequence>>(data_); }
  const Node& as_node() const { return *std::get<std::shared_ptr<const Node>>(data_); }

  /// Null, false, 0, "" and the empty sequence are false.
  bool truthy() const;

  bool operator==(const Value& other) const;

 private:
  std::variant<std::monostate, bool, std::int64_t, std::string, std::shared_ptr<const Sequence>,
               std::shared_ptr<const Node>>
      data_;
};

std::string_view kind_name(Value::Kind kind);

/// A structured value with named members (a model element, loop metadata...).
class Node {
 public:
  virtual ~Node() = default;

  virtual std::string_view type_name() const = 0;
  /// std::nullopt when the node has no such member; Null for an absent
  /// optional attribute.
  virtual std::optional<Value> member(std::string_view name) const = 0;
  /// Localized text lookup (key is e.g. "DisplayName") with fallback.
  virtual std::optional<std::string> localized(std::string_view key,
                                               std::string_view lang) const;
  /// Identity used for equality; nodes wrapping the same element compare equal.
  virtual const void* identity() const { return this; }
};

/// Dictionary node; unknown keys read as Null.
class MapNode : public Node {
 public:
  explicit MapNode(std::map<std::string, Value, std::less<>> entries)
      : entries_(std::move(entries)) {}

  std::string_view type_name() const override { return "Map"; }
  std::optional<Value> member(std::string_view name) const override;

 private:
  std::map<std::string, Value, std::less<>> entries_;
};

struct LoopMeta {
  std::int64_t index = 1;  // 1-based
  std::int64_t length = 0;
  bool first() const { return index == 1; }
  bool last() const { return index == length; }
};

using Context = std::map<std::string, Value, std::less<>>;

// ---------------------------------------------------------------------------
// AST

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct LiteralExpr {
  Value value;
};
struct VariableExpr {
  std::string name;
};
struct MemberExpr {
  ExprPtr object;
  std::string name;
};
struct CallExpr {
  std::string function;
  std::vector<ExprPtr> args;
};
struct NotExpr {
  ExprPtr operand;
};
struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<LiteralExpr, VariableExpr, MemberExpr, CallExpr, NotExpr, BinaryExpr> node;
  SourceLocation location;
};

struct TemplateNode;
using Body = std::vector<TemplateNode>;

struct TextNode {
  std::string text;
};
struct OutputNode {
  ExprPtr expr;
};
struct ForNode {
  std::string var;
  ExprPtr sequence;
  Body body;
};
struct IfBranch {
  ExprPtr condition;
  Body body;
};
struct IfNode {
  std::vector<IfBranch> branches;
  std::optional<Body> otherwise;
};

struct TemplateNode {
  std::variant<TextNode, OutputNode, ForNode, IfNode> node;
  SourceLocation location;
};

struct TemplateAst {
  std::string name;
  Body nodes;
};

// ---------------------------------------------------------------------------
// Errors

class TemplateError : public std::runtime_error {
 public:
  TemplateError(std::string name, SourceLocation at, std::string reason);

  const std::string& template_name() const { return name_; }
  SourceLocation location() const { return location_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string name_;
  SourceLocation location_;
  std::string reason_;
};

class TemplateSyntaxError : public TemplateError {
 public:
  using TemplateError::TemplateError;
};

class TemplateRuntimeError : public TemplateError {
 public:
  using TemplateError::TemplateError;
};

// ---------------------------------------------------------------------------
// Operations

TemplateAst parse_template(std::string_view source, std::string_view name);

/// Parses a standalone expression (the text between `{{` and `}}`).
ExprPtr parse_expression(std::string_view source, std::string_view name = "<expr>");

std::string render(const TemplateAst& ast, const Context& context);

Value eval_expr(const Expr& expr, const Context& env, std::string_view template_name = "<expr>");

/// Text form used by `{{ }}`: Null -> "", Bool -> true/false, Int -> decimal.
/// Throws std::invalid_argument for sequences and nodes.
std::string to_output(const Value& value);

// Typed helpers behind the built-ins of the same name.
std::string_view sql_operator(RelationshipOp rel);
std::string_view compare_kind(FieldType type);
std::string_view compare_kind(const Field& field);
std::string sql_type(const ColumnSpec& column);

bool is_builtin(std::string_view name);

// ---------------------------------------------------------------------------
// Model adapters

Value model_value(std::shared_ptr<const ApplicationModel> model);
Value entity_value(std::shared_ptr<const ApplicationModel> model, const Entity& entity);
Value loop_value(const LoopMeta& meta);

}  // namespace sfgen::atl
