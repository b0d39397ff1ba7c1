#include <algorithm>
#include <functional>

#include "sfgen/atl.hpp"

namespace sfgen::atl {

// ---------------------------------------------------------------------------
// Values

bool Value::truthy() const {
  switch (kind()) {
    case Kind::Null:
      return false;
    case Kind::Bool:
      return as_bool();
    case Kind::Int:
      return as_int() != 0;
    case Kind::Text:
      return !as_text().empty();
    case Kind::Sequence:
      return !as_sequence().empty();
    case Kind::Node:
      return true;
  }
  return false;
}

bool Value::operator==(const Value& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::Null:
      return true;
    case Kind::Bool:
      return as_bool() == other.as_bool();
    case Kind::Int:
      return as_int() == other.as_int();
    case Kind::Text:
      return as_text() == other.as_text();
    case Kind::Sequence:
      return as_sequence() == other.as_sequence();
    case Kind::Node:
      return as_node().identity() == other.as_node().identity();
  }
  return false;
}

std::string_view kind_name(Value::Kind kind) {
  switch (kind) {
    case Value::Kind::Null:
      return "Null";
    case Value::Kind::Bool:
      return "Bool";
    case Value::Kind::Int:
      return "Int";
    case Value::Kind::Text:
      return "Text";
    case Value::Kind::Sequence:
      return "Sequence";
    case Value::Kind::Node:
      return "Node";
  }
  return "?";
}

std::optional<std::string> Node::localized(std::string_view, std::string_view) const {
  return std::nullopt;
}

std::optional<Value> MapNode::member(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? Value() : it->second;
}

std::string to_output(const Value& value) {
  switch (value.kind()) {
    case Value::Kind::Null:
      return {};
    case Value::Kind::Bool:
      return value.as_bool() ? "true" : "false";
    case Value::Kind::Int:
      return std::to_string(value.as_int());
    case Value::Kind::Text:
      return value.as_text();
    default:
      throw std::invalid_argument("cannot output a " + std::string(kind_name(value.kind())));
  }
}

namespace {

class LoopNode : public Node {
 public:
  explicit LoopNode(LoopMeta meta) : meta_(meta) {}
  std::string_view type_name() const override { return "Loop"; }
  std::optional<Value> member(std::string_view name) const override {
    if (name == "index") return Value(meta_.index);
    if (name == "first") return Value(meta_.first());
    if (name == "last") return Value(meta_.last());
    if (name == "length") return Value(meta_.length);
    return std::nullopt;
  }

 private:
  LoopMeta meta_;
};

}  // namespace

Value loop_value(const LoopMeta& meta) { return Value(std::make_shared<const LoopNode>(meta)); }

// ---------------------------------------------------------------------------
// Typed helpers

std::string_view sql_operator(RelationshipOp rel) {
  switch (rel) {
    case RelationshipOp::Lt:
      return "<";
    case RelationshipOp::Le:
      return "<=";
    case RelationshipOp::Gt:
      return ">";
    case RelationshipOp::Ge:
      return ">=";
    case RelationshipOp::Neq:
      return "<>";
    case RelationshipOp::Eq:
      return "=";
  }
  return "=";
}

std::string_view compare_kind(FieldType type) { return is_date(type) ? "dates" : "strings"; }

std::string_view compare_kind(const Field& field) {
  return field.type && is_date(*field.type) ? "dates" : "strings";
}

std::string sql_type(const ColumnSpec& column) {
  std::string out(to_string(column.type));
  if (is_sized(column.type) && column.length) out += "(" + std::to_string(*column.length) + ")";
  return out;
}

namespace {

// Evaluation state shared by render and eval_expr.
class Evaluator {
 public:
  Evaluator(const Context& context, std::string_view name) : context_(context), name_(name) {}

  [[noreturn]] void fail(SourceLocation at, std::string reason) const {
    throw TemplateRuntimeError(name_, at, std::move(reason));
  }

  void push(std::string name, Value value) { scopes_.emplace_back(std::move(name), std::move(value)); }
  void pop() { scopes_.pop_back(); }

  const Value* lookup(std::string_view name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    auto it = context_.find(name);
    return it == context_.end() ? nullptr : &it->second;
  }

  Value eval(const Expr& e) {
    return std::visit([&](const auto& n) { return eval_node(n, e.location); }, e.node);
  }

  void render_body(const Body& body, std::string& out) {
    for (const TemplateNode& n : body) {
      std::visit([&](const auto& node) { render_node(node, n.location, out); }, n.node);
    }
  }

 private:
  Value eval_node(const LiteralExpr& n, SourceLocation) { return n.value; }

  Value eval_node(const VariableExpr& n, SourceLocation at) {
    if (const Value* v = lookup(n.name)) return *v;
    fail(at, "undefined variable '" + n.name + "'");
  }

  Value eval_node(const MemberExpr& n, SourceLocation at) {
    const Value object = eval(*n.object);
    if (object.is_null()) return Value();
    if (object.kind() != Value::Kind::Node) {
      fail(at, "cannot access member '" + n.name + "' of a " +
                   std::string(kind_name(object.kind())));
    }
    const Node& node = object.as_node();
    if (auto v = node.member(n.name)) return *std::move(v);
    fail(at, std::string(node.type_name()) + " has no member '" + n.name + "'");
  }

  Value eval_node(const NotExpr& n, SourceLocation) { return Value(!eval(*n.operand).truthy()); }

  Value eval_node(const BinaryExpr& n, SourceLocation at) {
    if (n.op == BinaryOp::And) return Value(eval(*n.lhs).truthy() && eval(*n.rhs).truthy());
    if (n.op == BinaryOp::Or) return Value(eval(*n.lhs).truthy() || eval(*n.rhs).truthy());
    const Value lhs = eval(*n.lhs);
    const Value rhs = eval(*n.rhs);
    if (n.op == BinaryOp::Eq) return Value(lhs == rhs);
    if (n.op == BinaryOp::Ne) return Value(!(lhs == rhs));
    if (lhs.is_null() || rhs.is_null()) return Value(false);
    int cmp = 0;
    if (lhs.kind() == Value::Kind::Int && rhs.kind() == Value::Kind::Int) {
      cmp = lhs.as_int() < rhs.as_int() ? -1 : (lhs.as_int() > rhs.as_int() ? 1 : 0);
    } else if (lhs.kind() == Value::Kind::Text && rhs.kind() == Value::Kind::Text) {
      cmp = lhs.as_text().compare(rhs.as_text());
    } else {
      fail(at, "cannot order " + std::string(kind_name(lhs.kind())) + " and " +
                   std::string(kind_name(rhs.kind())));
    }
    switch (n.op) {
      case BinaryOp::Lt:
        return Value(cmp < 0);
      case BinaryOp::Le:
        return Value(cmp <= 0);
      case BinaryOp::Gt:
        return Value(cmp > 0);
      default:
        return Value(cmp >= 0);
    }
  }

  Value eval_node(const CallExpr& n, SourceLocation at);

  void render_node(const TextNode& n, SourceLocation, std::string& out) { out += n.text; }

  void render_node(const OutputNode& n, SourceLocation at, std::string& out) {
    const Value v = eval(*n.expr);
    if (v.kind() == Value::Kind::Sequence || v.kind() == Value::Kind::Node) {
      fail(at, "cannot output a " + std::string(kind_name(v.kind())));
    }
    out += to_output(v);
  }

  void render_node(const ForNode& n, SourceLocation at, std::string& out) {
    const Value seq = eval(*n.sequence);
    if (seq.is_null()) return;
    if (seq.kind() != Value::Kind::Sequence) {
      fail(at, "cannot iterate over a " + std::string(kind_name(seq.kind())));
    }
    const auto& items = seq.as_sequence();
    const auto length = static_cast<std::int64_t>(items.size());
    for (std::int64_t i = 0; i < length; ++i) {
      push(n.var, items[static_cast<std::size_t>(i)]);
      push("loop", loop_value(LoopMeta{i + 1, length}));
      render_body(n.body, out);
      pop();
      pop();
    }
  }

  void render_node(const IfNode& n, SourceLocation, std::string& out) {
    for (const IfBranch& b : n.branches) {
      if (eval(*b.condition).truthy()) {
        render_body(b.body, out);
        return;
      }
    }
    if (n.otherwise) render_body(*n.otherwise, out);
  }

  const Context& context_;
  std::string name_;
  std::vector<std::pair<std::string, Value>> scopes_;
};

// ---------------------------------------------------------------------------
// Built-ins

using Args = std::span<const Value>;
using Builtin = std::function<Value(const Evaluator&, Args, SourceLocation)>;

const Value& arg_text(const Evaluator& ev, Args args, std::size_t i, const char* fn,
                      SourceLocation at) {
  if (args[i].kind() != Value::Kind::Text) {
    ev.fail(at, std::string(fn) + "() expects Text for argument " + std::to_string(i + 1) +
                    ", got " + std::string(kind_name(args[i].kind())));
  }
  return args[i];
}

// Reads the field-type token from a Field/Column node or a Text token.
std::optional<FieldType> type_of(const Evaluator& ev, const Value& v, const char* fn,
                                 SourceLocation at) {
  std::string token;
  if (v.kind() == Value::Kind::Text) {
    token = v.as_text();
  } else if (v.kind() == Value::Kind::Node) {
    auto t = v.as_node().member("type");
    if (!t || t->kind() != Value::Kind::Text) {
      ev.fail(at, std::string(fn) + "() expects a Field or Column");
    }
    token = t->as_text();
  } else {
    ev.fail(at, std::string(fn) + "() expects a Field or Column, got " +
                    std::string(kind_name(v.kind())));
  }
  auto type = parse_field_type(token);
  if (!type) ev.fail(at, std::string(fn) + "(): unknown field type '" + token + "'");
  return type;
}

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Escapes for a JS or JSON string literal body (quotes not included).
std::string escape_string(std::string_view s, bool json) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '"':
        out += "\\\"";
        break;
      case '\'':
        out += json ? "'" : "\\'";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static constexpr char kHex[] = "0123456789abcdef";
          out += "\\u00";
          out += kHex[(c >> 4) & 0xF];
          out += kHex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out;
}

struct BuiltinSpec {
  std::size_t arity;
  Builtin fn;
};

const std::map<std::string, BuiltinSpec, std::less<>>& builtins() {
  static const std::map<std::string, BuiltinSpec, std::less<>> table = [] {
    std::map<std::string, BuiltinSpec, std::less<>> t;
    t["sql_operator"] = {1, [](const Evaluator& ev, Args a, SourceLocation at) -> Value {
                           const auto& token = arg_text(ev, a, 0, "sql_operator", at).as_text();
                           auto rel = parse_relationship(token);
                           if (!rel) ev.fail(at, "sql_operator(): unknown relationship '" + token + "'");
                           return Value(sql_operator(*rel));
                         }};
    t["compare_kind"] = {1, [](const Evaluator& ev, Args a, SourceLocation at) -> Value {
                           return Value(compare_kind(*type_of(ev, a[0], "compare_kind", at)));
                         }};
    t["sql_type"] = {1, [](const Evaluator& ev, Args a, SourceLocation at) -> Value {
                       ColumnSpec c;
                       c.type = *type_of(ev, a[0], "sql_type", at);
                       if (a[0].kind() == Value::Kind::Node) {
                         auto len = a[0].as_node().member("length");
                         if (len && len->kind() == Value::Kind::Int) {
                           c.length = static_cast<int>(len->as_int());
                         }
                       }
                       return Value(sql_type(c));
                     }};
    t["count"] = {1, [](const Evaluator& ev, Args a, SourceLocation at) -> Value {
                    if (a[0].is_null()) return Value(0);
                    if (a[0].kind() != Value::Kind::Sequence) {
                      ev.fail(at, "count() expects a Sequence, got " +
                                      std::string(kind_name(a[0].kind())));
                    }
                    return Value(static_cast<std::int64_t>(a[0].as_sequence().size()));
                  }};
    auto map_ascii = [](int (*f)(int)) {
      return [f](const Evaluator& ev, Args a, SourceLocation at) -> Value {
        if (a[0].is_null()) return Value();
        std::string s = arg_text(ev, a, 0, "lower/upper", at).as_text();
        for (char& c : s) {
          if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(f(c));
        }
        return Value(std::move(s));
      };
    };
    t["lower"] = {1, map_ascii(::tolower)};
    t["upper"] = {1, map_ascii(::toupper)};
    t["coalesce"] = {2, [](const Evaluator&, Args a, SourceLocation) -> Value {
                       return a[0].is_null() ? a[1] : a[0];
                     }};
    t["localized"] = {3, [](const Evaluator& ev, Args a, SourceLocation at) -> Value {
                        if (a[0].kind() != Value::Kind::Node) {
                          ev.fail(at, "localized() expects a model element, got " +
                                          std::string(kind_name(a[0].kind())));
                        }
                        const std::string lang =
                            a[1].is_null() ? std::string() : arg_text(ev, a, 1, "localized", at).as_text();
                        const auto& key = arg_text(ev, a, 2, "localized", at).as_text();
                        auto text = a[0].as_node().localized(key, lang);
                        if (!text) {
                          ev.fail(at, std::string(a[0].as_node().type_name()) +
                                          " has no localized text '" + key + "'");
                        }
                        return Value(std::move(*text));
                      }};
    auto escaper = [](std::string (*f)(std::string_view)) {
      return [f](const Evaluator& ev, Args a, SourceLocation at) -> Value {
        if (a[0].is_null()) return Value("");
        if (a[0].kind() == Value::Kind::Text) return Value(f(a[0].as_text()));
        if (a[0].kind() == Value::Kind::Int || a[0].kind() == Value::Kind::Bool) {
          return Value(to_output(a[0]));
        }
        ev.fail(at, "escape functions expect Text, got " + std::string(kind_name(a[0].kind())));
      };
    };
    t["escape_html"] = {1, escaper(escape_html)};
    t["escape_js"] = {1, escaper([](std::string_view s) { return escape_string(s, false); })};
    t["escape_json"] = {1, escaper([](std::string_view s) { return escape_string(s, true); })};
    return t;
  }();
  return table;
}

Value Evaluator::eval_node(const CallExpr& n, SourceLocation at) {
  const auto& table = builtins();
  auto it = table.find(n.function);
  if (it == table.end()) fail(at, "unknown function '" + n.function + "'");
  if (n.args.size() != it->second.arity) {
    fail(at, n.function + "() takes " + std::to_string(it->second.arity) + " argument(s), got " +
                 std::to_string(n.args.size()));
  }
  std::vector<Value> args;
  args.reserve(n.args.size());
  for (const ExprPtr& a : n.args) args.push_back(eval(*a));
  return it->second.fn(*this, args, at);
}

}  // namespace

bool is_builtin(std::string_view name) { return builtins().contains(name); }

std::string render(const TemplateAst& ast, const Context& context) {
  Evaluator ev(context, ast.name);
  std::string out;
  ev.render_body(ast.nodes, out);
  return out;
}

Value eval_expr(const Expr& expr, const Context& env, std::string_view template_name) {
  Evaluator ev(env, template_name);
  return ev.eval(expr);
}

}  // namespace sfgen::atl
