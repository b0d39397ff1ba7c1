#include <cctype>

#include "sfgen/atl.hpp"

namespace sfgen::atl {

namespace {

std::string format_template_error(const std::string& name, SourceLocation at,
                                  const std::string& reason) {
  return name + ":" + std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + reason;
}

enum class Tok {
  Ident,
  Int,
  String,
  Op,  // == != < <= > >=
  LParen,
  RParen,
  Comma,
  Dot,
  Close,  // }} %} -}} -%}
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  SourceLocation location;
  bool trim = false;  // for Close
};

// Cursor over template source with line/column tracking.
class Source {
 public:
  Source(std::string_view text, std::string name) : text_(text), name_(std::move(name)) {}

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }
  std::size_t pos() const { return pos_; }
  std::string_view slice(std::size_t from, std::size_t to) const {
    return text_.substr(from, to - from);
  }
  std::size_t find(std::string_view s) const { return text_.find(s, pos_); }
  SourceLocation here() const { return {line_, column_}; }
  const std::string& name() const { return name_; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && pos_ < text_.size(); ++k) {
      const auto c = static_cast<unsigned char>(text_[pos_++]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;
      }
    }
  }

  [[noreturn]] void fail(SourceLocation at, std::string reason) const {
    throw TemplateSyntaxError(name_, at, std::move(reason));
  }

 private:
  std::string_view text_;
  std::string name_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Tokenizes the inside of one `{{ }}` / `{% %}` tag. `closer` is "}}" or
// "%}"; with `closer` empty the lexer runs to end of input.
class Lexer {
 public:
  Lexer(Source& src, std::string_view closer) : src_(src), closer_(closer) {}

  Token next() {
    while (!src_.at_end() && std::isspace(static_cast<unsigned char>(src_.peek()))) {
      src_.advance();
    }
    Token t;
    t.location = src_.here();
    if (src_.at_end()) {
      if (!closer_.empty()) src_.fail(t.location, "unterminated tag, expected '" + std::string(closer_) + "'");
      t.kind = Tok::End;
      return t;
    }
    if (!closer_.empty()) {
      if (src_.starts_with(closer_)) {
        src_.advance(closer_.size());
        t.kind = Tok::Close;
        return t;
      }
      if (src_.peek() == '-' && src_.slice(src_.pos() + 1, src_.pos() + 1 + closer_.size()) == closer_) {
        src_.advance(1 + closer_.size());
        t.kind = Tok::Close;
        t.trim = true;
        return t;
      }
    }
    const char c = src_.peek();
    if (ident_start(c)) {
      const std::size_t begin = src_.pos();
      while (ident_char(src_.peek())) src_.advance();
      t.kind = Tok::Ident;
      t.text = std::string(src_.slice(begin, src_.pos()));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(src_.peek(1))))) {
      const std::size_t begin = src_.pos();
      src_.advance();
      while (std::isdigit(static_cast<unsigned char>(src_.peek()))) src_.advance();
      t.kind = Tok::Int;
      t.text = std::string(src_.slice(begin, src_.pos()));
      try {
        t.number = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        src_.fail(t.location, "integer literal out of range");
      }
      return t;
    }
    if (c == '\'' || c == '"') return string_literal(t);
    switch (c) {
      case '(':
        src_.advance();
        t.kind = Tok::LParen;
        return t;
      case ')':
        src_.advance();
        t.kind = Tok::RParen;
        return t;
      case ',':
        src_.advance();
        t.kind = Tok::Comma;
        return t;
      case '.':
        src_.advance();
        t.kind = Tok::Dot;
        return t;
      default:
        break;
    }
    for (std::string_view op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (src_.starts_with(op)) {
        src_.advance(op.size());
        t.kind = Tok::Op;
        t.text = std::string(op);
        return t;
      }
    }
    src_.fail(t.location, std::string("unexpected character '") + c + "'");
  }

 private:
  Token string_literal(Token& t) {
    const char quote = src_.peek();
    src_.advance();
    std::string value;
    for (;;) {
      if (src_.at_end()) src_.fail(t.location, "unterminated string literal");
      const char c = src_.peek();
      if (c == quote) {
        src_.advance();
        break;
      }
      if (c == '\\') {
        const char e = src_.peek(1);
        switch (e) {
          case '\\':
          case '\'':
          case '"':
            value += e;
            break;
          case 'n':
            value += '\n';
            break;
          case 't':
            value += '\t';
            break;
          default:
            src_.fail(src_.here(), std::string("unknown escape '\\") + e + "'");
        }
        src_.advance(2);
        continue;
      }
      value += c;
      src_.advance();
    }
    t.kind = Tok::String;
    t.text = std::move(value);
    return t;
  }

  Source& src_;
  std::string_view closer_;
};

ExprPtr make_expr(decltype(Expr::node) node, SourceLocation at) {
  return std::make_shared<const Expr>(Expr{std::move(node), at});
}

// Recursive-descent expression parser with one token of lookahead.
class ExprParser {
 public:
  ExprParser(Source& src, std::string_view closer) : src_(src), lexer_(src, closer) {
    current_ = lexer_.next();
  }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = std::move(current_);
    if (t.kind != Tok::Close && t.kind != Tok::End) current_ = lexer_.next();
    return t;
  }

  bool peek_keyword(std::string_view word) const {
    return current_.kind == Tok::Ident && current_.text == word;
  }

  Token expect_ident(const char* what) {
    if (current_.kind != Tok::Ident || is_reserved(current_.text)) {
      src_.fail(current_.location, std::string("expected ") + what);
    }
    return take();
  }

  ExprPtr expression() { return or_expr(); }

  static bool is_reserved(std::string_view w) {
    return w == "and" || w == "or" || w == "not" || w == "true" || w == "false" || w == "in";
  }

 private:
  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (peek_keyword("or")) {
      const SourceLocation at = take().location;
      lhs = make_expr(BinaryExpr{BinaryOp::Or, lhs, and_expr()}, at);
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (peek_keyword("and")) {
      const SourceLocation at = take().location;
      lhs = make_expr(BinaryExpr{BinaryOp::And, lhs, not_expr()}, at);
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (peek_keyword("not")) {
      const SourceLocation at = take().location;
      return make_expr(NotExpr{not_expr()}, at);
    }
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr lhs = postfix();
    if (current_.kind != Tok::Op) return lhs;
    const Token op = take();
    BinaryOp bop = BinaryOp::Eq;
    if (op.text == "==") bop = BinaryOp::Eq;
    else if (op.text == "!=") bop = BinaryOp::Ne;
    else if (op.text == "<") bop = BinaryOp::Lt;
    else if (op.text == "<=") bop = BinaryOp::Le;
    else if (op.text == ">") bop = BinaryOp::Gt;
    else bop = BinaryOp::Ge;
    ExprPtr rhs = postfix();
    if (current_.kind == Tok::Op) {
      src_.fail(current_.location, "chained comparisons are not supported; use 'and'");
    }
    return make_expr(BinaryExpr{bop, lhs, rhs}, op.location);
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (current_.kind == Tok::Dot) {
      take();
      const Token name = expect_ident("member name after '.'");
      e = make_expr(MemberExpr{e, name.text}, name.location);
    }
    return e;
  }

  ExprPtr primary() {
    const Token& t = current_;
    switch (t.kind) {
      case Tok::Int: {
        Token n = take();
        return make_expr(LiteralExpr{Value(n.number)}, n.location);
      }
      case Tok::String: {
        Token s = take();
        return make_expr(LiteralExpr{Value(std::move(s.text))}, s.location);
      }
      case Tok::LParen: {
        take();
        ExprPtr inner = expression();
        if (current_.kind != Tok::RParen) src_.fail(current_.location, "expected ')'");
        take();
        return inner;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          Token b = take();
          return make_expr(LiteralExpr{Value(b.text == "true")}, b.location);
        }
        if (is_reserved(t.text)) src_.fail(t.location, "unexpected keyword '" + t.text + "'");
        Token name = take();
        if (current_.kind != Tok::LParen) {
          return make_expr(VariableExpr{name.text}, name.location);
        }
        take();
        CallExpr call{name.text, {}};
        if (current_.kind != Tok::RParen) {
          for (;;) {
            call.args.push_back(expression());
            if (current_.kind == Tok::Comma) {
              take();
              continue;
            }
            break;
          }
        }
        if (current_.kind != Tok::RParen) src_.fail(current_.location, "expected ')' after arguments");
        take();
        return make_expr(std::move(call), name.location);
      }
      case Tok::Close:
      case Tok::End:
        src_.fail(t.location, "expected an expression");
      default:
        src_.fail(t.location, "unexpected token in expression");
    }
  }

  Source& src_;
  Lexer lexer_;
  Token current_;
};

// Flat token stream of the template before nesting.
struct Piece {
  enum class Kind { Text, Output, For, EndFor, If, Elif, Else, EndIf } kind;
  SourceLocation location;
  std::string text;  // Text: literal; For: loop variable
  ExprPtr expr;
  bool trim_left = false;
  bool trim_right = false;
};

void trim_trailing(std::string& s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (!s.empty() && s.back() == '\n') s.pop_back();
}

void trim_leading(std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (i < s.size() && s[i] == '\n') ++i;
  s.erase(0, i);
}

std::vector<Piece> scan(Source& src) {
  std::vector<Piece> pieces;
  std::string text;
  SourceLocation text_at = src.here();
  bool pending_trim = false;

  auto flush_text = [&] {
    if (pending_trim) {
      trim_leading(text);
      pending_trim = false;
    }
    if (!text.empty()) pieces.push_back(Piece{Piece::Kind::Text, text_at, std::move(text), {}});
    text.clear();
  };

  while (!src.at_end()) {
    const bool output = src.starts_with("{{");
    const bool stmt = src.starts_with("{%");
    const bool comment = src.starts_with("{#");
    if (!output && !stmt && !comment) {
      if (text.empty()) text_at = src.here();
      text += src.peek();
      src.advance();
      continue;
    }
    const SourceLocation at = src.here();
    if (comment) {
      const std::size_t end = src.find("#}");
      if (end == std::string_view::npos) src.fail(at, "unterminated comment");
      src.advance(end + 2 - src.pos());
      continue;
    }
    src.advance(2);
    bool trim_left = false;
    if (src.peek() == '-') {
      trim_left = true;
      src.advance();
    }
    if (trim_left) {
      if (pending_trim) {
        trim_leading(text);
        pending_trim = false;
      }
      trim_trailing(text);
    }
    flush_text();

    Piece piece{Piece::Kind::Output, at, {}, {}, trim_left, false};
    ExprParser parser(src, output ? "}}" : "%}");
    if (output) {
      piece.expr = parser.expression();
    } else {
      const Token kw = parser.peek();
      if (kw.kind != Tok::Ident) src.fail(kw.location, "expected a directive");
      parser.take();
      if (kw.text == "for") {
        piece.kind = Piece::Kind::For;
        piece.text = parser.expect_ident("loop variable").text;
        if (!parser.peek_keyword("in")) src.fail(parser.peek().location, "expected 'in'");
        parser.take();
        piece.expr = parser.expression();
      } else if (kw.text == "endfor") {
        piece.kind = Piece::Kind::EndFor;
      } else if (kw.text == "if") {
        piece.kind = Piece::Kind::If;
        piece.expr = parser.expression();
      } else if (kw.text == "elif") {
        piece.kind = Piece::Kind::Elif;
        piece.expr = parser.expression();
      } else if (kw.text == "else") {
        piece.kind = Piece::Kind::Else;
      } else if (kw.text == "endif") {
        piece.kind = Piece::Kind::EndIf;
      } else {
        src.fail(kw.location, "unknown directive '" + kw.text + "'");
      }
    }
    const Token close = parser.peek();
    if (close.kind != Tok::Close) {
      src.fail(close.location, output ? "expected '}}'" : "expected '%}'");
    }
    parser.take();
    piece.trim_right = close.trim;
    pending_trim = close.trim;
    pieces.push_back(std::move(piece));
    text_at = src.here();
  }
  flush_text();
  return pieces;
}

std::string_view directive_name(Piece::Kind k) {
  switch (k) {
    case Piece::Kind::For:
      return "for";
    case Piece::Kind::EndFor:
      return "endfor";
    case Piece::Kind::If:
      return "if";
    case Piece::Kind::Elif:
      return "elif";
    case Piece::Kind::Else:
      return "else";
    case Piece::Kind::EndIf:
      return "endif";
    default:
      return "";
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const Source& src, std::vector<Piece> pieces)
      : src_(src), pieces_(std::move(pieces)) {}

  Body build() {
    Body root = body_until({});
    if (pos_ < pieces_.size()) {
      const Piece& p = pieces_[pos_];
      src_.fail(p.location, "unexpected {% " + std::string(directive_name(p.kind)) + " %}");
    }
    return root;
  }

 private:
  // Consumes nodes until one of `stops` is next (not consumed) or input ends.
  Body body_until(std::initializer_list<Piece::Kind> stops) {
    Body body;
    while (pos_ < pieces_.size()) {
      Piece& p = pieces_[pos_];
      for (Piece::Kind stop : stops) {
        if (p.kind == stop) return body;
      }
      switch (p.kind) {
        case Piece::Kind::Text:
          body.push_back({TextNode{std::move(p.text)}, p.location});
          ++pos_;
          break;
        case Piece::Kind::Output:
          body.push_back({OutputNode{p.expr}, p.location});
          ++pos_;
          break;
        case Piece::Kind::For:
          body.push_back(for_node());
          break;
        case Piece::Kind::If:
          body.push_back(if_node());
          break;
        default:
          return body;  // stray closer, reported by the caller
      }
    }
    return body;
  }

  const Piece& expect_closer(const Piece& open, std::string_view want) {
    if (pos_ >= pieces_.size()) {
      src_.fail(open.location, "unclosed {% " + std::string(directive_name(open.kind)) +
                                   " %}, expected {% " + std::string(want) + " %}");
    }
    const Piece& p = pieces_[pos_];
    if (directive_name(p.kind) != want) {
      src_.fail(p.location, "mismatched {% " + std::string(directive_name(p.kind)) +
                                " %}, expected {% " + std::string(want) + " %}");
    }
    return p;
  }

  TemplateNode for_node() {
    const Piece& open = pieces_[pos_++];
    ForNode node{open.text, open.expr, body_until({Piece::Kind::EndFor})};
    expect_closer(open, "endfor");
    ++pos_;
    return {std::move(node), open.location};
  }

  TemplateNode if_node() {
    const Piece& open = pieces_[pos_++];
    IfNode node;
    node.branches.push_back(
        {open.expr, body_until({Piece::Kind::Elif, Piece::Kind::Else, Piece::Kind::EndIf})});
    while (pos_ < pieces_.size() && pieces_[pos_].kind == Piece::Kind::Elif) {
      const Piece& elif = pieces_[pos_++];
      node.branches.push_back(
          {elif.expr, body_until({Piece::Kind::Elif, Piece::Kind::Else, Piece::Kind::EndIf})});
    }
    if (pos_ < pieces_.size() && pieces_[pos_].kind == Piece::Kind::Else) {
      ++pos_;
      node.otherwise = body_until({Piece::Kind::Elif, Piece::Kind::Else, Piece::Kind::EndIf});
      if (pos_ < pieces_.size() && pieces_[pos_].kind != Piece::Kind::EndIf &&
          (pieces_[pos_].kind == Piece::Kind::Elif || pieces_[pos_].kind == Piece::Kind::Else)) {
        src_.fail(pieces_[pos_].location,
                  "{% " + std::string(directive_name(pieces_[pos_].kind)) + " %} after {% else %}");
      }
    }
    expect_closer(open, "endif");
    ++pos_;
    return {std::move(node), open.location};
  }

  const Source& src_;
  std::vector<Piece> pieces_;
  std::size_t pos_ = 0;
};

}  // namespace

TemplateError::TemplateError(std::string name, SourceLocation at, std::string reason)
    : std::runtime_error(format_template_error(name, at, reason)),
      name_(std::move(name)),
      location_(at),
      reason_(std::move(reason)) {}

TemplateAst parse_template(std::string_view source, std::string_view name) {
  Source src(source, std::string(name));
  TreeBuilder builder(src, scan(src));
  return TemplateAst{std::string(name), builder.build()};
}

ExprPtr parse_expression(std::string_view source, std::string_view name) {
  Source src(source, std::string(name));
  ExprParser parser(src, "");
  ExprPtr e = parser.expression();
  if (parser.peek().kind != Tok::End) src.fail(parser.peek().location, "unexpected trailing input");
  return e;
}

}  // namespace sfgen::atl
