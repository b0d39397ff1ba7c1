#include "sfgen/xml.hpp"

#include <algorithm>

namespace sfgen {

namespace {

std::string format_parse_error(int line, int column, const std::string& reason) {
  return std::to_string(line) + ":" + std::to_string(column) + ": " + reason;
}

// Normalizes CRLF and lone CR to LF and checks UTF-8 well-formedness.
std::string normalize_input(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  if (in.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < in.size()) {
    const auto c = static_cast<unsigned char>(in[i]);
    if (c == '\r') {
      out += '\n';
      i += (i + 1 < in.size() && in[i + 1] == '\n') ? 2 : 1;
      ++line;
      column = 1;
      continue;
    }
    if (c == '\n') {
      out += '\n';
      ++i;
      ++line;
      column = 1;
      continue;
    }
    std::size_t len = 1;
    std::uint32_t min_cp = 0;
    std::uint32_t cp = c;
    if (c >= 0x80) {
      if ((c & 0xE0) == 0xC0) {
        len = 2, min_cp = 0x80, cp = c & 0x1F;
      } else if ((c & 0xF0) == 0xE0) {
        len = 3, min_cp = 0x800, cp = c & 0x0F;
      } else if ((c & 0xF8) == 0xF0) {
        len = 4, min_cp = 0x10000, cp = c & 0x07;
      } else {
        throw ParseError(line, column, "invalid UTF-8 byte");
      }
      if (i + len > in.size()) throw ParseError(line, column, "truncated UTF-8 sequence");
      for (std::size_t k = 1; k < len; ++k) {
        const auto cc = static_cast<unsigned char>(in[i + k]);
        if ((cc & 0xC0) != 0x80) throw ParseError(line, column, "invalid UTF-8 sequence");
        cp = (cp << 6) | (cc & 0x3F);
      }
      if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        throw ParseError(line, column, "invalid UTF-8 sequence");
      }
    } else if (c < 0x20 && c != '\t') {
      throw ParseError(line, column, "control character not allowed");
    }
    out.append(in.substr(i, len));
    i += len;
    ++column;
  }
  return out;
}

bool is_name_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n'; }

class Parser {
 public:
  explicit Parser(std::string src) : src_(std::move(src)) {}

  XmlNode parse() {
    if (starts_with("<?xml") && pos_ + 5 < src_.size() && is_space(src_[pos_ + 5])) {
      skip_declaration();
    }
    skip_misc();
    if (at_end()) fail(here(), "no root element");
    if (peek() != '<') fail(here(), "text before root element");
    XmlNode root = parse_element();
    skip_misc();
    if (!at_end()) {
      if (peek() == '<') fail(here(), "more than one root element");
      fail(here(), "text after root element");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(SourceLocation at, std::string reason) const {
    throw ParseError(at.line, at.column, std::move(reason));
  }

  SourceLocation here() const { return {line_, column_}; }
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(std::string_view s) const {
    return std::string_view(src_).substr(pos_, s.size()) == s;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k) {
      const auto c = static_cast<unsigned char>(src_[pos_++]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;
      }
    }
  }

  void skip_space() {
    while (!at_end() && is_space(peek())) advance();
  }

  void skip_declaration() {
    const SourceLocation start = here();
    const std::size_t end = src_.find("?>", pos_);
    if (end == std::string::npos) fail(start, "unterminated XML declaration");
    advance(end + 2 - pos_);
  }

  void skip_comment() {
    const SourceLocation start = here();
    const std::size_t end = src_.find("-->", pos_ + 4);
    if (end == std::string::npos) fail(start, "unterminated comment");
    advance(end + 3 - pos_);
  }

  // Whitespace and comments outside the root element.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<?")) {
        fail(here(), "processing instructions are not supported");
      } else if (starts_with("<!")) {
        fail(here(), starts_with("<!DOCTYPE") ? "DOCTYPE is not supported"
                                              : "markup declarations are not supported");
      } else {
        return;
      }
    }
  }

  std::string parse_name(const char* what) {
    const SourceLocation start = here();
    if (at_end() || !is_name_start(static_cast<unsigned char>(peek()))) {
      fail(start, std::string("expected ") + what);
    }
    const std::size_t begin = pos_;
    while (!at_end() && is_name_char(static_cast<unsigned char>(peek()))) advance();
    if (!at_end() && peek() == ':') fail(start, "namespace prefixes are not supported");
    return src_.substr(begin, pos_ - begin);
  }

  // Decodes one entity reference at `&`, appending to `out`.
  void parse_reference(std::string& out) {
    const SourceLocation start = here();
    if (starts_with("&#")) fail(start, "character references are not supported");
    const std::size_t semi = src_.find(';', pos_);
    const std::size_t limit = std::min(src_.size(), pos_ + 32);
    if (semi == std::string::npos || semi > limit) fail(start, "malformed entity reference");
    const std::string_view name = std::string_view(src_).substr(pos_ + 1, semi - pos_ - 1);
    if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "amp") {
      out += '&';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else {
      fail(start, "undefined entity &" + std::string(name) + ";");
    }
    advance(semi + 1 - pos_);
  }

  std::string parse_attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail(here(), "expected quoted attribute value");
    const char quote = peek();
    const SourceLocation start = here();
    advance();
    std::string value;
    for (;;) {
      if (at_end()) fail(start, "unterminated attribute value");
      const char c = peek();
      if (c == quote) {
        advance();
        return value;
      }
      if (c == '<') fail(here(), "'<' not allowed in attribute value");
      if (c == '&') {
        parse_reference(value);
        continue;
      }
      value += (c == '\n' || c == '\t') ? ' ' : c;
      advance();
    }
  }

  // Parses `<name attrs...` up to and including `>` or `/>`.
  // Returns true when the element is self-closing.
  bool parse_start_tag(XmlNode& node) {
    node.location = here();
    advance();  // '<'
    node.tag = parse_name("element name");
    for (;;) {
      const bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail(node.location, "unterminated start tag <" + node.tag + ">");
      if (starts_with("/>")) {
        advance(2);
        return true;
      }
      if (peek() == '>') {
        advance();
        return false;
      }
      if (!had_space) fail(here(), "expected whitespace before attribute");
      XmlAttribute attr;
      attr.location = here();
      attr.name = parse_name("attribute name");
      if (attr.name == "xmlns") fail(attr.location, "namespace declarations are not supported");
      skip_space();
      if (at_end() || peek() != '=') fail(here(), "expected '=' after attribute name");
      advance();
      skip_space();
      attr.value = parse_attribute_value();
      if (node.attribute(attr.name)) {
        fail(attr.location, "duplicate attribute '" + attr.name + "'");
      }
      node.attributes.push_back(std::move(attr));
    }
  }

  void parse_end_tag(const XmlNode& open) {
    const SourceLocation start = here();
    advance(2);  // '</'
    const std::string name = parse_name("element name");
    skip_space();
    if (at_end() || peek() != '>') fail(here(), "expected '>' in end tag");
    advance();
    if (name != open.tag) {
      fail(start, "mismatched end tag </" + name + ">, expected </" + open.tag + ">");
    }
  }

  XmlNode parse_element() {
    std::vector<XmlNode> stack;
    {
      XmlNode root;
      if (parse_start_tag(root)) return root;
      stack.push_back(std::move(root));
    }
    for (;;) {
      if (at_end()) {
        const XmlNode& open = stack.back();
        fail(open.location, "unclosed element <" + open.tag + ">");
      }
      const char c = peek();
      if (c == '<') {
        if (starts_with("<!--")) {
          skip_comment();
        } else if (starts_with("<![CDATA[")) {
          fail(here(), "CDATA sections are not supported");
        } else if (starts_with("<!")) {
          fail(here(), "markup declarations are not supported");
        } else if (starts_with("<?")) {
          fail(here(), "processing instructions are not supported");
        } else if (starts_with("</")) {
          parse_end_tag(stack.back());
          XmlNode done = std::move(stack.back());
          stack.pop_back();
          if (stack.empty()) return done;
          stack.back().children.push_back(std::move(done));
        } else {
          XmlNode child;
          if (parse_start_tag(child)) {
            stack.back().children.push_back(std::move(child));
          } else {
            stack.push_back(std::move(child));
          }
        }
      } else if (c == '&') {
        parse_reference(stack.back().text);
      } else {
        stack.back().text += c;
        advance();
      }
    }
  }

  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

const XmlAttribute* XmlNode::attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

ParseError::ParseError(int line, int column, std::string reason)
    : std::runtime_error(format_parse_error(line, column, reason)),
      line_(line),
      column_(column),
      reason_(std::move(reason)) {}

XmlNode parse_document(std::string_view bytes) {
  return Parser(normalize_input(bytes)).parse();
}

}  // namespace sfgen
