#pragma once

// Parser for the XML subset used by domain-model documents: elements,
// quoted attributes, character data, comments, an optional XML declaration
// and the five predefined entities. DOCTYPE, CDATA, processing instructions,
// character references and namespace prefixes are rejected.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfgen/model.hpp"

namespace sfgen {

struct XmlAttribute {
  std::string name;
  std::string value;
  SourceLocation location;

  bool operator==(const XmlAttribute&) const = default;
};

struct XmlNode {
  std::string tag;
  std::vector<XmlAttribute> attributes;  // document order, names unique
  std::vector<XmlNode> children;
  std::string text;  // all direct character data, concatenated
  SourceLocation location;

  const XmlAttribute* attribute(std::string_view name) const;

  bool operator==(const XmlNode&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, std::string reason);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  int line_;
  int column_;
  std::string reason_;
};

/// Parses a UTF-8 document and returns its root element. Line endings are
/// normalized to LF; columns count code points from 1.
XmlNode parse_document(std::string_view bytes);

}  // namespace sfgen
