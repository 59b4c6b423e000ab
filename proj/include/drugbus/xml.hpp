#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/// Minimal strict XML 1.0 reader and writer, sized for the small POX documents
/// exchanged on the bus. DTDs are rejected outright.
namespace drugbus::xml {

struct Element {
  std::string name;  // as written, possibly prefixed
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenation of all direct character data

  std::string_view local_name() const {
    const auto colon = name.find(':');
    return colon == std::string::npos ? std::string_view(name)
                                      : std::string_view(name).substr(colon + 1);
  }

  bool has_significant_text() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a complete document and returns its root element.
Element parse(std::string_view document);

std::string escape(std::string_view text);

/// Appends compact markup (no indentation) to an internal buffer.
class Writer {
 public:
  Writer& open(std::string_view name);
  Writer& close(std::string_view name);
  Writer& leaf(std::string_view name, std::string_view text);
  Writer& open(std::string_view name,
               std::initializer_list<std::pair<std::string_view, std::string_view>> attrs);

  const std::string& str() const& { return out_; }
  std::string str() && { return std::move(out_); }

 private:
  std::string out_;
};

}  // namespace drugbus::xml
