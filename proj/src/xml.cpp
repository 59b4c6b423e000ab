#include "drugbus/xml.hpp"

#include <cstdint>

#include "drugbus/text.hpp"

namespace drugbus::xml {

namespace {

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element document() {
    if (doc_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    if (starts_with("<?xml") && pos_ + 5 < doc_.size() && text::is_space(doc_[pos_ + 5])) {
      skip_processing_instruction();
    }
    skip_misc();
    if (starts_with("<!DOCTYPE")) fail("document type declarations are not supported");
    if (!starts_with("<")) fail("expected root element");
    Element root = element();
    skip_misc();
    if (pos_ != doc_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < pos_ && i < doc_.size(); ++i) {
      if (doc_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, line, column);
  }

  bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }
  bool at_end() const { return pos_ >= doc_.size(); }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_space() {
    while (!at_end() && text::is_space(doc_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  void skip_processing_instruction() { skip_until("?>", "processing instruction"); }

  void skip_comment() {
    pos_ += 4;
    const auto end = doc_.find("--", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    pos_ = end;
    expect("-->");
  }

  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<?")) {
        skip_processing_instruction();
      } else {
        return;
      }
    }
  }

  std::string name() {
    const auto start = pos_;
    if (at_end() || !is_name_start(static_cast<unsigned char>(doc_[pos_]))) fail("expected a name");
    while (!at_end() && is_name_char(static_cast<unsigned char>(doc_[pos_]))) ++pos_;
    return std::string(doc_.substr(start, pos_ - start));
  }

  void reference(std::string& out) {
    const auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("malformed entity reference");
    const auto ref = doc_.substr(pos_ + 1, semi - pos_ - 1);
    if (ref == "lt") {
      out += '<';
    } else if (ref == "gt") {
      out += '>';
    } else if (ref == "amp") {
      out += '&';
    } else if (ref == "quot") {
      out += '"';
    } else if (ref == "apos") {
      out += '\'';
    } else if (ref.size() > 1 && ref[0] == '#') {
      const bool hex = ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("malformed character reference");
      std::uint32_t cp = 0;
      for (char c : digits) {
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0) fail("malformed character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      const bool allowed = cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp < 0xD800) ||
                           (cp > 0xDFFF && cp != 0xFFFE && cp != 0xFFFF);
      if (!allowed) fail("character reference to an illegal character");
      append_utf8(out, cp);
    } else {
      fail("unknown entity '&" + std::string(ref) + ";'");
    }
    pos_ = semi + 1;
  }

  std::string attribute_value() {
    if (at_end() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) fail("expected quoted attribute value");
    const char quote = doc_[pos_++];
    std::string value;
    for (;;) {
      if (at_end()) fail("unterminated attribute value");
      const char c = doc_[pos_];
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        reference(value);
      } else {
        value += c;
        ++pos_;
      }
    }
  }

  Element element() {
    if (++depth_ > 256) fail("elements nested too deeply");
    expect("<");
    Element el;
    el.name = name();
    for (;;) {
      const auto before = pos_;
      skip_space();
      if (starts_with("/>")) {
        pos_ += 2;
        --depth_;
        return el;
      }
      if (starts_with(">")) {
        ++pos_;
        break;
      }
      if (pos_ == before) fail("expected whitespace before attribute");
      auto attr_name = name();
      skip_space();
      expect("=");
      skip_space();
      auto value = attribute_value();
      for (const auto& [existing, _] : el.attributes) {
        if (existing == attr_name) fail("duplicate attribute '" + attr_name + "'");
      }
      el.attributes.emplace_back(std::move(attr_name), std::move(value));
    }
    content(el);
    expect("</");
    const auto closing = name();
    if (closing != el.name) fail("closing tag '" + closing + "' does not match '" + el.name + "'");
    skip_space();
    expect(">");
    --depth_;
    return el;
  }

  void content(Element& el) {
    for (;;) {
      if (at_end()) fail("unexpected end of document inside '" + el.name + "'");
      if (starts_with("</")) return;
      if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        el.text.append(doc_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_processing_instruction();
      } else if (starts_with("<!")) {
        fail("unexpected markup declaration");
      } else if (starts_with("<")) {
        el.children.push_back(element());
      } else if (doc_[pos_] == '&') {
        reference(el.text);
      } else {
        el.text += doc_[pos_++];
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

bool Element::has_significant_text() const { return !text::trim(text).empty(); }

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

Element parse(std::string_view document) { return Parser(document).document(); }

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

Writer& Writer::open(std::string_view name) {
  out_ += '<';
  out_ += name;
  out_ += '>';
  return *this;
}

Writer& Writer::open(std::string_view name,
                     std::initializer_list<std::pair<std::string_view, std::string_view>> attrs) {
  out_ += '<';
  out_ += name;
  for (const auto& [key, value] : attrs) {
    out_ += ' ';
    out_ += key;
    out_ += "=\"";
    out_ += escape(value);
    out_ += '"';
  }
  out_ += '>';
  return *this;
}

Writer& Writer::close(std::string_view name) {
  out_ += "</";
  out_ += name;
  out_ += '>';
  return *this;
}

Writer& Writer::leaf(std::string_view name, std::string_view text) {
  open(name);
  out_ += escape(text);
  return close(name);
}

}  // namespace drugbus::xml
