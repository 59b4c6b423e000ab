#include "drugbus/catalog.hpp"

#include <fstream>
#include <sstream>

#include "drugbus/text.hpp"

namespace drugbus {

namespace {

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw CatalogError(CatalogErrc::ParseError, "line " + std::to_string(line) + ": " + why, line);
}

bool is_canonical_price(std::string_view s) {
  const auto dot = s.find('.');
  return dot != std::string_view::npos && dot > 0 && s.size() - dot - 1 == Price::kDigits;
}

CatalogEntry parse_row(std::string_view row, std::size_t line) {
  const auto fields = text::split(row, '|');
  if (fields.size() != 5) {
    bad_row(line, "expected 5 '|'-separated fields, found " + std::to_string(fields.size()));
  }
  CatalogEntry entry;
  entry.name = std::string(text::trim(fields[0]));
  if (entry.name.empty()) bad_row(line, "empty name");
  entry.description = fields[1];

  const auto price = Price::parse(fields[2]);
  if (!price || !is_canonical_price(fields[2])) {
    bad_row(line, "selling_price '" + fields[2] + "' must be a decimal with 4 fractional digits");
  }
  entry.selling_price = *price;

  const auto& qty = fields[3];
  if (qty.empty() || qty.size() > 18 || qty.find_first_not_of("0123456789") != std::string::npos) {
    bad_row(line, "quantity '" + qty + "' is not a non-negative integer");
  }
  entry.quantity = std::stoll(qty);

  if (!fields[4].empty()) {
    for (const auto& raw : text::split(fields[4], ';')) {
      auto sub = std::string(text::trim(raw));
      if (sub.empty()) bad_row(line, "empty substitute name");
      if (text::iequals(sub, entry.name)) bad_row(line, "drug lists itself as a substitute");
      for (const auto& existing : entry.substitutes) {
        if (text::iequals(existing, sub)) bad_row(line, "duplicate substitute '" + sub + "'");
      }
      entry.substitutes.push_back(std::move(sub));
    }
  }
  return entry;
}

void check_unique(const std::vector<CatalogEntry>& entries,
                  const std::vector<std::size_t>* lines = nullptr) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (text::iequals(entries[i].name, entries[j].name)) {
        throw CatalogError(CatalogErrc::DuplicateName,
                           "duplicate drug name '" + entries[i].name + "'",
                           lines ? (*lines)[i] : 0);
      }
    }
  }
}

}  // namespace

std::string_view to_string(CatalogErrc code) {
  switch (code) {
    case CatalogErrc::FileUnreadable: return "FileUnreadable";
    case CatalogErrc::ParseError: return "ParseError";
    case CatalogErrc::DuplicateName: return "DuplicateName";
  }
  return "Unknown";
}

Catalog::Catalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  check_unique(entries_);
}

Catalog Catalog::unchecked(std::vector<CatalogEntry> entries) {
  Catalog c;
  c.entries_ = std::move(entries);
  return c;
}

const CatalogEntry* Catalog::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (text::iequals(e.name, name)) return &e;
  }
  return nullptr;
}

Catalog parse_catalog(std::string_view content) {
  auto lines = text::split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  if (lines.empty() || lines.front() != kCatalogHeader) {
    bad_row(1, "expected header '" + std::string(kCatalogHeader) + "'");
  }
  std::vector<CatalogEntry> entries;
  std::vector<std::size_t> line_numbers;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    entries.push_back(parse_row(lines[i], i + 1));
    line_numbers.push_back(i + 1);
  }
  check_unique(entries, &line_numbers);
  return Catalog::unchecked(std::move(entries));
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CatalogError(CatalogErrc::FileUnreadable, "cannot read catalog '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_catalog(buf.str());
  } catch (const CatalogError& e) {
    throw CatalogError(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

std::string format_catalog(const Catalog& catalog) {
  std::string out(kCatalogHeader);
  out += '\n';
  for (const auto& e : catalog.entries()) {
    out += e.name + '|' + e.description + '|' + e.selling_price.str() + '|' +
           std::to_string(e.quantity) + '|' + text::join(e.substitutes, ";") + '\n';
  }
  return out;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CatalogError(CatalogErrc::FileUnreadable, "cannot write catalog '" + path.string() + "'");
  }
  out << format_catalog(catalog);
}

}  // namespace drugbus
