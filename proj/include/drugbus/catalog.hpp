#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drugbus/error.hpp"
#include "drugbus/price.hpp"

namespace drugbus {

enum class CatalogErrc { FileUnreadable, ParseError, DuplicateName };

std::string_view to_string(CatalogErrc code);

class CatalogError : public Error<CatalogErrc> {
 public:
  CatalogError(CatalogErrc code, const std::string& message, std::size_t line = 0)
      : Error(code, message), line_(line) {}

  /// 1-based line of the offending record, 0 when not line-specific.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A provider's internal drug record.
struct CatalogEntry {
  std::string name;
  std::string description;
  Price selling_price;
  long long quantity = 0;
  std::vector<std::string> substitutes;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

inline constexpr std::string_view kCatalogHeader = "name|description|selling_price|quantity|substitutes";

/// Immutable list of entries in file order, unique by case-insensitive name.
class Catalog {
 public:
  Catalog() = default;

  /// Throws DuplicateName if two entries collide case-insensitively.
  explicit Catalog(std::vector<CatalogEntry> entries);

  /// Builds a catalog without the uniqueness check; used to exercise the
  /// first-match rule on deliberately corrupted data.
  static Catalog unchecked(std::vector<CatalogEntry> entries);

  /// First entry, in file order, whose name equals `name` ignoring ASCII case.
  const CatalogEntry* find(std::string_view name) const;

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<CatalogEntry> entries_;
};

Catalog parse_catalog(std::string_view content);

Catalog load_catalog(const std::filesystem::path& path);

std::string format_catalog(const Catalog& catalog);

void save_catalog(const Catalog& catalog, const std::filesystem::path& path);

}  // namespace drugbus
