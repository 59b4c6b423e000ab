#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "drugbus/error.hpp"
#include "drugbus/price.hpp"

namespace drugbus {

enum class WireErrc {
  MalformedDocument,
  MissingField,
  BadPrice,
  EmptyName,
  BadEncoding,
};

std::string_view to_string(WireErrc code);

using WireError = Error<WireErrc>;

/// One vendor's offer for a drug: the unit of result exchange on the bus.
struct DrugInfo {
  std::string drug_name;
  Price price;
  std::string description;
  std::string vendor_name;

  friend bool operator==(const DrugInfo&, const DrugInfo&) = default;
};

/// Follow-up information a consumer can request for one vendor's drug.
struct DrugDetail {
  std::string drug_name;
  long long quantity = 0;
  std::string vendor_address;
  std::vector<std::string> substitutes;

  friend bool operator==(const DrugDetail&, const DrugDetail&) = default;
};

/// Provider response layouts. Canonical follows the schema sequence
/// (name, Price, Description, VendorName); the legacy layout is the
/// alphabetical data-contract ordering with a capitalized `Name`.
enum class WireVariant { canonical, legacy_alphabetical };

/// Canonical `Drug` document, no XML declaration, no whitespace between elements.
std::string serialize_drug_info(const DrugInfo& info);

std::string serialize_drug_info(const DrugInfo& info, WireVariant variant);

/// Lenient reader: namespaces ignored, children matched by local name
/// (first letter case-insensitive), any order.
DrugInfo parse_drug_info(std::string_view document);

struct SchemaReport {
  bool valid = false;
  std::vector<std::string> diagnostics;

  explicit operator bool() const { return valid; }
};

/// Structural check against the canonical schema: root `Drug` holding exactly
/// `name`, `Price`, `Description`, `VendorName` in that order, text-only.
SchemaReport validate_against_schema(std::string_view document);

/// The canonical schema shipped with the project.
std::string_view canonical_schema();

/// Percent-encodes every byte outside ALPHA / DIGIT / "-" / "." / "_" / "~".
std::string encode_drug_path_segment(std::string_view drug_name);

/// Inverse of encode_drug_path_segment. Throws BadEncoding on a truncated or
/// non-hex escape.
std::string decode_path_segment(std::string_view segment);

std::string serialize_drug_detail(const DrugDetail& detail);

DrugDetail parse_drug_detail(std::string_view document);

}  // namespace drugbus
