#include "drugbus/wire_contract.hpp"

#include <array>
#include <map>
#include <optional>

#include "drugbus/text.hpp"
#include "drugbus/xml.hpp"

namespace drugbus {

namespace {

constexpr std::string_view kSchema =
    R"(<?xml version="1.0" encoding="utf-8"?>
<xs:schema attributeFormDefault="unqualified" elementFormDefault="qualified" xmlns:xs="http://www.w3.org/2001/XMLSchema">
  <xs:element name="Drug">
    <xs:complexType>
      <xs:sequence>
        <xs:element name="name" />
        <xs:element name="Price" />
        <xs:element name="Description" />
        <xs:element name="VendorName" />
      </xs:sequence>
    </xs:complexType>
  </xs:element>
</xs:schema>
)";

constexpr std::array<std::string_view, 4> kCanonicalOrder = {"name", "Price", "Description",
                                                             "VendorName"};

// `name` and `Name` both match "name"; only the first letter is folded.
bool field_matches(std::string_view local, std::string_view field) {
  return local.size() == field.size() && !local.empty() &&
         text::fold(local[0]) == text::fold(field[0]) && local.substr(1) == field.substr(1);
}

xml::Element parse_root(std::string_view document, std::string_view root_name) {
  xml::Element root;
  try {
    root = xml::parse(document);
  } catch (const xml::ParseError& e) {
    throw WireError(WireErrc::MalformedDocument, std::string("not well-formed XML: ") + e.what());
  }
  if (root.local_name() != root_name) {
    throw WireError(WireErrc::MalformedDocument, "expected root element '" +
                                                     std::string(root_name) + "', found '" +
                                                     root.name + "'");
  }
  return root;
}

// Collects the text of each requested field; every field may appear at most once.
template <std::size_t N>
std::array<const xml::Element*, N> find_fields(const xml::Element& root,
                                               const std::array<std::string_view, N>& fields) {
  std::array<const xml::Element*, N> found{};
  for (const auto& child : root.children) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!field_matches(child.local_name(), fields[i])) continue;
      if (found[i]) {
        throw WireError(WireErrc::MalformedDocument,
                        "element '" + std::string(fields[i]) + "' appears more than once");
      }
      if (!child.children.empty()) {
        throw WireError(WireErrc::MalformedDocument,
                        "element '" + std::string(fields[i]) + "' must contain text only");
      }
      found[i] = &child;
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!found[i]) {
      throw WireError(WireErrc::MissingField, "missing element '" + std::string(fields[i]) + "'");
    }
  }
  return found;
}

std::string required_text(const xml::Element& el, std::string_view field) {
  auto value = std::string(text::trim(el.text));
  if (value.empty()) {
    throw WireError(WireErrc::MissingField, "element '" + std::string(field) + "' is empty");
  }
  return value;
}

bool is_unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr std::string_view kXmlnsUri = "http://www.w3.org/2000/xmlns/";

// Namespace URI of `el` given the bindings in scope; updates `scope` with the
// element's own declarations first.
std::optional<std::string> resolve_namespace(const xml::Element& el,
                                             std::map<std::string, std::string>& scope) {
  for (const auto& [key, value] : el.attributes) {
    if (key == "xmlns") {
      scope[""] = value;
    } else if (key.rfind("xmlns:", 0) == 0) {
      scope[key.substr(6)] = value;
    }
  }
  const auto colon = el.name.find(':');
  const std::string prefix = colon == std::string::npos ? "" : el.name.substr(0, colon);
  const auto it = scope.find(prefix);
  if (it == scope.end()) {
    if (prefix.empty()) return std::string{};
    return std::nullopt;
  }
  return it->second;
}

}  // namespace

std::string_view to_string(WireErrc code) {
  switch (code) {
    case WireErrc::MalformedDocument: return "MalformedDocument";
    case WireErrc::MissingField: return "MissingField";
    case WireErrc::BadPrice: return "BadPrice";
    case WireErrc::EmptyName: return "EmptyName";
    case WireErrc::BadEncoding: return "BadEncoding";
  }
  return "Unknown";
}

std::string_view canonical_schema() { return kSchema; }

std::string serialize_drug_info(const DrugInfo& info) {
  return serialize_drug_info(info, WireVariant::canonical);
}

std::string serialize_drug_info(const DrugInfo& info, WireVariant variant) {
  xml::Writer w;
  if (variant == WireVariant::canonical) {
    w.open("Drug")
        .leaf("name", info.drug_name)
        .leaf("Price", info.price.str())
        .leaf("Description", info.description)
        .leaf("VendorName", info.vendor_name)
        .close("Drug");
    return std::move(w).str();
  }
  std::string out = R"(<?xml version="1.0" encoding="utf-8"?>)";
  w.open("Drug", {{"xmlns", "http://schemas.datacontract.org/2004/07/ProjectServiceLibrary"},
                  {"xmlns:i", "http://www.w3.org/2001/XMLSchema-instance"}})
      .leaf("Description", info.description)
      .leaf("Name", info.drug_name)
      .leaf("Price", info.price.str())
      .leaf("VendorName", info.vendor_name)
      .close("Drug");
  return out + std::move(w).str();
}

DrugInfo parse_drug_info(std::string_view document) {
  const auto root = parse_root(document, "Drug");
  const auto fields = find_fields(root, kCanonicalOrder);

  DrugInfo info;
  info.drug_name = required_text(*fields[0], "name");
  const auto price_text = text::trim(fields[1]->text);
  const auto price = Price::parse(price_text);
  if (!price) {
    throw WireError(WireErrc::BadPrice, "price '" + std::string(price_text) +
                                            "' is not a non-negative decimal");
  }
  info.price = *price;
  info.description = fields[2]->text;
  info.vendor_name = required_text(*fields[3], "VendorName");
  return info;
}

SchemaReport validate_against_schema(std::string_view document) {
  SchemaReport report;
  auto& diag = report.diagnostics;
  xml::Element root;
  try {
    root = xml::parse(document);
  } catch (const xml::ParseError& e) {
    diag.push_back(std::string("not well-formed: ") + e.what());
    return report;
  }

  std::map<std::string, std::string> scope{{"xml", "http://www.w3.org/XML/1998/namespace"}};
  const auto check_element = [&](const xml::Element& el, std::string_view expected,
                                 std::map<std::string, std::string> in_scope) {
    const auto ns = resolve_namespace(el, in_scope);
    if (!ns) {
      diag.push_back("element '" + el.name + "' uses an undeclared prefix");
    } else if (!ns->empty()) {
      diag.push_back("element '" + el.name + "' is in namespace '" + *ns +
                     "' but the schema has no target namespace");
    }
    if (el.local_name() != expected) {
      diag.push_back("expected element '" + std::string(expected) + "', found '" + el.name + "'");
    }
    return in_scope;
  };

  const auto root_scope = check_element(root, "Drug", scope);
  for (const auto& [key, value] : root.attributes) {
    if (key == "xmlns" || key.rfind("xmlns:", 0) == 0) continue;
    diag.push_back("attribute '" + key + "' is not declared on 'Drug'");
  }
  if (root.has_significant_text()) diag.push_back("'Drug' must not contain character data");

  const auto& kids = root.children;
  for (std::size_t i = 0; i < kids.size() && i < kCanonicalOrder.size(); ++i) {
    if (kids[i].local_name() != kCanonicalOrder[i]) {
      diag.push_back("element order: position " + std::to_string(i + 1) + " must be '" +
                     std::string(kCanonicalOrder[i]) + "', found '" + kids[i].name + "'");
    } else {
      check_element(kids[i], kCanonicalOrder[i], root_scope);
    }
  }
  for (std::size_t i = kids.size(); i < kCanonicalOrder.size(); ++i) {
    diag.push_back("missing element '" + std::string(kCanonicalOrder[i]) + "'");
  }
  for (std::size_t i = kCanonicalOrder.size(); i < kids.size(); ++i) {
    diag.push_back("unexpected element '" + kids[i].name + "'");
  }
  // Children are untyped in the schema (xs:anyType): their content is unconstrained.
  report.valid = diag.empty();
  return report;
}

std::string encode_drug_path_segment(std::string_view drug_name) {
  if (drug_name.empty()) throw WireError(WireErrc::EmptyName, "drug name is empty");
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(drug_name.size() * 3);
  for (char ch : drug_name) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_unreserved(c)) {
      out += ch;
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string decode_path_segment(std::string_view segment) {
  std::string out;
  out.reserve(segment.size());
  for (std::size_t i = 0; i < segment.size(); ++i) {
    if (segment[i] != '%') {
      out += segment[i];
      continue;
    }
    if (i + 2 >= segment.size()) {
      throw WireError(WireErrc::BadEncoding, "truncated percent escape");
    }
    const int hi = hex_value(segment[i + 1]);
    const int lo = hex_value(segment[i + 2]);
    if (hi < 0 || lo < 0) throw WireError(WireErrc::BadEncoding, "invalid percent escape");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::string serialize_drug_detail(const DrugDetail& detail) {
  xml::Writer w;
  w.open("DrugDetail")
      .leaf("name", detail.drug_name)
      .leaf("Quantity", std::to_string(detail.quantity))
      .leaf("VendorAddress", detail.vendor_address)
      .open("Substitutes");
  for (const auto& s : detail.substitutes) w.leaf("Substitute", s);
  w.close("Substitutes").close("DrugDetail");
  return std::move(w).str();
}

DrugDetail parse_drug_detail(std::string_view document) {
  const auto root = parse_root(document, "DrugDetail");
  DrugDetail detail;
  const xml::Element* name = nullptr;
  const xml::Element* quantity = nullptr;
  const xml::Element* address = nullptr;
  const xml::Element* substitutes = nullptr;
  for (const auto& child : root.children) {
    const auto local = child.local_name();
    const xml::Element** slot = field_matches(local, "name")            ? &name
                                : field_matches(local, "Quantity")      ? &quantity
                                : field_matches(local, "VendorAddress") ? &address
                                : field_matches(local, "Substitutes")   ? &substitutes
                                                                        : nullptr;
    if (!slot) continue;
    if (*slot) {
      throw WireError(WireErrc::MalformedDocument,
                      "element '" + std::string(local) + "' appears more than once");
    }
    *slot = &child;
  }
  if (!name) throw WireError(WireErrc::MissingField, "missing element 'name'");
  if (!quantity) throw WireError(WireErrc::MissingField, "missing element 'Quantity'");
  detail.drug_name = required_text(*name, "name");

  const auto qty = text::trim(quantity->text);
  if (qty.empty() || qty.size() > 18 ||
      qty.find_first_not_of("0123456789") != std::string_view::npos) {
    throw WireError(WireErrc::MalformedDocument,
                    "quantity '" + std::string(qty) + "' is not a non-negative integer");
  }
  detail.quantity = std::stoll(std::string(qty));
  if (address) detail.vendor_address = address->text;
  if (substitutes) {
    for (const auto& s : substitutes->children) {
      if (field_matches(s.local_name(), "Substitute")) {
        detail.substitutes.emplace_back(text::trim(s.text));
      }
    }
  }
  return detail;
}

}  // namespace drugbus
