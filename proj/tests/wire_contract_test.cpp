#include "drugbus/wire_contract.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "drugbus/xml.hpp"
#include "test_support.hpp"

namespace drugbus {
namespace {

using testing::blopen_info;
using testing::kLegacyBlopenDocument;

TEST(Price, ParsesAndRendersFourDigits) {
  EXPECT_EQ(Price::parse("5.0000")->str(), "5.0000");
  EXPECT_EQ(Price::parse("5")->str(), "5.0000");
  EXPECT_EQ(Price::parse("5.5")->str(), "5.5000");
  EXPECT_EQ(Price::parse("0.0001")->units(), 1);
  EXPECT_EQ(Price::parse("12.345600")->str(), "12.3456");
  EXPECT_EQ(Price::from_units(0).str(), "0.0000");
  EXPECT_EQ(Price::from_units(1234567).str(), "123.4567");
}

TEST(Price, RejectsSignsSymbolsAndLostPrecision) {
  for (const auto* bad : {"", "-1.0000", "+1", "$5.00", "5,000.00", "1e3", ".5", "5.", "5.00001",
                          " 5", "abc", "99999999999999999999"}) {
    EXPECT_FALSE(Price::parse(bad)) << bad;
  }
}

TEST(SerializeDrugInfo, BlopenValuesInSchemaOrder) {
  EXPECT_EQ(serialize_drug_info(blopen_info()),
            "<Drug><name>Blopen Gel</name><Price>5.0000</Price><Description>Deep penetrating gel "
            "for aching joints and muscles</Description><VendorName>Zoch Pharmacy</VendorName>"
            "</Drug>");
}

TEST(SerializeDrugInfo, ZeroPriceAndEmptyDescription) {
  const auto doc = serialize_drug_info({"X", Price{}, "", "V"});
  EXPECT_NE(doc.find("<Price>0.0000</Price>"), std::string::npos);
  EXPECT_NE(doc.find("<Description></Description>"), std::string::npos);
  EXPECT_TRUE(validate_against_schema(doc));
}

TEST(SerializeDrugInfo, EscapesMarkup) {
  const DrugInfo info{"A&B <forte>", Price::from_units(1), "\"quoted\" 'single'", "V&V"};
  const auto doc = serialize_drug_info(info);
  EXPECT_EQ(doc.find("A&B"), std::string::npos);
  EXPECT_EQ(parse_drug_info(doc), info);
}

TEST(SerializeDrugInfo, LegacyVariantUsesAlphabeticalOrder) {
  const auto doc = serialize_drug_info(blopen_info(), WireVariant::legacy_alphabetical);
  const auto root = xml::parse(doc);
  std::vector<std::string> names;
  for (const auto& c : root.children) names.emplace_back(c.local_name());
  EXPECT_EQ(names, (std::vector<std::string>{"Description", "Name", "Price", "VendorName"}));
  EXPECT_EQ(parse_drug_info(doc), blopen_info());
  EXPECT_FALSE(validate_against_schema(doc));
}

TEST(ParseDrugInfo, LegacyBlopenDocument) {
  const auto info = parse_drug_info(kLegacyBlopenDocument);
  EXPECT_EQ(info.drug_name, "Blopen Gel");
  EXPECT_EQ(info.price.str(), "5.0000");
  EXPECT_EQ(info.description, "Deep penetrating gel for aching joints and muscles");
  EXPECT_EQ(info.vendor_name, "Zoch Pharmacy");
}

TEST(ParseDrugInfo, AcceptsPrefixedElements) {
  const auto doc =
      "<d:Drug xmlns:d=\"urn:x\"><d:name>A</d:name><d:Price>1.5</d:Price>"
      "<d:Description/><d:VendorName>V</d:VendorName></d:Drug>";
  EXPECT_EQ(parse_drug_info(doc), (DrugInfo{"A", Price::from_units(15000), "", "V"}));
}

TEST(ParseDrugInfo, TrimsIdentifyingFields) {
  const auto doc =
      "<Drug><name>\n  Blopen Gel \n</name><Price> 5.0000 </Price><Description>d</Description>"
      "<VendorName> Zoch Pharmacy</VendorName></Drug>";
  const auto info = parse_drug_info(doc);
  EXPECT_EQ(info.drug_name, "Blopen Gel");
  EXPECT_EQ(info.vendor_name, "Zoch Pharmacy");
}

WireErrc parse_error(std::string_view doc) {
  try {
    parse_drug_info(doc);
  } catch (const WireError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a WireError for: " << doc;
  return WireErrc::EmptyName;
}

TEST(ParseDrugInfo, ErrorPaths) {
  EXPECT_EQ(parse_error("not xml"), WireErrc::MalformedDocument);
  EXPECT_EQ(parse_error("<Drug><name>a</Name></Drug>"), WireErrc::MalformedDocument);
  EXPECT_EQ(parse_error("<Medicine><name>a</name></Medicine>"), WireErrc::MalformedDocument);
  EXPECT_EQ(parse_error("<Drug><name>a</name><Description/><VendorName>v</VendorName></Drug>"),
            WireErrc::MissingField);
  EXPECT_EQ(parse_error("<Drug><name>a</name><Price>1</Price><VendorName>v</VendorName></Drug>"),
            WireErrc::MissingField);
  EXPECT_EQ(parse_error("<Drug><name> </name><Price>1</Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::MissingField);
  EXPECT_EQ(parse_error("<Drug><name>a</name><Price>-1.0000</Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::BadPrice);
  EXPECT_EQ(parse_error("<Drug><name>a</name><Price>GHS 5</Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::BadPrice);
  EXPECT_EQ(parse_error("<Drug><name>a</name><Price></Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::BadPrice);
  EXPECT_EQ(parse_error("<Drug><name>a</name><name>b</name><Price>1</Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::MalformedDocument);
  // Only the first letter is case-insensitive.
  EXPECT_EQ(parse_error("<Drug><NAME>a</NAME><Price>1</Price><Description/>"
                        "<VendorName>v</VendorName></Drug>"),
            WireErrc::MissingField);
}

TEST(ParseDrugInfo, RoundTripAndPermutationProperty) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 300; ++i) {
    const auto info = testing::random_drug_info(rng);
    const auto doc = serialize_drug_info(info);
    ASSERT_EQ(parse_drug_info(doc), info) << doc;
    ASSERT_TRUE(validate_against_schema(doc)) << doc;

    // Any permutation of the four children parses to the same value.
    std::vector<std::string> parts = {
        "<name>" + xml::escape(info.drug_name) + "</name>",
        "<Price>" + info.price.str() + "</Price>",
        "<Description>" + xml::escape(info.description) + "</Description>",
        "<VendorName>" + xml::escape(info.vendor_name) + "</VendorName>"};
    std::shuffle(parts.begin(), parts.end(), rng);
    std::string permuted = "<Drug>";
    for (const auto& p : parts) permuted += p;
    permuted += "</Drug>";
    ASSERT_EQ(parse_drug_info(permuted), info) << permuted;
  }
}

TEST(ValidateAgainstSchema, LegacyOrderIsRejectedWithOrderDiagnostic) {
  const auto report = validate_against_schema(kLegacyBlopenDocument);
  EXPECT_FALSE(report.valid);
  const bool cites_order = std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                                       [](const auto& d) { return d.find("order") != std::string::npos; });
  EXPECT_TRUE(cites_order);
}

TEST(ValidateAgainstSchema, StructuralViolations) {
  const std::string head = "<Drug><name>a</name><Price>1</Price><Description/><VendorName>v</VendorName>";
  EXPECT_TRUE(validate_against_schema(head + "</Drug>"));
  EXPECT_FALSE(validate_against_schema(head + "<Quantity>3</Quantity></Drug>"));
  EXPECT_FALSE(validate_against_schema("<Drug><name>a</name><Price>1</Price></Drug>"));
  EXPECT_FALSE(validate_against_schema("<Drug id=\"1\"><name>a</name><Price>1</Price>"
                                       "<Description/><VendorName>v</VendorName></Drug>"));
  EXPECT_FALSE(validate_against_schema("<Drug xmlns=\"urn:other\"><name>a</name><Price>1</Price>"
                                       "<Description/><VendorName>v</VendorName></Drug>"));
  EXPECT_FALSE(validate_against_schema("<Drug>text<name>a</name><Price>1</Price>"
                                       "<Description/><VendorName>v</VendorName></Drug>"));
  EXPECT_FALSE(validate_against_schema("<Drug><name>a</name>"));
  // Whitespace between elements and namespace declarations are fine.
  EXPECT_TRUE(validate_against_schema("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<Drug "
                                      "xmlns:i=\"urn:i\">\n <name>a</name>\n <Price>1</Price>\n"
                                      " <Description/>\n <VendorName>v</VendorName>\n</Drug>"));
}

TEST(CanonicalSchema, ShippedFileMatchesEmbeddedCopy) {
  std::ifstream in(DRUGBUS_SCHEMA_PATH);
  ASSERT_TRUE(in) << DRUGBUS_SCHEMA_PATH;
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), canonical_schema());
}

TEST(EncodePathSegment, Examples) {
  EXPECT_EQ(encode_drug_path_segment("blopen gel"), "blopen%20gel");
  EXPECT_EQ(encode_drug_path_segment("aspirin"), "aspirin");
  EXPECT_EQ(encode_drug_path_segment("co-trimoxazole 480mg/5ml"), "co-trimoxazole%20480mg%2F5ml");
  EXPECT_EQ(encode_drug_path_segment("a~b_c.d"), "a~b_c.d");
  EXPECT_EQ(encode_drug_path_segment("é"), "%C3%A9");
  EXPECT_EQ(encode_drug_path_segment("100%"), "100%25");
}

TEST(EncodePathSegment, EmptyNameIsAnError) {
  try {
    encode_drug_path_segment("");
    FAIL();
  } catch (const WireError& e) {
    EXPECT_EQ(e.code(), WireErrc::EmptyName);
  }
}

TEST(DecodePathSegment, InverseAndErrors) {
  EXPECT_EQ(decode_path_segment("blopen%20gel"), "blopen gel");
  EXPECT_EQ(decode_path_segment("BLOPEN%20Gel"), "BLOPEN Gel");
  EXPECT_EQ(decode_path_segment("a%2fb"), "a/b");
  for (const auto* bad : {"%", "%2", "a%zz", "%g0"}) {
    try {
      decode_path_segment(bad);
      ADD_FAILURE() << bad;
    } catch (const WireError& e) {
      EXPECT_EQ(e.code(), WireErrc::BadEncoding);
    }
  }
}

TEST(EncodePathSegment, BijectionAndIdempotenceProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const auto len = 1 + rng() % 30;
    for (std::size_t k = 0; k < len; ++k) s += static_cast<char>(rng() % 256);
    const auto enc = encode_drug_path_segment(s);
    ASSERT_EQ(decode_path_segment(enc), s);
    ASSERT_EQ(enc.find_first_not_of(
                  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~%"),
              std::string::npos);
    const bool unreserved_only = enc == s;
    ASSERT_EQ(encode_drug_path_segment(enc) == enc, unreserved_only);
  }
}

TEST(DrugDetail, RoundTripAndLenientParse) {
  const DrugDetail detail{"Blopen Gel", 12, "12 Ring Road, Accra", {"Deep Heat Gel", "Diclofenac Gel"}};
  const auto doc = serialize_drug_detail(detail);
  EXPECT_EQ(doc,
            "<DrugDetail><name>Blopen Gel</name><Quantity>12</Quantity><VendorAddress>12 Ring "
            "Road, Accra</VendorAddress><Substitutes><Substitute>Deep Heat Gel</Substitute>"
            "<Substitute>Diclofenac Gel</Substitute></Substitutes></DrugDetail>");
  EXPECT_EQ(parse_drug_detail(doc), detail);

  const DrugDetail none{"X", 0, "", {}};
  EXPECT_EQ(parse_drug_detail(serialize_drug_detail(none)), none);
  EXPECT_THROW(parse_drug_detail("<DrugDetail><name>x</name><Quantity>-1</Quantity></DrugDetail>"),
               WireError);
  EXPECT_THROW(parse_drug_detail("<DrugDetail><name>x</name></DrugDetail>"), WireError);
}

}  // namespace
}  // namespace drugbus
