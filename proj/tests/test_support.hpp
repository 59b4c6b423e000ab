#pragma once

// Shared fixtures and independent oracles for the unit and acceptance suites.
// Oracles here deliberately avoid the library's own helpers for the logic
// they check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "drugbus/catalog.hpp"
#include "drugbus/esb.hpp"
#include "drugbus/provider.hpp"
#include "drugbus/query_log.hpp"
#include "drugbus/registry.hpp"
#include "drugbus/wire_contract.hpp"

namespace drugbus::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("drugbus-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline const std::string kBlopenDescription = "Deep penetrating gel for aching joints and muscles";

inline DrugInfo blopen_info() {
  return {"Blopen Gel", Price::from_units(50000), kBlopenDescription, "Zoch Pharmacy"};
}

// A legacy-ordered response body as older .NET data-contract services emit it.
inline const std::string kLegacyBlopenDocument =
    "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
    "<Drug xmlns=\"http://schemas.datacontract.org/2004/07/ProjectServiceLibrary\" "
    "xmlns:i=\"http://www.w3.org/2001/XMLSchema-instance\">\n"
    "  <Description>Deep penetrating gel for aching joints and muscles</Description>\n"
    "  <Name>Blopen Gel</Name>\n"
    "  <Price>5.0000</Price>\n"
    "  <VendorName>Zoch Pharmacy</VendorName>\n"
    "</Drug>\n";

inline const GeoPoint kAccra{5.6037, -0.1870};
inline const GeoPoint kKumasi{6.6885, -1.6244};

// Precomputed before the build with an independent Python haversine.
inline constexpr double kAccraKumasiKm = 199.50619958185192;

/// Random text from a pool mixing ASCII, XML specials, and multi-byte UTF-8.
inline std::string random_text(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                               bool allow_edge_space = true) {
  static const std::vector<std::string> pool = {
      "a", "b", "Z", "q", "0", "7", " ", "-", ".", "_", "~", "&", "<", ">", "\"", "'",
      "%", "/", "+", "?", "#", "é", "ñ", "€", "中", "\t", "!", "(", ")", ",", "ü"};
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::string out;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) out += pool[pick(rng)];
  if (!allow_edge_space) {
    while (!out.empty() && (out.front() == ' ' || out.front() == '\t')) out.erase(out.begin());
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
    if (out.empty()) out = "x";
  }
  return out;
}

inline DrugInfo random_drug_info(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> price(0, 99'999'999);
  DrugInfo info;
  info.drug_name = random_text(rng, 1, 24, false);
  info.price = Price::from_units(rng() % 4 == 0 ? price(rng) % 100 : price(rng));
  info.description = rng() % 5 == 0 ? std::string{} : random_text(rng, 0, 60);
  info.vendor_name = random_text(rng, 1, 24, false);
  return info;
}

inline bool ascii_iequal(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = a[i];
    auto y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x + 32);
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y + 32);
    if (x != y) return false;
  }
  return true;
}

/// Linear-scan lookup oracle: first entry in file order matching ignoring case.
inline std::optional<CatalogEntry> scan_lookup(const std::vector<CatalogEntry>& entries,
                                               const std::string& name) {
  for (const auto& e : entries) {
    if (ascii_iequal(e.name, name)) return e;
  }
  return std::nullopt;
}

/// Independent haversine (atan2 form) used by the ranking oracle.
inline double oracle_distance_km(GeoPoint a, GeoPoint b) {
  const double r = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * r;
  const double dlon = (b.longitude - a.longitude) * r;
  const double h = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(a.latitude * r) * std::cos(b.latitude * r) * std::pow(std::sin(dlon / 2), 2);
  return 2 * 6371.0 * std::atan2(std::sqrt(h), std::sqrt(1 - h));
}

struct OracleHit {
  std::string drug_name;
  std::string price;  // 4-digit string
  std::string vendor;
  std::string service_id;
  double distance = 0;
};

/// Reference comparator: distance -> price -> vendor -> service id, written
/// against strings and its own distance formula. Distances within 1e-9 km
/// count as ties, matching the exact-tie rule for any realistic topology.
inline bool oracle_before(const OracleHit& a, const OracleHit& b, bool use_distance) {
  if (use_distance && std::fabs(a.distance - b.distance) > 1e-9) return a.distance < b.distance;
  const auto price_key = [](const std::string& p) {
    const auto dot = p.find('.');
    return std::make_pair(std::stoll(p.substr(0, dot)), std::stoll(p.substr(dot + 1)));
  };
  if (price_key(a.price) != price_key(b.price)) return price_key(a.price) < price_key(b.price);
  if (a.vendor != b.vendor) return a.vendor < b.vendor;
  return a.service_id < b.service_id;
}

/// Brute-force recount over raw log lines (no library parsing).
inline std::map<std::string, std::size_t> recount_by_drug(const std::vector<std::string>& lines) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto a = lines[i].find('|');
    const auto b = lines[i].find('|', a + 1);
    auto name = lines[i].substr(a + 1, b - a - 1);
    for (auto& c : name) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    ++counts[name];
  }
  return counts;
}

inline std::map<std::string, std::size_t> recount_by_region(const std::vector<std::string>& lines,
                                                            double cell) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto p = lines[i].find('|', start);
      f.push_back(lines[i].substr(start, p == std::string::npos ? std::string::npos : p - start));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    if (f[2].empty()) continue;
    const auto la = static_cast<long long>(std::floor(std::stod(f[2]) / cell));
    const auto lo = static_cast<long long>(std::floor(std::stod(f[3]) / cell));
    ++counts[std::to_string(la) + "," + std::to_string(lo)];
  }
  return counts;
}

/// Scripted in-process transport: answers from a table of canned replies,
/// optionally after a per-URL-prefix delay.
class FakeTransport final : public Transport {
 public:
  struct Route {
    FetchResult reply;
    std::chrono::milliseconds delay{0};
  };

  void set(const std::string& url_prefix, Route route) {
    std::lock_guard lock(mutex_);
    routes_[url_prefix] = std::move(route);
  }

  FetchResult get(const std::string& url, std::chrono::milliseconds timeout) const override {
    Route route;
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      bool found = false;
      for (const auto& [prefix, r] : routes_) {
        if (url.rfind(prefix, 0) == 0) {
          route = r;
          found = true;
        }
      }
      if (!found) return {FetchFailure::connect, 0, "", "no route"};
    }
    if (route.delay > timeout) {
      std::this_thread::sleep_for(timeout);
      return {FetchFailure::timeout, 0, "", "fake timeout"};
    }
    std::this_thread::sleep_for(route.delay);
    return route.reply;
  }

  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Route> routes_;
  mutable int calls_ = 0;
};

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace drugbus::testing
