#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drugbus/catalog.hpp"
#include "drugbus/provider.hpp"

namespace drugbus {

struct SeedOptions {
  int providers = 3;
  int drugs = 10;
  std::uint64_t rng_seed = 1;
  std::filesystem::path out_dir;
  std::string host = "127.0.0.1";
  int base_port = 8732;
  std::string base_path = "/drugservice.svc";
};

struct SeededProvider {
  std::filesystem::path config_path;
  ProviderConfig config;
  Catalog catalog;
};

/// The bundled drug-name list seed catalogs draw from.
const std::vector<std::string_view>& seed_drug_names();

/// The record every seeded tree carries in its first provider.
CatalogEntry blopen_gel_entry();

/// Writes provider-NN/{config.json,catalog.txt} for each provider and a
/// matching registry.txt. Output is a pure function of the options.
/// Throws std::invalid_argument on non-positive counts or too many drugs.
std::vector<SeededProvider> seed_fixtures(const SeedOptions& options);

}  // namespace drugbus
