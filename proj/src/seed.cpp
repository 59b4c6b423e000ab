#include "drugbus/seed.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "drugbus/registry.hpp"
#include "drugbus/text.hpp"

namespace drugbus {

namespace {

struct DrugSeed {
  std::string_view name;
  std::string_view description;
};

constexpr std::array<DrugSeed, 48> kDrugs = {{
    {"Blopen Gel", "Deep penetrating gel for aching joints and muscles"},
    {"Deep Heat Gel", "Warming rub for muscular pain and stiffness"},
    {"Paracetamol 500mg", "Tablets for mild to moderate pain and fever"},
    {"Ibuprofen 400mg", "Anti-inflammatory tablets for pain relief"},
    {"Aspirin 300mg", "Analgesic and antipyretic tablets"},
    {"Amoxicillin 500mg", "Broad-spectrum penicillin antibiotic capsules"},
    {"Artemether-Lumefantrine", "Combination therapy for uncomplicated malaria"},
    {"Artesunate-Amodiaquine", "Fixed-dose antimalarial tablets"},
    {"Quinine 300mg", "Antimalarial tablets for severe cases"},
    {"Co-trimoxazole 480mg", "Antibacterial tablets"},
    {"Metronidazole 400mg", "Antibiotic for anaerobic and protozoal infections"},
    {"Ciprofloxacin 500mg", "Fluoroquinolone antibiotic tablets"},
    {"Oral Rehydration Salts", "Electrolyte sachets for dehydration"},
    {"Zinc Sulphate 20mg", "Dispersible tablets for diarrhoea management"},
    {"Ferrous Sulphate 200mg", "Iron supplement tablets"},
    {"Folic Acid 5mg", "Vitamin B9 supplement tablets"},
    {"Vitamin C 100mg", "Ascorbic acid tablets"},
    {"Multivitamin Syrup", "Daily vitamin supplement for children"},
    {"Cough Linctus", "Soothing syrup for dry cough"},
    {"Chlorpheniramine 4mg", "Antihistamine tablets for allergies"},
    {"Loratadine 10mg", "Non-drowsy antihistamine tablets"},
    {"Salbutamol Inhaler", "Bronchodilator for asthma relief"},
    {"Omeprazole 20mg", "Proton pump inhibitor capsules"},
    {"Magnesium Trisilicate", "Antacid mixture for indigestion"},
    {"Metformin 500mg", "Oral antidiabetic tablets"},
    {"Glibenclamide 5mg", "Sulfonylurea for type 2 diabetes"},
    {"Amlodipine 5mg", "Calcium channel blocker for hypertension"},
    {"Lisinopril 10mg", "ACE inhibitor tablets"},
    {"Hydrochlorothiazide 25mg", "Diuretic tablets for hypertension"},
    {"Atenolol 50mg", "Beta blocker tablets"},
    {"Diclofenac Gel", "Topical anti-inflammatory gel"},
    {"Methyl Salicylate Balm", "Analgesic balm for muscle aches"},
    {"Clotrimazole Cream", "Antifungal cream for skin infections"},
    {"Hydrocortisone Cream", "Mild steroid cream for skin inflammation"},
    {"Gentian Violet", "Antiseptic solution"},
    {"Povidone Iodine", "Antiseptic solution for wounds"},
    {"Albendazole 400mg", "Anthelmintic chewable tablets"},
    {"Mebendazole 100mg", "Deworming tablets"},
    {"Doxycycline 100mg", "Tetracycline antibiotic capsules"},
    {"Erythromycin 250mg", "Macrolide antibiotic tablets"},
    {"Fluconazole 150mg", "Antifungal capsules"},
    {"Prednisolone 5mg", "Corticosteroid tablets"},
    {"Loperamide 2mg", "Antidiarrhoeal capsules"},
    {"Hyoscine Butylbromide", "Antispasmodic tablets for cramps"},
    {"Calamine Lotion", "Soothing lotion for itching"},
    {"Tetracycline Eye Ointment", "Antibiotic eye ointment"},
    {"Chloramphenicol Eye Drops", "Antibiotic eye drops"},
    {"Codeine Linctus", "Cough suppressant syrup"},
}};

struct Town {
  std::string_view name;
  double latitude;
  double longitude;
};

constexpr std::array<Town, 10> kTowns = {{
    {"Accra", 5.6037, -0.1870},
    {"Kumasi", 6.6885, -1.6244},
    {"Tamale", 9.4008, -0.8393},
    {"Takoradi", 4.8845, -1.7554},
    {"Cape Coast", 5.1053, -1.2466},
    {"Ho", 6.6008, 0.4713},
    {"Koforidua", 6.0941, -0.2591},
    {"Sunyani", 7.3349, -2.3123},
    {"Tema", 5.6698, -0.0166},
    {"Bolgatanga", 10.7856, -0.8514},
}};

constexpr std::array<std::string_view, 12> kVendorStems = {
    "Korle", "Adabraka", "Osu", "Kejetia", "Labone", "Asylum Down",
    "Nima", "Dansoman", "Madina", "Achimota", "Kaneshie", "Tesano",
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Modulo mapping keeps output identical across standard libraries.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

std::string padded(int i) {
  auto s = std::to_string(i);
  if (s.size() < 2) s.insert(0, 1, '0');
  return s;
}

CatalogEntry random_entry(const DrugSeed& drug, Rng& rng) {
  CatalogEntry e;
  e.name = std::string(drug.name);
  e.description = std::string(drug.description);
  e.selling_price = Price::from_units(static_cast<std::int64_t>(10000 + rng.below(990000)));
  e.quantity = rng.below(10) == 0 ? 0 : static_cast<long long>(1 + rng.below(120));
  const auto subs = rng.below(3);
  for (std::uint64_t k = 0; k < subs; ++k) {
    const auto& candidate = kDrugs[rng.below(kDrugs.size())].name;
    bool clash = text::iequals(candidate, e.name);
    for (const auto& s : e.substitutes) clash = clash || text::iequals(s, candidate);
    if (!clash) e.substitutes.emplace_back(candidate);
  }
  return e;
}

}  // namespace

const std::vector<std::string_view>& seed_drug_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const auto& d : kDrugs) out.push_back(d.name);
    return out;
  }();
  return names;
}

CatalogEntry blopen_gel_entry() {
  return {"Blopen Gel", "Deep penetrating gel for aching joints and muscles",
          Price::from_units(50000), 12, {"Deep Heat Gel"}};
}

std::vector<SeededProvider> seed_fixtures(const SeedOptions& options) {
  if (options.providers <= 0) throw std::invalid_argument("--providers must be positive");
  if (options.drugs <= 0) throw std::invalid_argument("--drugs must be positive");
  if (options.drugs > static_cast<int>(kDrugs.size())) {
    throw std::invalid_argument("--drugs may not exceed " + std::to_string(kDrugs.size()));
  }
  if (options.base_port <= 0 || options.base_port + options.providers - 1 > 65535) {
    throw std::invalid_argument("--base-port leaves no room for every provider");
  }
  if (options.rng_seed == 0) throw std::invalid_argument("--rng-seed must be positive");

  Rng rng(options.rng_seed);
  std::filesystem::create_directories(options.out_dir);
  std::vector<SeededProvider> seeded;
  std::vector<ServiceRegistration> registrations;

  for (int i = 1; i <= options.providers; ++i) {
    const auto dir = options.out_dir / ("provider-" + padded(i));
    std::filesystem::create_directories(dir);

    const auto& town = kTowns[static_cast<std::size_t>(i - 1) % kTowns.size()];
    ProviderConfig config;
    if (i == 1) {
      config.vendor_name = "Zoch Pharmacy";
      config.location = {town.latitude, town.longitude};
    } else {
      config.vendor_name = std::string(kVendorStems[rng.below(kVendorStems.size())]) + " " +
                           std::string(town.name) + " Pharmacy " + std::to_string(i);
      // Up to 0.05 degrees of jitter around the town centre. Working in whole
      // 1e-4 steps keeps the coordinates short when written out.
      const auto jittered = [&](double degrees) {
        const auto steps = std::llround(degrees * 10000.0) +
                           static_cast<long long>(rng.below(1001)) - 500;
        return static_cast<double>(steps) / 10000.0;
      };
      const double lat = jittered(town.latitude);
      config.location = {lat, jittered(town.longitude)};
    }
    config.vendor_address = std::to_string(1 + rng.below(200)) + " High Street, " +
                            std::string(town.name);
    config.listen_host = options.host;
    config.listen_port = options.base_port + i - 1;
    config.base_path = options.base_path;
    config.catalog_path = "catalog.txt";
    config.response_variant = i % 2 == 0 ? WireVariant::legacy_alphabetical : WireVariant::canonical;

    // Partial Fisher-Yates over the word list picks distinct drugs.
    std::vector<std::size_t> order(kDrugs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::vector<CatalogEntry> entries;
    if (i == 1) {
      entries.push_back(blopen_gel_entry());
      order.erase(order.begin());  // Blopen Gel is index 0
    }
    for (std::size_t k = 0; entries.size() < static_cast<std::size_t>(options.drugs); ++k) {
      const auto pick = k + rng.below(order.size() - k);
      std::swap(order[k], order[pick]);
      entries.push_back(random_entry(kDrugs[order[k]], rng));
    }
    Catalog catalog(std::move(entries));

    save_catalog(catalog, dir / "catalog.txt");
    save_provider_config(config, dir / "config.json");

    ServiceRegistration reg;
    reg.service_id = "svc-" + std::string(6 - padded(i).size(), '0') + padded(i);
    reg.vendor_name = config.vendor_name;
    reg.base_url = "http://" + options.host + ":" + std::to_string(config.listen_port) +
                   options.base_path;
    reg.location = config.location;
    reg.status = ServiceStatus::active;
    reg.registered_at = parse_rfc3339("2000-01-01T00:00:00Z").value() + std::chrono::seconds(i - 1);
    registrations.push_back(reg);

    config.catalog_path = dir / "catalog.txt";
    seeded.push_back({dir / "config.json", config, std::move(catalog)});
  }

  std::ofstream out(options.out_dir / "registry.txt", std::ios::binary | std::ios::trunc);
  out << format_registry(registrations);
  if (!out) throw std::runtime_error("cannot write registry under " + options.out_dir.string());
  return seeded;
}

}  // namespace drugbus
