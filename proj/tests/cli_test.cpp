#include "drugbus/cli.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "drugbus/seed.hpp"
#include "test_support.hpp"

namespace drugbus {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"registry"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"registry", "add", "--registry", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"search", "--drug", "x", "--at", "nope"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"search", "--drug", " "}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, RegistryLifecycle) {
  testing::TempDir dir;
  const auto reg = (dir / "registry.txt").string();
  auto r = run({"registry", "add", "--registry", reg, "--vendor", "Zoch Pharmacy", "--url",
                "http://localhost:8732", "--lat", "5.6037", "--lon", "-0.1870"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("registered svc-000001 Zoch Pharmacy"), std::string::npos);

  r = run({"registry", "list", "--registry", reg, "--porcelain"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.rfind('|')),
            "svc-000001|Zoch Pharmacy|http://localhost:8732|5.6037|-0.187|active");

  EXPECT_EQ(run({"registry", "add", "--registry", reg, "--vendor", "Dup", "--url",
                 "http://localhost:8732", "--lat", "0", "--lon", "0"})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run({"registry", "add", "--registry", reg, "--vendor", "Far", "--url", "http://h:1",
                 "--lat", "100", "--lon", "0"})
                .code,
            cli::kExitUsage);

  EXPECT_EQ(run({"registry", "suspend", "--registry", reg, "--id", "svc-000001"}).out,
            "svc-000001 suspended\n");
  EXPECT_EQ(run({"registry", "resume", "--registry", reg, "--id", "svc-000001"}).out,
            "svc-000001 active\n");
  EXPECT_EQ(run({"registry", "suspend", "--registry", reg, "--id", "svc-000404"}).code,
            cli::kExitUsage);

  r = run({"registry", "probe", "--registry", reg, "--id", "svc-000001"});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.out.find("unreachable"), std::string::npos);

  EXPECT_EQ(run({"registry", "remove", "--registry", reg, "--id", "svc-000001"}).code, 0);
  EXPECT_EQ(run({"registry", "list", "--registry", reg, "--porcelain"}).out, "");
  EXPECT_EQ(run({"registry", "list", "--registry", (dir / "none.txt").string()}).code,
            cli::kExitRuntime);
}

TEST(Cli, SearchAgainstUnreachableBus) {
  const auto r = run({"search", "--drug", "x", "--bus", "http://127.0.0.1:1"});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("cannot reach bus"), std::string::npos);
}

TEST(Seed, RejectsNonPositiveCounts) {
  testing::TempDir dir;
  EXPECT_EQ(run({"seed", "--providers", "0", "--out", dir.path().string()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"seed", "--drugs", "-1", "--out", dir.path().string()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"seed", "--drugs", "49", "--out", dir.path().string()}).code, cli::kExitUsage);
}

TEST(Seed, SmallestTreeHasBlopenGel) {
  testing::TempDir dir;
  ASSERT_EQ(run({"seed", "--providers", "1", "--drugs", "1", "--out", dir.path().string()}).code, 0);
  const auto config = load_provider_config(dir / "provider-01" / "config.json");
  EXPECT_EQ(config.vendor_name, "Zoch Pharmacy");
  const auto catalog = load_catalog(config.catalog_path);
  ASSERT_EQ(catalog.size(), 1u);
  EXPECT_EQ(catalog.entries()[0], blopen_gel_entry());
  const Registry registry(dir / "registry.txt");
  ASSERT_EQ(registry.list_all().size(), 1u);
  EXPECT_EQ(registry.list_all()[0].base_url, "http://127.0.0.1:8732/drugservice.svc");
}

TEST(Seed, DeterministicAndSeedSensitive) {
  testing::TempDir a;
  testing::TempDir b;
  testing::TempDir c;
  for (const auto* d : {&a, &b}) {
    ASSERT_EQ(run({"seed", "--providers", "4", "--drugs", "12", "--rng-seed", "7", "--out",
                   d->path().string()})
                  .code,
              0);
  }
  ASSERT_EQ(run({"seed", "--providers", "4", "--drugs", "12", "--rng-seed", "8", "--out",
                 c.path().string()})
                .code,
            0);
  bool differs = false;
  for (const auto* f : {"registry.txt", "provider-01/catalog.txt", "provider-02/catalog.txt",
                        "provider-03/config.json", "provider-04/catalog.txt"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    differs = differs || slurp(a / f) != slurp(c / f);
  }
  EXPECT_TRUE(differs);
}

TEST(Seed, TreeIsSelfConsistent) {
  testing::TempDir dir;
  SeedOptions options;
  options.providers = 6;
  options.drugs = 20;
  options.out_dir = dir.path();
  options.base_port = 41000;
  const auto seeded = seed_fixtures(options);
  ASSERT_EQ(seeded.size(), 6u);
  const Registry registry(dir / "registry.txt");
  const auto regs = registry.list_active();
  ASSERT_EQ(regs.size(), 6u);
  for (std::size_t i = 0; i < seeded.size(); ++i) {
    const auto& p = seeded[i];
    EXPECT_EQ(p.catalog.size(), 20u);
    EXPECT_EQ(p.config.listen_port, 41000 + static_cast<int>(i));
    EXPECT_EQ(regs[i].vendor_name, p.config.vendor_name);
    EXPECT_EQ(regs[i].location, p.config.location);
    EXPECT_EQ(load_catalog(p.config.catalog_path).entries(), p.catalog.entries());
    EXPECT_EQ(p.config.response_variant,
              i % 2 == 0 ? WireVariant::canonical : WireVariant::legacy_alphabetical);
  }
  EXPECT_NE(seeded[0].catalog.find("blopen gel"), nullptr);
}

}  // namespace
}  // namespace drugbus
