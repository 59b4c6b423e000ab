#include "drugbus/cli.hpp"

#include <charconv>
#include <csignal>
#include <iostream>
#include <mutex>
#include <sstream>

#include <pthread.h>

#include <CLI11.hpp>
#include <httplib.h>

#include "drugbus/esb.hpp"
#include "drugbus/gateway.hpp"
#include "drugbus/provider.hpp"
#include "drugbus/registry.hpp"
#include "drugbus/seed.hpp"
#include "drugbus/text.hpp"
#include "drugbus/xml.hpp"

namespace drugbus::cli {

namespace {

using Rows = std::vector<std::vector<std::string>>;

void print_table(std::ostream& out, const std::vector<std::string>& headers, const Rows& rows) {
  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      s += cells[c];
      if (c + 1 < cells.size()) s += std::string(width[c] - cells[c].size() + 2, ' ');
    }
    out << s << '\n';
  };
  line(headers);
  for (const auto& row : rows) line(row);
}

void print_porcelain(std::ostream& out, const Rows& rows) {
  for (const auto& row : rows) out << text::join(row, "|") << '\n';
}

// Blocks SIGINT/SIGTERM in the calling thread (inherited by threads started
// afterwards) so that wait_for_shutdown can collect them synchronously.
sigset_t block_shutdown_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

void wait_for_shutdown(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}

std::optional<GeoPoint> parse_at(const std::string& at) {
  const auto parts = text::split(at, ',');
  if (parts.size() != 2) return std::nullopt;
  try {
    std::size_t used = 0;
    const double lat = std::stod(parts[0], &used);
    if (used != parts[0].size()) return std::nullopt;
    const double lon = std::stod(parts[1], &used);
    if (used != parts[1].size()) return std::nullopt;
    GeoPoint p{lat, lon};
    if (!in_bounds(p)) return std::nullopt;
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Shortest text that reads back as the same double.
std::string to_decimal(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const xml::Element* child(const xml::Element& el, std::string_view name) {
  for (const auto& c : el.children) {
    if (c.local_name() == name) return &c;
  }
  return nullptr;
}

std::string child_text(const xml::Element& el, std::string_view name) {
  const auto* c = child(el, name);
  return c ? c->text : std::string{};
}

struct BusReply {
  int status = 0;
  xml::Element doc;
};

// Issues GET against the bus gateway; nullopt when the bus cannot be reached.
std::optional<BusReply> call_bus(const std::string& bus_url, const std::string& target,
                                 std::ostream& err) {
  const auto parts = parse_url(bus_url);
  if (!parts || parts->scheme != "http") {
    err << "error: --bus must be an http:// URL, got '" << bus_url << "'\n";
    return std::nullopt;
  }
  httplib::Client client(parts->host, parts->port);
  client.set_url_encode(false);
  client.set_connection_timeout(5);
  client.set_read_timeout(120);
  auto res = client.Get(parts->path + target, {{"Accept", "application/xml"}});
  if (!res) {
    err << "error: cannot reach bus at " << bus_url << " (" << httplib::to_string(res.error())
        << ")\n";
    return std::nullopt;
  }
  BusReply reply{res->status, {}};
  try {
    reply.doc = xml::parse(res->body);
  } catch (const xml::ParseError& e) {
    err << "error: unreadable reply from bus: " << e.what() << '\n';
    return std::nullopt;
  }
  return reply;
}

int report_bus_error(const BusReply& reply, std::ostream& err) {
  err << "error: " << child_text(reply.doc, "Code") << ": " << child_text(reply.doc, "Message")
      << '\n';
  return reply.status >= 400 && reply.status < 500 ? kExitUsage : kExitRuntime;
}

int cmd_search(const std::string& drug, const std::string& at, const std::string& bus,
               int timeout_ms, bool porcelain, std::ostream& out, std::ostream& err) {
  if (text::trim(drug).empty()) {
    err << "error: --drug must not be empty\n";
    return kExitUsage;
  }
  std::string target = "/api/search?drug=" + encode_drug_path_segment(drug);
  if (!at.empty()) {
    const auto point = parse_at(at);
    if (!point) {
      err << "error: --at expects LAT,LON in degrees, got '" << at << "'\n";
      return kExitUsage;
    }
    target += "&lat=" + to_decimal(point->latitude) + "&lon=" + to_decimal(point->longitude);
  }
  if (timeout_ms > 0) target += "&timeout_ms=" + std::to_string(timeout_ms);

  const auto reply = call_bus(bus, target, err);
  if (!reply) return kExitRuntime;
  if (reply->status != 200) return report_bus_error(*reply, err);

  Rows rows;
  if (const auto* hits = child(reply->doc, "Hits")) {
    int rank = 0;
    for (const auto& d : hits->children) {
      const auto distance = child(d, "DistanceKm");
      rows.push_back({std::to_string(++rank), child_text(d, "VendorName"), child_text(d, "Price"),
                      distance ? distance->text : "-", child_text(d, "name"),
                      child_text(d, "ServiceId")});
    }
  }
  std::size_t queried = 0;
  std::size_t not_found = 0;
  Rows failures;
  if (const auto* diag = child(reply->doc, "Diagnostics")) {
    queried = std::stoul("0" + child_text(*diag, "ProvidersQueried"));
    not_found = std::stoul("0" + child_text(*diag, "NotFoundCount"));
    if (const auto* f = child(*diag, "Failures")) {
      for (const auto& item : f->children) {
        failures.push_back({child_text(item, "Vendor"), child_text(item, "Kind"),
                            child_text(item, "ServiceId")});
      }
    }
  }

  if (porcelain) {
    print_porcelain(out, rows);
    out << "summary|" << rows.size() << '|' << queried << '|' << not_found << '|'
        << failures.size() << '\n';
    return kExitOk;
  }
  if (!rows.empty()) {
    print_table(out, {"#", "Vendor", "Price", "Distance (km)", "Drug", "Service"}, rows);
    out << '\n';
  }
  out << rows.size() << (rows.size() == 1 ? " hit" : " hits") << " from " << queried
      << " providers (not found: " << not_found << ", failures: " << failures.size() << ")\n";
  for (const auto& f : failures) out << "  failed: " << f[0] << " [" << f[2] << "] " << f[1] << '\n';
  return kExitOk;
}

int cmd_report(const std::string& bucket, double cell, const std::string& bus, bool porcelain,
               std::ostream& out, std::ostream& err) {
  std::string target = "/api/report?bucket=" + encode_drug_path_segment(bucket);
  if (bucket == "region") target += "&cell=" + to_decimal(cell);
  const auto reply = call_bus(bus, target, err);
  if (!reply) return kExitRuntime;
  if (reply->status != 200) return report_bus_error(*reply, err);
  Rows rows;
  for (const auto& e : reply->doc.children) {
    rows.push_back({child_text(e, "Key"), child_text(e, "Count")});
  }
  if (porcelain) {
    print_porcelain(out, rows);
  } else {
    print_table(out, {bucket == "region" ? "Cell (lat,lon)" : "Drug", "Queries"}, rows);
  }
  return kExitOk;
}

int cmd_bus(const std::string& registry_path, const std::string& host, int port,
            const std::string& assets, const std::string& log_path, std::size_t concurrency,
            std::ostream& out, std::ostream& err) {
  const auto signals = block_shutdown_signals();
  std::unique_ptr<Registry> registry;
  std::unique_ptr<QueryLog> log;
  try {
    registry = std::make_unique<Registry>(registry_path);
    log = log_path.empty() ? std::make_unique<QueryLog>() : std::make_unique<QueryLog>(log_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::mutex err_mutex;
  BusOptions options;
  options.concurrency_cap = concurrency;
  options.on_search = [&](const SearchRequest& req, const AggregatedResult& res) {
    std::ostringstream line;
    line << "search drug=\"" << req.drug_name << '"';
    if (req.search_point) {
      line << " at=" << req.search_point->latitude << ',' << req.search_point->longitude;
    }
    line << " providers=" << res.providers_queried << " hits=" << res.hits.size()
         << " not_found=" << res.not_found_count << " failures=" << res.failures.size();
    for (const auto& f : res.failures) {
      line << " [" << f.service_id << ' ' << to_string(f.failure.kind) << ']';
    }
    std::lock_guard lock(err_mutex);
    err << line.str() << std::endl;
  };
  options.on_warning = [&](const std::string& message) {
    std::lock_guard lock(err_mutex);
    err << "warning: " << message << std::endl;
  };

  ServiceBus bus(*registry, *log, make_http_transport(), options);
  std::optional<std::filesystem::path> asset_dir;
  if (!assets.empty()) asset_dir = assets;
  Gateway gateway(bus, asset_dir);
  GatewayServer server(gateway, host, port);
  try {
    server.start();
  } catch (const ListenError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  out << "bus ready on " << server.url() << " with " << registry->list_active().size()
      << " active providers" << std::endl;
  wait_for_shutdown(signals);
  server.stop();
  return kExitOk;
}

int cmd_provider(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const auto signals = block_shutdown_signals();
  std::unique_ptr<ProviderServer> server;
  try {
    auto config = load_provider_config(config_path);
    auto catalog = load_catalog(config.catalog_path);
    server = std::make_unique<ProviderServer>(Provider(std::move(config), std::move(catalog)));
    server->start();
  } catch (const CatalogError& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  out << "provider '" << server->provider().config().vendor_name << "' ready at "
      << server->base_url() << " (" << server->provider().catalog().size() << " drugs)"
      << std::endl;
  wait_for_shutdown(signals);
  server->stop();
  return kExitOk;
}

Rows registry_rows(const std::vector<ServiceRegistration>& regs) {
  Rows rows;
  for (const auto& r : regs) {
    rows.push_back({r.service_id, r.vendor_name, r.base_url, to_decimal(r.location.latitude),
                    to_decimal(r.location.longitude), std::string(to_string(r.status)),
                    format_rfc3339(r.registered_at)});
  }
  return rows;
}

int registry_error(const RegistryError& e, std::ostream& err) {
  err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
  switch (e.code()) {
    case RegistryErrc::FileUnreadable:
    case RegistryErrc::FileUnwritable:
    case RegistryErrc::ParseError: return kExitRuntime;
    default: return kExitUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated drug availability over a service bus", "drugbus"};
  app.require_subcommand(1);

  // bus
  auto* bus_cmd = app.add_subcommand("bus", "Run the service bus and consumer gateway");
  std::string registry_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string assets;
  std::string log_path;
  std::size_t concurrency = 32;
  bus_cmd->add_option("--registry", registry_path, "Registry file")->required();
  bus_cmd->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  bus_cmd->add_option("--host", host, "Listen address");
  bus_cmd->add_option("--assets", assets, "Directory holding the web UI bundle");
  bus_cmd->add_option("--log", log_path, "Append-only query log file");
  bus_cmd->add_option("--concurrency", concurrency, "Maximum concurrent provider calls")
      ->check(CLI::PositiveNumber);

  // provider
  auto* provider_cmd = app.add_subcommand("provider", "Run one pharmacy provider service");
  std::string config_path;
  provider_cmd->add_option("--config", config_path, "Provider config (JSON)")->required();

  // registry
  auto* registry_cmd = app.add_subcommand("registry", "Manage provider registrations");
  registry_cmd->require_subcommand(1);
  std::string vendor;
  std::string url;
  double lat = 0;
  double lon = 0;
  std::string service_id;
  bool porcelain = false;
  auto* reg_add = registry_cmd->add_subcommand("add", "Register a provider endpoint");
  auto* reg_remove = registry_cmd->add_subcommand("remove", "Delete a registration");
  auto* reg_list = registry_cmd->add_subcommand("list", "List registrations");
  auto* reg_suspend = registry_cmd->add_subcommand("suspend", "Exclude a provider from searches");
  auto* reg_resume = registry_cmd->add_subcommand("resume", "Re-activate a provider");
  auto* reg_probe = registry_cmd->add_subcommand("probe", "Check a provider's /health endpoint");
  for (auto* sub : {reg_add, reg_remove, reg_list, reg_suspend, reg_resume, reg_probe}) {
    sub->add_option("--registry", registry_path, "Registry file")->required();
  }
  reg_add->add_option("--vendor", vendor, "Vendor name")->required();
  reg_add->add_option("--url", url, "Provider base URL")->required();
  reg_add->add_option("--lat", lat, "Latitude in degrees")->required();
  reg_add->add_option("--lon", lon, "Longitude in degrees")->required();
  for (auto* sub : {reg_remove, reg_suspend, reg_resume, reg_probe}) {
    sub->add_option("--id", service_id, "Service id")->required();
  }
  reg_list->add_flag("--porcelain", porcelain, "Stable '|'-delimited output");

  // search
  auto* search_cmd = app.add_subcommand("search", "Search every provider through the bus");
  std::string drug;
  std::string at;
  std::string bus_url = "http://127.0.0.1:8080";
  int timeout_ms = 0;
  search_cmd->add_option("--drug", drug, "Drug name")->required();
  search_cmd->add_option("--at", at, "Search point as LAT,LON");
  search_cmd->add_option("--bus", bus_url, "Bus gateway URL");
  search_cmd->add_option("--timeout-ms", timeout_ms, "Per-provider timeout")
      ->check(CLI::PositiveNumber);
  search_cmd->add_flag("--porcelain", porcelain, "Stable '|'-delimited output");

  // report
  auto* report_cmd = app.add_subcommand("report", "Query consumption report from the bus");
  std::string bucket = "drug";
  double cell = 1.0;
  report_cmd->add_option("--bucket", bucket, "drug or region")
      ->check(CLI::IsMember({"drug", "region"}));
  report_cmd->add_option("--cell", cell, "Region cell size in degrees");
  report_cmd->add_option("--bus", bus_url, "Bus gateway URL");
  report_cmd->add_flag("--porcelain", porcelain, "Stable '|'-delimited output");

  // seed
  auto* seed_cmd = app.add_subcommand("seed", "Generate demo provider catalogs and a registry");
  SeedOptions seed;
  std::string out_dir;
  long long providers = 3;
  long long drugs = 10;
  long long rng_seed = 1;
  seed_cmd->add_option("--providers", providers, "Number of providers");
  seed_cmd->add_option("--drugs", drugs, "Drugs per provider");
  seed_cmd->add_option("--out", out_dir, "Output directory")->required();
  seed_cmd->add_option("--rng-seed", rng_seed, "Random seed");
  seed_cmd->add_option("--base-port", seed.base_port, "Port of provider 1")
      ->check(CLI::Range(1, 65535));
  seed_cmd->add_option("--host", seed.host, "Provider listen address");

  std::vector<const char*> argv{"drugbus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (*bus_cmd) return cmd_bus(registry_path, host, port, assets, log_path, concurrency, out, err);
  if (*provider_cmd) return cmd_provider(config_path, out, err);
  if (*search_cmd) return cmd_search(drug, at, bus_url, timeout_ms, porcelain, out, err);
  if (*report_cmd) return cmd_report(bucket, cell, bus_url, porcelain, out, err);

  if (*seed_cmd) {
    if (providers <= 0 || drugs <= 0 || rng_seed <= 0) {
      err << "error: --providers, --drugs and --rng-seed must be positive\n";
      return kExitUsage;
    }
    seed.providers = static_cast<int>(providers);
    seed.drugs = static_cast<int>(drugs);
    seed.rng_seed = static_cast<std::uint64_t>(rng_seed);
    seed.out_dir = out_dir;
    try {
      const auto seeded = seed_fixtures(seed);
      out << "seeded " << seeded.size() << " providers under " << out_dir << '\n';
      for (const auto& p : seeded) {
        out << "  " << p.config_path.string() << "  " << p.config.vendor_name << "  "
            << p.config.listen_host << ':' << p.config.listen_port << '\n';
      }
      out << "  " << (std::filesystem::path(out_dir) / "registry.txt").string() << '\n';
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
    return kExitOk;
  }

  // registry subcommands
  try {
    if (*reg_list) {
      const Registry registry(registry_path);
      const auto rows = registry_rows(registry.list_all());
      if (porcelain) {
        print_porcelain(out, rows);
      } else {
        print_table(out, {"ID", "Vendor", "Base URL", "Lat", "Lon", "Status", "Registered"}, rows);
      }
      return kExitOk;
    }
    if (*reg_probe) {
      const Registry registry(registry_path);
      const auto transport = make_http_transport();
      const auto result = registry.probe(service_id, *transport);
      out << service_id << ' ' << (result.reachable ? "reachable" : "unreachable");
      if (!result.reachable) out << " (" << result.reason << ')';
      out << '\n';
      return result.reachable ? kExitOk : kExitRuntime;
    }
    Registry registry(registry_path, Registry::Open::create_if_missing);
    if (*reg_add) {
      const auto reg = registry.add(vendor, url, {lat, lon});
      out << "registered " << reg.service_id << " " << reg.vendor_name << " at " << reg.base_url
          << '\n';
    } else if (*reg_remove) {
      registry.remove(service_id);
      out << "removed " << service_id << '\n';
    } else if (*reg_suspend || *reg_resume) {
      const auto status = *reg_suspend ? ServiceStatus::suspended : ServiceStatus::active;
      const auto reg = registry.set_status(service_id, status);
      out << reg.service_id << ' ' << to_string(reg.status) << '\n';
    }
    return kExitOk;
  } catch (const RegistryError& e) {
    return registry_error(e, err);
  }
}

}  // namespace drugbus::cli
