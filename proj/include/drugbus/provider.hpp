#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "drugbus/catalog.hpp"
#include "drugbus/error.hpp"
#include "drugbus/geo.hpp"
#include "drugbus/http.hpp"
#include "drugbus/wire_contract.hpp"

namespace httplib {
class Server;
}

namespace drugbus {

enum class ProviderErrc { BadConfig };

std::string_view to_string(ProviderErrc code);

using ProviderError = Error<ProviderErrc>;

struct ProviderConfig {
  std::string vendor_name;
  std::string vendor_address;
  GeoPoint location;
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;  // 0 picks an ephemeral port
  std::string base_path;  // e.g. "/drugservice.svc"; empty serves at the root
  std::filesystem::path catalog_path;
  WireVariant response_variant = WireVariant::canonical;
};

/// Throws BadConfig on a missing/invalid field or out-of-range location.
void validate(const ProviderConfig& config);

/// JSON config file; `catalog` is resolved relative to the file's directory.
ProviderConfig load_provider_config(const std::filesystem::path& path);

void save_provider_config(const ProviderConfig& config, const std::filesystem::path& path);

/// Request logic of one vendor's service over an immutable catalog.
class Provider {
 public:
  Provider(ProviderConfig config, Catalog catalog);

  /// `raw_segment` is still percent-encoded. Throws WireError(BadEncoding).
  std::optional<DrugInfo> get_drug_info(std::string_view raw_segment) const;
  std::optional<DrugDetail> get_drug_detail(std::string_view raw_segment) const;

  /// Routes a GET on the raw request target (path plus optional query).
  HttpResponse handle_get(std::string_view target) const;

  bool is_health_probe(std::string_view target) const;

  const ProviderConfig& config() const { return config_; }
  const Catalog& catalog() const { return catalog_; }

 private:
  std::optional<std::string_view> relative_path(std::string_view target) const;

  ProviderConfig config_;
  Catalog catalog_;
};

/// Fault injection for tests: delays, hangs, or corrupts lookup responses.
/// /health is never affected.
struct Fault {
  std::chrono::milliseconds delay{0};
  bool hang = false;
  bool garbage = false;
};

/// Hosts a Provider over HTTP on its own thread.
class ProviderServer {
 public:
  explicit ProviderServer(Provider provider);
  ~ProviderServer();

  ProviderServer(const ProviderServer&) = delete;
  ProviderServer& operator=(const ProviderServer&) = delete;

  /// Binds and starts serving. Throws ListenError when the bind fails.
  void start();
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

  void set_fault(Fault fault);

  const Provider& provider() const { return provider_; }

 private:
  Fault current_fault() const;
  void wait_fault(const Fault& fault);

  Provider provider_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex fault_mutex_;
  std::condition_variable fault_cv_;
  Fault fault_;
  bool stopping_ = false;
};

}  // namespace drugbus
