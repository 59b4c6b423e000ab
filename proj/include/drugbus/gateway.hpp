#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "drugbus/esb.hpp"
#include "drugbus/http.hpp"

namespace httplib {
class Server;
}

namespace drugbus {

enum class Format { xml, json };

/// XML unless the Accept header ranks application/json strictly higher.
Format negotiate(std::string_view accept);

/// Distances are rendered with three fractional digits.
std::string format_distance(double km);

std::string render_search(std::string_view query, const AggregatedResult& result, Format format);
std::string render_detail(const DrugDetail& detail, Format format);
std::string render_report(const std::vector<ReportEntry>& entries, Format format);
std::string render_error(std::string_view code, std::string_view message, Format format);

using QueryParams = std::map<std::string, std::string>;

/// Consumer-facing HTTP API over the bus plus static hosting of the UI bundle.
class Gateway {
 public:
  Gateway(ServiceBus& bus, std::optional<std::filesystem::path> asset_dir = std::nullopt);

  HttpResponse handle_search(const QueryParams& params, std::string_view accept);
  HttpResponse handle_detail(const QueryParams& params, std::string_view accept);
  HttpResponse handle_report(const QueryParams& params, std::string_view accept) const;
  HttpResponse serve_static(std::string_view path) const;

  /// Routes a GET by decoded path.
  HttpResponse handle_get(std::string_view path, const QueryParams& params,
                          std::string_view accept);

 private:
  ServiceBus& bus_;
  std::optional<std::filesystem::path> asset_dir_;
};

class GatewayServer {
 public:
  GatewayServer(Gateway& gateway, std::string host, int port);
  ~GatewayServer();

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  /// Throws ListenError when the port cannot be bound.
  void start();
  void stop();

  int port() const { return port_; }
  std::string url() const;

 private:
  Gateway& gateway_;
  std::string host_;
  int requested_port_;
  int port_ = 0;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace drugbus
