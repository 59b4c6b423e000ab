#include "drugbus/provider.hpp"

#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "drugbus/text.hpp"

#include "server_socket.hpp"

namespace drugbus {

namespace {

using json = nlohmann::json;

std::string normalize_base_path(std::string_view base) {
  std::string out(text::trim(base));
  while (!out.empty() && out.back() == '/') out.pop_back();
  if (!out.empty() && out.front() != '/') out.insert(out.begin(), '/');
  return out;
}

std::string_view variant_name(WireVariant v) {
  return v == WireVariant::canonical ? "canonical" : "legacy_alphabetical";
}

[[noreturn]] void bad_config(const std::string& why) {
  throw ProviderError(ProviderErrc::BadConfig, why);
}

std::pair<std::string, int> split_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    bad_config("listen endpoint '" + endpoint + "' must be host:port");
  }
  const auto port_text = endpoint.substr(colon + 1);
  if (port_text.find_first_not_of("0123456789") != std::string::npos || port_text.size() > 5) {
    bad_config("listen endpoint '" + endpoint + "' has a bad port");
  }
  const int port = std::stoi(port_text);
  if (port > 65535) bad_config("listen port out of range");
  return {endpoint.substr(0, colon), port};
}

}  // namespace

std::string_view to_string(ProviderErrc code) {
  switch (code) {
    case ProviderErrc::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

void validate(const ProviderConfig& config) {
  if (text::trim(config.vendor_name).empty()) bad_config("vendor_name is empty");
  if (!in_bounds(config.location)) bad_config("location out of bounds");
  if (config.listen_host.empty()) bad_config("listen host is empty");
  if (config.listen_port < 0 || config.listen_port > 65535) bad_config("listen port out of range");
}

ProviderConfig load_provider_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot read provider config '" + path.string() + "'");
  ProviderConfig config;
  try {
    const auto doc = json::parse(in);
    config.vendor_name = doc.at("vendor_name").get<std::string>();
    config.vendor_address = doc.value("vendor_address", "");
    config.location = {doc.at("latitude").get<double>(), doc.at("longitude").get<double>()};
    std::tie(config.listen_host, config.listen_port) =
        split_endpoint(doc.at("listen").get<std::string>());
    config.base_path = normalize_base_path(doc.value("base_path", ""));
    config.catalog_path = doc.at("catalog").get<std::string>();
    const auto variant = doc.value("response_variant", "canonical");
    if (variant == "canonical") {
      config.response_variant = WireVariant::canonical;
    } else if (variant == "legacy_alphabetical") {
      config.response_variant = WireVariant::legacy_alphabetical;
    } else {
      bad_config("unknown response_variant '" + variant + "'");
    }
  } catch (const json::exception& e) {
    bad_config(path.string() + ": " + e.what());
  }
  if (config.catalog_path.is_relative()) {
    config.catalog_path = path.parent_path() / config.catalog_path;
  }
  validate(config);
  return config;
}

void save_provider_config(const ProviderConfig& config, const std::filesystem::path& path) {
  json doc = {
      {"vendor_name", config.vendor_name},
      {"vendor_address", config.vendor_address},
      {"latitude", config.location.latitude},
      {"longitude", config.location.longitude},
      {"listen", config.listen_host + ":" + std::to_string(config.listen_port)},
      {"base_path", config.base_path},
      {"catalog", config.catalog_path.generic_string()},
      {"response_variant", std::string(variant_name(config.response_variant))},
  };
  std::ofstream out(path, std::ios::trunc);
  if (!out) bad_config("cannot write provider config '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

Provider::Provider(ProviderConfig config, Catalog catalog)
    : config_(std::move(config)), catalog_(std::move(catalog)) {
  config_.base_path = normalize_base_path(config_.base_path);
  validate(config_);
}

std::optional<DrugInfo> Provider::get_drug_info(std::string_view raw_segment) const {
  const auto name = decode_path_segment(raw_segment);
  const auto* entry = catalog_.find(name);
  if (!entry) return std::nullopt;
  return DrugInfo{entry->name, entry->selling_price, entry->description, config_.vendor_name};
}

std::optional<DrugDetail> Provider::get_drug_detail(std::string_view raw_segment) const {
  const auto name = decode_path_segment(raw_segment);
  const auto* entry = catalog_.find(name);
  if (!entry) return std::nullopt;
  return DrugDetail{entry->name, entry->quantity, config_.vendor_address, entry->substitutes};
}

std::optional<std::string_view> Provider::relative_path(std::string_view target) const {
  auto path = target.substr(0, target.find('?'));
  if (!text::istarts_with(path, config_.base_path)) return std::nullopt;
  path.remove_prefix(config_.base_path.size());
  return path;
}

bool Provider::is_health_probe(std::string_view target) const {
  const auto path = relative_path(target);
  return path && text::iequals(*path, "/health");
}

HttpResponse Provider::handle_get(std::string_view target) const {
  const HttpResponse not_found{404, "text/plain", ""};
  const auto relative = relative_path(target);
  if (!relative) return not_found;
  const auto path = *relative;

  if (text::iequals(path, "/health")) return {200, "text/plain", "OK"};

  constexpr std::string_view kInfo = "/getdruginfo/";
  constexpr std::string_view kDetail = "/getdrugdetail/";
  const bool info = text::istarts_with(path, kInfo);
  const bool detail = !info && text::istarts_with(path, kDetail);
  if (!info && !detail) return not_found;

  const auto segment = path.substr(info ? kInfo.size() : kDetail.size());
  if (segment.empty() || segment.find('/') != std::string_view::npos) return not_found;
  try {
    if (info) {
      const auto hit = get_drug_info(segment);
      if (!hit) return not_found;
      return {200, kXmlContentType, serialize_drug_info(*hit, config_.response_variant)};
    }
    const auto hit = get_drug_detail(segment);
    if (!hit) return not_found;
    return {200, kXmlContentType, serialize_drug_detail(*hit)};
  } catch (const WireError&) {
    return {400, "text/plain", ""};
  }
}

ProviderServer::ProviderServer(Provider provider)
    : provider_(std::move(provider)), server_(std::make_unique<httplib::Server>()) {}

ProviderServer::~ProviderServer() { stop(); }

void ProviderServer::start() {
  detail::use_exclusive_port(*server_);
  server_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    auto reply = provider_.handle_get(req.target);
    if (!provider_.is_health_probe(req.target)) {
      const auto fault = current_fault();
      wait_fault(fault);
      if (fault.garbage) reply = {200, kXmlContentType, "<Drug><name>broken"};
    }
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  });

  const auto& cfg = provider_.config();
  if (cfg.listen_port == 0) {
    port_ = server_->bind_to_any_port(cfg.listen_host);
    if (port_ < 0) port_ = 0;
  } else if (server_->bind_to_port(cfg.listen_host, cfg.listen_port)) {
    port_ = cfg.listen_port;
  }
  if (port_ <= 0) {
    throw ListenError("cannot listen on " + cfg.listen_host + ":" + std::to_string(cfg.listen_port));
  }
  {
    std::lock_guard lock(fault_mutex_);
    stopping_ = false;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void ProviderServer::stop() {
  {
    std::lock_guard lock(fault_mutex_);
    stopping_ = true;
  }
  fault_cv_.notify_all();
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string ProviderServer::base_url() const {
  return "http://" + provider_.config().listen_host + ":" + std::to_string(port_) +
         provider_.config().base_path;
}

void ProviderServer::set_fault(Fault fault) {
  {
    std::lock_guard lock(fault_mutex_);
    fault_ = fault;
  }
  fault_cv_.notify_all();
}

Fault ProviderServer::current_fault() const {
  std::lock_guard lock(fault_mutex_);
  return fault_;
}

void ProviderServer::wait_fault(const Fault& fault) {
  std::unique_lock lock(fault_mutex_);
  if (fault.hang) {
    fault_cv_.wait(lock, [this] { return stopping_ || !fault_.hang; });
  } else if (fault.delay.count() > 0) {
    fault_cv_.wait_for(lock, fault.delay, [this] { return stopping_; });
  }
}

}  // namespace drugbus
