#include "drugbus/gateway.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "drugbus/text.hpp"
#include "drugbus/xml.hpp"

#include "server_socket.hpp"

namespace drugbus {

namespace {

using json = nlohmann::ordered_json;

const char* content_type(Format f) { return f == Format::json ? kJsonContentType : kXmlContentType; }

HttpResponse error_response(int status, std::string_view code, std::string_view message,
                            Format format) {
  return {status, content_type(format), render_error(code, message, format)};
}

std::optional<double> parse_number(std::string_view s) {
  s = text::trim(s);
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

const std::string* param(const QueryParams& params, const std::string& key) {
  const auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

std::string mime_for(const std::filesystem::path& p) {
  const auto ext = text::to_lower(p.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool within(const std::filesystem::path& root, const std::filesystem::path& candidate) {
  auto r = root.begin();
  auto c = candidate.begin();
  for (; r != root.end(); ++r, ++c) {
    if (c == candidate.end() || *r != *c) return false;
  }
  return true;
}

}  // namespace

Format negotiate(std::string_view accept) {
  double xml_q = -1;
  double json_q = -1;
  double wildcard_q = -1;
  for (const auto& range : text::split(accept, ',')) {
    const auto parts = text::split(range, ';');
    const auto type = text::to_lower(text::trim(parts[0]));
    double q = 1.0;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto p = text::trim(parts[i]);
      if (p.size() > 2 && text::fold(p[0]) == 'q' && p[1] == '=') {
        q = parse_number(p.substr(2)).value_or(0.0);
      }
    }
    if (type == "application/json") {
      json_q = std::max(json_q, q);
    } else if (type == "application/xml" || type == "text/xml") {
      xml_q = std::max(xml_q, q);
    } else if (type == "*/*" || type == "application/*") {
      wildcard_q = std::max(wildcard_q, q);
    }
  }
  if (json_q < 0) json_q = wildcard_q;
  if (xml_q < 0) xml_q = wildcard_q;
  return json_q > xml_q && json_q > 0 ? Format::json : Format::xml;
}

std::string format_distance(double km) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", km);
  return buf;
}

std::string render_search(std::string_view query, const AggregatedResult& result, Format format) {
  if (format == Format::json) {
    json hits = json::array();
    for (const auto& h : result.hits) {
      json hit = {{"name", h.info.drug_name},
                  {"Price", h.info.price.str()},
                  {"Description", h.info.description},
                  {"VendorName", h.info.vendor_name},
                  {"ServiceId", h.service_id}};
      if (h.distance_km) hit["DistanceKm"] = format_distance(*h.distance_km);
      hits.push_back(std::move(hit));
    }
    json failures = json::array();
    for (const auto& f : result.failures) {
      failures.push_back({{"Vendor", f.vendor_name},
                          {"ServiceId", f.service_id},
                          {"Kind", std::string(to_string(f.failure.kind))}});
    }
    const json doc = {{"SearchResults",
                       {{"Query", std::string(query)},
                        {"Hits", std::move(hits)},
                        {"Diagnostics",
                         {{"ProvidersQueried", result.providers_queried},
                          {"NotFoundCount", result.not_found_count},
                          {"Failures", std::move(failures)}}}}}};
    return doc.dump();
  }

  xml::Writer w;
  w.open("SearchResults").leaf("Query", query).open("Hits");
  for (const auto& h : result.hits) {
    w.open("Drug")
        .leaf("name", h.info.drug_name)
        .leaf("Price", h.info.price.str())
        .leaf("Description", h.info.description)
        .leaf("VendorName", h.info.vendor_name)
        .leaf("ServiceId", h.service_id);
    if (h.distance_km) w.leaf("DistanceKm", format_distance(*h.distance_km));
    w.close("Drug");
  }
  w.close("Hits")
      .open("Diagnostics")
      .leaf("ProvidersQueried", std::to_string(result.providers_queried))
      .leaf("NotFoundCount", std::to_string(result.not_found_count))
      .open("Failures");
  for (const auto& f : result.failures) {
    w.open("Failure")
        .leaf("Vendor", f.vendor_name)
        .leaf("ServiceId", f.service_id)
        .leaf("Kind", to_string(f.failure.kind))
        .close("Failure");
  }
  w.close("Failures").close("Diagnostics").close("SearchResults");
  return std::move(w).str();
}

std::string render_detail(const DrugDetail& detail, Format format) {
  if (format == Format::xml) return serialize_drug_detail(detail);
  const json doc = {{"DrugDetail",
                     {{"name", detail.drug_name},
                      {"Quantity", detail.quantity},
                      {"VendorAddress", detail.vendor_address},
                      {"Substitutes", detail.substitutes}}}};
  return doc.dump();
}

std::string render_report(const std::vector<ReportEntry>& entries, Format format) {
  if (format == Format::json) {
    json rows = json::array();
    for (const auto& e : entries) rows.push_back({{"Key", e.key}, {"Count", e.count}});
    return json{{"Report", std::move(rows)}}.dump();
  }
  xml::Writer w;
  w.open("Report");
  for (const auto& e : entries) {
    w.open("Entry").leaf("Key", e.key).leaf("Count", std::to_string(e.count)).close("Entry");
  }
  w.close("Report");
  return std::move(w).str();
}

std::string render_error(std::string_view code, std::string_view message, Format format) {
  if (format == Format::json) {
    return json{{"Error", {{"Code", std::string(code)}, {"Message", std::string(message)}}}}.dump();
  }
  xml::Writer w;
  w.open("Error").leaf("Code", code).leaf("Message", message).close("Error");
  return std::move(w).str();
}

Gateway::Gateway(ServiceBus& bus, std::optional<std::filesystem::path> asset_dir)
    : bus_(bus), asset_dir_(std::move(asset_dir)) {}

HttpResponse Gateway::handle_search(const QueryParams& params, std::string_view accept) {
  const auto format = negotiate(accept);
  const auto* drug = param(params, "drug");
  if (!drug || text::trim(*drug).empty()) {
    return error_response(400, "MissingDrug", "query parameter 'drug' is required", format);
  }
  SearchRequest request;
  request.drug_name = std::string(text::trim(*drug));

  const auto* lat = param(params, "lat");
  const auto* lon = param(params, "lon");
  if ((lat == nullptr) != (lon == nullptr)) {
    return error_response(400, "HalfLocation", "'lat' and 'lon' must be given together", format);
  }
  if (lat) {
    const auto la = parse_number(*lat);
    const auto lo = parse_number(*lon);
    if (!la || !lo || !in_bounds({*la, *lo})) {
      return error_response(400, "BadLocation", "'lat'/'lon' must be in-range degrees", format);
    }
    request.search_point = GeoPoint{*la, *lo};
  }
  if (const auto* t = param(params, "timeout_ms")) {
    const auto ms = parse_number(*t);
    if (!ms || *ms < 1 || *ms > 600000 || *ms != std::floor(*ms)) {
      return error_response(400, "BadTimeout", "'timeout_ms' must be an integer in [1, 600000]",
                            format);
    }
    request.per_provider_timeout = std::chrono::milliseconds(static_cast<long long>(*ms));
  }
  if (const auto* m = param(params, "max_results")) {
    const auto max = parse_number(*m);
    if (!max || *max < 1 || *max != std::floor(*max)) {
      return error_response(400, "BadMaxResults", "'max_results' must be a positive integer",
                            format);
    }
    request.max_results = static_cast<std::size_t>(*max);
  }

  try {
    const auto result = bus_.orchestrate_search(request);
    return {200, content_type(format), render_search(request.drug_name, result, format)};
  } catch (const EsbError& e) {
    if (e.code() == EsbErrc::NoProviders) {
      return error_response(503, "NoProviders", e.what(), format);
    }
    return error_response(400, to_string(e.code()), e.what(), format);
  }
}

HttpResponse Gateway::handle_detail(const QueryParams& params, std::string_view accept) {
  const auto format = negotiate(accept);
  const auto* id = param(params, "service_id");
  const auto* drug = param(params, "drug");
  if (!id || !drug || id->empty() || text::trim(*drug).empty()) {
    return error_response(400, "MissingParameter", "'service_id' and 'drug' are required", format);
  }
  try {
    return {200, content_type(format), render_detail(bus_.fetch_detail(*id, *drug), format)};
  } catch (const EsbError& e) {
    switch (e.code()) {
      case EsbErrc::NotFound: return error_response(404, "NotFound", e.what(), format);
      case EsbErrc::ProviderUnavailable:
        return error_response(502, "ProviderUnavailable", e.what(), format);
      default: return error_response(400, to_string(e.code()), e.what(), format);
    }
  }
}

HttpResponse Gateway::handle_report(const QueryParams& params, std::string_view accept) const {
  const auto format = negotiate(accept);
  const auto* bucket = param(params, "bucket");
  ReportBucket spec;
  if (bucket && *bucket == "drug") {
    spec = ByDrug{};
  } else if (bucket && *bucket == "region") {
    double cell = 1.0;
    if (const auto* c = param(params, "cell")) {
      const auto v = parse_number(*c);
      if (!v) return error_response(400, "BadBucket", "'cell' must be a number", format);
      cell = *v;
    }
    spec = ByRegion{cell};
  } else {
    return error_response(400, "BadBucket", "'bucket' must be 'drug' or 'region'", format);
  }
  try {
    return {200, content_type(format), render_report(bus_.report(spec), format)};
  } catch (const QueryLogError& e) {
    return error_response(400, "BadBucket", e.what(), format);
  }
}

HttpResponse Gateway::serve_static(std::string_view path) const {
  const HttpResponse outside{404, kXmlContentType,
                             render_error("NotFound", "no such resource", Format::xml)};
  if (!asset_dir_) return outside;
  if (path != "/app" && !path.starts_with("/app/")) return outside;

  std::error_code ec;
  const auto root = std::filesystem::weakly_canonical(*asset_dir_, ec);
  if (ec) return outside;
  const auto index = root / "index.html";

  auto rel = path.substr(std::min<std::size_t>(path.size(), 5));
  while (!rel.empty() && rel.front() == '/') rel.remove_prefix(1);
  auto target = index;
  if (!rel.empty()) {
    const auto candidate = std::filesystem::weakly_canonical(root / std::string(rel), ec);
    if (ec || !within(root, candidate)) return outside;
    if (std::filesystem::is_regular_file(candidate, ec)) target = candidate;
  }
  const auto body = read_file(target);
  if (!body) return outside;
  return {200, mime_for(target), *body};
}

HttpResponse Gateway::handle_get(std::string_view path, const QueryParams& params,
                                 std::string_view accept) {
  if (path == "/api/search") return handle_search(params, accept);
  if (path == "/api/detail") return handle_detail(params, accept);
  if (path == "/api/report") return handle_report(params, accept);
  if (path == "/") return {302, "text/plain", "/app"};
  return serve_static(path);
}

GatewayServer::GatewayServer(Gateway& gateway, std::string host, int port)
    : gateway_(gateway),
      host_(std::move(host)),
      requested_port_(port),
      server_(std::make_unique<httplib::Server>()) {}

GatewayServer::~GatewayServer() { stop(); }

void GatewayServer::start() {
  detail::use_exclusive_port(*server_);
  server_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);
    auto reply = gateway_.handle_get(req.path, params, req.get_header_value("Accept"));
    res.status = reply.status;
    if (reply.status == 302) {
      res.set_redirect(reply.body);
      return;
    }
    res.set_content(reply.body, reply.content_type);
  });
  if (requested_port_ == 0) {
    port_ = server_->bind_to_any_port(host_);
  } else if (server_->bind_to_port(host_, requested_port_)) {
    port_ = requested_port_;
  }
  if (port_ <= 0) {
    port_ = 0;
    throw ListenError("cannot listen on " + host_ + ":" + std::to_string(requested_port_));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void GatewayServer::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string GatewayServer::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace drugbus
