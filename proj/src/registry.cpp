#include "drugbus/registry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

#include "drugbus/text.hpp"

namespace drugbus {

namespace {

std::string format_degrees(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<double> parse_degrees(std::string_view s) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

bool ordered_before(const ServiceRegistration& a, const ServiceRegistration& b) {
  if (a.registered_at != b.registered_at) return a.registered_at < b.registered_at;
  return a.service_id < b.service_id;
}

std::string normalize_url(std::string_view url) {
  std::string out(text::trim(url));
  while (!out.empty() && out.back() == '/') out.pop_back();
  return out;
}

std::string next_service_id(const std::vector<ServiceRegistration>& rows) {
  long long max_seq = 0;
  for (const auto& r : rows) {
    constexpr std::string_view kPrefix = "svc-";
    if (r.service_id.rfind(kPrefix, 0) != 0) continue;
    const auto digits = std::string_view(r.service_id).substr(kPrefix.size());
    long long seq = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seq);
    if (ec == std::errc{} && end == digits.data() + digits.size()) max_seq = std::max(max_seq, seq);
  }
  auto digits = std::to_string(max_seq + 1);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "svc-" + digits;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw RegistryError(RegistryErrc::ParseError, "line " + std::to_string(line) + ": " + why);
}

}  // namespace

std::string_view to_string(RegistryErrc code) {
  switch (code) {
    case RegistryErrc::InvalidUrl: return "InvalidUrl";
    case RegistryErrc::InvalidLocation: return "InvalidLocation";
    case RegistryErrc::InvalidVendor: return "InvalidVendor";
    case RegistryErrc::DuplicateEndpoint: return "DuplicateEndpoint";
    case RegistryErrc::UnknownService: return "UnknownService";
    case RegistryErrc::FileUnreadable: return "FileUnreadable";
    case RegistryErrc::FileUnwritable: return "FileUnwritable";
    case RegistryErrc::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string_view to_string(ServiceStatus status) {
  return status == ServiceStatus::active ? "active" : "suspended";
}

std::string format_registry(const std::vector<ServiceRegistration>& rows) {
  std::string out(kRegistryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.service_id + '|' + r.vendor_name + '|' + r.base_url + '|' +
           format_degrees(r.location.latitude) + '|' + format_degrees(r.location.longitude) + '|' +
           std::string(to_string(r.status)) + '|' + format_rfc3339(r.registered_at) + '\n';
  }
  return out;
}

std::vector<ServiceRegistration> parse_registry(std::string_view content) {
  auto lines = text::split(content, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  if (lines.empty() || lines.front() != kRegistryHeader) {
    bad_row(1, "expected header '" + std::string(kRegistryHeader) + "'");
  }
  std::vector<ServiceRegistration> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = i + 1;
    const auto f = text::split(lines[i], '|');
    if (f.size() != 7) bad_row(line, "expected 7 fields, found " + std::to_string(f.size()));
    ServiceRegistration r;
    r.service_id = f[0];
    r.vendor_name = f[1];
    r.base_url = f[2];
    if (r.service_id.empty()) bad_row(line, "empty service_id");
    if (text::trim(r.vendor_name).empty()) bad_row(line, "empty vendor_name");
    if (!parse_url(r.base_url)) bad_row(line, "base_url '" + r.base_url + "' is not absolute");
    const auto lat = parse_degrees(f[3]);
    const auto lon = parse_degrees(f[4]);
    if (!lat || !lon) bad_row(line, "bad coordinates");
    r.location = {*lat, *lon};
    if (!in_bounds(r.location)) bad_row(line, "coordinates out of bounds");
    if (f[5] == "active") {
      r.status = ServiceStatus::active;
    } else if (f[5] == "suspended") {
      r.status = ServiceStatus::suspended;
    } else {
      bad_row(line, "unknown status '" + f[5] + "'");
    }
    const auto at = parse_rfc3339(f[6]);
    if (!at) bad_row(line, "bad timestamp '" + f[6] + "'");
    r.registered_at = *at;
    for (const auto& existing : rows) {
      if (existing.service_id == r.service_id) bad_row(line, "duplicate service_id");
      if (normalize_url(existing.base_url) == normalize_url(r.base_url)) {
        bad_row(line, "duplicate base_url");
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Registry::Registry(std::filesystem::path path, Open mode) : path_(std::move(path)) {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) {
    if (mode == Open::create_if_missing && !std::filesystem::exists(*path_)) {
      persist({});
      return;
    }
    throw RegistryError(RegistryErrc::FileUnreadable,
                        "cannot read registry '" + path_->string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    rows_ = parse_registry(buf.str());
  } catch (const RegistryError& e) {
    throw RegistryError(e.code(), path_->string() + ": " + e.what());
  }
}

ServiceRegistration Registry::add(std::string_view vendor_name, std::string_view base_url,
                                  GeoPoint location) {
  const auto vendor = std::string(text::trim(vendor_name));
  if (vendor.empty() || vendor.find_first_of("|;\r\n") != std::string::npos) {
    throw RegistryError(RegistryErrc::InvalidVendor, "vendor name must be non-empty without '|' or ';'");
  }
  const auto url = normalize_url(base_url);
  if (!parse_url(url)) {
    throw RegistryError(RegistryErrc::InvalidUrl, "base URL '" + url + "' is not absolute");
  }
  if (!in_bounds(location)) {
    throw RegistryError(RegistryErrc::InvalidLocation,
                        "location (" + format_degrees(location.latitude) + ", " +
                            format_degrees(location.longitude) + ") out of bounds");
  }

  std::unique_lock lock(mutex_);
  for (const auto& r : rows_) {
    if (normalize_url(r.base_url) == url) {
      throw RegistryError(RegistryErrc::DuplicateEndpoint,
                          "'" + url + "' is already registered as " + r.service_id);
    }
  }
  ServiceRegistration reg;
  reg.service_id = next_service_id(rows_);
  reg.vendor_name = vendor;
  reg.base_url = url;
  reg.location = location;
  reg.status = ServiceStatus::active;
  reg.registered_at = now_utc();
  for (const auto& r : rows_) {
    if (r.registered_at >= reg.registered_at) {
      reg.registered_at = r.registered_at + std::chrono::microseconds(1);
    }
  }
  auto next = rows_;
  next.push_back(reg);
  persist(next);
  rows_ = std::move(next);
  return reg;
}

std::vector<ServiceRegistration> Registry::list_all() const {
  std::vector<ServiceRegistration> out;
  {
    std::shared_lock lock(mutex_);
    out = rows_;
  }
  std::sort(out.begin(), out.end(), ordered_before);
  return out;
}

std::vector<ServiceRegistration> Registry::list_active() const {
  auto out = list_all();
  std::erase_if(out, [](const auto& r) { return r.status != ServiceStatus::active; });
  return out;
}

std::optional<ServiceRegistration> Registry::find(std::string_view service_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& r : rows_) {
    if (r.service_id == service_id) return r;
  }
  return std::nullopt;
}

ServiceRegistration Registry::set_status(std::string_view service_id, ServiceStatus status) {
  std::unique_lock lock(mutex_);
  auto next = rows_;
  for (auto& r : next) {
    if (r.service_id == service_id) {
      r.status = status;
      auto updated = r;
      persist(next);
      rows_ = std::move(next);
      return updated;
    }
  }
  throw RegistryError(RegistryErrc::UnknownService,
                      "unknown service '" + std::string(service_id) + "'");
}

void Registry::remove(std::string_view service_id) {
  std::unique_lock lock(mutex_);
  auto next = rows_;
  const auto removed = std::erase_if(next, [&](const auto& r) { return r.service_id == service_id; });
  if (removed == 0) {
    throw RegistryError(RegistryErrc::UnknownService,
                        "unknown service '" + std::string(service_id) + "'");
  }
  persist(next);
  rows_ = std::move(next);
}

ProbeResult Registry::probe(std::string_view service_id, const Transport& transport,
                            std::chrono::milliseconds timeout) const {
  const auto reg = find(service_id);
  if (!reg) {
    throw RegistryError(RegistryErrc::UnknownService,
                        "unknown service '" + std::string(service_id) + "'");
  }
  const auto res = transport.get(reg->base_url + "/health", timeout);
  switch (res.failure) {
    case FetchFailure::none:
      if (res.status == 200) return {true, ""};
      return {false, "HTTP " + std::to_string(res.status)};
    case FetchFailure::timeout: return {false, "timeout"};
    case FetchFailure::connect: return {false, "connection refused"};
    case FetchFailure::bad_response: return {false, "bad response: " + res.detail};
  }
  return {false, "unknown"};
}

void Registry::persist(const std::vector<ServiceRegistration>& rows) const {
  if (!path_) return;
  auto tmp = *path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << format_registry(rows);
    if (!out) {
      throw RegistryError(RegistryErrc::FileUnwritable, "cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path_, ec);
  if (ec) {
    throw RegistryError(RegistryErrc::FileUnwritable,
                        "cannot replace '" + path_->string() + "': " + ec.message());
  }
}

}  // namespace drugbus
