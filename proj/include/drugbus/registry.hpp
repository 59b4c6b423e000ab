#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "drugbus/error.hpp"
#include "drugbus/geo.hpp"
#include "drugbus/timestamp.hpp"
#include "drugbus/transport.hpp"

namespace drugbus {

enum class RegistryErrc {
  InvalidUrl,
  InvalidLocation,
  InvalidVendor,
  DuplicateEndpoint,
  UnknownService,
  FileUnreadable,
  FileUnwritable,
  ParseError,
};

std::string_view to_string(RegistryErrc code);

using RegistryError = Error<RegistryErrc>;

enum class ServiceStatus { active, suspended };

std::string_view to_string(ServiceStatus status);

struct ServiceRegistration {
  std::string service_id;
  std::string vendor_name;
  std::string base_url;
  GeoPoint location;
  ServiceStatus status = ServiceStatus::active;
  Timestamp registered_at;

  friend bool operator==(const ServiceRegistration&, const ServiceRegistration&) = default;
};

inline constexpr std::string_view kRegistryHeader =
    "service_id|vendor_name|base_url|lat|lon|status|registered_at";

std::string format_registry(const std::vector<ServiceRegistration>& rows);

std::vector<ServiceRegistration> parse_registry(std::string_view content);

struct ProbeResult {
  bool reachable = false;
  std::string reason;  // "connection refused", "timeout", "HTTP 500", ...
};

/// The bus's set of approved provider services. Readers run concurrently;
/// mutations are serialized and persisted to the backing file (when there is
/// one) before they return.
class Registry {
 public:
  /// In-memory registry with no backing file.
  Registry() = default;

  enum class Open { must_exist, create_if_missing };

  /// Throws FileUnreadable / ParseError.
  explicit Registry(std::filesystem::path path, Open mode = Open::must_exist);

  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  ServiceRegistration add(std::string_view vendor_name, std::string_view base_url,
                          GeoPoint location);

  /// Active registrations ordered by registered_at, then service_id.
  std::vector<ServiceRegistration> list_active() const;

  /// Every registration, same ordering as list_active.
  std::vector<ServiceRegistration> list_all() const;

  std::optional<ServiceRegistration> find(std::string_view service_id) const;

  ServiceRegistration set_status(std::string_view service_id, ServiceStatus status);

  void remove(std::string_view service_id);

  /// GET {base_url}/health. Never changes any registration.
  ProbeResult probe(std::string_view service_id, const Transport& transport,
                    std::chrono::milliseconds timeout = std::chrono::milliseconds(500)) const;

  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void persist(const std::vector<ServiceRegistration>& rows) const;

  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mutex_;
  std::vector<ServiceRegistration> rows_;
};

}  // namespace drugbus
