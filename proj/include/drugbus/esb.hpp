#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drugbus/error.hpp"
#include "drugbus/geo.hpp"
#include "drugbus/query_log.hpp"
#include "drugbus/registry.hpp"
#include "drugbus/transport.hpp"
#include "drugbus/wire_contract.hpp"

namespace drugbus {

enum class EsbErrc { InvalidRequest, NoProviders, UnknownService, ProviderUnavailable, NotFound };

std::string_view to_string(EsbErrc code);

using EsbError = Error<EsbErrc>;

struct SearchRequest {
  std::string drug_name;
  std::optional<GeoPoint> search_point;
  std::chrono::milliseconds per_provider_timeout{2000};
  std::optional<std::size_t> max_results;  // unbounded when absent
};

/// Throws InvalidRequest.
void validate(const SearchRequest& request);

enum class FailureKind { timeout, connect, bad_response };

std::string_view to_string(FailureKind kind);

struct NotFound {
  friend bool operator==(const NotFound&, const NotFound&) = default;
};

struct Failed {
  FailureKind kind = FailureKind::bad_response;
  std::string detail;

  friend bool operator==(const Failed&, const Failed&) = default;
};

struct ProviderOutcome {
  std::string service_id;
  std::string vendor_name;
  std::variant<DrugInfo, NotFound, Failed> result;
  std::chrono::milliseconds latency{0};
};

struct RankedHit {
  DrugInfo info;
  std::string service_id;
  GeoPoint provider_location;
  std::optional<double> distance_km;

  friend bool operator==(const RankedHit&, const RankedHit&) = default;
};

struct ProviderFailure {
  std::string service_id;
  std::string vendor_name;
  Failed failure;

  friend bool operator==(const ProviderFailure&, const ProviderFailure&) = default;
};

struct AggregatedResult {
  std::vector<RankedHit> hits;
  std::size_t providers_queried = 0;
  std::vector<ProviderFailure> failures;  // registry order
  std::size_t not_found_count = 0;
  std::vector<ProviderOutcome> outcomes;  // registry order, with latencies
};

/// Adapter: turns one provider's raw reply into an outcome. Accepts both wire
/// variants; a Hit must carry the registration's vendor name.
ProviderOutcome classify_reply(const ServiceRegistration& registration, const FetchResult& reply,
                               std::chrono::milliseconds latency);

/// Fills distance_km (only when a search point is given) and orders hits by
/// distance, then price, then vendor name, then service id. Without a search
/// point the distance key is skipped.
std::vector<RankedHit> rank_hits(std::vector<RankedHit> hits,
                                 const std::optional<GeoPoint>& search_point);

/// Deterministic fold over outcomes given in registry order.
AggregatedResult aggregate(const SearchRequest& request,
                           const std::vector<ServiceRegistration>& registrations,
                           std::vector<ProviderOutcome> outcomes);

/// Concurrent fan-out of GET {base_url}/getdruginfo/{name} to every
/// registration, at most `concurrency_cap` in flight. Returns within
/// per_provider_timeout (plus scheduling slack); unresolved calls count as
/// timeouts. Throws NoProviders when `registrations` is empty.
AggregatedResult scatter_gather(const SearchRequest& request,
                                const std::vector<ServiceRegistration>& registrations,
                                std::shared_ptr<const Transport> transport,
                                std::size_t concurrency_cap = 32);

struct BusOptions {
  std::size_t concurrency_cap = 32;
  std::chrono::milliseconds detail_timeout{2000};
  /// Called once per completed search, e.g. for operator logging.
  std::function<void(const SearchRequest&, const AggregatedResult&)> on_search;
  /// Called when the query log cannot be written; the search still succeeds.
  std::function<void(const std::string&)> on_warning;
};

/// The service bus: registry-driven orchestration, detail relay, and the
/// consumption analytics log.
class ServiceBus {
 public:
  ServiceBus(Registry& registry, QueryLog& log, std::shared_ptr<const Transport> transport,
             BusOptions options = {});

  AggregatedResult orchestrate_search(const SearchRequest& request);

  /// Relays GET {base_url}/getdrugdetail/{name} to an active registration.
  DrugDetail fetch_detail(std::string_view service_id, std::string_view drug_name);

  std::vector<ReportEntry> report(const ReportBucket& bucket) const;

  Registry& registry() { return registry_; }
  const QueryLog& query_log() const { return log_; }

 private:
  Registry& registry_;
  QueryLog& log_;
  std::shared_ptr<const Transport> transport_;
  BusOptions options_;
};

}  // namespace drugbus
