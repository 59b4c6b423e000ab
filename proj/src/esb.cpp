#include "drugbus/esb.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <tuple>

#include "drugbus/text.hpp"

namespace drugbus {

namespace {

using Clock = std::chrono::steady_clock;
using std::chrono::milliseconds;

milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<milliseconds>(Clock::now() - start);
}

std::string lookup_url(const ServiceRegistration& reg, std::string_view op,
                       std::string_view drug_name) {
  return reg.base_url + "/" + std::string(op) + "/" + encode_drug_path_segment(drug_name);
}

// State shared between one search and its workers. Workers may outlive the
// search when a provider ignores its deadline; late results are dropped.
struct FanOut {
  std::mutex mutex;
  std::condition_variable cv;
  std::vector<std::optional<ProviderOutcome>> slots;
  std::size_t resolved = 0;
  bool closed = false;
  std::atomic<std::size_t> next{0};
};

}  // namespace

std::string_view to_string(EsbErrc code) {
  switch (code) {
    case EsbErrc::InvalidRequest: return "InvalidRequest";
    case EsbErrc::NoProviders: return "NoProviders";
    case EsbErrc::UnknownService: return "UnknownService";
    case EsbErrc::ProviderUnavailable: return "ProviderUnavailable";
    case EsbErrc::NotFound: return "NotFound";
  }
  return "Unknown";
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::timeout: return "timeout";
    case FailureKind::connect: return "connect";
    case FailureKind::bad_response: return "bad_response";
  }
  return "unknown";
}

void validate(const SearchRequest& request) {
  const auto name = text::trim(request.drug_name);
  if (name.empty()) throw EsbError(EsbErrc::InvalidRequest, "drug name is empty");
  for (char c : name) {
    if (c == '|' || static_cast<unsigned char>(c) < 0x20) {
      throw EsbError(EsbErrc::InvalidRequest, "drug name contains a control character or '|'");
    }
  }
  if (request.per_provider_timeout.count() <= 0) {
    throw EsbError(EsbErrc::InvalidRequest, "per-provider timeout must be positive");
  }
  if (request.max_results && *request.max_results == 0) {
    throw EsbError(EsbErrc::InvalidRequest, "max_results must be positive");
  }
  if (request.search_point && !in_bounds(*request.search_point)) {
    throw EsbError(EsbErrc::InvalidRequest, "search point out of bounds");
  }
}

ProviderOutcome classify_reply(const ServiceRegistration& registration, const FetchResult& reply,
                               milliseconds latency) {
  ProviderOutcome out{registration.service_id, registration.vendor_name, NotFound{}, latency};
  switch (reply.failure) {
    case FetchFailure::timeout:
      out.result = Failed{FailureKind::timeout, reply.detail};
      return out;
    case FetchFailure::connect:
      out.result = Failed{FailureKind::connect, reply.detail};
      return out;
    case FetchFailure::bad_response:
      out.result = Failed{FailureKind::bad_response, reply.detail};
      return out;
    case FetchFailure::none:
      break;
  }
  if (reply.status == 404) return out;
  if (reply.status != 200) {
    out.result = Failed{FailureKind::bad_response, "HTTP " + std::to_string(reply.status)};
    return out;
  }
  try {
    auto info = parse_drug_info(reply.body);
    if (info.vendor_name != registration.vendor_name) {
      out.result = Failed{FailureKind::bad_response, "vendor name '" + info.vendor_name +
                                                         "' does not match registration"};
      return out;
    }
    out.result = std::move(info);
  } catch (const WireError& e) {
    out.result = Failed{FailureKind::bad_response,
                        std::string(to_string(e.code())) + ": " + e.what()};
  }
  return out;
}

std::vector<RankedHit> rank_hits(std::vector<RankedHit> hits,
                                 const std::optional<GeoPoint>& search_point) {
  for (auto& h : hits) {
    h.distance_km = search_point ? std::optional(haversine_km(*search_point, h.provider_location))
                                 : std::nullopt;
  }
  const auto key = [](const RankedHit& h) {
    return std::tie(h.info.price, h.info.vendor_name, h.service_id);
  };
  std::sort(hits.begin(), hits.end(), [&](const RankedHit& a, const RankedHit& b) {
    if (a.distance_km && b.distance_km && *a.distance_km != *b.distance_km) {
      return *a.distance_km < *b.distance_km;
    }
    return key(a) < key(b);
  });
  return hits;
}

AggregatedResult aggregate(const SearchRequest& request,
                           const std::vector<ServiceRegistration>& registrations,
                           std::vector<ProviderOutcome> outcomes) {
  AggregatedResult result;
  result.providers_queried = outcomes.size();
  std::vector<RankedHit> hits;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (const auto* info = std::get_if<DrugInfo>(&o.result)) {
      hits.push_back({*info, o.service_id, registrations[i].location, std::nullopt});
    } else if (const auto* failed = std::get_if<Failed>(&o.result)) {
      result.failures.push_back({o.service_id, o.vendor_name, *failed});
    } else {
      ++result.not_found_count;
    }
  }
  result.hits = rank_hits(std::move(hits), request.search_point);
  if (request.max_results && result.hits.size() > *request.max_results) {
    result.hits.resize(*request.max_results);
  }
  result.outcomes = std::move(outcomes);
  return result;
}

AggregatedResult scatter_gather(const SearchRequest& request,
                                const std::vector<ServiceRegistration>& registrations,
                                std::shared_ptr<const Transport> transport,
                                std::size_t concurrency_cap) {
  validate(request);
  if (registrations.empty()) throw EsbError(EsbErrc::NoProviders, "no active providers");

  const auto n = registrations.size();
  const auto start = Clock::now();
  const auto deadline = start + request.per_provider_timeout;
  const auto name = std::string(text::trim(request.drug_name));

  auto state = std::make_shared<FanOut>();
  state->slots.resize(n);
  const auto regs = std::make_shared<const std::vector<ServiceRegistration>>(registrations);

  const auto workers = std::clamp<std::size_t>(concurrency_cap, 1, n);
  for (std::size_t w = 0; w < workers; ++w) {
    std::thread([state, regs, transport, name, start, deadline] {
      for (;;) {
        const auto i = state->next.fetch_add(1);
        if (i >= regs->size()) return;
        const auto& reg = (*regs)[i];
        const auto remaining = std::chrono::duration_cast<milliseconds>(deadline - Clock::now());
        FetchResult reply;
        if (remaining.count() <= 0) {
          reply.failure = FetchFailure::timeout;
          reply.detail = "deadline passed before the request was sent";
        } else {
          reply = transport->get(lookup_url(reg, "getdruginfo", name), remaining);
        }
        auto outcome = classify_reply(reg, reply, since(start));
        std::lock_guard lock(state->mutex);
        if (state->closed) continue;
        state->slots[i] = std::move(outcome);
        ++state->resolved;
        state->cv.notify_all();
      }
    }).detach();
  }

  std::vector<ProviderOutcome> outcomes;
  {
    std::unique_lock lock(state->mutex);
    state->cv.wait_until(lock, deadline, [&] { return state->resolved == n; });
    state->closed = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (state->slots[i]) {
        outcomes.push_back(std::move(*state->slots[i]));
      } else {
        outcomes.push_back({registrations[i].service_id, registrations[i].vendor_name,
                            Failed{FailureKind::timeout, "no reply before the deadline"},
                            since(start)});
      }
    }
  }
  return aggregate(request, registrations, std::move(outcomes));
}

ServiceBus::ServiceBus(Registry& registry, QueryLog& log,
                       std::shared_ptr<const Transport> transport, BusOptions options)
    : registry_(registry), log_(log), transport_(std::move(transport)), options_(std::move(options)) {}

AggregatedResult ServiceBus::orchestrate_search(const SearchRequest& request) {
  auto result =
      scatter_gather(request, registry_.list_active(), transport_, options_.concurrency_cap);

  QueryLogRecord record;
  record.timestamp = now_utc();
  record.drug_name = text::to_lower(text::trim(request.drug_name));
  record.search_point = request.search_point;
  for (const auto& h : result.hits) record.hit_vendors.push_back(h.info.vendor_name);
  try {
    log_.append(std::move(record));
  } catch (const std::exception& e) {
    if (options_.on_warning) options_.on_warning(e.what());
  }
  if (options_.on_search) options_.on_search(request, result);
  return result;
}

DrugDetail ServiceBus::fetch_detail(std::string_view service_id, std::string_view drug_name) {
  const auto reg = registry_.find(service_id);
  if (!reg || reg->status != ServiceStatus::active) {
    throw EsbError(EsbErrc::UnknownService,
                   "no active service '" + std::string(service_id) + "'");
  }
  const auto name = text::trim(drug_name);
  if (name.empty()) throw EsbError(EsbErrc::InvalidRequest, "drug name is empty");

  const auto reply = transport_->get(lookup_url(*reg, "getdrugdetail", name), options_.detail_timeout);
  if (!reply.ok()) {
    throw EsbError(EsbErrc::ProviderUnavailable,
                   reg->vendor_name + " unreachable (" + std::string(to_string(reply.failure)) +
                       ")");
  }
  if (reply.status == 404) {
    throw EsbError(EsbErrc::NotFound,
                   reg->vendor_name + " does not list '" + std::string(name) + "'");
  }
  if (reply.status != 200) {
    throw EsbError(EsbErrc::ProviderUnavailable,
                   reg->vendor_name + " answered HTTP " + std::to_string(reply.status));
  }
  try {
    return parse_drug_detail(reply.body);
  } catch (const WireError& e) {
    throw EsbError(EsbErrc::ProviderUnavailable,
                   reg->vendor_name + " sent an unreadable detail document: " + e.what());
  }
}

std::vector<ReportEntry> ServiceBus::report(const ReportBucket& bucket) const {
  return consumption_report(log_.records(), bucket);
}

}  // namespace drugbus
