#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sfcqa/netmodel.hpp"
#include "sfcqa/rng.hpp"

namespace sfcqa::provision {

using netmodel::DcId;
using netmodel::NetworkState;
using netmodel::RequestId;

/// Draws one arrival of `entry`: bundle size uniform in the bundle range,
/// bandwidth fixed or (MIoT) uniform per request. Requests come back Pending
/// with unassigned ids; add them with netmodel::add_request.
std::vector<netmodel::SfcRequest> generate_bundle(const netmodel::SfcCatalogEntry& entry, Rng& rng,
                                                  DcId ingress);

enum class RejectReason : std::uint8_t { NoCompute, NoBandwidth, LatencyBudget };
std::string_view name(RejectReason reason);

struct PlacementDecision {
  std::optional<netmodel::Allocation> allocation;
  std::optional<RejectReason> rejection;
  // DCs of the hops placed so far; complete on success, the feasible prefix on rejection.
  std::vector<DcId> hop_dcs;
  double latency_ms = 0.0;

  bool accepted() const { return allocation.has_value(); }
};

/// Greedy placement. Each hop stays in the current DC when an instance has
/// spare capacity or a new one fits there; otherwise it moves to the
/// lowest-id neighbor that can host it over a link with enough bandwidth.
/// Existing instances are preferred over new ones, lowest id first.
PlacementDecision plan_first_fit(const NetworkState& state, RequestId request);

/// Picks uniformly among every feasible DC (current one and all neighbors) at each hop.
PlacementDecision plan_random(const NetworkState& state, RequestId request, Rng& rng);

/// Plans with first-fit and commits: apply_allocation on success,
/// mark_rejected with the reason name otherwise.
PlacementDecision place_first_fit(NetworkState& state, RequestId request);

struct Rejection {
  RequestId request;
  std::string reason;
};

struct EpisodeStats {
  std::size_t total = 0;
  std::size_t served = 0;
  std::size_t rejected = 0;
  std::vector<Rejection> rejections;

  double acceptance_ratio() const { return total == 0 ? 0.0 : static_cast<double>(served) / static_cast<double>(total); }
};

nlohmann::json to_json(const EpisodeStats& stats);

/// Parses allocation-trace JSON lines. Each line is
/// {"request_id": n, "path": [id | {"dc_id": d, "vnf_type": "NAT"}, ...], "links": [ids]}.
/// Blank lines are skipped. Throws Error(MalformedInput) citing the line.
std::vector<netmodel::Allocation> parse_trace(std::istream& in);

/// Validates every entry against the state before touching it (unknown ids
/// abort with MalformedInput), then applies entries in file order. Entries
/// that fail apply_allocation are counted as rejected with the error text;
/// pending requests they name are marked Rejected.
EpisodeStats ingest_trace(NetworkState& state, const std::vector<netmodel::Allocation>& trace);
EpisodeStats ingest_trace(NetworkState& state, const std::filesystem::path& trace_file);

struct FirstFit {};
struct RandomPolicy {};
struct ExternalTrace {
  std::filesystem::path path;
};
using Policy = std::variant<FirstFit, RandomPolicy, ExternalTrace>;

/// Accepts "first-fit", "random" or "trace:<path>".
Policy parse_policy(std::string_view text);
std::string policy_text(const Policy& policy);

struct EpisodeConfig {
  std::array<std::int64_t, netmodel::kSfcTypes.size()> arrivals_per_type{};  // catalog order
  std::uint64_t seed = 0;
  Policy policy = FirstFit{};
};

/// Generates bundles in catalog order, then arrival index, then intra-bundle
/// order, each arrival at a uniformly drawn ingress DC, and places every
/// request with the configured policy. Stats cover the generated requests.
/// With ExternalTrace the bundles are only added and the trace is ingested;
/// the stats then describe the trace entries.
EpisodeStats run_episode(NetworkState& state, const EpisodeConfig& config);

}  // namespace sfcqa::provision
