#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sfcqa::netmodel {

template <class Tag>
struct Id {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(Id, Id) = default;
};

using DcId = Id<struct DcTag>;
using InstanceId = Id<struct InstanceTag>;
using LinkId = Id<struct LinkTag>;
using RequestId = Id<struct RequestTag>;

enum class VnfType : std::uint8_t { NAT, FW, TM, VOC, WO, IDPS };
inline constexpr std::array<VnfType, 6> kVnfTypes{VnfType::NAT, VnfType::FW,  VnfType::TM,
                                                  VnfType::VOC, VnfType::WO,  VnfType::IDPS};

// Table order; every per-type listing in the project follows it.
enum class SfcType : std::uint8_t { CG, AR, VoIP, VS, MIoT, Ind40 };
inline constexpr std::array<SfcType, 6> kSfcTypes{SfcType::CG, SfcType::AR,   SfcType::VoIP,
                                                  SfcType::VS, SfcType::MIoT, SfcType::Ind40};

std::string_view name(VnfType type);
std::string_view name(SfcType type);
std::optional<VnfType> parse_vnf_type(std::string_view text);
std::optional<SfcType> parse_sfc_type(std::string_view text);

constexpr std::size_t index_of(VnfType t) { return static_cast<std::size_t>(t); }
constexpr std::size_t index_of(SfcType t) { return static_cast<std::size_t>(t); }

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  constexpr bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const RealRange&, const RealRange&) = default;
};

// Per-VNF demands are configuration; the shipped defaults are arbitrary but fixed.
struct VnfProfile {
  VnfType type = VnfType::NAT;
  std::int64_t compute_demand = 1;  // compute units per instance
  std::int64_t storage_demand = 1;  // storage units per instance
  double proc_latency_ms = 1.0;     // per traversal
  std::int64_t capacity = 1;        // concurrent requests per instance
  friend bool operator==(const VnfProfile&, const VnfProfile&) = default;
};

using ProfileTable = std::array<VnfProfile, kVnfTypes.size()>;

ProfileTable default_profiles();

/// One row of the SFC characteristics table. Bandwidth is held in Kbps so the
/// 0.064 Mbps VoIP rate stays an exact integer through all accounting.
struct SfcCatalogEntry {
  SfcType sfc_type = SfcType::CG;
  std::vector<VnfType> vnf_sequence;
  IntRange bandwidth_kbps;  // lo == hi for a fixed rate
  std::int64_t e2e_delay_ms = 0;
  IntRange bundle;

  bool fixed_bandwidth() const { return bandwidth_kbps.lo == bandwidth_kbps.hi; }
  friend bool operator==(const SfcCatalogEntry&, const SfcCatalogEntry&) = default;
};

/// The six catalog rows in the order CG, AR, VoIP, VS, MIoT, Ind40.
const std::vector<SfcCatalogEntry>& sfc_catalog();
const SfcCatalogEntry& catalog_entry(SfcType type);

struct DataCenter {
  DcId id;
  std::int64_t compute_capacity = 0;
  std::int64_t storage_capacity = 0;
  std::int64_t compute_used = 0;
  std::int64_t storage_used = 0;
  std::vector<InstanceId> hosted;
  friend bool operator==(const DataCenter&, const DataCenter&) = default;
};

enum class InstanceState : std::uint8_t { Idle, Active };

struct VnfInstance {
  InstanceId id;
  VnfType type = VnfType::NAT;
  DcId dc;
  std::int64_t assigned_count = 0;

  // Idle means zero assigned requests; there is no separate parked state.
  InstanceState state() const { return assigned_count == 0 ? InstanceState::Idle : InstanceState::Active; }
  friend bool operator==(const VnfInstance&, const VnfInstance&) = default;
};

/// Undirected link with one shared bandwidth pool.
struct Link {
  LinkId id;
  DcId a;
  DcId b;
  std::int64_t capacity_kbps = 0;
  std::int64_t used_kbps = 0;
  double latency_ms = 0.0;

  bool touches(DcId dc) const { return a == dc || b == dc; }
  DcId other(DcId dc) const { return a == dc ? b : a; }
  std::int64_t available_kbps() const { return capacity_kbps - used_kbps; }
  friend bool operator==(const Link&, const Link&) = default;
};

enum class RequestStatus : std::uint8_t { Pending, Served, Rejected };

struct SfcRequest {
  RequestId id;
  SfcType sfc_type = SfcType::CG;
  DcId ingress;
  std::int64_t bandwidth_kbps = 0;
  std::int64_t e2e_budget_ms = 0;
  RequestStatus status = RequestStatus::Pending;
  std::vector<InstanceId> path;  // empty unless Served
  std::vector<LinkId> links;     // traversed links in order, empty unless Served
  std::string reject_reason;     // empty unless Rejected
  friend bool operator==(const SfcRequest&, const SfcRequest&) = default;
};

struct NetworkState {
  std::vector<DataCenter> dcs;
  std::vector<Link> links;
  std::vector<VnfInstance> instances;
  std::vector<SfcRequest> requests;
  ProfileTable profiles = default_profiles();
  std::vector<SfcCatalogEntry> catalog = sfc_catalog();
  std::uint64_t seed = 0;

  // Lookups throw Error(UnknownId).
  const DataCenter& dc(DcId id) const;
  const Link& link(LinkId id) const;
  const VnfInstance& instance(InstanceId id) const;
  const SfcRequest& request(RequestId id) const;
  const VnfProfile& profile(VnfType type) const { return profiles[index_of(type)]; }
  const SfcCatalogEntry& entry(SfcType type) const { return catalog[index_of(type)]; }
  std::optional<LinkId> link_between(DcId a, DcId b) const;

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

struct TopologyConfig {
  std::int64_t dc_count = 0;
  IntRange compute_capacity;
  IntRange storage_capacity;
  double link_density = 0.0;  // fraction of all DC pairs that get a link, in (0, 1]
  IntRange link_bandwidth_mbps;
  RealRange link_latency_ms;
  IntRange initial_instances;  // idle instances pre-deployed per DC
  ProfileTable profiles = default_profiles();
  friend bool operator==(const TopologyConfig&, const TopologyConfig&) = default;
};

TopologyConfig default_topology_config();

/// Random connected topology: a random spanning tree plus extra random links
/// until round(density * n(n-1)/2) links exist. Deterministic per (config, seed).
NetworkState new_topology(const TopologyConfig& config, std::uint64_t seed);

// Manual construction, mostly for tests and trace replays.
NetworkState make_state(const ProfileTable& profiles = default_profiles());
DcId add_dc(NetworkState& state, std::int64_t compute_capacity, std::int64_t storage_capacity);
LinkId add_link(NetworkState& state, DcId a, DcId b, std::int64_t capacity_kbps, double latency_ms);
/// Deploys an idle instance; throws CapacityExceeded when the DC lacks room.
InstanceId instantiate(NetworkState& state, DcId dc, VnfType type);
/// Validates the request against the catalog, forces it to Pending and assigns the next id.
RequestId add_request(NetworkState& state, SfcRequest request);

std::size_t idle_vnf_count(const NetworkState& state, DcId dc, std::optional<VnfType> type = std::nullopt);

struct Resources {
  std::int64_t compute = 0;
  std::int64_t storage = 0;
  friend bool operator==(const Resources&, const Resources&) = default;
};

Resources available_resources(const NetworkState& state, DcId dc);
bool can_host(const NetworkState& state, DcId dc, VnfType type);

struct Neighbor {
  DcId dc;
  LinkId link;
  std::int64_t available_kbps = 0;
  double latency_ms = 0.0;
};

/// One entry per incident link, ascending by neighbor id.
std::vector<Neighbor> neighbors(const NetworkState& state, DcId dc);

/// A path hop either names an existing instance or asks for a new one in a DC.
/// Within one allocation, repeated NewInstance hops for the same (dc, type)
/// reuse the instance created earlier in that allocation while it has capacity.
struct NewInstance {
  DcId dc;
  VnfType type = VnfType::NAT;
  friend bool operator==(const NewInstance&, const NewInstance&) = default;
};
using PathHop = std::variant<InstanceId, NewInstance>;

struct Allocation {
  RequestId request;
  std::vector<PathHop> path;
  std::vector<LinkId> links;  // route from the ingress DC through every hop, in order
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Serves a pending request along the given path. All-or-nothing: on any
/// error (UnknownId, NotPending, SequenceMismatch, InvalidRoute,
/// CapacityExceeded) the state is left untouched.
void apply_allocation(NetworkState& state, const Allocation& allocation);

void mark_rejected(NetworkState& state, RequestId id, std::string reason);

bool is_connected(const NetworkState& state);

/// Recomputes every derived quantity from first principles and reports each
/// mismatch or bound violation. Empty result means the state is consistent.
std::vector<std::string> audit(const NetworkState& state);

/// Bandwidth text used everywhere a rate is shown: whole Mbps, or Kbps below 1 Mbps.
std::string format_bandwidth(std::int64_t kbps);

}  // namespace sfcqa::netmodel
