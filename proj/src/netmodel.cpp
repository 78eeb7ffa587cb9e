#include "sfcqa/netmodel.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <utility>

#include "sfcqa/error.hpp"
#include "sfcqa/rng.hpp"

namespace sfcqa::netmodel {

namespace {

constexpr std::array<std::string_view, 6> kVnfNames{"NAT", "FW", "TM", "VOC", "WO", "IDPS"};
constexpr std::array<std::string_view, 6> kSfcNames{"CG", "AR", "VoIP", "VS", "MIoT", "Ind40"};

std::string id_text(std::string_view what, std::uint32_t value) {
  return std::string(what) + " " + std::to_string(value);
}

std::vector<SfcCatalogEntry> build_catalog() {
  using V = VnfType;
  return {
      {SfcType::CG, {V::NAT, V::FW, V::VOC, V::WO, V::IDPS}, {4000, 4000}, 80, {40, 55}},
      {SfcType::AR, {V::NAT, V::FW, V::TM, V::VOC, V::IDPS}, {100000, 100000}, 10, {1, 4}},
      {SfcType::VoIP, {V::NAT, V::FW, V::TM, V::FW, V::NAT}, {64, 64}, 100, {100, 200}},
      {SfcType::VS, {V::NAT, V::FW, V::TM, V::VOC, V::IDPS}, {4000, 4000}, 100, {50, 100}},
      {SfcType::MIoT, {V::NAT, V::FW, V::IDPS}, {1000, 50000}, 5, {10, 15}},
      {SfcType::Ind40, {V::NAT, V::FW}, {70000, 70000}, 8, {1, 4}},
  };
}

}  // namespace

std::string_view name(VnfType type) { return kVnfNames[index_of(type)]; }
std::string_view name(SfcType type) { return kSfcNames[index_of(type)]; }

std::optional<VnfType> parse_vnf_type(std::string_view text) {
  for (VnfType t : kVnfTypes) {
    if (name(t) == text) return t;
  }
  return std::nullopt;
}

std::optional<SfcType> parse_sfc_type(std::string_view text) {
  for (SfcType t : kSfcTypes) {
    if (name(t) == text) return t;
  }
  return std::nullopt;
}

ProfileTable default_profiles() {
  return {{
      {VnfType::NAT, 2, 1, 0.5, 50},
      {VnfType::FW, 3, 2, 0.5, 40},
      {VnfType::TM, 2, 2, 0.5, 40},
      {VnfType::VOC, 4, 3, 1.0, 30},
      {VnfType::WO, 3, 2, 1.0, 30},
      {VnfType::IDPS, 4, 3, 1.0, 30},
  }};
}

const std::vector<SfcCatalogEntry>& sfc_catalog() {
  static const std::vector<SfcCatalogEntry> catalog = build_catalog();
  return catalog;
}

const SfcCatalogEntry& catalog_entry(SfcType type) { return sfc_catalog()[index_of(type)]; }

const DataCenter& NetworkState::dc(DcId id) const {
  if (id.value >= dcs.size()) throw Error(ErrorKind::UnknownId, id_text("dc", id.value));
  return dcs[id.value];
}

const Link& NetworkState::link(LinkId id) const {
  if (id.value >= links.size()) throw Error(ErrorKind::UnknownId, id_text("link", id.value));
  return links[id.value];
}

const VnfInstance& NetworkState::instance(InstanceId id) const {
  if (id.value >= instances.size()) throw Error(ErrorKind::UnknownId, id_text("instance", id.value));
  return instances[id.value];
}

const SfcRequest& NetworkState::request(RequestId id) const {
  if (id.value >= requests.size()) throw Error(ErrorKind::UnknownId, id_text("request", id.value));
  return requests[id.value];
}

std::optional<LinkId> NetworkState::link_between(DcId a, DcId b) const {
  for (const Link& l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.id;
  }
  return std::nullopt;
}

TopologyConfig default_topology_config() {
  TopologyConfig config;
  config.dc_count = 6;
  config.compute_capacity = {150, 400};
  config.storage_capacity = {100, 250};
  config.link_density = 0.5;
  config.link_bandwidth_mbps = {500, 2000};
  config.link_latency_ms = {0.2, 1.0};
  config.initial_instances = {0, 6};
  config.profiles = default_profiles();
  return config;
}

NetworkState make_state(const ProfileTable& profiles) {
  NetworkState state;
  state.profiles = profiles;
  return state;
}

DcId add_dc(NetworkState& state, std::int64_t compute_capacity, std::int64_t storage_capacity) {
  if (compute_capacity < 0 || storage_capacity < 0) {
    throw Error(ErrorKind::InvalidConfig, "negative DC capacity");
  }
  DataCenter dc;
  dc.id = DcId{static_cast<std::uint32_t>(state.dcs.size())};
  dc.compute_capacity = compute_capacity;
  dc.storage_capacity = storage_capacity;
  state.dcs.push_back(std::move(dc));
  return state.dcs.back().id;
}

LinkId add_link(NetworkState& state, DcId a, DcId b, std::int64_t capacity_kbps, double latency_ms) {
  state.dc(a);
  state.dc(b);
  if (a == b) throw Error(ErrorKind::InvalidConfig, "link endpoints must differ");
  if (state.link_between(a, b)) {
    throw Error(ErrorKind::InvalidConfig, "duplicate link between dc " + std::to_string(a.value) +
                                              " and dc " + std::to_string(b.value));
  }
  if (capacity_kbps <= 0 || latency_ms < 0.0) throw Error(ErrorKind::InvalidConfig, "invalid link parameters");
  Link link;
  link.id = LinkId{static_cast<std::uint32_t>(state.links.size())};
  link.a = std::min(a, b);
  link.b = std::max(a, b);
  link.capacity_kbps = capacity_kbps;
  link.latency_ms = latency_ms;
  state.links.push_back(link);
  return link.id;
}

bool can_host(const NetworkState& state, DcId dc, VnfType type) {
  const Resources free = available_resources(state, dc);
  const VnfProfile& p = state.profile(type);
  return free.compute >= p.compute_demand && free.storage >= p.storage_demand;
}

InstanceId instantiate(NetworkState& state, DcId dc_id, VnfType type) {
  if (!can_host(state, dc_id, type)) {
    throw Error(ErrorKind::CapacityExceeded,
                "dc " + std::to_string(dc_id.value) + " cannot host another " + std::string(name(type)));
  }
  const VnfProfile& p = state.profile(type);
  VnfInstance inst;
  inst.id = InstanceId{static_cast<std::uint32_t>(state.instances.size())};
  inst.type = type;
  inst.dc = dc_id;
  state.instances.push_back(inst);
  DataCenter& dc = state.dcs[dc_id.value];
  dc.compute_used += p.compute_demand;
  dc.storage_used += p.storage_demand;
  dc.hosted.push_back(inst.id);
  return inst.id;
}

RequestId add_request(NetworkState& state, SfcRequest request) {
  state.dc(request.ingress);
  const SfcCatalogEntry& entry = state.entry(request.sfc_type);
  if (!entry.bandwidth_kbps.contains(request.bandwidth_kbps)) {
    throw Error(ErrorKind::InvalidConfig, "bandwidth " + std::to_string(request.bandwidth_kbps) +
                                              " Kbps outside catalog range for " +
                                              std::string(name(request.sfc_type)));
  }
  request.id = RequestId{static_cast<std::uint32_t>(state.requests.size())};
  request.e2e_budget_ms = entry.e2e_delay_ms;
  request.status = RequestStatus::Pending;
  request.path.clear();
  request.links.clear();
  request.reject_reason.clear();
  state.requests.push_back(std::move(request));
  return state.requests.back().id;
}

NetworkState new_topology(const TopologyConfig& config, std::uint64_t seed) {
  if (config.dc_count < 2) throw Error(ErrorKind::InvalidConfig, "dc_count must be at least 2");
  if (!(config.link_density > 0.0 && config.link_density <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "link_density must lie in (0, 1]");
  }
  const std::int64_t n = config.dc_count;
  const std::int64_t pairs = n * (n - 1) / 2;
  const auto target_links = static_cast<std::int64_t>(config.link_density * static_cast<double>(pairs) + 0.5);
  if (target_links < n - 1) {
    throw Error(ErrorKind::InvalidConfig, "link_density " + std::to_string(config.link_density) +
                                              " yields fewer links than a spanning tree needs");
  }
  auto valid_range = [](const IntRange& r) { return r.lo > 0 && r.hi >= r.lo; };
  if (!valid_range(config.compute_capacity) || !valid_range(config.storage_capacity) ||
      !valid_range(config.link_bandwidth_mbps) || config.initial_instances.lo < 0 ||
      config.initial_instances.hi < config.initial_instances.lo || config.link_latency_ms.lo < 0.0 ||
      config.link_latency_ms.hi < config.link_latency_ms.lo) {
    throw Error(ErrorKind::InvalidConfig, "invalid capacity, bandwidth, latency or instance range");
  }
  for (VnfType t : kVnfTypes) {
    const VnfProfile& p = config.profiles[index_of(t)];
    if (p.type != t || p.compute_demand <= 0 || p.storage_demand <= 0 || p.proc_latency_ms <= 0.0 ||
        p.capacity <= 0) {
      throw Error(ErrorKind::InvalidConfig, "invalid profile for " + std::string(name(t)));
    }
  }

  Rng rng(seed);
  NetworkState state = make_state(config.profiles);
  state.seed = seed;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t compute = rng.uniform_int(config.compute_capacity.lo, config.compute_capacity.hi);
    const std::int64_t storage = rng.uniform_int(config.storage_capacity.lo, config.storage_capacity.hi);
    add_dc(state, compute, storage);
  }

  // Latency is drawn on a 0.1 ms grid so serialized values stay short decimals.
  const auto lat_lo = static_cast<std::int64_t>(config.link_latency_ms.lo * 10.0 + 0.5);
  const auto lat_hi = static_cast<std::int64_t>(config.link_latency_ms.hi * 10.0 + 0.5);
  std::vector<std::pair<DcId, DcId>> chosen;
  for (std::int64_t i = 1; i < n; ++i) {
    const auto parent = static_cast<std::uint32_t>(rng.uniform_int(0, i - 1));
    chosen.emplace_back(DcId{parent}, DcId{static_cast<std::uint32_t>(i)});
  }
  std::vector<std::pair<DcId, DcId>> rest;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const bool in_tree = std::any_of(chosen.begin(), chosen.end(), [&](const auto& e) {
        return e.first == DcId{a} && e.second == DcId{b};
      });
      if (!in_tree) rest.emplace_back(DcId{a}, DcId{b});
    }
  }
  rng.shuffle(std::span(rest));
  rest.resize(static_cast<std::size_t>(target_links - (n - 1)));
  chosen.insert(chosen.end(), rest.begin(), rest.end());
  std::sort(chosen.begin(), chosen.end());
  for (const auto& [a, b] : chosen) {
    const std::int64_t mbps = rng.uniform_int(config.link_bandwidth_mbps.lo, config.link_bandwidth_mbps.hi);
    const double latency = static_cast<double>(rng.uniform_int(lat_lo, lat_hi)) / 10.0;
    add_link(state, a, b, mbps * 1000, latency);
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const std::int64_t count = rng.uniform_int(config.initial_instances.lo, config.initial_instances.hi);
    for (std::int64_t k = 0; k < count; ++k) {
      const VnfType type = kVnfTypes[rng.index(kVnfTypes.size())];
      if (can_host(state, DcId{i}, type)) instantiate(state, DcId{i}, type);
    }
  }
  return state;
}

std::size_t idle_vnf_count(const NetworkState& state, DcId dc_id, std::optional<VnfType> type) {
  const DataCenter& dc = state.dc(dc_id);
  std::size_t count = 0;
  for (InstanceId id : dc.hosted) {
    const VnfInstance& inst = state.instance(id);
    if (inst.state() == InstanceState::Idle && (!type || inst.type == *type)) ++count;
  }
  return count;
}

Resources available_resources(const NetworkState& state, DcId dc_id) {
  const DataCenter& dc = state.dc(dc_id);
  return {dc.compute_capacity - dc.compute_used, dc.storage_capacity - dc.storage_used};
}

std::vector<Neighbor> neighbors(const NetworkState& state, DcId dc_id) {
  state.dc(dc_id);
  std::vector<Neighbor> out;
  for (const Link& l : state.links) {
    if (l.touches(dc_id)) out.push_back({l.other(dc_id), l.id, l.available_kbps(), l.latency_ms});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& x, const Neighbor& y) { return x.dc < y.dc; });
  return out;
}

void apply_allocation(NetworkState& state, const Allocation& allocation) {
  // Phase 1: resolve and validate everything against the untouched state.
  const SfcRequest& request = state.request(allocation.request);
  if (request.status != RequestStatus::Pending) {
    throw Error(ErrorKind::NotPending, id_text("request", request.id.value) + " is not pending");
  }
  for (LinkId l : allocation.links) state.link(l);

  struct ResolvedHop {
    VnfType type;
    DcId dc;
    std::optional<InstanceId> existing;
    std::size_t fresh = 0;  // index into fresh_instances when !existing
  };
  struct FreshInstance {
    DcId dc;
    VnfType type;
    std::int64_t assigned = 0;
  };
  std::vector<ResolvedHop> hops;
  std::vector<FreshInstance> fresh_instances;
  for (const PathHop& hop : allocation.path) {
    if (const auto* id = std::get_if<InstanceId>(&hop)) {
      const VnfInstance& inst = state.instance(*id);
      hops.push_back({inst.type, inst.dc, inst.id, 0});
    } else {
      const auto& want = std::get<NewInstance>(hop);
      state.dc(want.dc);
      hops.push_back({want.type, want.dc, std::nullopt, 0});
    }
  }

  const std::vector<VnfType>& sequence = state.entry(request.sfc_type).vnf_sequence;
  if (hops.size() != sequence.size()) {
    throw Error(ErrorKind::SequenceMismatch, "path has " + std::to_string(hops.size()) + " hops, " +
                                                 std::string(name(request.sfc_type)) + " needs " +
                                                 std::to_string(sequence.size()));
  }
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (hops[i].type != sequence[i]) {
      throw Error(ErrorKind::SequenceMismatch, "hop " + std::to_string(i) + " is " +
                                                   std::string(name(hops[i].type)) + ", expected " +
                                                   std::string(name(sequence[i])));
    }
  }

  // The route walks from the ingress DC through each hop DC, consuming links in order.
  std::map<std::uint32_t, std::int64_t> link_traversals;
  {
    DcId cur = request.ingress;
    std::size_t next = 0;
    for (const ResolvedHop& hop : hops) {
      while (cur != hop.dc) {
        if (next == allocation.links.size()) {
          throw Error(ErrorKind::InvalidRoute, "route ends before reaching dc " + std::to_string(hop.dc.value));
        }
        const Link& l = state.link(allocation.links[next++]);
        if (!l.touches(cur)) {
          throw Error(ErrorKind::InvalidRoute,
                      id_text("link", l.id.value) + " does not touch dc " + std::to_string(cur.value));
        }
        ++link_traversals[l.id.value];
        cur = l.other(cur);
      }
    }
    if (next != allocation.links.size()) {
      throw Error(ErrorKind::InvalidRoute, "route has links beyond the last hop");
    }
  }

  // Assign new-instance hops, reusing instances created earlier in this allocation.
  std::map<std::uint32_t, std::int64_t> extra_assigned;
  std::map<std::uint32_t, Resources> extra_usage;
  for (ResolvedHop& hop : hops) {
    if (hop.existing) {
      ++extra_assigned[hop.existing->value];
      continue;
    }
    const VnfProfile& p = state.profile(hop.type);
    auto reuse = std::find_if(fresh_instances.begin(), fresh_instances.end(), [&](const FreshInstance& f) {
      return f.dc == hop.dc && f.type == hop.type && f.assigned < p.capacity;
    });
    if (reuse == fresh_instances.end()) {
      fresh_instances.push_back({hop.dc, hop.type, 0});
      reuse = std::prev(fresh_instances.end());
      Resources& u = extra_usage[hop.dc.value];
      u.compute += p.compute_demand;
      u.storage += p.storage_demand;
    }
    ++reuse->assigned;
    hop.fresh = static_cast<std::size_t>(reuse - fresh_instances.begin());
  }

  for (const auto& [id, extra] : extra_assigned) {
    const VnfInstance& inst = state.instances[id];
    if (inst.assigned_count + extra > state.profile(inst.type).capacity) {
      throw Error(ErrorKind::CapacityExceeded, id_text("instance", id) + " (" + std::string(name(inst.type)) +
                                                   ") has no spare capacity");
    }
  }
  for (const auto& [dc_id, extra] : extra_usage) {
    const DataCenter& dc = state.dcs[dc_id];
    if (dc.compute_used + extra.compute > dc.compute_capacity) {
      throw Error(ErrorKind::CapacityExceeded, "dc " + std::to_string(dc_id) + " lacks compute");
    }
    if (dc.storage_used + extra.storage > dc.storage_capacity) {
      throw Error(ErrorKind::CapacityExceeded, "dc " + std::to_string(dc_id) + " lacks storage");
    }
  }
  for (const auto& [link_id, count] : link_traversals) {
    const Link& l = state.links[link_id];
    if (l.used_kbps + count * request.bandwidth_kbps > l.capacity_kbps) {
      throw Error(ErrorKind::CapacityExceeded, id_text("link", link_id) + " lacks bandwidth");
    }
  }

  // Phase 2: commit. Nothing below can fail.
  std::vector<InstanceId> fresh_ids;
  for (const FreshInstance& f : fresh_instances) fresh_ids.push_back(instantiate(state, f.dc, f.type));
  SfcRequest& req = state.requests[allocation.request.value];
  for (const ResolvedHop& hop : hops) {
    const InstanceId id = hop.existing ? *hop.existing : fresh_ids[hop.fresh];
    ++state.instances[id.value].assigned_count;
    req.path.push_back(id);
  }
  for (const auto& [link_id, count] : link_traversals) {
    state.links[link_id].used_kbps += count * req.bandwidth_kbps;
  }
  req.links = allocation.links;
  req.status = RequestStatus::Served;
}

void mark_rejected(NetworkState& state, RequestId id, std::string reason) {
  const SfcRequest& request = state.request(id);
  if (request.status != RequestStatus::Pending) {
    throw Error(ErrorKind::NotPending, id_text("request", id.value) + " is not pending");
  }
  SfcRequest& req = state.requests[id.value];
  req.status = RequestStatus::Rejected;
  req.reject_reason = std::move(reason);
}

bool is_connected(const NetworkState& state) {
  if (state.dcs.empty()) return true;
  std::vector<bool> seen(state.dcs.size(), false);
  std::queue<DcId> frontier;
  frontier.push(DcId{0});
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const DcId cur = frontier.front();
    frontier.pop();
    for (const Link& l : state.links) {
      if (!l.touches(cur)) continue;
      const DcId next = l.other(cur);
      if (!seen[next.value]) {
        seen[next.value] = true;
        ++visited;
        frontier.push(next);
      }
    }
  }
  return visited == state.dcs.size();
}

std::vector<std::string> audit(const NetworkState& state) {
  std::vector<std::string> problems;
  auto report = [&](std::string msg) { problems.push_back(std::move(msg)); };

  std::vector<Resources> usage(state.dcs.size());
  std::vector<std::vector<InstanceId>> hosted(state.dcs.size());
  for (std::size_t i = 0; i < state.instances.size(); ++i) {
    const VnfInstance& inst = state.instances[i];
    if (inst.id.value != i) report(id_text("instance", inst.id.value) + " stored at index " + std::to_string(i));
    if (inst.dc.value >= state.dcs.size()) {
      report(id_text("instance", inst.id.value) + " references unknown dc");
      continue;
    }
    const VnfProfile& p = state.profile(inst.type);
    usage[inst.dc.value].compute += p.compute_demand;
    usage[inst.dc.value].storage += p.storage_demand;
    hosted[inst.dc.value].push_back(inst.id);
  }

  std::vector<std::int64_t> assigned(state.instances.size(), 0);
  std::vector<std::int64_t> link_usage(state.links.size(), 0);
  for (std::size_t i = 0; i < state.requests.size(); ++i) {
    const SfcRequest& r = state.requests[i];
    const auto rid = [&] { return id_text("request", r.id.value); };
    if (r.id.value != i) report(rid() + " stored at index " + std::to_string(i));
    if (r.ingress.value >= state.dcs.size()) report(rid() + " has unknown ingress");
    const SfcCatalogEntry& entry = state.entry(r.sfc_type);
    if (!entry.bandwidth_kbps.contains(r.bandwidth_kbps)) report(rid() + " bandwidth outside catalog");
    if (r.e2e_budget_ms != entry.e2e_delay_ms) report(rid() + " budget differs from catalog");
    if (r.status != RequestStatus::Served) {
      if (!r.path.empty() || !r.links.empty()) report(rid() + " is not served but has a path");
      continue;
    }
    if (r.path.size() != entry.vnf_sequence.size()) {
      report(rid() + " path length differs from its chain");
      continue;
    }
    for (std::size_t k = 0; k < r.path.size(); ++k) {
      const InstanceId id = r.path[k];
      if (id.value >= state.instances.size()) {
        report(rid() + " path references unknown instance");
        continue;
      }
      if (state.instances[id.value].type != entry.vnf_sequence[k]) report(rid() + " path type mismatch at hop " + std::to_string(k));
      ++assigned[id.value];
    }
    for (LinkId l : r.links) {
      if (l.value >= state.links.size()) {
        report(rid() + " route references unknown link");
        continue;
      }
      link_usage[l.value] += r.bandwidth_kbps;
    }
  }

  for (std::size_t i = 0; i < state.dcs.size(); ++i) {
    const DataCenter& dc = state.dcs[i];
    const auto did = [&] { return "dc " + std::to_string(i); };
    if (dc.id.value != i) report(did() + " has mismatched id");
    if (dc.compute_used != usage[i].compute) report(did() + " compute_used disagrees with hosted instances");
    if (dc.storage_used != usage[i].storage) report(did() + " storage_used disagrees with hosted instances");
    if (dc.compute_used < 0 || dc.compute_used > dc.compute_capacity) report(did() + " compute out of bounds");
    if (dc.storage_used < 0 || dc.storage_used > dc.storage_capacity) report(did() + " storage out of bounds");
    if (dc.hosted != hosted[i]) report(did() + " hosted list disagrees with instance table");
  }
  for (std::size_t i = 0; i < state.instances.size(); ++i) {
    const VnfInstance& inst = state.instances[i];
    if (inst.assigned_count != assigned[i]) report(id_text("instance", inst.id.value) + " assigned_count mismatch");
    if (inst.assigned_count > state.profile(inst.type).capacity) {
      report(id_text("instance", inst.id.value) + " over capacity");
    }
  }
  for (std::size_t i = 0; i < state.links.size(); ++i) {
    const Link& l = state.links[i];
    const auto lid = [&] { return id_text("link", l.id.value); };
    if (l.id.value != i) report(lid() + " stored at index " + std::to_string(i));
    if (l.a == l.b) report(lid() + " is a self loop");
    if (l.a.value >= state.dcs.size() || l.b.value >= state.dcs.size()) report(lid() + " references unknown dc");
    if (l.used_kbps != link_usage[i]) report(lid() + " used bandwidth disagrees with served routes");
    if (l.used_kbps < 0 || l.used_kbps > l.capacity_kbps) report(lid() + " bandwidth out of bounds");
    for (std::size_t j = 0; j < i; ++j) {
      const Link& o = state.links[j];
      if (std::min(o.a, o.b) == std::min(l.a, l.b) && std::max(o.a, o.b) == std::max(l.a, l.b)) {
        report(lid() + " duplicates " + id_text("link", o.id.value));
      }
    }
  }
  if (!is_connected(state)) report("topology is not connected");
  return problems;
}

std::string format_bandwidth(std::int64_t kbps) {
  if (kbps > 0 && kbps < 1000) return std::to_string(kbps) + " Kbps";
  return std::to_string((kbps + 500) / 1000) + " Mbps";
}

}  // namespace sfcqa::netmodel
