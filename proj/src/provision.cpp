#include "sfcqa/provision.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "sfcqa/error.hpp"

namespace sfcqa::provision {

using namespace netmodel;

std::vector<SfcRequest> generate_bundle(const SfcCatalogEntry& entry, Rng& rng, DcId ingress) {
  const std::int64_t size = rng.uniform_int(entry.bundle.lo, entry.bundle.hi);
  std::vector<SfcRequest> bundle;
  bundle.reserve(static_cast<std::size_t>(size));
  for (std::int64_t i = 0; i < size; ++i) {
    SfcRequest r;
    r.sfc_type = entry.sfc_type;
    r.ingress = ingress;
    r.bandwidth_kbps = entry.fixed_bandwidth()
                           ? entry.bandwidth_kbps.lo
                           : rng.uniform_int(entry.bandwidth_kbps.lo / 1000, entry.bandwidth_kbps.hi / 1000) * 1000;
    r.e2e_budget_ms = entry.e2e_delay_ms;
    bundle.push_back(std::move(r));
  }
  return bundle;
}

std::string_view name(RejectReason reason) {
  switch (reason) {
    case RejectReason::NoCompute: return "NoCompute";
    case RejectReason::NoBandwidth: return "NoBandwidth";
    case RejectReason::LatencyBudget: return "LatencyBudget";
  }
  return "NoCompute";
}

namespace {

/// Tentative reservations made while a request's path is being planned.
class Reservation {
 public:
  explicit Reservation(const NetworkState& state) : state_(state) {}

  // Slot for `type` in `dc` without leaving it, or nullopt.
  std::optional<PathHop> slot(DcId dc_id, VnfType type) const {
    const VnfProfile& p = state_.profile(type);
    for (InstanceId id : state_.dc(dc_id).hosted) {
      const VnfInstance& inst = state_.instance(id);
      if (inst.type != type) continue;
      if (inst.assigned_count + extra_assigned(id) < p.capacity) return id;
    }
    for (const Fresh& f : fresh_) {
      if (f.dc == dc_id && f.type == type && f.assigned < p.capacity) return NewInstance{dc_id, type};
    }
    const Resources free = available_resources(state_, dc_id);
    const Resources extra = extra_usage(dc_id);
    if (free.compute - extra.compute >= p.compute_demand && free.storage - extra.storage >= p.storage_demand) {
      return NewInstance{dc_id, type};
    }
    return std::nullopt;
  }

  std::int64_t link_available(LinkId id) const {
    auto it = link_extra_.find(id.value);
    return state_.link(id).available_kbps() - (it == link_extra_.end() ? 0 : it->second);
  }

  void take(const PathHop& hop) {
    if (const auto* id = std::get_if<InstanceId>(&hop)) {
      ++assigned_[id->value];
      return;
    }
    const auto& want = std::get<NewInstance>(hop);
    const VnfProfile& p = state_.profile(want.type);
    for (Fresh& f : fresh_) {
      if (f.dc == want.dc && f.type == want.type && f.assigned < p.capacity) {
        ++f.assigned;
        return;
      }
    }
    fresh_.push_back({want.dc, want.type, 1});
    Resources& u = usage_[want.dc.value];
    u.compute += p.compute_demand;
    u.storage += p.storage_demand;
  }

  void take_link(LinkId id, std::int64_t kbps) { link_extra_[id.value] += kbps; }

 private:
  struct Fresh {
    DcId dc;
    VnfType type;
    std::int64_t assigned = 0;
  };

  std::int64_t extra_assigned(InstanceId id) const {
    auto it = assigned_.find(id.value);
    return it == assigned_.end() ? 0 : it->second;
  }
  Resources extra_usage(DcId dc) const {
    auto it = usage_.find(dc.value);
    return it == usage_.end() ? Resources{} : it->second;
  }

  const NetworkState& state_;
  std::map<std::uint32_t, std::int64_t> assigned_;
  std::vector<Fresh> fresh_;
  std::map<std::uint32_t, Resources> usage_;
  std::map<std::uint32_t, std::int64_t> link_extra_;
};

struct Candidate {
  DcId dc;
  PathHop hop;
  std::optional<LinkId> link;
  double link_latency_ms = 0.0;
};

// chooser picks one index from the non-empty feasible candidate list.
// With prefer_stay the neighbors are only considered when the current DC cannot host the hop.
template <class Chooser>
PlacementDecision plan(const NetworkState& state, RequestId request_id, bool prefer_stay, Chooser&& choose) {
  const SfcRequest& request = state.request(request_id);
  if (request.status != RequestStatus::Pending) {
    throw Error(ErrorKind::NotPending, "request " + std::to_string(request_id.value) + " is not pending");
  }
  const SfcCatalogEntry& entry = state.entry(request.sfc_type);

  PlacementDecision decision;
  Allocation allocation;
  allocation.request = request_id;
  Reservation reservation(state);
  DcId cur = request.ingress;

  for (VnfType type : entry.vnf_sequence) {
    std::vector<Candidate> feasible;
    bool compute_somewhere = false;
    if (auto hop = reservation.slot(cur, type)) {
      compute_somewhere = true;
      feasible.push_back({cur, *hop, std::nullopt, 0.0});
    }
    if (feasible.empty() || !prefer_stay) {
      for (const Neighbor& nb : neighbors(state, cur)) {
        auto hop = reservation.slot(nb.dc, type);
        if (!hop) continue;
        compute_somewhere = true;
        if (reservation.link_available(nb.link) < request.bandwidth_kbps) continue;
        feasible.push_back({nb.dc, *hop, nb.link, nb.latency_ms});
      }
    }
    if (feasible.empty()) {
      decision.rejection = compute_somewhere ? RejectReason::NoBandwidth : RejectReason::NoCompute;
      return decision;
    }
    const Candidate& pick = feasible[choose(feasible.size())];
    reservation.take(pick.hop);
    if (pick.link) {
      reservation.take_link(*pick.link, request.bandwidth_kbps);
      allocation.links.push_back(*pick.link);
      decision.latency_ms += pick.link_latency_ms;
    }
    decision.latency_ms += state.profile(type).proc_latency_ms;
    allocation.path.push_back(pick.hop);
    decision.hop_dcs.push_back(pick.dc);
    cur = pick.dc;
  }

  if (decision.latency_ms > static_cast<double>(request.e2e_budget_ms)) {
    decision.rejection = RejectReason::LatencyBudget;
    return decision;
  }
  decision.allocation = std::move(allocation);
  return decision;
}

PlacementDecision commit(NetworkState& state, RequestId request, PlacementDecision decision) {
  if (decision.allocation) {
    apply_allocation(state, *decision.allocation);
  } else {
    mark_rejected(state, request, std::string(name(*decision.rejection)));
  }
  return decision;
}

}  // namespace

PlacementDecision plan_first_fit(const NetworkState& state, RequestId request) {
  return plan(state, request, true, [](std::size_t) { return std::size_t{0}; });
}

PlacementDecision plan_random(const NetworkState& state, RequestId request, Rng& rng) {
  return plan(state, request, false, [&rng](std::size_t n) { return rng.index(n); });
}

PlacementDecision place_first_fit(NetworkState& state, RequestId request) {
  return commit(state, request, plan_first_fit(state, request));
}

nlohmann::json to_json(const EpisodeStats& stats) {
  nlohmann::json rejections = nlohmann::json::array();
  for (const Rejection& r : stats.rejections) {
    rejections.push_back({{"request_id", r.request.value}, {"reason", r.reason}});
  }
  return {{"requests_total", stats.total},
          {"requests_served", stats.served},
          {"requests_rejected", stats.rejected},
          {"acceptance_ratio", stats.acceptance_ratio()},
          {"rejections", rejections}};
}

std::vector<Allocation> parse_trace(std::istream& in) {
  std::vector<Allocation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "trace line " + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw Error(ErrorKind::MalformedInput, "expected an object");
      Allocation a;
      a.request = RequestId{j.at("request_id").get<std::uint32_t>()};
      for (const auto& hop : j.at("path")) {
        if (hop.is_number_unsigned()) {
          a.path.emplace_back(InstanceId{hop.get<std::uint32_t>()});
        } else if (hop.is_object()) {
          const auto type_name = hop.at("vnf_type").get<std::string>();
          const auto type = parse_vnf_type(type_name);
          if (!type) throw Error(ErrorKind::MalformedInput, "unknown VNF type '" + type_name + "'");
          a.path.emplace_back(NewInstance{DcId{hop.at("dc_id").get<std::uint32_t>()}, *type});
        } else {
          throw Error(ErrorKind::MalformedInput, "path entries must be instance ids or {dc_id, vnf_type}");
        }
      }
      for (const auto& l : j.at("links")) a.links.push_back(LinkId{l.get<std::uint32_t>()});
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedInput, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedInput, where + ": " + e.what());
    }
  }
  return out;
}

EpisodeStats ingest_trace(NetworkState& state, const std::vector<Allocation>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Allocation& a = trace[i];
    try {
      state.request(a.request);
      for (const PathHop& hop : a.path) {
        if (const auto* id = std::get_if<InstanceId>(&hop)) {
          state.instance(*id);
        } else {
          state.dc(std::get<NewInstance>(hop).dc);
        }
      }
      for (LinkId l : a.links) state.link(l);
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedInput, "trace entry " + std::to_string(i) + ": " + e.what());
    }
  }

  EpisodeStats stats;
  for (const Allocation& a : trace) {
    ++stats.total;
    try {
      apply_allocation(state, a);
      ++stats.served;
    } catch (const Error& e) {
      ++stats.rejected;
      stats.rejections.push_back({a.request, e.what()});
      if (state.request(a.request).status == RequestStatus::Pending) mark_rejected(state, a.request, e.what());
    }
  }
  return stats;
}

EpisodeStats ingest_trace(NetworkState& state, const std::filesystem::path& trace_file) {
  std::ifstream in(trace_file);
  if (!in) throw Error(ErrorKind::Io, "cannot open trace " + trace_file.string());
  return ingest_trace(state, parse_trace(in));
}

Policy parse_policy(std::string_view text) {
  if (text == "first-fit") return FirstFit{};
  if (text == "random") return RandomPolicy{};
  constexpr std::string_view prefix = "trace:";
  if (text.starts_with(prefix) && text.size() > prefix.size()) {
    return ExternalTrace{std::filesystem::path(std::string(text.substr(prefix.size())))};
  }
  throw Error(ErrorKind::InvalidConfig, "unknown policy '" + std::string(text) + "'");
}

std::string policy_text(const Policy& policy) {
  if (std::holds_alternative<FirstFit>(policy)) return "first-fit";
  if (std::holds_alternative<RandomPolicy>(policy)) return "random";
  return "trace:" + std::get<ExternalTrace>(policy).path.string();
}

EpisodeStats run_episode(NetworkState& state, const EpisodeConfig& config) {
  if (state.dcs.empty()) throw Error(ErrorKind::InvalidConfig, "episode needs at least one DC");
  for (std::int64_t n : config.arrivals_per_type) {
    if (n < 0) throw Error(ErrorKind::InvalidConfig, "arrival counts must be non-negative");
  }
  // Trace files are parsed before any request is generated so a bad file leaves the state alone.
  std::optional<std::vector<Allocation>> trace;
  if (const auto* t = std::get_if<ExternalTrace>(&config.policy)) {
    std::ifstream in(t->path);
    if (!in) throw Error(ErrorKind::Io, "cannot open trace " + t->path.string());
    trace = parse_trace(in);
  }

  std::optional<NetworkState> before;
  if (trace) before = state;

  Rng arrivals(config.seed);
  Rng policy_rng(derive_seed(config.seed, 1));
  EpisodeStats stats;
  std::vector<RequestId> generated;
  for (SfcType type : kSfcTypes) {
    for (std::int64_t a = 0; a < config.arrivals_per_type[index_of(type)]; ++a) {
      const DcId ingress{static_cast<std::uint32_t>(arrivals.index(state.dcs.size()))};
      for (SfcRequest& r : generate_bundle(state.entry(type), arrivals, ingress)) {
        const RequestId id = add_request(state, std::move(r));
        generated.push_back(id);
        if (trace) continue;
        PlacementDecision d = std::holds_alternative<RandomPolicy>(config.policy)
                                  ? plan_random(state, id, policy_rng)
                                  : plan_first_fit(state, id);
        commit(state, id, std::move(d));
      }
    }
  }

  if (trace) {
    try {
      return ingest_trace(state, *trace);
    } catch (...) {
      state = std::move(*before);
      throw;
    }
  }
  for (RequestId id : generated) {
    const SfcRequest& r = state.requests[id.value];
    ++stats.total;
    if (r.status == RequestStatus::Served) {
      ++stats.served;
    } else {
      ++stats.rejected;
      stats.rejections.push_back({id, r.reject_reason});
    }
  }
  return stats;
}

}  // namespace sfcqa::provision
