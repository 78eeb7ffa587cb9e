#include "sfcqa/netmodel_json.hpp"

#include <fstream>
#include <sstream>

namespace sfcqa {

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::filesystem::path& path, ErrorKind parse_kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(parse_kind, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace sfcqa

namespace sfcqa::netmodel {

namespace {

using nlohmann::json;
constexpr ErrorKind kBad = ErrorKind::MalformedInput;

std::string_view status_name(RequestStatus s) {
  switch (s) {
    case RequestStatus::Pending: return "Pending";
    case RequestStatus::Served: return "Served";
    case RequestStatus::Rejected: return "Rejected";
  }
  return "Pending";
}

RequestStatus parse_status(const std::string& s) {
  if (s == "Pending") return RequestStatus::Pending;
  if (s == "Served") return RequestStatus::Served;
  if (s == "Rejected") return RequestStatus::Rejected;
  throw Error(kBad, "unknown request status '" + s + "'");
}

VnfType vnf_from(const std::string& s, ErrorKind kind) {
  if (auto t = parse_vnf_type(s)) return *t;
  throw Error(kind, "unknown VNF type '" + s + "'");
}

SfcType sfc_from(const std::string& s, ErrorKind kind) {
  if (auto t = parse_sfc_type(s)) return *t;
  throw Error(kind, "unknown SFC type '" + s + "'");
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

IntRange int_range(const json& j, const char* key, ErrorKind kind) {
  const auto v = json_get<std::vector<std::int64_t>>(j, key, kind);
  if (v.size() != 2 || v[1] < v[0]) throw Error(kind, std::string("field '") + key + "' must be [lo, hi]");
  return {v[0], v[1]};
}

template <class IdT>
std::vector<IdT> id_list(const json& j, const char* key) {
  std::vector<IdT> out;
  for (auto v : json_get<std::vector<std::uint32_t>>(j, key, kBad)) out.push_back(IdT{v});
  return out;
}

template <class IdT>
json id_list_json(const std::vector<IdT>& ids) {
  json arr = json::array();
  for (IdT id : ids) arr.push_back(id.value);
  return arr;
}

}  // namespace

json to_json(const ProfileTable& profiles) {
  json out = json::object();
  for (const VnfProfile& p : profiles) {
    out[std::string(name(p.type))] = {{"compute_demand", p.compute_demand},
                                      {"storage_demand", p.storage_demand},
                                      {"proc_latency_ms", p.proc_latency_ms},
                                      {"capacity", p.capacity}};
  }
  return out;
}

ProfileTable profiles_from_json(const json& j, ErrorKind kind) {
  if (!j.is_object() || j.size() != kVnfTypes.size()) {
    throw Error(kind, "profiles must list exactly the six VNF types");
  }
  ProfileTable table{};
  for (VnfType t : kVnfTypes) {
    const auto& p = json_get<json>(j, std::string(name(t)).c_str(), kind);
    table[index_of(t)] = {t, json_get<std::int64_t>(p, "compute_demand", kind),
                          json_get<std::int64_t>(p, "storage_demand", kind),
                          json_get<double>(p, "proc_latency_ms", kind), json_get<std::int64_t>(p, "capacity", kind)};
    const VnfProfile& v = table[index_of(t)];
    if (v.compute_demand <= 0 || v.storage_demand <= 0 || v.proc_latency_ms <= 0.0 || v.capacity <= 0) {
      throw Error(kind, "profile values for " + std::string(name(t)) + " must be positive");
    }
  }
  return table;
}

json to_json(const SfcCatalogEntry& e) {
  json seq = json::array();
  for (VnfType t : e.vnf_sequence) seq.push_back(std::string(name(t)));
  return {{"sfc_type", std::string(name(e.sfc_type))},
          {"vnf_sequence", seq},
          {"bandwidth_kbps", range_json(e.bandwidth_kbps)},
          {"e2e_delay_ms", e.e2e_delay_ms},
          {"bundle", range_json(e.bundle)}};
}

json to_json(const NetworkState& state) {
  json dcs = json::array();
  for (const DataCenter& dc : state.dcs) {
    dcs.push_back({{"id", dc.id.value},
                   {"compute_capacity", dc.compute_capacity},
                   {"storage_capacity", dc.storage_capacity},
                   {"compute_used", dc.compute_used},
                   {"storage_used", dc.storage_used},
                   {"hosted", id_list_json(dc.hosted)}});
  }
  json links = json::array();
  for (const Link& l : state.links) {
    links.push_back({{"id", l.id.value},
                     {"a", l.a.value},
                     {"b", l.b.value},
                     {"bandwidth_capacity_kbps", l.capacity_kbps},
                     {"bandwidth_used_kbps", l.used_kbps},
                     {"latency_ms", l.latency_ms}});
  }
  json instances = json::array();
  for (const VnfInstance& inst : state.instances) {
    instances.push_back({{"id", inst.id.value},
                         {"type", std::string(name(inst.type))},
                         {"dc", inst.dc.value},
                         {"state", inst.state() == InstanceState::Idle ? "Idle" : "Active"},
                         {"assigned_count", inst.assigned_count}});
  }
  json requests = json::array();
  for (const SfcRequest& r : state.requests) {
    requests.push_back({{"id", r.id.value},
                        {"sfc_type", std::string(name(r.sfc_type))},
                        {"ingress", r.ingress.value},
                        {"bandwidth_kbps", r.bandwidth_kbps},
                        {"e2e_budget_ms", r.e2e_budget_ms},
                        {"status", std::string(status_name(r.status))},
                        {"path", id_list_json(r.path)},
                        {"links", id_list_json(r.links)},
                        {"reject_reason", r.reject_reason}});
  }
  json catalog = json::array();
  for (const SfcCatalogEntry& e : state.catalog) catalog.push_back(to_json(e));
  return {{"dcs", dcs},         {"links", links},     {"instances", instances},
          {"requests", requests}, {"profiles", to_json(state.profiles)},
          {"catalog", catalog},   {"seed", state.seed}};
}

NetworkState state_from_json(const json& j) {
  NetworkState state;
  state.seed = json_get<std::uint64_t>(j, "seed", kBad);
  state.profiles = profiles_from_json(json_get<json>(j, "profiles", kBad), kBad);

  // The catalog is fixed; a snapshot must carry the same table.
  const json catalog = json_get<json>(j, "catalog", kBad);
  json expected = json::array();
  for (const SfcCatalogEntry& e : sfc_catalog()) expected.push_back(to_json(e));
  if (catalog != expected) throw Error(kBad, "catalog in snapshot differs from the built-in catalog");

  for (const json& d : json_get<json>(j, "dcs", kBad)) {
    DataCenter dc;
    dc.id = DcId{json_get<std::uint32_t>(d, "id", kBad)};
    dc.compute_capacity = json_get<std::int64_t>(d, "compute_capacity", kBad);
    dc.storage_capacity = json_get<std::int64_t>(d, "storage_capacity", kBad);
    dc.compute_used = json_get<std::int64_t>(d, "compute_used", kBad);
    dc.storage_used = json_get<std::int64_t>(d, "storage_used", kBad);
    dc.hosted = id_list<InstanceId>(d, "hosted");
    state.dcs.push_back(std::move(dc));
  }
  for (const json& l : json_get<json>(j, "links", kBad)) {
    Link link;
    link.id = LinkId{json_get<std::uint32_t>(l, "id", kBad)};
    link.a = DcId{json_get<std::uint32_t>(l, "a", kBad)};
    link.b = DcId{json_get<std::uint32_t>(l, "b", kBad)};
    link.capacity_kbps = json_get<std::int64_t>(l, "bandwidth_capacity_kbps", kBad);
    link.used_kbps = json_get<std::int64_t>(l, "bandwidth_used_kbps", kBad);
    link.latency_ms = json_get<double>(l, "latency_ms", kBad);
    state.links.push_back(link);
  }
  for (const json& i : json_get<json>(j, "instances", kBad)) {
    VnfInstance inst;
    inst.id = InstanceId{json_get<std::uint32_t>(i, "id", kBad)};
    inst.type = vnf_from(json_get<std::string>(i, "type", kBad), kBad);
    inst.dc = DcId{json_get<std::uint32_t>(i, "dc", kBad)};
    inst.assigned_count = json_get<std::int64_t>(i, "assigned_count", kBad);
    const auto st = json_get<std::string>(i, "state", kBad);
    if (st != (inst.state() == InstanceState::Idle ? "Idle" : "Active")) {
      throw Error(kBad, "instance " + std::to_string(inst.id.value) + " state disagrees with assigned_count");
    }
    state.instances.push_back(inst);
  }
  for (const json& r : json_get<json>(j, "requests", kBad)) {
    SfcRequest req;
    req.id = RequestId{json_get<std::uint32_t>(r, "id", kBad)};
    req.sfc_type = sfc_from(json_get<std::string>(r, "sfc_type", kBad), kBad);
    req.ingress = DcId{json_get<std::uint32_t>(r, "ingress", kBad)};
    req.bandwidth_kbps = json_get<std::int64_t>(r, "bandwidth_kbps", kBad);
    req.e2e_budget_ms = json_get<std::int64_t>(r, "e2e_budget_ms", kBad);
    req.status = parse_status(json_get<std::string>(r, "status", kBad));
    req.path = id_list<InstanceId>(r, "path");
    req.links = id_list<LinkId>(r, "links");
    req.reject_reason = json_get<std::string>(r, "reject_reason", kBad);
    state.requests.push_back(std::move(req));
  }

  const auto problems = audit(state);
  if (!problems.empty()) throw Error(kBad, "state snapshot fails audit: " + problems.front());
  return state;
}

json to_json(const TopologyConfig& c) {
  return {{"dc_count", c.dc_count},
          {"compute_capacity", range_json(c.compute_capacity)},
          {"storage_capacity", range_json(c.storage_capacity)},
          {"link_density", c.link_density},
          {"link_bandwidth_mbps", range_json(c.link_bandwidth_mbps)},
          {"link_latency_ms", json::array({c.link_latency_ms.lo, c.link_latency_ms.hi})},
          {"initial_instances", range_json(c.initial_instances)},
          {"profiles", to_json(c.profiles)}};
}

TopologyConfig topology_config_from_json(const json& j) {
  constexpr ErrorKind kCfg = ErrorKind::InvalidConfig;
  TopologyConfig c;
  c.dc_count = json_get<std::int64_t>(j, "dc_count", kCfg);
  c.compute_capacity = int_range(j, "compute_capacity", kCfg);
  c.storage_capacity = int_range(j, "storage_capacity", kCfg);
  c.link_density = json_get<double>(j, "link_density", kCfg);
  c.link_bandwidth_mbps = int_range(j, "link_bandwidth_mbps", kCfg);
  const auto lat = json_get<std::vector<double>>(j, "link_latency_ms", kCfg);
  if (lat.size() != 2 || lat[1] < lat[0]) throw Error(kCfg, "field 'link_latency_ms' must be [lo, hi]");
  c.link_latency_ms = {lat[0], lat[1]};
  c.initial_instances = int_range(j, "initial_instances", kCfg);
  c.profiles = profiles_from_json(json_get<json>(j, "profiles", kCfg), kCfg);
  return c;
}

}  // namespace sfcqa::netmodel
