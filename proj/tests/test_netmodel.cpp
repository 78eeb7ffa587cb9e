#include <doctest.h>

#include "oracles.hpp"
#include "sfcqa/error.hpp"
#include "sfcqa/netmodel.hpp"
#include "sfcqa/netmodel_json.hpp"
#include "stress.hpp"

using namespace sfcqa;
using namespace sfcqa::netmodel;

namespace {

std::vector<VnfType> seq(std::initializer_list<VnfType> v) { return v; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvariantViolation;
}

SfcRequest request_of(SfcType type, DcId ingress, std::int64_t kbps = 0) {
  SfcRequest r;
  r.sfc_type = type;
  r.ingress = ingress;
  r.bandwidth_kbps = kbps ? kbps : catalog_entry(type).bandwidth_kbps.lo;
  r.e2e_budget_ms = catalog_entry(type).e2e_delay_ms;
  return r;
}

}  // namespace

TEST_CASE("catalog rows") {
  using enum VnfType;
  const auto& cat = sfc_catalog();
  REQUIRE(cat.size() == 6);
  struct Row {
    SfcType type;
    std::vector<VnfType> sequence;
    IntRange kbps;
    std::int64_t delay;
    IntRange bundle;
  };
  const std::vector<Row> expected{
      {SfcType::CG, seq({NAT, FW, VOC, WO, IDPS}), {4000, 4000}, 80, {40, 55}},
      {SfcType::AR, seq({NAT, FW, TM, VOC, IDPS}), {100000, 100000}, 10, {1, 4}},
      {SfcType::VoIP, seq({NAT, FW, TM, FW, NAT}), {64, 64}, 100, {100, 200}},
      {SfcType::VS, seq({NAT, FW, TM, VOC, IDPS}), {4000, 4000}, 100, {50, 100}},
      {SfcType::MIoT, seq({NAT, FW, IDPS}), {1000, 50000}, 5, {10, 15}},
      {SfcType::Ind40, seq({NAT, FW}), {70000, 70000}, 8, {1, 4}},
  };
  for (std::size_t i = 0; i < 6; ++i) {
    CAPTURE(i);
    CHECK(cat[i].sfc_type == expected[i].type);
    CHECK(cat[i].vnf_sequence == expected[i].sequence);
    CHECK(cat[i].bandwidth_kbps == expected[i].kbps);
    CHECK(cat[i].e2e_delay_ms == expected[i].delay);
    CHECK(cat[i].bundle == expected[i].bundle);
    CHECK(&catalog_entry(expected[i].type) == &cat[i]);
  }
  CHECK(format_bandwidth(64) == "64 Kbps");
  CHECK(format_bandwidth(4000) == "4 Mbps");
  CHECK(format_bandwidth(750499) == "750 Mbps");
  CHECK(format_bandwidth(0) == "0 Mbps");
}

TEST_CASE("type names round trip") {
  for (VnfType t : kVnfTypes) CHECK(parse_vnf_type(name(t)) == t);
  for (SfcType t : kSfcTypes) CHECK(parse_sfc_type(name(t)) == t);
  CHECK_FALSE(parse_vnf_type("nat"));
  CHECK_FALSE(parse_sfc_type("IoT"));
}

TEST_CASE("new_topology") {
  TopologyConfig cfg = default_topology_config();
  cfg.initial_instances = {0, 0};

  SUBCASE("two DCs") {
    cfg.dc_count = 2;
    cfg.link_density = 1.0;
    const NetworkState s = new_topology(cfg, 7);
    REQUIRE(s.links.size() == 1);
    CHECK(s.links[0].a == DcId{0});
    CHECK(s.links[0].b == DcId{1});
    CHECK(s.instances.empty());
    for (const DataCenter& dc : s.dcs) {
      CHECK(dc.compute_used == 0);
      CHECK(dc.hosted.empty());
    }
  }

  SUBCASE("deterministic") {
    cfg.initial_instances = {0, 6};
    CHECK(canonical_dump(to_json(new_topology(cfg, 11))) == canonical_dump(to_json(new_topology(cfg, 11))));
    CHECK(canonical_dump(to_json(new_topology(cfg, 11))) != canonical_dump(to_json(new_topology(cfg, 12))));
  }

  SUBCASE("eight DCs at density 0.4") {
    cfg.dc_count = 8;
    cfg.link_density = 0.4;
    const NetworkState s = new_topology(cfg, 42);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const Link& l : s.links) edges.emplace_back(l.a.value, l.b.value);
    CHECK(edges.size() == 11);  // round(0.4 * 28)
    CHECK(oracle::connected(8, edges));
    for (const DataCenter& dc : s.dcs) {
      CHECK(cfg.compute_capacity.contains(dc.compute_capacity));
      CHECK(cfg.storage_capacity.contains(dc.storage_capacity));
      CHECK(dc.compute_used == 0);
      CHECK(dc.storage_used == 0);
    }
    for (const Link& l : s.links) {
      CHECK(l.used_kbps == 0);
      CHECK(l.capacity_kbps % 1000 == 0);
      CHECK(cfg.link_bandwidth_mbps.contains(l.capacity_kbps / 1000));
      CHECK(l.latency_ms >= cfg.link_latency_ms.lo);
      CHECK(l.latency_ms <= cfg.link_latency_ms.hi);
    }
    CHECK(audit(s).empty());
  }

  SUBCASE("connectivity across seeds and sizes") {
    for (std::int64_t n = 2; n <= 10; ++n) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.dc_count = n;
        cfg.link_density = 1.0;
        const NetworkState s = new_topology(cfg, seed);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (const Link& l : s.links) edges.emplace_back(l.a.value, l.b.value);
        CHECK(oracle::connected(static_cast<std::size_t>(n), edges));
      }
    }
  }

  SUBCASE("bad configs") {
    cfg.dc_count = 1;
    CHECK(kind_of([&] { new_topology(cfg, 1); }) == ErrorKind::InvalidConfig);
    cfg.dc_count = 8;
    cfg.link_density = 0.1;  // 3 links cannot connect 8 DCs
    CHECK(kind_of([&] { new_topology(cfg, 1); }) == ErrorKind::InvalidConfig);
    cfg.link_density = 0.0;
    CHECK(kind_of([&] { new_topology(cfg, 1); }) == ErrorKind::InvalidConfig);
    cfg.link_density = 1.5;
    CHECK(kind_of([&] { new_topology(cfg, 1); }) == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("idle counts") {
  NetworkState s = make_state();
  const DcId d0 = add_dc(s, 100, 100);
  const DcId d1 = add_dc(s, 100, 100);
  add_link(s, d0, d1, 1'000'000, 0.5);
  CHECK(idle_vnf_count(s, d0) == 0);

  // {NAT idle, FW active, NAT idle}
  instantiate(s, d0, VnfType::NAT);
  const InstanceId fw = instantiate(s, d0, VnfType::FW);
  instantiate(s, d0, VnfType::NAT);
  const InstanceId nat_far = instantiate(s, d1, VnfType::NAT);
  const RequestId r = add_request(s, request_of(SfcType::Ind40, d1));
  apply_allocation(s, {r, {nat_far, fw}, {LinkId{0}}});

  CHECK(s.instance(fw).state() == InstanceState::Active);
  CHECK(idle_vnf_count(s, d0) == 2);
  CHECK(idle_vnf_count(s, d0, VnfType::NAT) == 2);
  CHECK(idle_vnf_count(s, d0, VnfType::FW) == 0);
  CHECK(idle_vnf_count(s, d1) == 0);
  for (DcId dc : {d0, d1}) {
    CHECK(idle_vnf_count(s, dc) == oracle::idle_count(s, dc));
    for (VnfType t : kVnfTypes) CHECK(idle_vnf_count(s, dc, t) == oracle::idle_count(s, dc, t));
  }
  CHECK(kind_of([&] { idle_vnf_count(s, DcId{9}); }) == ErrorKind::UnknownId);
}

TEST_CASE("available resources") {
  ProfileTable p = default_profiles();
  p[index_of(VnfType::NAT)].compute_demand = 10;
  p[index_of(VnfType::NAT)].storage_demand = 5;
  p[index_of(VnfType::FW)].compute_demand = 20;
  p[index_of(VnfType::FW)].storage_demand = 15;
  NetworkState s = make_state(p);
  const DcId dc = add_dc(s, 100, 50);
  CHECK(available_resources(s, dc) == Resources{100, 50});

  instantiate(s, dc, VnfType::NAT);
  instantiate(s, dc, VnfType::FW);
  CHECK(available_resources(s, dc) == Resources{70, 30});
  const auto free = oracle::free_resources(s, dc);
  CHECK(free.compute == 70);
  CHECK(free.storage == 30);

  instantiate(s, dc, VnfType::FW);
  instantiate(s, dc, VnfType::NAT);
  instantiate(s, dc, VnfType::NAT);
  CHECK(available_resources(s, dc) == Resources{30, 5});
  instantiate(s, dc, VnfType::NAT);
  CHECK(available_resources(s, dc) == Resources{20, 0});
  CHECK_FALSE(can_host(s, dc, VnfType::NAT));
  CHECK(kind_of([&] { instantiate(s, dc, VnfType::NAT); }) == ErrorKind::CapacityExceeded);

  NetworkState packed = make_state(p);
  const DcId full = add_dc(packed, 20, 10);
  instantiate(packed, full, VnfType::NAT);
  instantiate(packed, full, VnfType::NAT);
  CHECK(available_resources(packed, full) == Resources{0, 0});
}

TEST_CASE("neighbors") {
  NetworkState s = make_state();
  for (int i = 0; i < 4; ++i) add_dc(s, 400, 400);
  add_link(s, DcId{0}, DcId{3}, 1'000'000, 0.3);
  add_link(s, DcId{2}, DcId{0}, 500'000, 0.2);
  add_link(s, DcId{1}, DcId{0}, 2'000'000, 0.1);

  const auto nbs = neighbors(s, DcId{0});
  REQUIRE(nbs.size() == 3);
  CHECK(nbs[0].dc == DcId{1});
  CHECK(nbs[1].dc == DcId{2});
  CHECK(nbs[2].dc == DcId{3});
  CHECK(nbs[2].available_kbps == 1'000'000);
  REQUIRE(neighbors(s, DcId{3}).size() == 1);
  CHECK(neighbors(s, DcId{3})[0].dc == DcId{0});

  CHECK(kind_of([&] { add_link(s, DcId{3}, DcId{0}, 1, 0.1); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { add_link(s, DcId{1}, DcId{1}, 1, 0.1); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("neighbor bandwidth after traffic") {
  // Link of 1000 Mbps carrying 250 Mbps leaves 750 Mbps.
  NetworkState s = make_state();
  const DcId a = add_dc(s, 1000, 1000);
  const DcId b = add_dc(s, 1000, 1000);
  add_link(s, a, b, 1'000'000, 0.1);
  for (std::int64_t kbps : {50'000, 50'000, 50'000, 50'000, 50'000}) {
    const RequestId r = add_request(s, request_of(SfcType::MIoT, a, kbps));
    apply_allocation(s, {r, {NewInstance{b, VnfType::NAT}, NewInstance{b, VnfType::FW}, NewInstance{b, VnfType::IDPS}},
                         {LinkId{0}}});
  }
  const auto nbs = neighbors(s, a);
  REQUIRE(nbs.size() == 1);
  CHECK(nbs[0].available_kbps == 750'000);
  CHECK(oracle::link_free_kbps(s, s.links[0]) == 750'000);
  CHECK(format_bandwidth(nbs[0].available_kbps) == "750 Mbps");
}

TEST_CASE("apply_allocation") {
  NetworkState s = make_state();
  const DcId a = add_dc(s, 400, 400);
  const DcId b = add_dc(s, 400, 400);
  const LinkId link = add_link(s, a, b, 3000, 0.2);

  SUBCASE("first allocation on an empty network") {
    const RequestId r = add_request(s, request_of(SfcType::Ind40, a));
    apply_allocation(s, {r, {NewInstance{a, VnfType::NAT}, NewInstance{a, VnfType::FW}}, {}});
    const SfcRequest& req = s.request(r);
    CHECK(req.status == RequestStatus::Served);
    REQUIRE(req.path.size() == 2);
    for (InstanceId id : req.path) {
      CHECK(s.instance(id).state() == InstanceState::Active);
      CHECK(s.instance(id).assigned_count == 1);
    }
    CHECK(s.links[0].used_kbps == 0);
    CHECK(audit(s).empty());
    CHECK(kind_of([&] { apply_allocation(s, {r, {req.path[0], req.path[1]}, {}}); }) == ErrorKind::NotPending);
  }

  SUBCASE("link short of bandwidth leaves no trace") {
    const RequestId r = add_request(s, request_of(SfcType::CG, a));  // 4 Mbps over a 3 Mbps link
    const std::string before = canonical_dump(to_json(s));
    const Allocation alloc{r,
                           {NewInstance{a, VnfType::NAT}, NewInstance{b, VnfType::FW}, NewInstance{b, VnfType::VOC},
                            NewInstance{b, VnfType::WO}, NewInstance{b, VnfType::IDPS}},
                           {link}};
    CHECK(kind_of([&] { apply_allocation(s, alloc); }) == ErrorKind::CapacityExceeded);
    CHECK(canonical_dump(to_json(s)) == before);
  }

  SUBCASE("hops out of order") {
    const RequestId r = add_request(s, request_of(SfcType::Ind40, a));
    const std::string before = canonical_dump(to_json(s));
    CHECK(kind_of([&] {
            apply_allocation(s, {r, {NewInstance{a, VnfType::FW}, NewInstance{a, VnfType::NAT}}, {}});
          }) == ErrorKind::SequenceMismatch);
    CHECK(kind_of([&] { apply_allocation(s, {r, {NewInstance{a, VnfType::NAT}}, {}}); }) ==
          ErrorKind::SequenceMismatch);
    CHECK(canonical_dump(to_json(s)) == before);
  }

  SUBCASE("route must follow the hops") {
    const RequestId r = add_request(s, request_of(SfcType::Ind40, a));
    CHECK(kind_of([&] {
            apply_allocation(s, {r, {NewInstance{a, VnfType::NAT}, NewInstance{b, VnfType::FW}}, {}});
          }) == ErrorKind::InvalidRoute);
    CHECK(kind_of([&] {
            apply_allocation(s, {r, {NewInstance{a, VnfType::NAT}, NewInstance{a, VnfType::FW}}, {link}});
          }) == ErrorKind::InvalidRoute);
    CHECK(kind_of([&] { apply_allocation(s, {r, {InstanceId{5}, InstanceId{6}}, {}}); }) == ErrorKind::UnknownId);
    CHECK(kind_of([&] { apply_allocation(s, {RequestId{77}, {}, {}}); }) == ErrorKind::UnknownId);
  }

  SUBCASE("instance capacity") {
    ProfileTable p = default_profiles();
    p[index_of(VnfType::NAT)].capacity = 1;
    NetworkState t = make_state(p);
    const DcId d = add_dc(t, 400, 400);
    const InstanceId nat = instantiate(t, d, VnfType::NAT);
    const InstanceId fw = instantiate(t, d, VnfType::FW);
    const RequestId r1 = add_request(t, request_of(SfcType::Ind40, d));
    const RequestId r2 = add_request(t, request_of(SfcType::Ind40, d));
    apply_allocation(t, {r1, {nat, fw}, {}});
    const std::string before = canonical_dump(to_json(t));
    CHECK(kind_of([&] { apply_allocation(t, {r2, {nat, fw}, {}}); }) == ErrorKind::CapacityExceeded);
    CHECK(canonical_dump(to_json(t)) == before);

    // VoIP visits NAT twice; a fresh NAT with capacity 1 is full after one visit, so a second is created.
    const RequestId v = add_request(t, request_of(SfcType::VoIP, d));
    const std::size_t instances = t.instances.size();
    apply_allocation(t, {v,
                         {NewInstance{d, VnfType::NAT}, fw, NewInstance{d, VnfType::TM}, fw,
                          NewInstance{d, VnfType::NAT}},
                         {}});
    CHECK(t.instances.size() == instances + 3);
    CHECK(t.instance(fw).assigned_count == 3);
    const auto& path = t.request(v).path;
    CHECK(path[0] != path[4]);
    CHECK(audit(t).empty());
  }
}

TEST_CASE("add_request validates against the catalog") {
  NetworkState s = make_state();
  const DcId a = add_dc(s, 10, 10);
  CHECK(kind_of([&] { add_request(s, request_of(SfcType::AR, a, 5)); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { add_request(s, request_of(SfcType::MIoT, a, 51'000)); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { add_request(s, request_of(SfcType::AR, DcId{4})); }) == ErrorKind::UnknownId);
  SfcRequest r = request_of(SfcType::MIoT, a, 1000);
  r.status = RequestStatus::Served;
  const RequestId id = add_request(s, r);
  CHECK(s.request(id).status == RequestStatus::Pending);
  CHECK(s.request(id).e2e_budget_ms == 5);
}

TEST_CASE("random operations keep the accounting consistent") {
  TopologyConfig cfg = default_topology_config();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NetworkState s = new_topology(cfg, seed);
    const auto capacities_before = s.dcs;
    const auto out = stress::run(s, 400, seed * 17);
    CAPTURE(out.first_problem);
    CHECK(out.audit_failures == 0);
    CHECK(out.dirty_failures == 0);
    CHECK(out.failed_allocations > 0);
    for (std::size_t i = 0; i < s.dcs.size(); ++i) {
      CHECK(s.dcs[i].compute_capacity == capacities_before[i].compute_capacity);
      CHECK(s.dcs[i].storage_capacity == capacities_before[i].storage_capacity);
    }
    for (const SfcRequest& r : s.requests) {
      if (r.status != RequestStatus::Served) continue;
      std::vector<VnfType> types;
      for (InstanceId id : r.path) types.push_back(s.instance(id).type);
      CHECK(types == s.entry(r.sfc_type).vnf_sequence);
    }
  }
}

TEST_CASE("audit catches tampering") {
  NetworkState s = new_topology(default_topology_config(), 3);
  stress::run(s, 200, 5, false);
  REQUIRE(audit(s).empty());

  NetworkState t = s;
  t.dcs[0].compute_used += 1;
  CHECK_FALSE(audit(t).empty());
  t = s;
  t.links[0].used_kbps = t.links[0].capacity_kbps + 1;
  CHECK_FALSE(audit(t).empty());
  if (!t.instances.empty()) {
    t = s;
    t.instances[0].assigned_count += 1;
    CHECK_FALSE(audit(t).empty());
  }
}

TEST_CASE("state JSON round trip") {
  NetworkState s = new_topology(default_topology_config(), 9);
  stress::run(s, 300, 9, false);
  const std::string text = canonical_dump(to_json(s));
  const NetworkState back = state_from_json(nlohmann::json::parse(text));
  CHECK(back == s);
  CHECK(canonical_dump(to_json(back)) == text);

  nlohmann::json broken = nlohmann::json::parse(text);
  broken["dcs"][0]["compute_used"] = 99999;
  CHECK(kind_of([&] { state_from_json(broken); }) == ErrorKind::MalformedInput);
  broken = nlohmann::json::parse(text);
  broken.erase("links");
  CHECK(kind_of([&] { state_from_json(broken); }) == ErrorKind::MalformedInput);
}

TEST_CASE("topology config JSON") {
  const TopologyConfig cfg = default_topology_config();
  CHECK(topology_config_from_json(to_json(cfg)) == cfg);
  nlohmann::json j = to_json(cfg);
  j.erase("link_density");
  CHECK(kind_of([&] { topology_config_from_json(j); }) == ErrorKind::InvalidConfig);
}
