#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "sfcqa/error.hpp"
#include "sfcqa/netmodel_json.hpp"
#include "sfcqa/qagen.hpp"
#include "sfcqa/rng.hpp"

using namespace sfcqa;
using namespace sfcqa::netmodel;
using namespace sfcqa::qagen;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvariantViolation;
}

RequestId add(NetworkState& s, SfcType type, DcId ingress, std::int64_t kbps = 0) {
  SfcRequest r;
  r.sfc_type = type;
  r.ingress = ingress;
  r.bandwidth_kbps = kbps ? kbps : catalog_entry(type).bandwidth_kbps.lo;
  r.e2e_budget_ms = catalog_entry(type).e2e_delay_ms;
  return add_request(s, r);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sfcqa_qagen_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

void check_answer(const QaExample& ex, const std::string& expected) {
  CHECK(ex.answer_text == expected);
  CHECK(is_extractive(ex));
  CHECK(ex.context.compare(ex.answer_start, expected.size(), expected) == 0);
}

std::map<int, std::size_t> histogram(const std::vector<QaExample>& v) {
  std::map<int, std::size_t> h;
  for (const auto& ex : v) ++h[ex.question_type];
  return h;
}

}  // namespace

TEST_CASE("type 1 idle counts") {
  NetworkState s = make_state();
  add_dc(s, 100, 100);
  add_dc(s, 100, 100);
  add_link(s, DcId{0}, DcId{1}, 1'000'000, 0.1);
  check_answer(ask_type1(s, DcId{0}), "0");

  const InstanceId nat1 = instantiate(s, DcId{0}, VnfType::NAT);
  const InstanceId fw = instantiate(s, DcId{0}, VnfType::FW);
  instantiate(s, DcId{0}, VnfType::NAT);
  const RequestId r = add(s, SfcType::Ind40, DcId{1});
  const InstanceId far = instantiate(s, DcId{1}, VnfType::NAT);
  apply_allocation(s, {r, {far, fw}, {LinkId{0}}});
  (void)nat1;

  const QaExample all = ask_type1(s, DcId{0});
  check_answer(all, std::to_string(oracle::idle_count(s, DcId{0})));
  CHECK(all.answer_text == "2");
  CHECK(all.question == "How many idle VNF instances does DC0 have?");
  CHECK(all.question_type == 1);

  const QaExample nat = ask_type1(s, DcId{0}, VnfType::NAT);
  check_answer(nat, "2");
  CHECK(nat.question == "How many idle NAT instances does DC0 have?");
  CHECK(nat.metadata.at("vnf_type") == "NAT");
  check_answer(ask_type1(s, DcId{0}, VnfType::FW), "0");
}

TEST_CASE("type 2 sufficiency") {
  ProfileTable p = default_profiles();
  p[index_of(VnfType::NAT)].compute_demand = 10;
  p[index_of(VnfType::FW)].compute_demand = 10;
  NetworkState s = make_state(p);
  add_dc(s, 100, 100);
  add_dc(s, 100, 100);
  add_link(s, DcId{0}, DcId{1}, 1'000'000, 0.1);

  check_answer(ask_type2(s, DcId{0}), "yes");  // nothing pending
  for (int i = 0; i < 5; ++i) add(s, SfcType::Ind40, DcId{0});
  add(s, SfcType::Ind40, DcId{1});  // pending elsewhere does not count
  const QaExample exact = ask_type2(s, DcId{0});
  check_answer(exact, "yes");
  CHECK(exact.metadata.at("required_compute") == 100);
  CHECK(exact.metadata.at("available_compute") == 100);
  CHECK(oracle::sufficient(s, DcId{0}));

  add(s, SfcType::Ind40, DcId{0});
  const QaExample over = ask_type2(s, DcId{0});
  check_answer(over, "no");
  CHECK(over.metadata.at("required_compute") == 120);
  CHECK_FALSE(oracle::sufficient(s, DcId{0}));
  CHECK(over.question == "Does DC0 have enough computational resources to process all its pending SFC requests?");

  // Served and rejected requests drop out of the pending sum.
  mark_rejected(s, RequestId{0}, "test");
  check_answer(ask_type2(s, DcId{0}), "yes");
}

TEST_CASE("type 3 received counts") {
  NetworkState s = make_state();
  for (int i = 0; i < 3; ++i) add_dc(s, 100, 100);
  add_link(s, DcId{0}, DcId{2}, 1'000'000, 0.1);
  add_link(s, DcId{1}, DcId{2}, 1'000'000, 0.1);
  check_answer(ask_type3(s, DcId{2}, SfcType::CG), "0");

  for (int i = 0; i < 47; ++i) add(s, SfcType::CG, DcId{2});
  for (int i = 0; i < 120 + 150; ++i) add(s, SfcType::VoIP, DcId{2});
  for (int i = 0; i < 9; ++i) add(s, SfcType::VoIP, DcId{1});
  for (int i = 0; i < 40; i += 2) mark_rejected(s, RequestId{static_cast<std::uint32_t>(i)}, "test");

  const QaExample cg = ask_type3(s, DcId{2}, SfcType::CG);
  check_answer(cg, "47");
  CHECK(cg.question == "How many CG requests has DC2 received?");
  CHECK(cg.metadata.at("sfc_type") == "CG");
  check_answer(ask_type3(s, DcId{2}, SfcType::VoIP), "270");
  CHECK(oracle::received(s, DcId{2}, SfcType::VoIP) == 270);
  check_answer(ask_type3(s, DcId{1}, SfcType::VoIP), "9");
}

TEST_CASE("type 4 availability") {
  ProfileTable p = default_profiles();
  p[index_of(VnfType::NAT)].compute_demand = 10;
  p[index_of(VnfType::NAT)].storage_demand = 5;
  p[index_of(VnfType::FW)].compute_demand = 20;
  p[index_of(VnfType::FW)].storage_demand = 15;
  NetworkState s = make_state(p);
  add_dc(s, 100, 50);
  add_dc(s, 30, 20);
  add_link(s, DcId{0}, DcId{1}, 1'000'000, 0.1);
  const QaExample empty = ask_type4(s, DcId{0});
  check_answer(empty, "100 compute units and 50 storage units");
  CHECK(empty.question == "What resources are available at DC0?");

  instantiate(s, DcId{0}, VnfType::NAT);
  instantiate(s, DcId{0}, VnfType::FW);
  check_answer(ask_type4(s, DcId{0}), "70 compute units and 30 storage units");

  instantiate(s, DcId{1}, VnfType::NAT);
  instantiate(s, DcId{1}, VnfType::FW);
  check_answer(ask_type4(s, DcId{1}), "0 compute units and 0 storage units");
}

TEST_CASE("type 5 widest neighbor") {
  SUBCASE("single neighbor") {
    NetworkState s = make_state();
    add_dc(s, 10, 10);
    add_dc(s, 10, 10);
    add_link(s, DcId{0}, DcId{1}, 10'000, 0.1);
    check_answer(ask_type5(s, DcId{1}), "DC0");
  }
  SUBCASE("argmax") {
    NetworkState s = make_state();
    for (int i = 0; i < 8; ++i) add_dc(s, 10, 10);
    add_link(s, DcId{3}, DcId{1}, 300'000, 0.1);
    add_link(s, DcId{3}, DcId{4}, 750'000, 0.1);
    add_link(s, DcId{3}, DcId{6}, 200'000, 0.1);
    for (std::uint32_t i : {0u, 2u, 5u, 7u}) add_link(s, DcId{i}, DcId{i == 0 ? 1u : i - 1}, 1'000, 0.1);
    const QaExample ex = ask_type5(s, DcId{3});
    check_answer(ex, "DC4");
    CHECK(ex.question == "Which neighboring DC has the most available bandwidth to DC3?");
    CHECK(ex.metadata.at("neighbor_ids") == nlohmann::json::array({1, 4, 6}));
    CHECK(oracle::widest_neighbor(s, DcId{3}) == 4u);
  }
  SUBCASE("tie goes to the lower id") {
    NetworkState s = make_state();
    for (int i = 0; i < 3; ++i) add_dc(s, 10, 10);
    add_link(s, DcId{0}, DcId{2}, 500'000, 0.1);
    add_link(s, DcId{0}, DcId{1}, 500'000, 0.1);
    check_answer(ask_type5(s, DcId{0}), "DC1");
  }
  SUBCASE("no neighbors") {
    NetworkState s = make_state();
    add_dc(s, 10, 10);
    CHECK(kind_of([&] { ask_type5(s, DcId{0}); }) == ErrorKind::NoNeighbors);
  }
}

TEST_CASE("answers match oracles on simulated states") {
  const ScenarioConfig cfg = default_scenario_config();
  for (std::size_t i = 0; i < 15; ++i) {
    const NetworkState s = build_scenario_state(cfg, 77, i);
    REQUIRE(audit(s).empty());
    for (const DataCenter& dc : s.dcs) {
      check_answer(ask_type1(s, dc.id), std::to_string(oracle::idle_count(s, dc.id)));
      for (VnfType t : kVnfTypes) check_answer(ask_type1(s, dc.id, t), std::to_string(oracle::idle_count(s, dc.id, t)));
      check_answer(ask_type2(s, dc.id), oracle::sufficient(s, dc.id) ? "yes" : "no");
      for (SfcType t : kSfcTypes) check_answer(ask_type3(s, dc.id, t), std::to_string(oracle::received(s, dc.id, t)));
      const auto f = oracle::free_resources(s, dc.id);
      check_answer(ask_type4(s, dc.id),
                   std::to_string(f.compute) + " compute units and " + std::to_string(f.storage) + " storage units");
      check_answer(ask_type5(s, dc.id), "DC" + std::to_string(*oracle::widest_neighbor(s, dc.id)));
    }
  }
}

TEST_CASE("dataset arithmetic") {
  std::vector<ScenarioSnapshot> states;
  const DatasetSplit split = build_dataset(default_scenario_config(), 1920, 2025, 2, &states);
  CHECK(split.train.size() == 1440);
  CHECK(split.validation.size() == 240);
  CHECK(split.test.size() == 240);
  CHECK_FALSE(states.empty());

  std::map<int, std::size_t> all;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& [t, c] : histogram(*part)) all[t] += c;
  }
  for (int t = 1; t <= 5; ++t) CHECK(all[t] == 384);
  // Each split's type counts within 1 of exact proportionality.
  const std::array<std::pair<const std::vector<QaExample>*, double>, 3> parts{
      {{&split.train, 0.75}, {&split.validation, 0.125}, {&split.test, 0.125}}};
  for (const auto& [part, share] : parts) {
    const auto h = histogram(*part);
    for (int t = 1; t <= 5; ++t) CHECK(std::abs(double(h.at(t)) - share * double(all[t])) <= 1.0);
  }

  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& ex : *part) {
      CHECK(ids.insert(ex.id).second);
      CHECK(is_extractive(ex));
      CHECK(ex.context.size() <= contextgen::kDefaultCharBudget);
    }
    CHECK(std::is_sorted(part->begin(), part->end(), [](auto& a, auto& b) { return a.id < b.id; }));
  }
}

TEST_CASE("dataset bytes depend only on the arguments") {
  const ScenarioConfig cfg = default_scenario_config();
  auto text = [&](unsigned jobs) {
    const DatasetSplit s = build_dataset(cfg, 16, 5, jobs);
    return dataset_json(s.train, "v1").dump() + dataset_json(s.validation, "v1").dump() +
           dataset_json(s.test, "v1").dump();
  };
  const std::string one = text(1);
  CHECK(one == text(1));
  CHECK(one == text(4));
  const DatasetSplit s = build_dataset(cfg, 16, 5, 1);
  CHECK(s.train.size() == 12);
  CHECK(s.validation.size() == 2);
  CHECK(s.test.size() == 2);

  const DatasetSplit big1 = build_dataset(cfg, 480, 9, 1);
  const DatasetSplit big3 = build_dataset(cfg, 480, 9, 3);
  CHECK(big1.train == big3.train);
  CHECK(big1.test == big3.test);
}

TEST_CASE("dataset argument errors") {
  ScenarioConfig cfg = default_scenario_config();
  CHECK(kind_of([&] { build_dataset(cfg, 100, 1); }) == ErrorKind::InvalidConfig);
  CHECK(kind_of([&] { build_dataset(cfg, 0, 1); }) == ErrorKind::InvalidConfig);
  cfg.max_scenarios = 1;
  CHECK(kind_of([&] { build_dataset(cfg, 1920, 1); }) == ErrorKind::InfeasibleBalance);
}

TEST_CASE("stratified split balances any histogram") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 16 * (1 + rng.index(20));
    std::vector<QaExample> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i].id = "e" + std::to_string(i);
      v[i].question_type = trial % 3 == 0 ? static_cast<int>(1 + i % 5) : static_cast<int>(1 + rng.index(5));
    }
    std::map<int, std::size_t> total;
    for (const auto& ex : v) ++total[ex.question_type];
    const DatasetSplit s = split_stratified(v);
    REQUIRE(s.train.size() == n * 12 / 16);
    REQUIRE(s.validation.size() == n / 8);
    REQUIRE(s.test.size() == n / 8);
    const auto ht = histogram(s.train), hv = histogram(s.validation), hs = histogram(s.test);
    for (const auto& [t, c] : total) {
      const auto get = [t = t](const auto& h) { return h.count(t) ? double(h.at(t)) : 0.0; };
      CHECK(std::abs(get(ht) - 0.75 * double(c)) <= 1.0);
      CHECK(std::abs(get(hv) - 0.125 * double(c)) <= 1.0);
      CHECK(std::abs(get(hs) - 0.125 * double(c)) <= 1.0);
    }
  }
  CHECK(kind_of([] { split_stratified(std::vector<QaExample>(10)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("emit and reload") {
  const auto dir = scratch("emit");
  const DatasetSplit split = build_dataset(default_scenario_config(), 32, 3, 1);
  emit_dataset(split, dir, "v1");
  emit_vocab(dir / "vocab.txt");

  const DatasetSplit back = load_split(dir);
  CHECK(back.train == split.train);
  CHECK(back.validation == split.validation);
  CHECK(back.test == split.test);
  CHECK(load_dataset(dir / "train.json").template_version == "v1");

  const nlohmann::json raw = nlohmann::json::parse(slurp(dir / "test.json"));
  CHECK(raw.at("version") == 1);
  const auto& first = raw.at("examples").at(0);
  for (const char* key : {"id", "question_type", "context", "question", "answers", "dc_id", "metadata"}) {
    CHECK(first.contains(key));
  }
  const auto& ans = first.at("answers").at(0);
  CHECK(first.at("context").get<std::string>().substr(ans.at("answer_start").get<std::size_t>(),
                                                      ans.at("text").get<std::string>().size()) == ans.at("text"));

  const std::string vocab = slurp(dir / "vocab.txt");
  std::vector<std::string> lines;
  std::istringstream in(vocab);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  CHECK(lines.size() == 12);
  CHECK(vocab.back() == '\n');
  CHECK(std::set<std::string>(lines.begin(), lines.end()).size() == 12);
  for (const char* tok : {"CG", "DC", "NAT", "FW", "VOC", "WO", "IDPS", "VNF", "E2E", "MBPS", "BW", "Ind40"}) {
    CHECK(std::find(lines.begin(), lines.end(), tok) != lines.end());
  }

  nlohmann::json broken = raw;
  broken["examples"][0]["answers"][0]["answer_start"] = 0;
  write_text_file(dir / "broken.json", broken.dump());
  if (broken["examples"][0]["context"].get<std::string>().rfind(broken["examples"][0]["answers"][0]["text"].get<std::string>(), 0) != 0) {
    CHECK(kind_of([&] { load_dataset(dir / "broken.json"); }) == ErrorKind::MalformedInput);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario config JSON") {
  const ScenarioConfig cfg = default_scenario_config();
  const nlohmann::json j = to_json(cfg);
  CHECK(to_json(scenario_config_from_json(j)) == j);
  nlohmann::json bad = j;
  bad["arrivals"].erase("CG");
  CHECK(kind_of([&] { scenario_config_from_json(bad); }) == ErrorKind::InvalidConfig);
  bad = j;
  bad["policy"] = "trace:x";
  CHECK(kind_of([&] { scenario_config_from_json(bad); }) == ErrorKind::InvalidConfig);
}
