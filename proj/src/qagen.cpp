#include "sfcqa/qagen.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "sfcqa/error.hpp"
#include "sfcqa/netmodel_json.hpp"
#include "sfcqa/provision.hpp"
#include "sfcqa/rng.hpp"

namespace sfcqa::qagen {

using namespace netmodel;
using contextgen::ContextDoc;
using contextgen::dc_name;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string example_id(std::uint64_t state_seed, DcId dc, int type, std::string_view slot) {
  const std::string key = std::to_string(state_seed) + "|" + std::to_string(dc.value) + "|" + std::to_string(type) +
                          "|" + std::string(slot);
  char buf[20];
  std::snprintf(buf, sizeof buf, "q%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return buf;
}

// Anchors the answer on a registered fact and checks it renders the oracle value.
QaExample make_example(const NetworkState& state, const ContextDoc& doc, int type, std::string question,
                       std::string_view fact_key, std::string_view expected, std::string_view slot) {
  const auto span = contextgen::fact_span(doc, fact_key);
  if (span.text != expected) {
    throw Error(ErrorKind::InvariantViolation, "context fact " + std::string(fact_key) + " reads '" +
                                                   std::string(span.text) + "', oracle says '" +
                                                   std::string(expected) + "'");
  }
  QaExample ex;
  ex.id = example_id(state.seed, doc.dc, type, slot);
  ex.question_type = type;
  ex.context = doc.text;
  ex.question = std::move(question);
  ex.answer_text = std::string(span.text);
  ex.answer_start = span.start;
  ex.dc_id = doc.dc.value;
  ex.metadata["state_seed"] = state.seed;
  return ex;
}

}  // namespace

bool is_extractive(const QaExample& ex) {
  return !ex.answer_text.empty() && ex.answer_start <= ex.context.size() &&
         ex.context.compare(ex.answer_start, ex.answer_text.size(), ex.answer_text) == 0 &&
         ex.answer_start + ex.answer_text.size() <= ex.context.size();
}

Sufficiency sufficiency(const NetworkState& state, DcId dc) {
  Sufficiency s;
  s.available = available_resources(state, dc).compute;
  for (const SfcRequest& r : state.requests) {
    if (r.ingress != dc || r.status != RequestStatus::Pending) continue;
    for (VnfType t : state.entry(r.sfc_type).vnf_sequence) s.demand += state.profile(t).compute_demand;
  }
  return s;
}

std::size_t received_count(const NetworkState& state, DcId dc, SfcType type) {
  state.dc(dc);
  return static_cast<std::size_t>(std::count_if(state.requests.begin(), state.requests.end(), [&](const SfcRequest& r) {
    return r.ingress == dc && r.sfc_type == type;
  }));
}

std::optional<DcId> best_neighbor(const NetworkState& state, DcId dc) {
  std::optional<Neighbor> best;
  for (const Neighbor& nb : neighbors(state, dc)) {
    if (!best || nb.available_kbps > best->available_kbps) best = nb;
  }
  if (!best) return std::nullopt;
  return best->dc;
}

QaExample ask_type1(const NetworkState& state, const ContextDoc& doc, std::optional<VnfType> vnf_type) {
  const std::string what = vnf_type ? std::string(name(*vnf_type)) : "VNF";
  const std::string count = std::to_string(idle_vnf_count(state, doc.dc, vnf_type));
  const std::string key = vnf_type ? contextgen::fact::idle(*vnf_type) : std::string(contextgen::fact::kIdleTotal);
  QaExample ex = make_example(state, doc, 1, "How many idle " + what + " instances does " + dc_name(doc.dc) + " have?",
                              key, count, vnf_type ? name(*vnf_type) : "");
  if (vnf_type) ex.metadata["vnf_type"] = std::string(name(*vnf_type));
  return ex;
}

QaExample ask_type2(const NetworkState& state, const ContextDoc& doc) {
  const Sufficiency s = sufficiency(state, doc.dc);
  const std::string_view verdict = s.sufficient() ? contextgen::fact::kYes : contextgen::fact::kNo;
  QaExample ex = make_example(state, doc, 2,
                              "Does " + dc_name(doc.dc) +
                                  " have enough computational resources to process all its pending SFC requests?",
                              verdict, verdict, "");
  ex.metadata["required_compute"] = s.demand;
  ex.metadata["available_compute"] = s.available;
  return ex;
}

QaExample ask_type3(const NetworkState& state, const ContextDoc& doc, SfcType sfc_type) {
  QaExample ex = make_example(state, doc, 3,
                              "How many " + std::string(name(sfc_type)) + " requests has " + dc_name(doc.dc) +
                                  " received?",
                              contextgen::fact::received(sfc_type),
                              std::to_string(received_count(state, doc.dc, sfc_type)), name(sfc_type));
  ex.metadata["sfc_type"] = std::string(name(sfc_type));
  return ex;
}

QaExample ask_type4(const NetworkState& state, const ContextDoc& doc) {
  const Resources free = available_resources(state, doc.dc);
  const std::string phrase =
      std::to_string(free.compute) + " compute units and " + std::to_string(free.storage) + " storage units";
  return make_example(state, doc, 4, "What resources are available at " + dc_name(doc.dc) + "?",
                      contextgen::fact::kAvailability, phrase, "");
}

QaExample ask_type5(const NetworkState& state, const ContextDoc& doc) {
  const auto best = best_neighbor(state, doc.dc);
  if (!best) throw Error(ErrorKind::NoNeighbors, dc_name(doc.dc) + " has no neighbors");
  QaExample ex = make_example(state, doc, 5,
                              "Which neighboring DC has the most available bandwidth to " + dc_name(doc.dc) + "?",
                              contextgen::fact::neighbor(*best), dc_name(*best), "");
  json ids = json::array();
  for (const Neighbor& nb : neighbors(state, doc.dc)) ids.push_back(nb.dc.value);
  ex.metadata["neighbor_ids"] = ids;
  return ex;
}

QaExample ask_type1(const NetworkState& state, DcId dc, std::optional<VnfType> vnf_type) {
  return ask_type1(state, contextgen::render_context(state, dc), vnf_type);
}
QaExample ask_type2(const NetworkState& state, DcId dc) {
  return ask_type2(state, contextgen::render_context(state, dc));
}
QaExample ask_type3(const NetworkState& state, DcId dc, SfcType sfc_type) {
  return ask_type3(state, contextgen::render_context(state, dc), sfc_type);
}
QaExample ask_type4(const NetworkState& state, DcId dc) {
  return ask_type4(state, contextgen::render_context(state, dc));
}
QaExample ask_type5(const NetworkState& state, DcId dc) {
  return ask_type5(state, contextgen::render_context(state, dc));
}

// ---------------------------------------------------------------------------
// Scenario configuration

ScenarioConfig default_scenario_config() {
  ScenarioConfig c;
  TopologyConfig small = default_topology_config();
  small.dc_count = 4;
  small.link_density = 0.7;
  TopologyConfig medium = default_topology_config();
  medium.dc_count = 6;
  medium.link_density = 0.5;
  TopologyConfig large = default_topology_config();
  large.dc_count = 8;
  large.link_density = 0.4;
  c.topologies = {small, medium, large};
  //            CG      AR      VoIP    VS      MIoT    Ind40
  c.arrivals = {{{0, 3}, {1, 4}, {0, 2}, {0, 2}, {1, 4}, {1, 4}}};
  c.pending_arrivals = {{{0, 1}, {0, 3}, {0, 1}, {0, 1}, {0, 3}, {0, 3}}};
  c.policy = "first-fit";
  c.max_scenarios = 1000;
  return c;
}

namespace {

json type_ranges_json(const std::array<IntRange, kSfcTypes.size()>& ranges) {
  json out = json::object();
  for (SfcType t : kSfcTypes) out[std::string(name(t))] = json::array({ranges[index_of(t)].lo, ranges[index_of(t)].hi});
  return out;
}

std::array<IntRange, kSfcTypes.size()> type_ranges_from(const json& j, const char* key) {
  constexpr ErrorKind kCfg = ErrorKind::InvalidConfig;
  const json obj = json_get<json>(j, key, kCfg);
  if (!obj.is_object() || obj.size() != kSfcTypes.size()) {
    throw Error(kCfg, std::string("'") + key + "' must list exactly the six SFC types");
  }
  std::array<IntRange, kSfcTypes.size()> out{};
  for (SfcType t : kSfcTypes) {
    const auto v = json_get<std::vector<std::int64_t>>(obj, std::string(name(t)).c_str(), kCfg);
    if (v.size() != 2 || v[0] < 0 || v[1] < v[0]) {
      throw Error(kCfg, std::string("'") + key + "." + std::string(name(t)) + "' must be [lo, hi] with 0 <= lo <= hi");
    }
    out[index_of(t)] = {v[0], v[1]};
  }
  return out;
}

}  // namespace

json to_json(const ScenarioConfig& c) {
  json topologies = json::array();
  for (const TopologyConfig& t : c.topologies) topologies.push_back(netmodel::to_json(t));
  return {{"topologies", topologies},
          {"arrivals", type_ranges_json(c.arrivals)},
          {"pending_arrivals", type_ranges_json(c.pending_arrivals)},
          {"policy", c.policy},
          {"max_scenarios", c.max_scenarios},
          {"template_version", c.context.template_version},
          {"char_budget", c.context.char_budget}};
}

ScenarioConfig scenario_config_from_json(const json& j) {
  constexpr ErrorKind kCfg = ErrorKind::InvalidConfig;
  ScenarioConfig c;
  for (const json& t : json_get<json>(j, "topologies", kCfg)) c.topologies.push_back(topology_config_from_json(t));
  if (c.topologies.empty()) throw Error(kCfg, "'topologies' must not be empty");
  c.arrivals = type_ranges_from(j, "arrivals");
  c.pending_arrivals = type_ranges_from(j, "pending_arrivals");
  c.policy = json_get<std::string>(j, "policy", kCfg);
  if (c.policy != "first-fit" && c.policy != "random") {
    throw Error(kCfg, "scenario policy must be 'first-fit' or 'random'");
  }
  c.max_scenarios = json_get<std::int64_t>(j, "max_scenarios", kCfg);
  if (c.max_scenarios < 1) throw Error(kCfg, "'max_scenarios' must be positive");
  c.context.template_version = json_get<std::string>(j, "template_version", kCfg);
  c.context.char_budget = json_get<std::size_t>(j, "char_budget", kCfg);
  return c;
}

NetworkState build_scenario_state(const ScenarioConfig& config, std::uint64_t dataset_seed, std::size_t index) {
  const std::uint64_t state_seed = derive_seed(dataset_seed, index);
  NetworkState state = new_topology(config.topologies[index % config.topologies.size()], state_seed);

  Rng draws(derive_seed(state_seed, 2));
  provision::EpisodeConfig episode;
  episode.seed = derive_seed(state_seed, 3);
  episode.policy = provision::parse_policy(config.policy);
  for (SfcType t : kSfcTypes) {
    const IntRange r = config.arrivals[index_of(t)];
    episode.arrivals_per_type[index_of(t)] = draws.uniform_int(r.lo, r.hi);
  }
  provision::run_episode(state, episode);

  // Fresh arrivals the policy has not handled yet.
  for (SfcType t : kSfcTypes) {
    const IntRange r = config.pending_arrivals[index_of(t)];
    const std::int64_t bundles = draws.uniform_int(r.lo, r.hi);
    for (std::int64_t b = 0; b < bundles; ++b) {
      const DcId ingress{static_cast<std::uint32_t>(draws.index(state.dcs.size()))};
      for (SfcRequest& req : provision::generate_bundle(state.entry(t), draws, ingress)) {
        add_request(state, std::move(req));
      }
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Dataset assembly

namespace {

using Unit = std::array<QaExample, 5>;

struct ScenarioOutput {
  NetworkState state;
  std::vector<Unit> units;
};

ScenarioOutput run_scenario(const ScenarioConfig& config, std::uint64_t seed, std::size_t index) {
  ScenarioOutput out{build_scenario_state(config, seed, index), {}};
  const NetworkState& state = out.state;
  for (const DataCenter& dc : state.dcs) {
    // Slots favour types present at the DC so that most answers are not "0".
    Rng slots(derive_seed(state.seed, 100 + dc.id.value));
    std::vector<std::optional<VnfType>> vnf_options{std::nullopt};
    for (VnfType t : kVnfTypes) {
      const bool hosted = std::any_of(dc.hosted.begin(), dc.hosted.end(),
                                      [&](InstanceId id) { return state.instance(id).type == t; });
      if (hosted) vnf_options.emplace_back(t);
    }
    const std::optional<VnfType> vnf = vnf_options[slots.index(vnf_options.size())];
    std::vector<SfcType> received;
    for (SfcType t : kSfcTypes) {
      if (received_count(state, dc.id, t) > 0) received.push_back(t);
    }
    const SfcType sfc = !received.empty() && slots.chance(3, 4) ? received[slots.index(received.size())]
                                                                : kSfcTypes[slots.index(kSfcTypes.size())];
    try {
      const ContextDoc doc = contextgen::render_context(state, dc.id, config.context);
      Unit unit{ask_type1(state, doc, vnf), ask_type2(state, doc), ask_type3(state, doc, sfc),
                ask_type4(state, doc), ask_type5(state, doc)};
      for (QaExample& ex : unit) {
        ex.metadata["scenario_index"] = index;
        ex.metadata["dataset_seed"] = seed;
      }
      out.units.push_back(std::move(unit));
    } catch (const Error& e) {
      // A DC whose context is too long or that has no neighbor cannot supply all five types.
      if (e.kind() != ErrorKind::BudgetExceeded && e.kind() != ErrorKind::NoNeighbors) throw;
    }
  }
  return out;
}

}  // namespace

DatasetSplit build_dataset(const ScenarioConfig& config, std::size_t n_total, std::uint64_t seed, unsigned jobs,
                           std::vector<ScenarioSnapshot>* used_states) {
  if (n_total == 0 || n_total % 16 != 0) {
    throw Error(ErrorKind::InvalidConfig, "n_total must be a positive multiple of 16, got " + std::to_string(n_total));
  }
  if (config.topologies.empty()) throw Error(ErrorKind::InvalidConfig, "no topologies configured");
  jobs = std::max(1u, jobs);

  std::array<std::size_t, 5> need{};
  for (std::size_t t = 0; t < 5; ++t) need[t] = n_total / 5 + (t < n_total % 5 ? 1 : 0);
  std::size_t remaining = n_total;

  std::vector<QaExample> examples;
  examples.reserve(n_total);
  std::size_t next_index = 0;
  const auto max_scenarios = static_cast<std::size_t>(config.max_scenarios);
  while (remaining > 0) {
    if (next_index >= max_scenarios) {
      throw Error(ErrorKind::InfeasibleBalance, "max_scenarios (" + std::to_string(max_scenarios) +
                                                    ") reached with " + std::to_string(remaining) +
                                                    " examples still missing");
    }
    const std::size_t batch = std::min<std::size_t>(jobs, max_scenarios - next_index);
    std::vector<std::future<ScenarioOutput>> futures;
    for (std::size_t k = 0; k < batch; ++k) {
      futures.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_scenario,
                                   std::cref(config), seed, next_index + k));
    }
    for (std::size_t k = 0; k < batch; ++k) {
      ScenarioOutput out = futures[k].get();
      if (remaining == 0) continue;
      bool used = false;
      for (Unit& unit : out.units) {
        for (std::size_t t = 0; t < 5 && remaining > 0; ++t) {
          if (need[t] == 0) continue;
          examples.push_back(std::move(unit[t]));
          --need[t];
          --remaining;
          used = true;
        }
        if (remaining == 0) break;
      }
      if (used && used_states) used_states->push_back({next_index + k, std::move(out.state)});
    }
    next_index += batch;
  }

  std::set<std::string> ids;
  for (const QaExample& ex : examples) {
    if (!ids.insert(ex.id).second) throw Error(ErrorKind::InvariantViolation, "duplicate example id " + ex.id);
    if (!is_extractive(ex)) throw Error(ErrorKind::InvariantViolation, "non-extractive example " + ex.id);
  }
  return split_stratified(std::move(examples));
}

DatasetSplit split_stratified(std::vector<QaExample> examples) {
  const std::size_t n = examples.size();
  if (n % 16 != 0) throw Error(ErrorKind::InvalidArgument, "split needs a multiple of 16 examples");
  std::sort(examples.begin(), examples.end(), [](const QaExample& a, const QaExample& b) {
    return a.question_type != b.question_type ? a.question_type < b.question_type : a.id < b.id;
  });

  // Per type: floor shares first, then the leftovers go one per split to the
  // splits with the largest remaining global deficit.
  constexpr std::array<std::size_t, 3> kNum{12, 2, 2};
  std::array<std::size_t, 3> deficit{n * 12 / 16, n * 2 / 16, n * 2 / 16};
  std::map<int, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < n; ++i) by_type[examples[i].question_type].push_back(i);

  struct Plan {
    int type;
    std::array<std::size_t, 3> counts;
    std::size_t leftover;
  };
  std::vector<Plan> plans;
  for (const auto& [type, idx] : by_type) {
    Plan p{type, {}, idx.size()};
    for (std::size_t s = 0; s < 3; ++s) {
      p.counts[s] = idx.size() * kNum[s] / 16;
      p.leftover -= p.counts[s];
      deficit[s] -= p.counts[s];
    }
    plans.push_back(p);
  }
  std::vector<std::size_t> order(plans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return plans[a].leftover > plans[b].leftover; });
  for (std::size_t pi : order) {
    Plan& p = plans[pi];
    std::array<std::size_t, 3> splits{0, 1, 2};
    std::stable_sort(splits.begin(), splits.end(), [&](std::size_t a, std::size_t b) { return deficit[a] > deficit[b]; });
    for (std::size_t k = 0; k < p.leftover; ++k) {
      const std::size_t s = splits[k];
      if (deficit[s] == 0) throw Error(ErrorKind::InvariantViolation, "stratified split could not balance totals");
      ++p.counts[s];
      --deficit[s];
    }
  }

  DatasetSplit split;
  std::array<std::vector<QaExample>*, 3> targets{&split.train, &split.validation, &split.test};
  for (const Plan& p : plans) {
    const auto& idx = by_type[p.type];
    std::size_t pos = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < p.counts[s]; ++k) targets[s]->push_back(std::move(examples[idx[pos++]]));
    }
  }
  for (auto* t : targets) {
    std::sort(t->begin(), t->end(), [](const QaExample& a, const QaExample& b) { return a.id < b.id; });
  }
  return split;
}

// ---------------------------------------------------------------------------
// Files

json to_json(const QaExample& ex) {
  return {{"id", ex.id},
          {"question_type", ex.question_type},
          {"context", ex.context},
          {"question", ex.question},
          {"answers", json::array({{{"text", ex.answer_text}, {"answer_start", ex.answer_start}}})},
          {"dc_id", ex.dc_id},
          {"metadata", ex.metadata}};
}

QaExample example_from_json(const json& j) {
  constexpr ErrorKind kBad = ErrorKind::MalformedInput;
  QaExample ex;
  ex.id = json_get<std::string>(j, "id", kBad);
  ex.question_type = json_get<int>(j, "question_type", kBad);
  if (ex.question_type < 1 || ex.question_type > 5) throw Error(kBad, ex.id + ": question_type must be 1..5");
  ex.context = json_get<std::string>(j, "context", kBad);
  ex.question = json_get<std::string>(j, "question", kBad);
  const json answers = json_get<json>(j, "answers", kBad);
  if (!answers.is_array() || answers.size() != 1) throw Error(kBad, ex.id + ": expected exactly one answer");
  ex.answer_text = json_get<std::string>(answers[0], "text", kBad);
  ex.answer_start = json_get<std::size_t>(answers[0], "answer_start", kBad);
  ex.dc_id = json_get<std::uint32_t>(j, "dc_id", kBad);
  ex.metadata = json_get<json>(j, "metadata", kBad);
  if (!is_extractive(ex)) throw Error(kBad, ex.id + ": answer is not a slice of the context");
  return ex;
}

json dataset_json(const std::vector<QaExample>& examples, std::string_view template_version) {
  json arr = json::array();
  for (const QaExample& ex : examples) arr.push_back(to_json(ex));
  return {{"version", kDatasetVersion}, {"template_version", std::string(template_version)}, {"examples", arr}};
}

DatasetFile load_dataset(const std::filesystem::path& path) {
  const json j = read_json_file(path, ErrorKind::MalformedInput);
  constexpr ErrorKind kBad = ErrorKind::MalformedInput;
  if (json_get<int>(j, "version", kBad) != kDatasetVersion) throw Error(kBad, path.string() + ": unsupported version");
  DatasetFile file;
  file.template_version = json_get<std::string>(j, "template_version", kBad);
  for (const json& e : json_get<json>(j, "examples", kBad)) file.examples.push_back(example_from_json(e));
  return file;
}

void emit_dataset(const DatasetSplit& split, const std::filesystem::path& dir, std::string_view template_version) {
  write_text_file(dir / "train.json", canonical_dump(dataset_json(split.train, template_version)));
  write_text_file(dir / "val.json", canonical_dump(dataset_json(split.validation, template_version)));
  write_text_file(dir / "test.json", canonical_dump(dataset_json(split.test, template_version)));
}

DatasetSplit load_split(const std::filesystem::path& dir) {
  return {load_dataset(dir / "train.json").examples, load_dataset(dir / "val.json").examples,
          load_dataset(dir / "test.json").examples};
}

void emit_vocab(const std::filesystem::path& path) {
  std::string text;
  for (std::string_view token : kDomainVocab) {
    text += token;
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace sfcqa::qagen
