#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sfcqa/contextgen.hpp"
#include "sfcqa/netmodel.hpp"

namespace sfcqa::qagen {

using netmodel::DcId;
using netmodel::NetworkState;

inline constexpr int kDatasetVersion = 1;

/// Domain words added to the QA tokenizer, one per line in the vocab file.
inline constexpr std::array<std::string_view, 12> kDomainVocab{"CG",  "DC",  "NAT", "FW",   "VOC", "WO",
                                                                "IDPS", "VNF", "E2E", "MBPS", "BW",  "Ind40"};

struct QaExample {
  std::string id;
  int question_type = 0;  // 1..5
  std::string context;
  std::string question;
  std::string answer_text;
  std::size_t answer_start = 0;
  std::uint32_t dc_id = 0;
  nlohmann::json metadata = nlohmann::json::object();

  friend bool operator==(const QaExample&, const QaExample&) = default;
};

/// context[answer_start, answer_start + |answer_text|) == answer_text.
bool is_extractive(const QaExample& example);

// Oracles shared by the question builders and the interactive prompt.
struct Sufficiency {
  std::int64_t demand = 0;     // compute demand summed over every VNF of every pending request
  std::int64_t available = 0;  // free compute units at the DC
  bool sufficient() const { return demand <= available; }
};
Sufficiency sufficiency(const NetworkState& state, DcId dc);
std::size_t received_count(const NetworkState& state, DcId dc, netmodel::SfcType type);
/// Neighbor with the most available bandwidth; ties go to the lowest id.
std::optional<DcId> best_neighbor(const NetworkState& state, DcId dc);

// Question builders. Each takes the rendered context of the DC it asks about;
// the DcId overloads render it with default options first.
QaExample ask_type1(const NetworkState& state, const contextgen::ContextDoc& doc,
                    std::optional<netmodel::VnfType> vnf_type = std::nullopt);
QaExample ask_type2(const NetworkState& state, const contextgen::ContextDoc& doc);
QaExample ask_type3(const NetworkState& state, const contextgen::ContextDoc& doc, netmodel::SfcType sfc_type);
QaExample ask_type4(const NetworkState& state, const contextgen::ContextDoc& doc);
/// Throws Error(NoNeighbors).
QaExample ask_type5(const NetworkState& state, const contextgen::ContextDoc& doc);

QaExample ask_type1(const NetworkState& state, DcId dc, std::optional<netmodel::VnfType> vnf_type = std::nullopt);
QaExample ask_type2(const NetworkState& state, DcId dc);
QaExample ask_type3(const NetworkState& state, DcId dc, netmodel::SfcType sfc_type);
QaExample ask_type4(const NetworkState& state, DcId dc);
QaExample ask_type5(const NetworkState& state, DcId dc);

/// Sweep of simulated networks the dataset is drawn from. Scenario i uses
/// topologies[i % size], places `arrivals` bundles with the policy, then adds
/// `pending_arrivals` bundles that stay unplaced.
struct ScenarioConfig {
  std::vector<netmodel::TopologyConfig> topologies;
  std::array<netmodel::IntRange, netmodel::kSfcTypes.size()> arrivals{};
  std::array<netmodel::IntRange, netmodel::kSfcTypes.size()> pending_arrivals{};
  std::string policy = "first-fit";  // "first-fit" or "random"
  std::int64_t max_scenarios = 1000;
  contextgen::ContextOptions context;
};

ScenarioConfig default_scenario_config();
nlohmann::json to_json(const ScenarioConfig& config);
/// All fields mandatory; throws Error(InvalidConfig).
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);

/// The fully simulated network for one scenario index.
NetworkState build_scenario_state(const ScenarioConfig& config, std::uint64_t dataset_seed, std::size_t index);

struct DatasetSplit {
  std::vector<QaExample> train;
  std::vector<QaExample> validation;
  std::vector<QaExample> test;
};

/// Splits 12:2:2, stratified by question type (each split's per-type count
/// within 1 of exact proportionality). Each split is sorted by id.
/// The example count must be a multiple of 16.
DatasetSplit split_stratified(std::vector<QaExample> examples);

struct ScenarioSnapshot {
  std::size_t index = 0;
  NetworkState state;
};

/// Balanced dataset of n_total examples (n_total % 16 == 0): every (scenario,
/// DC) pair contributes one question of each type, so the type histogram is
/// flat up to the n_total % 5 remainder. Output bytes depend only on the
/// arguments, never on `jobs`. Throws InfeasibleBalance when max_scenarios
/// runs out first.
DatasetSplit build_dataset(const ScenarioConfig& config, std::size_t n_total, std::uint64_t seed, unsigned jobs = 1,
                           std::vector<ScenarioSnapshot>* used_states = nullptr);

nlohmann::json to_json(const QaExample& example);
QaExample example_from_json(const nlohmann::json& j);
nlohmann::json dataset_json(const std::vector<QaExample>& examples, std::string_view template_version);

struct DatasetFile {
  std::string template_version;
  std::vector<QaExample> examples;
};
DatasetFile load_dataset(const std::filesystem::path& path);

/// Writes train.json, val.json and test.json into `dir`.
void emit_dataset(const DatasetSplit& split, const std::filesystem::path& dir, std::string_view template_version);
DatasetSplit load_split(const std::filesystem::path& dir);
void emit_vocab(const std::filesystem::path& path);

}  // namespace sfcqa::qagen
