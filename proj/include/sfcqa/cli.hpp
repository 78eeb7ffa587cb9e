#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sfcqa/error.hpp"
#include "sfcqa/evalqa.hpp"
#include "sfcqa/netmodel.hpp"
#include "sfcqa/provision.hpp"

namespace sfcqa::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kInvariantError = 4 };
int exit_code_for(ErrorKind kind);

inline constexpr std::uint64_t kDefaultSeed = 2025;
inline constexpr std::size_t kDefaultTotal = 1920;

struct GenerateOptions {
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::filesystem::path> config;    // scenario config JSON; built-in default otherwise
  std::optional<std::filesystem::path> manifest;  // replay seed, n_total and config from a previous run
  std::filesystem::path out = "out";
  std::size_t n_total = kDefaultTotal;
  unsigned jobs = 1;
};

/// Writes train/val/test JSON, vocab.txt, states/scenario_NNNNN.json and run_manifest.json.
void cmd_generate(const GenerateOptions& options);

struct ProvisionOptions {
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::filesystem::path> config;  // topology config JSON
  std::filesystem::path out = "out";
  std::string policy = "first-fit";
  std::array<std::int64_t, netmodel::kSfcTypes.size()> arrivals{1, 1, 1, 1, 1, 1};
};

/// Parses "CG=2,VoIP=1" style arrival lists; unnamed types get zero.
std::array<std::int64_t, netmodel::kSfcTypes.size()> parse_arrivals(const std::string& text);

/// Builds a topology, runs one episode and writes state.json, stats.json and run_manifest.json.
provision::EpisodeStats cmd_provision(const ProvisionOptions& options);

/// Menu-driven oracle prompt over a read-only state; returns at EOF or "quit".
void cmd_ask(const netmodel::NetworkState& state, std::istream& in, std::ostream& out);
/// Answers one query line such as "2 dc=3"; throws Error(InvalidArgument) when unparseable.
std::string answer_query(const netmodel::NetworkState& state, const std::string& line);

struct ScoreOptions {
  std::filesystem::path dataset;
  std::filesystem::path logits;
  std::filesystem::path out = "out";
  std::size_t max_answer_len = evalqa::kDefaultMaxAnswerLen;
};

/// Writes report.json, per_example.csv, per_type.csv and run_manifest.json.
evalqa::EvalReport cmd_score(const ScoreOptions& options);

}  // namespace sfcqa::cli
