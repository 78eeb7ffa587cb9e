#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sfcqa/qagen.hpp"

namespace sfcqa::evalqa {

inline constexpr std::size_t kDefaultMaxAnswerLen = 30;

/// Max-shifted softmax. Throws Error(InvalidArgument) on empty or non-finite input.
std::vector<double> softmax(std::span<const double> logits);

/// Per-example model output. A (0, 0) offset marks a special or question token.
struct LogitRecord {
  std::string example_id;
  std::vector<std::pair<std::size_t, std::size_t>> token_offsets;
  std::vector<double> start_logits;
  std::vector<double> end_logits;
};

/// Throws Error(MalformedInput) when the lists disagree in length or are empty,
/// or when an offset falls outside a context of `context_size` characters.
void validate(const LogitRecord& record, std::size_t context_size);

struct SpanPrediction {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  std::string text;
  double confidence = 0.0;
};

/// Highest p_start[i] * p_end[j] over non-special i <= j <= i + max_answer_len.
/// Ties go to the smallest i, then the smallest j. Throws Error(NoValidSpan).
SpanPrediction best_span(const LogitRecord& record, std::string_view context,
                         std::size_t max_answer_len = kDefaultMaxAnswerLen);

/// Lowercase, punctuation stripped, split on whitespace.
std::vector<std::string> normalize_tokens(std::string_view text);
double token_f1(std::string_view prediction, std::string_view gold);
int exact_match(std::string_view prediction, std::string_view gold);

struct ExampleScore {
  std::string id;
  int question_type = 0;
  std::string prediction;
  std::string gold;
  double f1 = 0.0;
  int em = 0;
  double confidence = 0.0;
};

struct Aggregate {
  std::size_t n = 0;
  double mean_f1 = 0.0;
  double exact_match_rate = 0.0;
  double mean_confidence = 0.0;
};

struct EvalReport {
  std::size_t n = 0;
  double mean_f1 = 0.0;
  double exact_match_rate = 0.0;
  double mean_confidence = 0.0;
  std::pair<double, double> confidence_ci{0.0, 0.0};  // mean +- 1.96 * s / sqrt(n); s = 0 when n == 1
  std::map<int, Aggregate> per_type;
};

/// Aggregates per-example scores in the given order.
EvalReport aggregate(const std::vector<ExampleScore>& rows);

struct ScoredRun {
  EvalReport report;
  std::vector<ExampleScore> rows;  // dataset order
};

/// Parses logits JSON lines; blank lines skipped. Throws Error(MalformedInput).
std::vector<LogitRecord> parse_logits(std::istream& in);

/// Pairs every example with exactly one record. Throws MissingRecord or
/// OrphanRecord naming the offending ids.
ScoredRun score_examples(const std::vector<qagen::QaExample>& examples, const std::vector<LogitRecord>& records,
                         std::size_t max_answer_len = kDefaultMaxAnswerLen);
ScoredRun score_run(const std::filesystem::path& dataset_file, const std::filesystem::path& logits_file,
                    std::size_t max_answer_len = kDefaultMaxAnswerLen);

nlohmann::json report_json(const EvalReport& report);
std::string per_example_csv(const std::vector<ExampleScore>& rows);
std::string per_type_csv(const EvalReport& report);
/// Writes report.json, per_example.csv and per_type.csv.
void write_report(const ScoredRun& run, const std::filesystem::path& dir);

}  // namespace sfcqa::evalqa
