#include "sfcqa/evalqa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "sfcqa/error.hpp"
#include "sfcqa/netmodel_json.hpp"

namespace sfcqa::evalqa {

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorKind::InvalidArgument, "softmax of an empty vector");
  double top = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "softmax input is not finite");
    top = std::max(top, v);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

void validate(const LogitRecord& r, std::size_t context_size) {
  const std::string& id = r.example_id;
  if (r.token_offsets.empty()) throw Error(ErrorKind::MalformedInput, id + ": empty logit record");
  if (r.start_logits.size() != r.token_offsets.size() || r.end_logits.size() != r.token_offsets.size()) {
    throw Error(ErrorKind::MalformedInput, id + ": token_offsets, start_logits and end_logits differ in length");
  }
  for (const auto& [s, e] : r.token_offsets) {
    if (s > e || e > context_size) {
      throw Error(ErrorKind::MalformedInput, id + ": token offset [" + std::to_string(s) + ", " +
                                                 std::to_string(e) + "] outside the context");
    }
  }
}

SpanPrediction best_span(const LogitRecord& record, std::string_view context, std::size_t max_answer_len) {
  validate(record, context.size());
  const std::vector<double> p_start = softmax(record.start_logits);
  const std::vector<double> p_end = softmax(record.end_logits);
  auto special = [&](std::size_t k) { return record.token_offsets[k] == std::pair<std::size_t, std::size_t>{0, 0}; };

  const std::size_t n = p_start.size();
  bool found = false;
  SpanPrediction best;
  for (std::size_t i = 0; i < n; ++i) {
    if (special(i)) continue;
    const std::size_t last = std::min(n - 1, i + max_answer_len);
    for (std::size_t j = i; j <= last; ++j) {
      if (special(j)) continue;
      const double score = p_start[i] * p_end[j];
      if (!found || score > best.confidence) {
        found = true;
        best.start_idx = i;
        best.end_idx = j;
        best.confidence = score;
      }
    }
  }
  if (!found) throw Error(ErrorKind::NoValidSpan, record.example_id + ": every token is special");
  const std::size_t begin = record.token_offsets[best.start_idx].first;
  const std::size_t end = record.token_offsets[best.end_idx].second;
  best.text = end > begin ? std::string(context.substr(begin, end - begin)) : std::string();
  return best;
}

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else if (!std::ispunct(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = normalize_tokens(prediction);
  const auto ref = normalize_tokens(gold);
  if (pred.empty() && ref.empty()) return 1.0;
  if (pred.empty() || ref.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : ref) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

int exact_match(std::string_view prediction, std::string_view gold) {
  return normalize_tokens(prediction) == normalize_tokens(gold) ? 1 : 0;
}

EvalReport aggregate(const std::vector<ExampleScore>& rows) {
  EvalReport report;
  report.n = rows.size();
  if (rows.empty()) return report;
  std::map<int, std::array<double, 3>> sums;
  double f1 = 0.0, em = 0.0, conf = 0.0;
  for (const ExampleScore& r : rows) {
    f1 += r.f1;
    em += r.em;
    conf += r.confidence;
    auto& s = sums[r.question_type];
    s[0] += r.f1;
    s[1] += r.em;
    s[2] += r.confidence;
    ++report.per_type[r.question_type].n;
  }
  const auto n = static_cast<double>(rows.size());
  report.mean_f1 = f1 / n;
  report.exact_match_rate = em / n;
  report.mean_confidence = conf / n;
  for (auto& [type, agg] : report.per_type) {
    const auto k = static_cast<double>(agg.n);
    agg.mean_f1 = sums[type][0] / k;
    agg.exact_match_rate = sums[type][1] / k;
    agg.mean_confidence = sums[type][2] / k;
  }
  double sd = 0.0;
  if (rows.size() > 1) {
    double ss = 0.0;
    for (const ExampleScore& r : rows) ss += (r.confidence - report.mean_confidence) * (r.confidence - report.mean_confidence);
    sd = std::sqrt(ss / (n - 1.0));
  }
  const double half = 1.96 * sd / std::sqrt(n);
  report.confidence_ci = {report.mean_confidence - half, report.mean_confidence + half};
  return report;
}

std::vector<LogitRecord> parse_logits(std::istream& in) {
  std::vector<LogitRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LogitRecord r;
      r.example_id = j.at("example_id").get<std::string>();
      for (const auto& pair : j.at("token_offsets")) {
        if (!pair.is_array() || pair.size() != 2) throw Error(ErrorKind::MalformedInput, "offsets must be [start, end]");
        r.token_offsets.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
      }
      r.start_logits = j.at("start_logits").get<std::vector<double>>();
      r.end_logits = j.at("end_logits").get<std::vector<double>>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedInput, "logits line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::MalformedInput, "logits line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

ScoredRun score_examples(const std::vector<qagen::QaExample>& examples, const std::vector<LogitRecord>& records,
                         std::size_t max_answer_len) {
  std::unordered_map<std::string, const LogitRecord*> by_id;
  std::vector<std::string> duplicates;
  for (const LogitRecord& r : records) {
    if (!by_id.emplace(r.example_id, &r).second) duplicates.push_back(r.example_id);
  }
  if (!duplicates.empty()) throw Error(ErrorKind::OrphanRecord, "duplicate logit records: " + duplicates.front());

  std::set<std::string> example_ids;
  std::vector<std::string> missing;
  for (const auto& ex : examples) {
    example_ids.insert(ex.id);
    if (!by_id.count(ex.id)) missing.push_back(ex.id);
  }
  std::vector<std::string> orphans;
  for (const LogitRecord& r : records) {
    if (!example_ids.count(r.example_id)) orphans.push_back(r.example_id);
  }
  auto joined = [](const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
  };
  if (!missing.empty()) throw Error(ErrorKind::MissingRecord, "no logits for " + joined(missing));
  if (!orphans.empty()) throw Error(ErrorKind::OrphanRecord, "logits without example: " + joined(orphans));

  ScoredRun run;
  for (const auto& ex : examples) {
    const SpanPrediction pred = best_span(*by_id.at(ex.id), ex.context, max_answer_len);
    run.rows.push_back({ex.id, ex.question_type, pred.text, ex.answer_text, token_f1(pred.text, ex.answer_text),
                        exact_match(pred.text, ex.answer_text), pred.confidence});
  }
  run.report = aggregate(run.rows);
  return run;
}

ScoredRun score_run(const std::filesystem::path& dataset_file, const std::filesystem::path& logits_file,
                    std::size_t max_answer_len) {
  const auto dataset = qagen::load_dataset(dataset_file);
  std::ifstream in(logits_file);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + logits_file.string());
  return score_examples(dataset.examples, parse_logits(in), max_answer_len);
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto& [type, agg] : report.per_type) {
    per_type[std::to_string(type)] = {{"n", agg.n},
                                      {"mean_f1", agg.mean_f1},
                                      {"exact_match_rate", agg.exact_match_rate},
                                      {"mean_confidence", agg.mean_confidence}};
  }
  return {{"n", report.n},
          {"mean_f1", report.mean_f1},
          {"exact_match_rate", report.exact_match_rate},
          {"mean_confidence", report.mean_confidence},
          {"confidence_ci", {report.confidence_ci.first, report.confidence_ci.second}},
          {"per_type", per_type}};
}

namespace {

std::string csv_field(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string per_example_csv(const std::vector<ExampleScore>& rows) {
  std::string out = "id,question_type,f1,em,confidence,prediction,gold\n";
  for (const ExampleScore& r : rows) {
    out += r.id + "," + std::to_string(r.question_type) + "," + num(r.f1) + "," + std::to_string(r.em) + "," +
           num(r.confidence) + "," + csv_field(r.prediction) + "," + csv_field(r.gold) + "\n";
  }
  return out;
}

std::string per_type_csv(const EvalReport& report) {
  std::string out = "question_type,n,mean_f1,exact_match_rate,mean_confidence\n";
  for (const auto& [type, agg] : report.per_type) {
    out += std::to_string(type) + "," + std::to_string(agg.n) + "," + num(agg.mean_f1) + "," +
           num(agg.exact_match_rate) + "," + num(agg.mean_confidence) + "\n";
  }
  out += "all," + std::to_string(report.n) + "," + num(report.mean_f1) + "," + num(report.exact_match_rate) + "," +
         num(report.mean_confidence) + "\n";
  return out;
}

void write_report(const ScoredRun& run, const std::filesystem::path& dir) {
  write_text_file(dir / "report.json", canonical_dump(report_json(run.report)));
  write_text_file(dir / "per_example.csv", per_example_csv(run.rows));
  write_text_file(dir / "per_type.csv", per_type_csv(run.report));
}

}  // namespace sfcqa::evalqa
