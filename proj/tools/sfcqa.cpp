// sfcqa: SFC provisioning simulator and extractive-QA benchmark tool.
//
//   sfcqa generate  --out data [--config scenario.json] [--n-total 1920] [--seed N] [--jobs N]
//   sfcqa provision --out run  [--config topology.json] [--policy first-fit|random|trace:<path>]
//   sfcqa ask       <state.json>
//   sfcqa score     --dataset test.json --logits logits.jsonl --out report

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sfcqa/cli.hpp"
#include "sfcqa/netmodel_json.hpp"

namespace {

unsigned jobs_from_env(unsigned fallback) {
  if (const char* env = std::getenv("JOBS")) {
    try {
      const unsigned long v = std::stoul(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sfcqa;

  CLI::App app{"SFC provisioning simulator and extractive-QA benchmark factory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = cli::kDefaultSeed;
  std::string config_path;
  std::string out_dir = "out";
  unsigned jobs = 0;
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--jobs", jobs, "Worker threads (JOBS env var when omitted)");

  auto* generate = app.add_subcommand("generate", "Simulate networks and emit the QA dataset");
  std::size_t n_total = cli::kDefaultTotal;
  std::string manifest_path;
  generate->add_option("--n-total", n_total, "Number of examples (multiple of 16)");
  generate->add_option("--manifest", manifest_path, "Replay a previous run_manifest.json");

  auto* prov = app.add_subcommand("provision", "Run one provisioning episode and snapshot the state");
  std::string policy = "first-fit";
  std::string arrivals = "CG=1,AR=1,VoIP=1,VS=1,MIoT=1,Ind40=1";
  prov->add_option("--policy", policy, "first-fit | random | trace:<path>");
  prov->add_option("--arrivals", arrivals, "Bundle arrivals per SFC type, e.g. CG=2,MIoT=3");

  auto* ask = app.add_subcommand("ask", "Interactive oracle queries over a state snapshot");
  std::string state_file;
  ask->add_option("state", state_file, "State JSON written by provision or generate")->required();

  auto* score = app.add_subcommand("score", "Score QA logits against a dataset split");
  cli::ScoreOptions score_opts;
  std::string dataset, logits;
  score->add_option("--dataset", dataset, "Dataset split JSON")->required();
  score->add_option("--logits", logits, "Logits JSON lines")->required();
  score->add_option("--max-answer-len", score_opts.max_answer_len, "Longest span in tokens");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kConfigError;
  }

  try {
    if (generate->parsed()) {
      cli::GenerateOptions opts;
      opts.seed = seed;
      if (!config_path.empty()) opts.config = config_path;
      if (!manifest_path.empty()) opts.manifest = manifest_path;
      opts.out = out_dir;
      opts.n_total = n_total;
      opts.jobs = jobs > 0 ? jobs : jobs_from_env(1);
      cli::cmd_generate(opts);
      std::cout << "wrote dataset to " << out_dir << "\n";
    } else if (prov->parsed()) {
      cli::ProvisionOptions opts;
      opts.seed = seed;
      if (!config_path.empty()) opts.config = config_path;
      opts.out = out_dir;
      opts.policy = policy;
      opts.arrivals = cli::parse_arrivals(arrivals);
      const auto stats = cli::cmd_provision(opts);
      std::cout << "served " << stats.served << " of " << stats.total << " requests (acceptance "
                << stats.acceptance_ratio() << ")\n";
    } else if (ask->parsed()) {
      const auto state = netmodel::state_from_json(read_json_file(state_file, ErrorKind::MalformedInput));
      cli::cmd_ask(state, std::cin, std::cout);
    } else if (score->parsed()) {
      score_opts.dataset = dataset;
      score_opts.logits = logits;
      score_opts.out = out_dir;
      const auto report = cli::cmd_score(score_opts);
      std::printf("n=%zu F1 %.1f EM %.1f confidence %.4f [%.4f, %.4f]\n", report.n, report.mean_f1 * 100.0,
                  report.exact_match_rate * 100.0, report.mean_confidence, report.confidence_ci.first,
                  report.confidence_ci.second);
    }
  } catch (const Error& e) {
    std::cerr << "sfcqa: " << e.what() << "\n";
    return cli::exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "sfcqa: " << e.what() << "\n";
    return cli::kDataError;
  }
  return cli::kOk;
}
