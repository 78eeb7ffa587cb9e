#include "sfcqa/cli.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfcqa/contextgen.hpp"
#include "sfcqa/netmodel_json.hpp"
#include "sfcqa/qagen.hpp"

namespace sfcqa::cli {

using namespace netmodel;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InfeasibleBalance:
    case ErrorKind::BudgetExceeded:
      return kConfigError;
    case ErrorKind::InvariantViolation:
      return kInvariantError;
    default:
      return kDataError;
  }
}

void cmd_generate(const GenerateOptions& options) {
  std::uint64_t seed = options.seed;
  std::size_t n_total = options.n_total;
  qagen::ScenarioConfig config = qagen::default_scenario_config();
  if (options.manifest) {
    const json m = read_json_file(*options.manifest, ErrorKind::InvalidConfig);
    if (json_get<std::string>(m, "command", ErrorKind::InvalidConfig) != "generate") {
      throw Error(ErrorKind::InvalidConfig, "manifest was not written by generate");
    }
    seed = json_get<std::uint64_t>(m, "seed", ErrorKind::InvalidConfig);
    n_total = json_get<std::size_t>(m, "n_total", ErrorKind::InvalidConfig);
    config = qagen::scenario_config_from_json(json_get<json>(m, "config", ErrorKind::InvalidConfig));
  } else if (options.config) {
    config = qagen::scenario_config_from_json(read_json_file(*options.config, ErrorKind::InvalidConfig));
  }

  std::vector<qagen::ScenarioSnapshot> states;
  const qagen::DatasetSplit split = qagen::build_dataset(config, n_total, seed, options.jobs, &states);
  qagen::emit_dataset(split, options.out, config.context.template_version);
  qagen::emit_vocab(options.out / "vocab.txt");

  json snapshots = json::array();
  for (const auto& s : states) {
    char name[32];
    std::snprintf(name, sizeof name, "scenario_%05zu.json", s.index);
    write_text_file(options.out / "states" / name, canonical_dump(to_json(s.state)));
    snapshots.push_back(std::string("states/") + name);
  }

  const json manifest = {{"command", "generate"},
                         {"seed", seed},
                         {"n_total", n_total},
                         {"config", qagen::to_json(config)},
                         {"outputs",
                          {{"train", "train.json"},
                           {"validation", "val.json"},
                           {"test", "test.json"},
                           {"vocab", "vocab.txt"},
                           {"states", snapshots}}},
                         {"counts",
                          {{"train", split.train.size()},
                           {"validation", split.validation.size()},
                           {"test", split.test.size()}}}};
  write_text_file(options.out / "run_manifest.json", canonical_dump(manifest));
}

std::array<std::int64_t, kSfcTypes.size()> parse_arrivals(const std::string& text) {
  std::array<std::int64_t, kSfcTypes.size()> out{};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const auto type = eq == std::string::npos ? std::nullopt : parse_sfc_type(item.substr(0, eq));
    if (!type) throw Error(ErrorKind::InvalidConfig, "bad arrival entry '" + item + "', expected TYPE=COUNT");
    try {
      std::size_t used = 0;
      const std::string count = item.substr(eq + 1);
      const long long v = std::stoll(count, &used);
      if (used != count.size() || v < 0) throw std::invalid_argument("count");
      out[index_of(*type)] = v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, "bad arrival count in '" + item + "'");
    }
  }
  return out;
}

provision::EpisodeStats cmd_provision(const ProvisionOptions& options) {
  const TopologyConfig topology = options.config
                                      ? topology_config_from_json(read_json_file(*options.config, ErrorKind::InvalidConfig))
                                      : default_topology_config();
  NetworkState state = new_topology(topology, options.seed);
  provision::EpisodeConfig episode;
  episode.seed = derive_seed(options.seed, 1);
  episode.policy = provision::parse_policy(options.policy);
  episode.arrivals_per_type = options.arrivals;
  const provision::EpisodeStats stats = provision::run_episode(state, episode);
  if (const auto problems = audit(state); !problems.empty()) {
    throw Error(ErrorKind::InvariantViolation, "episode left an inconsistent state: " + problems.front());
  }

  write_text_file(options.out / "state.json", canonical_dump(to_json(state)));
  write_text_file(options.out / "stats.json", canonical_dump(provision::to_json(stats)));
  json arrivals = json::object();
  for (SfcType t : kSfcTypes) arrivals[std::string(name(t))] = options.arrivals[index_of(t)];
  const json manifest = {{"command", "provision"},
                         {"seed", options.seed},
                         {"policy", options.policy},
                         {"arrivals", arrivals},
                         {"topology", to_json(topology)}};
  write_text_file(options.out / "run_manifest.json", canonical_dump(manifest));
  return stats;
}

namespace {

constexpr const char* kAskHelp =
    "Queries (one per line):\n"
    "  1 dc=<id> [vnf=<NAT|FW|TM|VOC|WO|IDPS>]  idle VNF instances\n"
    "  2 dc=<id>                               enough compute for all pending requests?\n"
    "  3 dc=<id> sfc=<CG|AR|VoIP|VS|MIoT|Ind40>  requests of one type received\n"
    "  4 dc=<id>                               available compute and storage\n"
    "  5 dc=<id>                               neighbor with the most available bandwidth\n"
    "  help | quit\n";

struct Query {
  int type = 0;
  std::optional<DcId> dc;
  std::optional<VnfType> vnf;
  std::optional<SfcType> sfc;
};

Query parse_query(const std::string& line) {
  std::istringstream in(line);
  std::string token;
  Query q;
  in >> token;
  if (token.size() != 1 || token[0] < '1' || token[0] > '5') {
    throw Error(ErrorKind::InvalidArgument, "query must start with a type number 1-5");
  }
  q.type = token[0] - '0';
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "dc") {
      if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "dc must be a number");
      }
      q.dc = DcId{static_cast<std::uint32_t>(std::stoul(value))};
    } else if (key == "vnf") {
      q.vnf = parse_vnf_type(value);
      if (!q.vnf) throw Error(ErrorKind::InvalidArgument, "unknown VNF type '" + value + "'");
    } else if (key == "sfc") {
      q.sfc = parse_sfc_type(value);
      if (!q.sfc) throw Error(ErrorKind::InvalidArgument, "unknown SFC type '" + value + "'");
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown key '" + key + "'");
    }
  }
  if (!q.dc) throw Error(ErrorKind::InvalidArgument, "missing dc=<id>");
  if (q.type == 3 && !q.sfc) throw Error(ErrorKind::InvalidArgument, "type 3 needs sfc=<type>");
  return q;
}

}  // namespace

std::string answer_query(const NetworkState& state, const std::string& line) {
  const Query q = parse_query(line);
  if (q.dc->value >= state.dcs.size()) {
    throw Error(ErrorKind::InvalidArgument, "no dc " + std::to_string(q.dc->value));
  }
  const DcId dc = *q.dc;
  const std::string dcn = contextgen::dc_name(dc);
  std::ostringstream out;
  switch (q.type) {
    case 1: {
      if (q.vnf) {
        out << idle_vnf_count(state, dc, q.vnf) << " idle " << name(*q.vnf) << " instances at " << dcn;
      } else {
        out << idle_vnf_count(state, dc) << " idle VNF instances at " << dcn << " (";
        for (std::size_t i = 0; i < kVnfTypes.size(); ++i) {
          out << (i ? ", " : "") << name(kVnfTypes[i]) << " " << idle_vnf_count(state, dc, kVnfTypes[i]);
        }
        out << ")";
      }
      break;
    }
    case 2: {
      const qagen::Sufficiency s = qagen::sufficiency(state, dc);
      out << (s.sufficient() ? "yes" : "no") << " (pending demand " << s.demand << " compute units, available "
          << s.available << ")";
      break;
    }
    case 3: {
      std::size_t pending = 0, served = 0, rejected = 0;
      for (const SfcRequest& r : state.requests) {
        if (r.ingress != dc || r.sfc_type != *q.sfc) continue;
        if (r.status == RequestStatus::Pending) ++pending;
        if (r.status == RequestStatus::Served) ++served;
        if (r.status == RequestStatus::Rejected) ++rejected;
      }
      out << qagen::received_count(state, dc, *q.sfc) << " " << name(*q.sfc) << " requests received by " << dcn
          << " (pending " << pending << ", served " << served << ", rejected " << rejected << ")";
      break;
    }
    case 4: {
      const Resources free = available_resources(state, dc);
      const DataCenter& d = state.dc(dc);
      out << free.compute << " compute units and " << free.storage << " storage units (capacity "
          << d.compute_capacity << " and " << d.storage_capacity << ")";
      break;
    }
    case 5: {
      const auto best = qagen::best_neighbor(state, dc);
      if (!best) {
        out << dcn << " has no neighbors";
        break;
      }
      out << contextgen::dc_name(*best) << " (";
      bool first = true;
      for (const Neighbor& nb : neighbors(state, dc)) {
        out << (first ? "" : ", ") << contextgen::dc_name(nb.dc) << ": " << format_bandwidth(nb.available_kbps);
        first = false;
      }
      out << ")";
      break;
    }
  }
  return out.str();
}

void cmd_ask(const NetworkState& state, std::istream& in, std::ostream& out) {
  out << "Network with " << state.dcs.size() << " DCs and " << state.requests.size() << " requests. "
      << "Type 'help' for the query menu.\n";
  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line.starts_with("quit") || line.starts_with("exit")) break;
    if (line.starts_with("help")) {
      out << kAskHelp;
      continue;
    }
    try {
      out << answer_query(state, line) << "\n";
    } catch (const Error& e) {
      out << "error: " << e.what() << "\n" << kAskHelp;
    }
  }
  out << "\n";
}

evalqa::EvalReport cmd_score(const ScoreOptions& options) {
  const evalqa::ScoredRun run = evalqa::score_run(options.dataset, options.logits, options.max_answer_len);
  evalqa::write_report(run, options.out);
  const json manifest = {{"command", "score"},
                         {"dataset", options.dataset.string()},
                         {"logits", options.logits.string()},
                         {"max_answer_len", options.max_answer_len}};
  write_text_file(options.out / "run_manifest.json", canonical_dump(manifest));
  return run.report;
}

}  // namespace sfcqa::cli
