#pragma once

// Subcommand bodies for the coopsim tool. Each returns a process exit code and
// writes machine-readable output to `out`, diagnostics to `err`.
//
// Exit codes: 0 success, 1 unexpected failure, 2 invalid config or arguments,
// 3 LP solver failure, 4 queue-count overflow.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coopsim/controller.hpp"
#include "coopsim/csv.hpp"
#include "coopsim/model.hpp"
#include "coopsim/queueing.hpp"
#include "coopsim/region.hpp"
#include "coopsim/sim.hpp"
#include "coopsim/sweep.hpp"

namespace coopsim::cli {

enum ExitCode : int { ok = 0, failure = 1, bad_input = 2, solver_failure = 3, overflow = 4 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// "0.3,0.2" -> {0.3, 0.2}, locale independent.
inline std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size())
      throw UsageError(std::string(what) + ": cannot parse '" + std::string(item) + "'");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw UsageError(std::string(what) + ": trailing comma");
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

// A single value is broadcast to all K destinations.
inline std::vector<double> broadcast(std::vector<double> v, std::size_t destinations, std::string_view what) {
  if (v.size() == 1 && destinations > 1) v.assign(destinations, v.front());
  if (v.size() != destinations)
    throw UsageError(std::string(what) + " needs 1 or " + std::to_string(destinations) + " values");
  return v;
}

// Flag value, else $COOPSIM_OUTPUT_DIR, else the working directory.
inline std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("COOPSIM_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

inline Json witness_json(const NetworkConfig& config, const RegionWitness& w) {
  auto entries = [&](const std::vector<WitnessEntry>& list) {
    Json arr = Json::array();
    for (const auto& e : list) {
      arr.push_back({{"f1", labels::names(config.fading, e.state.first.value, config.num_relays())},
                     {"f2", labels::names(config.fading, e.state.second.value,
                                          config.num_relays() * config.num_destinations())},
                     {"m", config.scheme(e.triple.scheme).id},
                     {"g1", labels::names(config.fading, e.triple.first.value, config.num_relays())},
                     {"g2", labels::names(config.fading, e.triple.second.value,
                                          config.num_relays() * config.num_destinations())},
                     {"value", e.value}});
    }
    return arr;
  };
  return {{"status", std::string(simplex::to_string(w.status))},
          {w.kind == LpKind::scale ? "rho" : "delta", w.value},
          {"a", entries(w.first_hop)},
          {"b", entries(w.second_hop)}};
}

namespace detail {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return bad_input;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return bad_input;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return bad_input;
  } catch (const LpError& e) {
    err << "error: " << e.what() << '\n';
    return solver_failure;
  } catch (const CountOverflow& e) {
    err << "error: " << e.what() << '\n';
    return overflow;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return bad_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
}

}  // namespace detail

// Prints key,value CSV records in the order
// direction_1..K, rho_star, delta_star_at_rho(0.9), status.
inline int cmd_region(const std::string& config_path, const std::string& direction_text,
                      const std::string& witness_path, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const NetworkConfig config = load_config(config_path);
    const auto direction = broadcast(parse_list(direction_text, "direction"), config.num_destinations(), "direction");
    const auto scale = solve_lp(config, build_scale_lp(config, direction));
    if (scale.status != simplex::Status::optimal) throw LpError(scale.status);
    const double delta = interior_slack(config, scaled_rates(direction, scale.value, 0.9));

    std::ostringstream s;
    for (std::size_t k = 0; k < direction.size(); ++k) s << "direction_" << (k + 1) << ',' << csv::number(direction[k]) << '\n';
    s << "rho_star," << csv::number(scale.value, 12) << '\n';
    s << "delta_star_at_rho(0.9)," << csv::number(delta, 12) << '\n';
    s << "status," << simplex::to_string(scale.status) << '\n';
    out << s.str();
    if (!witness_path.empty()) detail::write_file(witness_path, witness_json(config, scale).dump(2) + "\n");
    return static_cast<int>(ok);
  });
}

struct SimulateArgs {
  std::string config_path;
  std::string lambda;       // comma list, or empty when load_factor is used
  std::optional<double> load_factor;
  std::string direction = "1";
  std::size_t horizon = 100000;
  std::uint64_t seed = 1;
  bool allow_idle = false;
  std::string arrivals = "uniform-integer";
  std::string batch_bits;   // comma list for bernoulli-batch
  std::string output_dir;
  bool trace_queues = false;
  bool trace_decisions = false;
};

inline ArrivalConfig resolve_arrivals(const NetworkConfig& config, const std::string& lambda,
                                      std::optional<double> load_factor, const std::string& direction,
                                      const std::string& law, const std::string& batch) {
  ArrivalConfig arrivals;
  arrivals.law = parse_arrival_law(law);
  if (!lambda.empty() && load_factor) throw UsageError("give either --lambda or --load-factor, not both");
  if (!lambda.empty()) {
    arrivals.rates = broadcast(parse_list(lambda, "lambda"), config.num_destinations(), "lambda");
  } else if (load_factor) {
    if (!(*load_factor > 0.0)) throw UsageError("--load-factor must be positive");
    const auto d = broadcast(parse_list(direction, "direction"), config.num_destinations(), "direction");
    arrivals.rates = scaled_rates(d, boundary_scale(config, d), *load_factor);
  } else {
    throw UsageError("one of --lambda or --load-factor is required");
  }
  if (arrivals.law == ArrivalLaw::bernoulli_batch)
    arrivals.batch_bits = broadcast(parse_list(batch, "batch-bits"), config.num_destinations(), "batch-bits");
  arrivals.validate(config.num_destinations(), config.block_length());
  return arrivals;
}

inline Json summary_json(const NetworkConfig& config, const ArrivalConfig& arrivals, const Metrics& m,
                         std::uint64_t seed, const StabilityVerdict& v) {
  const double symbols = static_cast<double>(m.horizon) * config.block_length();
  std::vector<double> delivered_rate;
  std::vector<double> offered_rate;
  for (std::size_t k = 0; k < m.delivered.size(); ++k) {
    delivered_rate.push_back(m.delivered[k] / symbols);
    offered_rate.push_back(m.offered[k] / symbols);
  }
  const double h = static_cast<double>(m.horizon);
  return {{"horizon", m.horizon},
          {"seed", seed},
          {"arrivals", std::string(to_string(arrivals.law))},
          {"lambda", arrivals.rates},
          {"offered_rate", offered_rate},
          {"delivered_rate", delivered_rate},
          {"delivered_bits", m.delivered},
          {"fraction_first_hop", static_cast<double>(m.first_hop_blocks) / h},
          {"fraction_second_hop", static_cast<double>(m.second_hop_blocks) / h},
          {"fraction_idle", static_cast<double>(m.idle_blocks) / h},
          {"trailing_average_backlog", m.trailing_average()},
          {"final_backlog", m.backlog_bits.back()},
          {"growth_rate", v.growth_rate},
          {"threshold_stable", v.thresholds.stable},
          {"threshold_unstable", v.thresholds.unstable},
          {"verdict", std::string(to_string(v.verdict))}};
}

// Writes metrics.csv and summary.json (plus optional traces) to the output
// directory and echoes the summary on `out`.
inline int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const NetworkConfig config = load_config(args.config_path);
    if (args.horizon < 1) throw UsageError("--horizon must be >= 1");
    const ArrivalConfig arrivals =
        resolve_arrivals(config, args.lambda, args.load_factor, args.direction, args.arrivals, args.batch_bits);
    RunOptions options;
    options.allow_idle = args.allow_idle;
    options.record_queues = args.trace_queues;
    const Metrics m = run(config, arrivals, args.horizon, args.seed, options);
    const auto v = stability_verdict(m, StabilityThresholds::for_block_length(config.block_length()));

    const auto dir = output_dir(args.output_dir);
    std::filesystem::create_directories(dir);
    {
      std::ostringstream s;
      write_metrics_csv(s, m);
      detail::write_file(dir / "metrics.csv", s.str());
    }
    if (args.trace_decisions) {
      std::ostringstream s;
      write_decision_csv(s, config, m);
      detail::write_file(dir / "decisions.csv", s.str());
    }
    if (args.trace_queues) {
      std::ostringstream s;
      write_queue_csv_header(s, config);
      for (std::size_t t = 0; t < m.snapshots.size(); ++t) write_queue_csv_row(s, t, m.snapshots[t]);
      detail::write_file(dir / "queues.csv", s.str());
    }
    const std::string summary = summary_json(config, arrivals, m, args.seed, v).dump() + "\n";
    detail::write_file(dir / "summary.json", summary);
    out << summary;
    return static_cast<int>(ok);
  });
}

inline std::string sweep_csv(const SweepResult& result) {
  std::ostringstream s;
  s << "load_factor,seed,growth_rate,verdict\n";
  for (const auto& row : result.rows)
    s << csv::number(row.load_factor) << ',' << row.seed << ',' << csv::number(row.growth_rate) << ','
      << to_string(row.verdict) << '\n';
  return s.str();
}

// Prints one CSV row per (load factor, seed) and writes the same to sweep.csv.
inline int cmd_sweep(const std::string& config_path, const std::string& spec_path, std::size_t jobs,
                     const std::string& output_flag, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const NetworkConfig config = load_config(config_path);
    std::ifstream in(spec_path);
    if (!in) throw ConfigError(ConfigErrorCode::malformed, "cannot open " + spec_path);
    Json raw;
    try {
      raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(ConfigErrorCode::malformed, spec_path + ": " + e.what());
    }
    const SweepSpec spec = parse_sweep_spec(raw);
    spec.validate(config);
    const SweepResult result = run_sweep(config, spec, jobs);
    const std::string text = sweep_csv(result);
    const auto dir = output_dir(output_flag);
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "sweep.csv", text);
    err << "rho_star=" << csv::number(result.rho_star) << '\n';
    out << text;
    return static_cast<int>(ok);
  });
}

inline int cmd_queue_count(const std::string& config_path, std::optional<std::uint64_t> levels, std::ostream& out,
                           std::ostream& err) {
  return detail::guarded(err, [&] {
    const NetworkConfig config = load_config(config_path);
    const Count encoding = queue_count_encoding_based(config);
    std::ostringstream s;
    s << "encoding=" << to_string(encoding);
    if (levels) {
      if (*levels < 1) throw UsageError("--state-based-levels must be >= 1");
      const Count state = queue_count_state_based(*levels, config.num_destinations(), config.fading.alphabet.size(),
                                                  config.num_relays());
      s << " state_based=" << to_string(state) << " ratio=";
      if (state % encoding == 0)
        s << to_string(state / encoding);
      else
        s << csv::number(static_cast<double>(static_cast<long double>(state) / static_cast<long double>(encoding)), 12);
    }
    out << s.str() << '\n';
    return static_cast<int>(ok);
  });
}

// Probe file: {"source": [...], "relay": [{"m": id, "g1": [...], "value": x, "n": relay?}]}.
// Relay entries without "n" apply to every relay.
inline QueueState parse_probe(const NetworkConfig& config, const Json& raw) {
  coopsim::detail::require_keys(raw, {"source", "relay"}, {"source"}, "probe");
  QueueState state(config);
  std::vector<double> source;
  try {
    source = raw.at("source").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ConfigError(ConfigErrorCode::malformed, std::string("probe.source: ") + e.what());
  }
  source = broadcast(source, config.num_destinations(), "probe.source");
  for (std::size_t k = 0; k < source.size(); ++k) state.set_source(k, source[k]);
  if (!raw.contains("relay")) return state;

  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < config.fading.alphabet.size(); ++i) index_of[config.fading.alphabet[i]] = i;
  for (const auto& entry : raw.at("relay")) {
    coopsim::detail::require_keys(entry, {"m", "g1", "value", "n"}, {"m", "g1", "value"}, "probe.relay");
    auto m = config.find_scheme(entry.at("m").get<long long>());
    if (!m) throw ConfigError(ConfigErrorCode::support_references_unknown_scheme, "probe.relay.m");
    const FirstHopState g1{coopsim::detail::parse_state(entry.at("g1"), index_of, config.fading.alphabet.size(),
                                                        config.num_relays(), "probe.relay.g1")};
    const double value = coopsim::detail::finite_number(entry.at("value"), "probe.relay.value");
    if (entry.contains("n")) {
      state.set_relay(entry.at("n").get<std::size_t>(), *m, g1, value);
    } else {
      for (std::size_t n = 0; n < config.num_relays(); ++n) state.set_relay(n, *m, g1, value);
    }
  }
  return state;
}

struct DriftArgs {
  std::string config_path;
  std::string probe_path;
  std::string lambda;
  std::optional<double> load_factor;
  std::string direction = "1";
  std::string arrivals = "uniform-integer";
  std::string batch_bits;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  bool allow_idle = false;
};

inline int cmd_drift_check(const DriftArgs& args, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const NetworkConfig config = load_config(args.config_path);
    const ArrivalConfig arrivals =
        resolve_arrivals(config, args.lambda, args.load_factor, args.direction, args.arrivals, args.batch_bits);
    std::ifstream in(args.probe_path);
    if (!in) throw ConfigError(ConfigErrorCode::malformed, "cannot open " + args.probe_path);
    Json raw;
    try {
      raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(ConfigErrorCode::malformed, args.probe_path + ": " + e.what());
    }
    const QueueState probe = parse_probe(config, raw);
    RunOptions options;
    options.allow_idle = args.allow_idle;
    const auto estimate = drift_check(config, arrivals, probe, args.samples, args.seed, options);
    out << Json{{"lambda", arrivals.rates},
                {"samples", estimate.samples},
                {"mean_drift", estimate.mean},
                {"std_error", estimate.std_error},
                {"lyapunov", lyapunov(config, probe)}}
               .dump()
        << '\n';
    return static_cast<int>(ok);
  });
}

}  // namespace coopsim::cli
