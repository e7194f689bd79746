#pragma once

// Block-by-block simulation: draw fading, draw arrivals, ask the controller,
// apply the queue dynamics, record metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coopsim/controller.hpp"
#include "coopsim/csv.hpp"
#include "coopsim/model.hpp"
#include "coopsim/queueing.hpp"
#include "coopsim/rng.hpp"

namespace coopsim {

enum class ArrivalLaw { constant, uniform_integer, bernoulli_batch };

inline std::string_view to_string(ArrivalLaw law) {
  switch (law) {
    case ArrivalLaw::constant: return "constant";
    case ArrivalLaw::uniform_integer: return "uniform-integer";
    case ArrivalLaw::bernoulli_batch: return "bernoulli-batch";
  }
  return "unknown";
}

inline ArrivalLaw parse_arrival_law(std::string_view name) {
  if (name == "constant") return ArrivalLaw::constant;
  if (name == "uniform-integer" || name == "uniform") return ArrivalLaw::uniform_integer;
  if (name == "bernoulli-batch" || name == "bernoulli") return ArrivalLaw::bernoulli_batch;
  throw std::invalid_argument("unknown arrival law '" + std::string(name) + "'");
}

// Exogenous i.i.d. arrivals with mean lambda_k * T bits per block.
//
//   constant         exactly lambda_k T every block
//   uniform-integer  uniform on {0, ..., 2n} plus a Bernoulli(lambda_k T - n)
//                    bit, n = floor(lambda_k T); plain uniform on
//                    {0, ..., 2 lambda_k T} when lambda_k T is an integer
//   bernoulli-batch  batch_bits[k] with probability lambda_k T / batch_bits[k]
struct ArrivalConfig {
  std::vector<double> rates;  // lambda, bits per symbol
  ArrivalLaw law = ArrivalLaw::uniform_integer;
  std::vector<double> batch_bits;

  void validate(std::size_t destinations, double block_length) const {
    if (rates.size() != destinations)
      throw std::invalid_argument("arrival rates must have K = " + std::to_string(destinations) + " entries");
    for (double r : rates)
      if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("arrival rates must be finite and >= 0");
    if (law == ArrivalLaw::uniform_integer) {
      for (double r : rates)
        if (r * block_length > 1e15) throw std::invalid_argument("arrival mean too large for integer sampling");
    }
    if (law == ArrivalLaw::bernoulli_batch) {
      if (batch_bits.size() != destinations) throw std::invalid_argument("batch_bits must have K entries");
      for (std::size_t k = 0; k < destinations; ++k) {
        if (!(batch_bits[k] > 0.0)) throw std::invalid_argument("batch_bits must be positive");
        if (rates[k] * block_length > batch_bits[k])
          throw std::invalid_argument("bernoulli-batch mean exceeds the batch size");
      }
    }
  }
};

inline double sample_arrival(const ArrivalConfig& cfg, std::size_t k, double block_length, Rng& rng) {
  const double mean = cfg.rates[k] * block_length;
  switch (cfg.law) {
    case ArrivalLaw::constant: return mean;
    case ArrivalLaw::uniform_integer: {
      if (mean == 0.0) return 0.0;
      const double whole = std::floor(mean);
      const double frac = mean - whole;
      double x = static_cast<double>(rng.uniform_int(2 * static_cast<std::uint64_t>(whole)));
      if (frac > 0.0 && rng.bernoulli(frac)) x += 1.0;
      return x;
    }
    case ArrivalLaw::bernoulli_batch:
      if (mean == 0.0) return 0.0;
      return rng.bernoulli(mean / cfg.batch_bits[k]) ? cfg.batch_bits[k] : 0.0;
  }
  return 0.0;
}

// One draw per destination; streams[k] feeds destination k.
inline std::vector<double> generate_arrivals(const ArrivalConfig& cfg, std::span<Rng> streams, double block_length) {
  if (streams.size() != cfg.rates.size()) throw std::invalid_argument("need one RNG stream per destination");
  std::vector<double> out(cfg.rates.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sample_arrival(cfg, k, block_length, streams[k]);
  return out;
}

// Bits-equivalent weight of one relay symbol in the backlog total used for
// stability verdicts.
enum class RelayWeighting {
  scheme_rate_sum,  // each queue weighted by its own r_m . 1
  max_rate,         // every queue weighted by max_k max_m r_m^k
};

struct RunOptions {
  bool allow_idle = false;
  RelayWeighting weighting = RelayWeighting::scheme_rate_sum;
  bool record_queues = false;
};

struct Metrics {
  std::size_t horizon = 0;
  // Per block, measured after that block's update.
  std::vector<double> source_backlog;  // bits
  std::vector<double> relay_backlog;   // symbols, summed over relays
  std::vector<double> backlog_bits;    // source + bits-equivalent relay backlog
  std::vector<double> lyapunov;
  std::vector<Decision> decisions;
  std::vector<QueueState> snapshots;  // only with RunOptions::record_queues

  std::vector<double> offered;    // bits per destination
  std::vector<double> delivered;  // bits per destination
  std::size_t first_hop_blocks = 0;
  std::size_t second_hop_blocks = 0;
  std::size_t idle_blocks = 0;
  QueueState final_state;

  // Mean of backlog_bits over the trailing half of the horizon.
  double trailing_average() const {
    if (backlog_bits.empty()) return 0.0;
    const std::size_t begin = backlog_bits.size() / 2;
    long double s = 0.0L;
    for (std::size_t t = begin; t < backlog_bits.size(); ++t) s += backlog_bits[t];
    return static_cast<double>(s / static_cast<long double>(backlog_bits.size() - begin));
  }

  bool operator==(const Metrics&) const = default;
};

inline double backlog_in_bits(const NetworkConfig& config, const QueueState& state, RelayWeighting weighting) {
  double total = state.total_source();
  if (weighting == RelayWeighting::max_rate) return total + config.max_rate() * state.total_relay();
  const auto table = state.relay_table();
  const std::size_t per_scheme = static_cast<std::size_t>(state.first_hop_states());
  for (std::size_t i = 0; i < table.size(); ++i)
    total += config.schemes[(i / per_scheme) % state.num_schemes()].rate_sum() * table[i];
  return total;
}

namespace detail {

inline std::vector<Rng> arrival_streams(std::uint64_t seed, std::size_t destinations) {
  std::vector<Rng> streams;
  streams.reserve(destinations);
  for (std::size_t k = 0; k < destinations; ++k) streams.push_back(Rng::substream(seed, 1 + k));
  return streams;
}

}  // namespace detail

// Runs `horizon` blocks starting from `initial`. Deterministic given seed.
inline Metrics run_from(const NetworkConfig& config, const ArrivalConfig& arrivals, QueueState initial,
                        std::size_t horizon, std::uint64_t seed, RunOptions options = {}) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  arrivals.validate(config.num_destinations(), config.block_length());
  detail::check_shape(config, initial);

  const std::size_t K = config.num_destinations();
  const double T = config.block_length();
  Rng fading_rng = Rng::substream(seed, 0);
  auto arrival_rngs = detail::arrival_streams(seed, K);

  Metrics m;
  m.horizon = horizon;
  m.source_backlog.reserve(horizon);
  m.relay_backlog.reserve(horizon);
  m.backlog_bits.reserve(horizon);
  m.lyapunov.reserve(horizon);
  m.decisions.reserve(horizon);
  m.offered.assign(K, 0.0);
  m.delivered.assign(K, 0.0);

  // Real (non-padding) bits sitting in each virtual queue, per destination.
  const std::size_t keys = config.num_schemes() * static_cast<std::size_t>(config.fading.first_hop_states);
  std::vector<double> payload(keys * K, 0.0);
  auto payload_at = [&](SchemeIndex s, FirstHopState g1, std::size_t k) -> double& {
    return payload[(s.value * static_cast<std::size_t>(config.fading.first_hop_states) + g1.value) * K + k];
  };

  QueueState state = std::move(initial);
  const ControllerOptions controller{options.allow_idle};
  for (std::size_t t = 0; t < horizon; ++t) {
    const FadingState f = sample_fading(config, fading_rng);
    const auto a = generate_arrivals(arrivals, arrival_rngs, T);
    for (std::size_t k = 0; k < K; ++k) m.offered[k] += a[k];

    const Decision d = decide(config, state, f, controller);
    switch (d.kind) {
      case DecisionKind::first_hop: {
        QueueState next = apply_first_hop(config, state, a, d.scheme, d.first);
        for (std::size_t k = 0; k < K; ++k) payload_at(d.scheme, d.first, k) += state.source(k) + a[k] - next.source(k);
        state = std::move(next);
        ++m.first_hop_blocks;
        break;
      }
      case DecisionKind::second_hop: {
        if (!config.support.contains(d.scheme, d.first, f.second))
          throw std::logic_error("second-hop decision outside the support relation");
        const double drained = std::min(T, state.relay(0, d.scheme, d.first));
        const auto& rates = config.scheme(d.scheme).rates;
        for (std::size_t k = 0; k < K; ++k) {
          double& bits = payload_at(d.scheme, d.first, k);
          const double out = std::min(bits, rates[k] * drained);
          bits -= out;
          m.delivered[k] += out;
        }
        state = apply_second_hop(config, std::move(state), a, d.scheme, d.first);
        ++m.second_hop_blocks;
        break;
      }
      case DecisionKind::idle:
        state = apply_idle(std::move(state), a);
        ++m.idle_blocks;
        break;
    }

    m.decisions.push_back(d);
    m.source_backlog.push_back(state.total_source());
    m.relay_backlog.push_back(state.total_relay());
    m.backlog_bits.push_back(backlog_in_bits(config, state, options.weighting));
    m.lyapunov.push_back(lyapunov(config, state));
    if (options.record_queues) m.snapshots.push_back(state);
  }
  m.final_state = std::move(state);
  return m;
}

inline Metrics run(const NetworkConfig& config, const ArrivalConfig& arrivals, std::size_t horizon,
                   std::uint64_t seed, RunOptions options = {}) {
  return run_from(config, arrivals, QueueState(config), horizon, seed, options);
}

enum class Verdict { stable, unstable, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct StabilityThresholds {
  double stable = 0.0;    // growth below this is stable
  double unstable = 0.0;  // growth above this is unstable

  // 0.01 T and 0.1 T bits per block.
  static StabilityThresholds for_block_length(double block_length) {
    return {0.01 * block_length, 0.1 * block_length};
  }
};

struct StabilityVerdict {
  Verdict verdict = Verdict::inconclusive;
  double growth_rate = 0.0;  // bits per block
  StabilityThresholds thresholds;
};

// Least-squares slope of y against its index.
inline double least_squares_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const long double x_mean = static_cast<long double>(n - 1) / 2.0L;
  long double y_mean = 0.0L;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<long double>(n);
  long double sxy = 0.0L;
  long double sxx = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dx = static_cast<long double>(i) - x_mean;
    sxy += dx * (static_cast<long double>(y[i]) - y_mean);
    sxx += dx * dx;
  }
  return static_cast<double>(sxy / sxx);
}

// Classifies by the slope of the trailing half of `backlog`.
inline StabilityVerdict stability_verdict(std::span<const double> backlog, StabilityThresholds thresholds) {
  if (!(thresholds.stable < thresholds.unstable))
    throw std::invalid_argument("stable threshold must be below the unstable threshold");
  StabilityVerdict v;
  v.thresholds = thresholds;
  v.growth_rate = least_squares_slope(backlog.subspan(backlog.size() / 2));
  if (v.growth_rate < thresholds.stable)
    v.verdict = Verdict::stable;
  else if (v.growth_rate > thresholds.unstable)
    v.verdict = Verdict::unstable;
  else
    v.verdict = Verdict::inconclusive;
  return v;
}

inline StabilityVerdict stability_verdict(const Metrics& metrics, StabilityThresholds thresholds) {
  return stability_verdict(metrics.backlog_bits, thresholds);
}

struct DriftEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo estimate of E[V(Q[t+1]) - V(Q[t]) | Q[t] = probe].
inline DriftEstimate drift_check(const NetworkConfig& config, const ArrivalConfig& arrivals, const QueueState& probe,
                                 std::size_t samples, std::uint64_t seed, RunOptions options = {}) {
  if (samples < 2) throw std::invalid_argument("drift_check needs at least 2 samples");
  arrivals.validate(config.num_destinations(), config.block_length());
  detail::check_shape(config, probe);
  const double T = config.block_length();
  Rng fading_rng = Rng::substream(seed, 0);
  auto arrival_rngs = detail::arrival_streams(seed, config.num_destinations());
  const double v0 = lyapunov(config, probe);
  const ControllerOptions controller{options.allow_idle};

  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const FadingState f = sample_fading(config, fading_rng);
    const auto a = generate_arrivals(arrivals, arrival_rngs, T);
    const Decision d = decide(config, probe, f, controller);
    QueueState next;
    switch (d.kind) {
      case DecisionKind::first_hop: next = apply_first_hop(config, probe, a, d.scheme, d.first); break;
      case DecisionKind::second_hop: next = apply_second_hop(config, probe, a, d.scheme, d.first); break;
      case DecisionKind::idle: next = apply_idle(probe, a); break;
    }
    const double dv = lyapunov(config, next) - v0;
    const double delta = dv - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (dv - mean);
  }
  DriftEstimate out;
  out.samples = samples;
  out.mean = mean;
  out.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return out;
}

// lambda = factor * rho * direction, the load used by sweeps and load-factor runs.
inline std::vector<double> scaled_rates(std::span<const double> direction, double rho, double factor) {
  std::vector<double> out(direction.size());
  for (std::size_t k = 0; k < direction.size(); ++k) out[k] = factor * rho * direction[k];
  return out;
}

// Per-block metrics CSV.
inline void write_metrics_csv(std::ostream& out, const Metrics& m) {
  out << "block,source_backlog,relay_backlog,backlog_bits,lyapunov,decision\n";
  for (std::size_t t = 0; t < m.horizon; ++t) {
    out << t << ',' << csv::number(m.source_backlog[t]) << ',' << csv::number(m.relay_backlog[t]) << ','
        << csv::number(m.backlog_bits[t]) << ',' << csv::number(m.lyapunov[t]) << ','
        << to_string(m.decisions[t].kind) << '\n';
  }
}

// Decision trace CSV: block, variant, m, g1, A, B. m is the scheme id, g1 the
// first-hop labels joined with '|'; both are empty for idle blocks.
inline void write_decision_csv(std::ostream& out, const NetworkConfig& config, const Metrics& m) {
  out << "block,variant,m,g1,A,B\n";
  for (std::size_t t = 0; t < m.horizon; ++t) {
    const auto& d = m.decisions[t];
    out << t << ',' << to_string(d.kind) << ',';
    if (d.kind != DecisionKind::idle)
      out << config.scheme(d.scheme).id << ',' << labels::joined(config.fading, d.first.value, config.num_relays());
    else
      out << ',';
    out << ',' << csv::number(d.first_weight) << ',' << csv::number(d.second_weight) << '\n';
  }
}

}  // namespace coopsim
