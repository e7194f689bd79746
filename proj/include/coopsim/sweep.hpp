#pragma once

// Load-factor sweeps: rho* is computed once along a direction, then every
// (load factor, seed) pair is simulated at lambda = factor * rho* * direction
// on a bounded worker pool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "coopsim/model.hpp"
#include "coopsim/region.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

struct SweepSpec {
  std::vector<double> direction;
  std::vector<double> load_factors;
  std::size_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  ArrivalLaw law = ArrivalLaw::uniform_integer;
  bool allow_idle = false;

  void validate(const NetworkConfig& config) const {
    if (load_factors.empty()) throw std::invalid_argument("load_factors must be non-empty");
    for (double f : load_factors)
      if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("load factors must be positive");
    if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (direction.size() != config.num_destinations()) throw std::invalid_argument("direction must have K entries");
  }
};

inline SweepSpec parse_sweep_spec(const Json& raw) {
  detail::require_keys(raw, {"direction", "load_factors", "horizon", "seeds", "arrivals", "allow_idle"},
                       {"direction", "load_factors", "horizon", "seeds"}, "sweep");
  SweepSpec spec;
  try {
    spec.direction = raw.at("direction").get<std::vector<double>>();
    spec.load_factors = raw.at("load_factors").get<std::vector<double>>();
    spec.horizon = detail::positive_size(raw.at("horizon"), "sweep.horizon");
    spec.seeds = raw.at("seeds").get<std::vector<std::uint64_t>>();
    if (raw.contains("arrivals")) spec.law = parse_arrival_law(raw.at("arrivals").get<std::string>());
    if (raw.contains("allow_idle")) spec.allow_idle = raw.at("allow_idle").get<bool>();
  } catch (const Json::exception& e) {
    throw ConfigError(ConfigErrorCode::malformed, std::string("sweep: ") + e.what());
  }
  return spec;
}

struct SweepRow {
  double load_factor = 0.0;
  std::uint64_t seed = 0;
  double growth_rate = 0.0;
  Verdict verdict = Verdict::inconclusive;
  double final_backlog = 0.0;
};

struct SweepResult {
  double rho_star = 0.0;
  std::vector<SweepRow> rows;  // load-factor major, seed minor
};

inline SweepRow run_sweep_point(const NetworkConfig& config, const SweepSpec& spec, double rho_star, double factor,
                                std::uint64_t seed) {
  ArrivalConfig arrivals;
  arrivals.rates = scaled_rates(spec.direction, rho_star, factor);
  arrivals.law = spec.law;
  RunOptions options;
  options.allow_idle = spec.allow_idle;
  const Metrics m = run(config, arrivals, spec.horizon, seed, options);
  const auto v = stability_verdict(m, StabilityThresholds::for_block_length(config.block_length()));
  return {factor, seed, v.growth_rate, v.verdict, m.backlog_bits.back()};
}

// jobs == 0 means std::thread::hardware_concurrency().
inline SweepResult run_sweep(const NetworkConfig& config, const SweepSpec& spec, std::size_t jobs = 0) {
  spec.validate(config);
  SweepResult result;
  result.rho_star = boundary_scale(config, spec.direction);

  const std::size_t total = spec.load_factors.size() * spec.seeds.size();
  result.rows.resize(total);
  if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        const double factor = spec.load_factors[i / spec.seeds.size()];
        const std::uint64_t seed = spec.seeds[i % spec.seeds.size()];
        result.rows[i] = run_sweep_point(config, spec, result.rho_star, factor, seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace coopsim
