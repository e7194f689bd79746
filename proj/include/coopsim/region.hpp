#pragma once

// Throughput-region linear programs.
//
// Variables a_f^{m,g} (share of fading state f spent sending scheme-m packets
// of packet state g on the first hop) and b_f^{m,g} (share spent forwarding
// them on the second hop) exist only where g1 = f1, resp. g2 = f2, and
// (m, g) is supported. Two queries are built on them:
//
//   slack LP   max delta  s.t.  lambda_k - sum pi r_m^k a <= -delta   (all k)
//                               sum_f pi (a - b)        <= -delta   (all (m,g))
//                               sum_{m,g} (a + b)       <= 1        (all f)
//
//   scale LP   max rho    s.t.  sum pi r_m^k a          >= rho d_k  (all k)
//                               sum_f pi a = sum_f pi b             (all (m,g))
//                               sum_{m,g} (a + b)       <= 1        (all f)
//
// Fading states with zero probability carry no columns or rows, and supported
// triples whose g1 or g2 never occurs are dropped: no flow can pass through
// them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopsim/model.hpp"
#include "coopsim/simplex.hpp"

namespace coopsim {

enum class ColumnKind { first_hop, second_hop, slack, scale };

struct ColumnLabel {
  ColumnKind kind = ColumnKind::first_hop;
  std::size_t state = 0;  // position in config.fading.states (a and b columns)
  SupportTriple triple;   // (m, g1, g2) for a and b columns
};

enum class LpKind { slack, scale };

struct LinearProgram {
  LpKind kind = LpKind::slack;
  simplex::Problem problem;
  std::vector<ColumnLabel> columns;

  std::size_t num_columns() const { return problem.num_columns(); }
  std::size_t num_constraints() const { return problem.rows.size(); }
};

struct WitnessEntry {
  FadingState state;
  SupportTriple triple;
  double value = 0.0;
};

// A feasible (a, b, delta-or-rho) assignment returned by the solver.
struct RegionWitness {
  simplex::Status status = simplex::Status::infeasible;
  LpKind kind = LpKind::slack;
  double value = std::numeric_limits<double>::quiet_NaN();  // delta* or rho*
  std::vector<WitnessEntry> first_hop;                       // non-zero a entries
  std::vector<WitnessEntry> second_hop;                      // non-zero b entries
  std::size_t pivots = 0;
};

class LpError : public std::runtime_error {
 public:
  explicit LpError(simplex::Status status)
      : std::runtime_error("LP solve failed: " + std::string(simplex::to_string(status))), status_(status) {}
  simplex::Status status() const noexcept { return status_; }

 private:
  simplex::Status status_;
};

namespace detail {

struct StateIndex {
  std::map<std::uint64_t, std::vector<std::size_t>> by_first;
  std::map<std::uint64_t, std::vector<std::size_t>> by_second;

  explicit StateIndex(const FadingModel& fading) {
    for (std::size_t i = 0; i < fading.states.size(); ++i) {
      by_first[fading.states[i].state.first.value].push_back(i);
      by_second[fading.states[i].state.second.value].push_back(i);
    }
  }

  std::span<const std::size_t> with_first(FirstHopState g1) const {
    auto it = by_first.find(g1.value);
    return it == by_first.end() ? std::span<const std::size_t>{} : it->second;
  }
  std::span<const std::size_t> with_second(SecondHopState g2) const {
    auto it = by_second.find(g2.value);
    return it == by_second.end() ? std::span<const std::size_t>{} : it->second;
  }
};

// Shared skeleton: a/b columns, flow rows and time rows. Returns column ranges
// per triple so callers can add their own rate rows.
struct Skeleton {
  std::vector<ColumnLabel> columns;
  std::vector<SupportTriple> triples;
  std::vector<std::pair<std::size_t, std::size_t>> first_cols;   // [begin, end) of a columns
  std::vector<std::pair<std::size_t, std::size_t>> second_cols;  // [begin, end) of b columns
};

inline Skeleton build_skeleton(const NetworkConfig& config) {
  const StateIndex index(config.fading);
  Skeleton sk;
  for (const auto& t : config.support.triples()) {
    const auto firsts = index.with_first(t.first);
    const auto seconds = index.with_second(t.second);
    if (firsts.empty() || seconds.empty()) continue;
    sk.triples.push_back(t);
    const std::size_t a_begin = sk.columns.size();
    for (std::size_t f : firsts) sk.columns.push_back({ColumnKind::first_hop, f, t});
    const std::size_t b_begin = sk.columns.size();
    for (std::size_t f : seconds) sk.columns.push_back({ColumnKind::second_hop, f, t});
    sk.first_cols.emplace_back(a_begin, b_begin);
    sk.second_cols.emplace_back(b_begin, sk.columns.size());
  }
  return sk;
}

inline void add_time_rows(const NetworkConfig& config, const Skeleton& sk, simplex::Problem& lp) {
  std::vector<simplex::Row> rows(config.fading.states.size());
  for (auto& r : rows) r.rhs = 1.0;
  for (std::size_t j = 0; j < sk.columns.size(); ++j) rows[sk.columns[j].state].terms.push_back({j, 1.0});
  for (auto& r : rows) lp.rows.push_back(std::move(r));
}

// Row: sum over a columns of pi_f r_m^k a, with sign.
inline std::vector<simplex::Term> rate_terms(const NetworkConfig& config, const Skeleton& sk, std::size_t k,
                                             double sign) {
  std::vector<simplex::Term> terms;
  for (std::size_t t = 0; t < sk.triples.size(); ++t) {
    const double r = config.scheme(sk.triples[t].scheme).rates[k];
    if (r == 0.0) continue;
    for (std::size_t j = sk.first_cols[t].first; j < sk.first_cols[t].second; ++j)
      terms.push_back({j, sign * config.fading.states[sk.columns[j].state].probability * r});
  }
  return terms;
}

inline std::vector<simplex::Term> flow_terms(const NetworkConfig& config, const Skeleton& sk, std::size_t t) {
  std::vector<simplex::Term> terms;
  for (std::size_t j = sk.first_cols[t].first; j < sk.first_cols[t].second; ++j)
    terms.push_back({j, config.fading.states[sk.columns[j].state].probability});
  for (std::size_t j = sk.second_cols[t].first; j < sk.second_cols[t].second; ++j)
    terms.push_back({j, -config.fading.states[sk.columns[j].state].probability});
  return terms;
}

inline void check_rates(const NetworkConfig& config, std::span<const double> v, const char* what) {
  if (v.size() != config.num_destinations())
    throw std::invalid_argument(std::string(what) + " must have K = " + std::to_string(config.num_destinations()) +
                                " entries");
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

}  // namespace detail

// Slack LP for arrival rates lambda (bits/symbol). The slack variable is
// stored shifted, s = delta + L with L = max_k lambda_k + 1, so that every
// column is non-negative; objective_offset restores delta.
inline LinearProgram build_slack_lp(const NetworkConfig& config, std::span<const double> lambda) {
  detail::check_rates(config, lambda, "lambda");
  const auto sk = detail::build_skeleton(config);
  LinearProgram lp;
  lp.kind = LpKind::slack;
  lp.columns = sk.columns;
  const std::size_t s = lp.columns.size();
  lp.columns.push_back({ColumnKind::slack, 0, {}});
  const double shift = *std::max_element(lambda.begin(), lambda.end()) + 1.0;

  lp.problem.objective.assign(lp.columns.size(), 0.0);
  lp.problem.objective[s] = 1.0;
  lp.problem.objective_offset = -shift;

  for (std::size_t k = 0; k < config.num_destinations(); ++k) {
    auto terms = detail::rate_terms(config, sk, k, -1.0);
    terms.push_back({s, 1.0});
    lp.problem.rows.push_back({std::move(terms), simplex::Sense::less_equal, shift - lambda[k]});
  }
  for (std::size_t t = 0; t < sk.triples.size(); ++t) {
    auto terms = detail::flow_terms(config, sk, t);
    terms.push_back({s, 1.0});
    lp.problem.rows.push_back({std::move(terms), simplex::Sense::less_equal, shift});
  }
  detail::add_time_rows(config, sk, lp.problem);
  return lp;
}

inline LinearProgram build_scale_lp(const NetworkConfig& config, std::span<const double> direction) {
  detail::check_rates(config, direction, "direction");
  if (std::all_of(direction.begin(), direction.end(), [](double d) { return d == 0.0; }))
    throw std::invalid_argument("direction must be non-zero");
  const auto sk = detail::build_skeleton(config);
  LinearProgram lp;
  lp.kind = LpKind::scale;
  lp.columns = sk.columns;
  const std::size_t rho = lp.columns.size();
  lp.columns.push_back({ColumnKind::scale, 0, {}});

  lp.problem.objective.assign(lp.columns.size(), 0.0);
  lp.problem.objective[rho] = 1.0;

  for (std::size_t k = 0; k < config.num_destinations(); ++k) {
    auto terms = detail::rate_terms(config, sk, k, -1.0);
    if (direction[k] != 0.0) terms.push_back({rho, direction[k]});
    lp.problem.rows.push_back({std::move(terms), simplex::Sense::less_equal, 0.0});
  }
  for (std::size_t t = 0; t < sk.triples.size(); ++t)
    lp.problem.rows.push_back({detail::flow_terms(config, sk, t), simplex::Sense::equal, 0.0});
  detail::add_time_rows(config, sk, lp.problem);
  return lp;
}

inline RegionWitness solve_lp(const NetworkConfig& config, const LinearProgram& lp) {
  const auto solution = simplex::solve(lp.problem);
  RegionWitness w;
  w.status = solution.status;
  w.kind = lp.kind;
  w.pivots = solution.pivots;
  if (solution.status != simplex::Status::optimal) return w;
  w.value = solution.objective;
  for (std::size_t j = 0; j < lp.columns.size(); ++j) {
    const auto& label = lp.columns[j];
    if (solution.x[j] == 0.0) continue;
    if (label.kind == ColumnKind::first_hop)
      w.first_hop.push_back({config.fading.states[label.state].state, label.triple, solution.x[j]});
    else if (label.kind == ColumnKind::second_hop)
      w.second_hop.push_back({config.fading.states[label.state].state, label.triple, solution.x[j]});
  }
  return w;
}

// delta*: positive iff lambda sits strictly inside the throughput region.
inline double interior_slack(const NetworkConfig& config, std::span<const double> lambda) {
  const auto w = solve_lp(config, build_slack_lp(config, lambda));
  if (w.status != simplex::Status::optimal) throw LpError(w.status);
  return w.value;
}

// rho*: largest rho with rho * direction inside the throughput region.
inline double boundary_scale(const NetworkConfig& config, std::span<const double> direction) {
  const auto w = solve_lp(config, build_scale_lp(config, direction));
  if (w.status != simplex::Status::optimal) throw LpError(w.status);
  return w.value;
}

// Re-checks a witness against the region inequalities, computed from the
// configuration directly rather than from the LP rows. Returns the largest
// violation; entries at forbidden (f, m, g) positions count as violations of
// their full value.
inline double witness_violation(const NetworkConfig& config, std::span<const double> rates,
                                const RegionWitness& w) {
  const std::size_t n_states = config.fading.states.size();
  auto state_pos = [&](const FadingState& f) -> std::size_t {
    for (std::size_t i = 0; i < n_states; ++i)
      if (config.fading.states[i].state == f) return i;
    return n_states;
  };

  double worst = 0.0;
  std::vector<double> served(config.num_destinations(), 0.0);
  std::vector<double> time_used(n_states, 0.0);
  std::map<SupportTriple, double> inflow;
  std::map<SupportTriple, double> outflow;

  for (const auto& e : w.first_hop) {
    worst = std::max(worst, -e.value);
    const std::size_t i = state_pos(e.state);
    const bool allowed = i < n_states && e.state.first == e.triple.first &&
                         config.support.contains(e.triple.scheme, e.triple.first, e.triple.second);
    if (!allowed) {
      worst = std::max(worst, std::abs(e.value));
      continue;
    }
    const double pi = config.fading.states[i].probability;
    for (std::size_t k = 0; k < served.size(); ++k) served[k] += pi * config.scheme(e.triple.scheme).rates[k] * e.value;
    inflow[e.triple] += pi * e.value;
    time_used[i] += e.value;
  }
  for (const auto& e : w.second_hop) {
    worst = std::max(worst, -e.value);
    const std::size_t i = state_pos(e.state);
    const bool allowed = i < n_states && e.state.second == e.triple.second &&
                         config.support.contains(e.triple.scheme, e.triple.first, e.triple.second);
    if (!allowed) {
      worst = std::max(worst, std::abs(e.value));
      continue;
    }
    outflow[e.triple] += config.fading.states[i].probability * e.value;
    time_used[i] += e.value;
  }
  for (double t : time_used) worst = std::max(worst, t - 1.0);

  const auto sk = detail::build_skeleton(config);
  if (w.kind == LpKind::slack) {
    const double delta = w.value;
    for (std::size_t k = 0; k < served.size(); ++k) worst = std::max(worst, rates[k] - served[k] + delta);
    for (const auto& t : sk.triples) worst = std::max(worst, inflow[t] - outflow[t] + delta);
  } else {
    const double rho = w.value;
    worst = std::max(worst, -rho);
    for (std::size_t k = 0; k < served.size(); ++k) worst = std::max(worst, rho * rates[k] - served[k]);
    for (const auto& t : sk.triples) worst = std::max(worst, std::abs(inflow[t] - outflow[t]));
  }
  return worst;
}

}  // namespace coopsim
