#pragma once

// Back-pressure central controller. Each block it reads the queue lengths, the
// current fading state and the support relation (never the fading
// distribution or the arrival rates) and picks one of:
//   first hop  : source sends with the scheme m* maximizing
//                A = sum_k (Q_s^k - r_m^k sum_n Q_n^{m,f1}) r_m^k
//   second hop : relays drain the queue (m^, g1^) maximizing
//                B = (r_m . 1)^2 sum_n Q_n^{m,g1} over supported (m, g1, f2)
// First hop wins when A >= B.

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "coopsim/model.hpp"
#include "coopsim/queueing.hpp"

namespace coopsim {

enum class DecisionKind { first_hop, second_hop, idle };

inline std::string_view to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::first_hop: return "first_hop";
    case DecisionKind::second_hop: return "second_hop";
    case DecisionKind::idle: return "idle";
  }
  return "unknown";
}

struct FirstHopWeight {
  double weight = 0.0;  // A
  SchemeIndex scheme;   // m*
};

struct SecondHopWeight {
  double weight = 0.0;  // B
  SchemeIndex scheme;   // m^
  FirstHopState first;  // g1^
};

struct Decision {
  DecisionKind kind = DecisionKind::first_hop;
  SchemeIndex scheme;    // m* for first hop, m^ for second hop
  FirstHopState first;   // f1 for first hop, g1^ for second hop
  double first_weight = 0.0;
  // -infinity when no (m, g1) is supported under the current f2.
  double second_weight = -std::numeric_limits<double>::infinity();

  bool operator==(const Decision&) const = default;
};

struct ControllerOptions {
  // Idle only when neither hop has positive weight. Off by default; the
  // throughput-optimality guarantee is for the never-idle policy.
  bool allow_idle = false;
};

// Ties go to the lowest scheme index.
inline FirstHopWeight first_hop_weight(const NetworkConfig& config, const QueueState& state, FirstHopState f1) {
  FirstHopWeight best{-std::numeric_limits<double>::infinity(), SchemeIndex{0}};
  for (std::size_t i = 0; i < config.num_schemes(); ++i) {
    const SchemeIndex m{i};
    const auto& rates = config.scheme(m).rates;
    const double relay_backlog = state.relay_sum(m, f1);
    double weight = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) weight += (state.source(k) - rates[k] * relay_backlog) * rates[k];
    if (weight > best.weight) best = {weight, m};
  }
  return best;
}

// std::nullopt when no scheme is supported with any g1 under f2. Ties go to
// the lowest scheme index, then the lexicographically smallest g1.
inline std::optional<SecondHopWeight> second_hop_weight(const NetworkConfig& config, const QueueState& state,
                                                        SecondHopState f2) {
  std::optional<SecondHopWeight> best;
  for (const auto& candidate : config.support.candidates(f2)) {
    const double rate_sum = config.scheme(candidate.scheme).rate_sum();
    const double weight = rate_sum * rate_sum * state.relay_sum(candidate.scheme, candidate.first);
    if (!best || weight > best->weight) best = SecondHopWeight{weight, candidate.scheme, candidate.first};
  }
  return best;
}

inline Decision decide(const NetworkConfig& config, const QueueState& state, const FadingState& f,
                       ControllerOptions options = {}) {
  const FirstHopWeight a = first_hop_weight(config, state, f.first);
  const std::optional<SecondHopWeight> b = second_hop_weight(config, state, f.second);

  Decision d;
  d.first_weight = a.weight;
  if (b) d.second_weight = b->weight;

  if (options.allow_idle && a.weight <= 0.0 && (!b || b->weight <= 0.0)) {
    d.kind = DecisionKind::idle;
    d.scheme = a.scheme;
    d.first = f.first;
  } else if (a.weight >= d.second_weight) {
    d.kind = DecisionKind::first_hop;
    d.scheme = a.scheme;
    d.first = f.first;
  } else {
    d.kind = DecisionKind::second_hop;
    d.scheme = b->scheme;
    d.first = b->first;
  }
  return d;
}

// V(Q) = sum_k (Q_s^k)^2 + sum_{n,m,g1} ((r_m . 1) Q_n^{m,g1})^2
inline double lyapunov(const NetworkConfig& config, const QueueState& state) {
  double v = 0.0;
  for (double q : state.sources()) v += q * q;
  const auto table = state.relay_table();
  const std::size_t per_scheme = static_cast<std::size_t>(state.first_hop_states());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::size_t m = (i / per_scheme) % state.num_schemes();
    const double weighted = config.schemes[m].rate_sum() * table[i];
    v += weighted * weighted;
  }
  return v;
}

}  // namespace coopsim
