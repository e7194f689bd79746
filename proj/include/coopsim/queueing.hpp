#pragma once

// Queue state of the encoding-based architecture and its block dynamics.
//
// The source keeps one queue of bits per destination. Every relay keeps one
// virtual queue of symbols per (encoding scheme, first-hop fading state).
// A first-hop block with scheme m under first-hop state g1 drains r_m^k * T
// bits from each source queue and adds T symbols to Q_n^{m,g1} at every relay;
// a second-hop block removes T symbols from Q_n^{m,g1} at every relay.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopsim/csv.hpp"
#include "coopsim/model.hpp"

namespace coopsim {

// Per-relay table size above which QueueState refuses to allocate.
inline constexpr std::uint64_t kMaxRelayQueues = std::uint64_t{1} << 26;

class QueueState {
 public:
  QueueState() = default;

  QueueState(std::size_t destinations, std::size_t relays, std::size_t schemes, std::uint64_t first_hop_states)
      : relays_(relays), schemes_(schemes), first_hop_states_(first_hop_states), source_(destinations, 0.0) {
    if (first_hop_states == 0 || schemes == 0 || relays == 0)
      throw std::invalid_argument("QueueState: empty dimension");
    if (first_hop_states > kMaxRelayQueues / schemes || relays > kMaxRelayQueues / (schemes * first_hop_states))
      throw std::length_error("QueueState: relay queue table too large");
    relay_.assign(relays * schemes * static_cast<std::size_t>(first_hop_states), 0.0);
  }

  explicit QueueState(const NetworkConfig& config)
      : QueueState(config.num_destinations(), config.num_relays(), config.num_schemes(),
                   config.fading.first_hop_states) {}

  std::size_t num_destinations() const { return source_.size(); }
  std::size_t num_relays() const { return relays_; }
  std::size_t num_schemes() const { return schemes_; }
  std::uint64_t first_hop_states() const { return first_hop_states_; }

  double source(std::size_t k) const { return source_.at(k); }
  void set_source(std::size_t k, double bits) { source_.at(k) = checked(bits); }

  double relay(std::size_t n, SchemeIndex m, FirstHopState g1) const { return relay_[offset(n, m, g1)]; }
  void set_relay(std::size_t n, SchemeIndex m, FirstHopState g1, double symbols) {
    relay_[offset(n, m, g1)] = checked(symbols);
  }

  // Sum over relays, accumulated n ascending.
  double relay_sum(SchemeIndex m, FirstHopState g1) const {
    double s = 0.0;
    for (std::size_t n = 0; n < relays_; ++n) s += relay_[offset(n, m, g1)];
    return s;
  }

  std::span<const double> sources() const { return source_; }
  // Flat relay table in (n, m, g1) lexicographic order.
  std::span<const double> relay_table() const { return relay_; }

  double total_source() const {
    double s = 0.0;
    for (double q : source_) s += q;
    return s;
  }

  double total_relay() const {
    double s = 0.0;
    for (double q : relay_) s += q;
    return s;
  }

  bool operator==(const QueueState&) const = default;

 private:
  std::size_t offset(std::size_t n, SchemeIndex m, FirstHopState g1) const {
    if (n >= relays_) throw std::out_of_range("relay index out of range");
    if (m.value >= schemes_) throw std::out_of_range("unknown scheme");
    if (g1.value >= first_hop_states_) throw std::out_of_range("first-hop state out of range");
    return (n * schemes_ + m.value) * static_cast<std::size_t>(first_hop_states_) + static_cast<std::size_t>(g1.value);
  }

  static double checked(double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("queue lengths must be non-negative");
    return v;
  }

  std::size_t relays_ = 0;
  std::size_t schemes_ = 0;
  std::uint64_t first_hop_states_ = 0;
  std::vector<double> source_;
  std::vector<double> relay_;
};

namespace detail {

inline void check_arrivals(const QueueState& state, std::span<const double> arrivals) {
  if (arrivals.size() != state.num_destinations())
    throw std::invalid_argument("arrival vector has " + std::to_string(arrivals.size()) + " entries, expected " +
                                std::to_string(state.num_destinations()));
}

inline void check_shape(const NetworkConfig& config, const QueueState& state) {
  if (state.num_destinations() != config.num_destinations() || state.num_relays() != config.num_relays() ||
      state.num_schemes() != config.num_schemes() || state.first_hop_states() != config.fading.first_hop_states)
    throw std::invalid_argument("queue state does not match the network configuration");
}

}  // namespace detail

// Source transmits a packet encoded with scheme m under first-hop state g1.
inline QueueState apply_first_hop(const NetworkConfig& config, QueueState state, std::span<const double> arrivals,
                                  SchemeIndex m, FirstHopState g1) {
  detail::check_shape(config, state);
  detail::check_arrivals(state, arrivals);
  if (m.value >= config.num_schemes()) throw std::out_of_range("unknown scheme");
  const double block = config.block_length();
  const auto& rates = config.scheme(m).rates;
  for (std::size_t k = 0; k < state.num_destinations(); ++k)
    state.set_source(k, std::max(state.source(k) + arrivals[k] - rates[k] * block, 0.0));
  for (std::size_t n = 0; n < state.num_relays(); ++n) state.set_relay(n, m, g1, state.relay(n, m, g1) + block);
  return state;
}

// Relays forward one packet from Q_n^{m,g1}. The caller has checked that
// (m, g1, f2) is supported for the current second-hop state.
inline QueueState apply_second_hop(const NetworkConfig& config, QueueState state, std::span<const double> arrivals,
                                   SchemeIndex m, FirstHopState g1) {
  detail::check_shape(config, state);
  detail::check_arrivals(state, arrivals);
  const double block = config.block_length();
  for (std::size_t k = 0; k < state.num_destinations(); ++k) state.set_source(k, state.source(k) + arrivals[k]);
  for (std::size_t n = 0; n < state.num_relays(); ++n)
    state.set_relay(n, m, g1, std::max(state.relay(n, m, g1) - block, 0.0));
  return state;
}

inline QueueState apply_idle(QueueState state, std::span<const double> arrivals) {
  detail::check_arrivals(state, arrivals);
  for (std::size_t k = 0; k < state.num_destinations(); ++k) state.set_source(k, state.source(k) + arrivals[k]);
  return state;
}

// Queue snapshot CSV: block, Qs_1..Qs_K, then relay queues in (n, m, g1) order.
inline void write_queue_csv_header(std::ostream& out, const NetworkConfig& config) {
  out << "block";
  for (std::size_t k = 0; k < config.num_destinations(); ++k) out << ",Qs_" << (k + 1);
  for (std::size_t n = 0; n < config.num_relays(); ++n)
    for (const auto& scheme : config.schemes)
      for (std::uint64_t g = 0; g < config.fading.first_hop_states; ++g)
        out << ",Q_r" << (n + 1) << "_m" << scheme.id << '_' << labels::joined(config.fading, g, config.num_relays());
  out << '\n';
}

inline void write_queue_csv_row(std::ostream& out, std::uint64_t block, const QueueState& state) {
  out << block;
  for (double q : state.sources()) out << ',' << csv::number(q);
  for (double q : state.relay_table()) out << ',' << csv::number(q);
  out << '\n';
}

}  // namespace coopsim
