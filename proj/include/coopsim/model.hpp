#pragma once

// Static description of a two-hop cooperative relay network: topology sizes,
// block-fading model, encoding schemes and the support relation, plus
// validation from JSON and fading sampling.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "coopsim/rng.hpp"

namespace coopsim {

using Json = nlohmann::json;

// Position of a scheme in NetworkConfig::schemes (schemes are kept sorted by id).
struct SchemeIndex {
  std::size_t value = 0;
  auto operator<=>(const SchemeIndex&) const = default;
};

// First-hop fading state f1 in F^N, encoded lexicographically (relay 0 most
// significant digit, digits are alphabet positions).
struct FirstHopState {
  std::uint64_t value = 0;
  auto operator<=>(const FirstHopState&) const = default;
};

// Second-hop fading state f2 in F^(NK), encoded the same way; digit n*K + k is
// the link from relay n to destination k.
struct SecondHopState {
  std::uint64_t value = 0;
  auto operator<=>(const SecondHopState&) const = default;
};

struct FadingState {
  FirstHopState first;
  SecondHopState second;
  auto operator<=>(const FadingState&) const = default;
};

enum class ConfigErrorCode {
  malformed,
  unknown_field,
  distribution_not_normalized,
  negative_probability,
  empty_scheme_set,
  zero_rate_vector,
  negative_rate,
  support_references_unknown_scheme,
  dimension_mismatch,
  unknown_label,
  duplicate_entry,
  state_space_too_large,
};

inline std::string_view to_string(ConfigErrorCode code) {
  switch (code) {
    case ConfigErrorCode::malformed: return "malformed";
    case ConfigErrorCode::unknown_field: return "unknown-field";
    case ConfigErrorCode::distribution_not_normalized: return "distribution-not-normalized";
    case ConfigErrorCode::negative_probability: return "negative-probability";
    case ConfigErrorCode::empty_scheme_set: return "empty-scheme-set";
    case ConfigErrorCode::zero_rate_vector: return "zero-rate-vector";
    case ConfigErrorCode::negative_rate: return "negative-rate";
    case ConfigErrorCode::support_references_unknown_scheme: return "support-references-unknown-scheme";
    case ConfigErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ConfigErrorCode::unknown_label: return "unknown-label";
    case ConfigErrorCode::duplicate_entry: return "duplicate-entry";
    case ConfigErrorCode::state_space_too_large: return "state-space-too-large";
  }
  return "unknown";
}

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ConfigErrorCode code() const noexcept { return code_; }

 private:
  ConfigErrorCode code_;
};

struct NetworkShape {
  std::size_t relays = 1;        // N
  std::size_t destinations = 1;  // K
  std::size_t block_length = 1;  // T, symbols per block
  bool operator==(const NetworkShape&) const = default;
};

struct WeightedState {
  FadingState state;
  double probability = 0.0;
  bool operator==(const WeightedState&) const = default;
};

// Sparse joint distribution over F^N x F^(NK). Only states with positive
// probability are stored, sorted by (f1, f2).
struct FadingModel {
  std::vector<std::string> alphabet;
  std::vector<WeightedState> states;
  std::uint64_t first_hop_states = 1;   // |F|^N
  std::uint64_t second_hop_states = 1;  // |F|^(NK)
  std::vector<double> cumulative;       // running sums of states[i].probability

  double probability(const FadingState& f) const {
    auto it = std::lower_bound(states.begin(), states.end(), f,
                               [](const WeightedState& w, const FadingState& s) { return w.state < s; });
    return (it != states.end() && it->state == f) ? it->probability : 0.0;
  }

  bool operator==(const FadingModel&) const = default;
};

struct EncodingScheme {
  long long id = 0;
  std::vector<double> rates;  // bits per symbol, one per destination

  double rate_sum() const {
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
  bool operator==(const EncodingScheme&) const = default;
};

struct SupportTriple {
  SchemeIndex scheme;
  FirstHopState first;
  SecondHopState second;
  auto operator<=>(const SupportTriple&) const = default;
};

struct SecondHopCandidate {
  SchemeIndex scheme;
  FirstHopState first;
  bool operator==(const SecondHopCandidate&) const = default;
};

// The set I of (scheme, g1, g2) triples. Membership is total over
// M x F^N x F^(NK): anything not listed is unsupported.
class SupportRelation {
 public:
  SupportRelation() = default;

  explicit SupportRelation(std::vector<SupportTriple> triples) : triples_(std::move(triples)) {
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    for (const auto& t : triples_) by_second_hop_[t.second.value].push_back({t.scheme, t.first});
    for (auto& [key, list] : by_second_hop_) {
      std::sort(list.begin(), list.end(), [](const SecondHopCandidate& a, const SecondHopCandidate& b) {
        return std::pair(a.scheme, a.first) < std::pair(b.scheme, b.first);
      });
    }
  }

  bool contains(SchemeIndex m, FirstHopState g1, SecondHopState g2) const {
    return std::binary_search(triples_.begin(), triples_.end(), SupportTriple{m, g1, g2});
  }

  // All (m, g1) with (m, g1, g2) supported, ordered by (m, g1).
  std::span<const SecondHopCandidate> candidates(SecondHopState g2) const {
    auto it = by_second_hop_.find(g2.value);
    if (it == by_second_hop_.end()) return {};
    return it->second;
  }

  std::span<const SupportTriple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  bool operator==(const SupportRelation& other) const { return triples_ == other.triples_; }

 private:
  std::vector<SupportTriple> triples_;
  std::unordered_map<std::uint64_t, std::vector<SecondHopCandidate>> by_second_hop_;
};

struct NetworkConfig {
  NetworkShape shape;
  FadingModel fading;
  std::vector<EncodingScheme> schemes;  // sorted by id
  SupportRelation support;

  std::size_t num_relays() const { return shape.relays; }
  std::size_t num_destinations() const { return shape.destinations; }
  std::size_t num_schemes() const { return schemes.size(); }
  double block_length() const { return static_cast<double>(shape.block_length); }
  const EncodingScheme& scheme(SchemeIndex m) const { return schemes.at(m.value); }

  std::optional<SchemeIndex> find_scheme(long long id) const {
    auto it = std::lower_bound(schemes.begin(), schemes.end(), id,
                               [](const EncodingScheme& s, long long v) { return s.id < v; });
    if (it == schemes.end() || it->id != id) return std::nullopt;
    return SchemeIndex{static_cast<std::size_t>(it - schemes.begin())};
  }

  // Largest per-destination rate over all schemes.
  double max_rate() const {
    double best = 0.0;
    for (const auto& s : schemes)
      for (double r : s.rates) best = std::max(best, r);
    return best;
  }

  bool operator==(const NetworkConfig&) const = default;
};

// Encoding of label tuples to/from mixed-radix state indices.
namespace labels {

inline std::optional<std::uint64_t> checked_power(std::uint64_t base, std::uint64_t exponent,
                                                  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > limit / base) return std::nullopt;
    result *= base;
  }
  return result;
}

inline std::uint64_t encode(std::span<const std::size_t> digits, std::size_t radix) {
  std::uint64_t index = 0;
  for (std::size_t d : digits) index = index * radix + d;
  return index;
}

inline std::vector<std::size_t> decode(std::uint64_t index, std::size_t radix, std::size_t width) {
  std::vector<std::size_t> digits(width, 0);
  for (std::size_t i = width; i-- > 0;) {
    digits[i] = static_cast<std::size_t>(index % radix);
    index /= radix;
  }
  return digits;
}

inline std::vector<std::string> names(const FadingModel& fading, std::uint64_t index, std::size_t width) {
  std::vector<std::string> out;
  out.reserve(width);
  for (std::size_t d : decode(index, fading.alphabet.size(), width)) out.push_back(fading.alphabet[d]);
  return out;
}

// "a|b|c" form used in CSV output.
inline std::string joined(const FadingModel& fading, std::uint64_t index, std::size_t width) {
  std::string out;
  for (const auto& name : names(fading, index, width)) {
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

}  // namespace labels

namespace detail {

[[noreturn]] inline void fail(ConfigErrorCode code, const std::string& what) { throw ConfigError(code, what); }

inline void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         std::initializer_list<std::string_view> required, const std::string& where) {
  if (!obj.is_object()) fail(ConfigErrorCode::malformed, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ConfigErrorCode::unknown_field, where + "." + key);
  }
  for (auto key : required) {
    if (!obj.contains(std::string(key)))
      fail(ConfigErrorCode::malformed, where + " is missing '" + std::string(key) + "'");
  }
}

inline std::size_t positive_size(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 1)
    fail(ConfigErrorCode::malformed, where + " must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

inline double finite_number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(ConfigErrorCode::malformed, where + " must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(ConfigErrorCode::malformed, where + " must be finite");
  return x;
}

inline std::uint64_t parse_state(const Json& v, const std::unordered_map<std::string, std::size_t>& index_of,
                                 std::size_t radix, std::size_t width, const std::string& where) {
  if (!v.is_array()) fail(ConfigErrorCode::malformed, where + " must be an array of labels");
  if (v.size() != width)
    fail(ConfigErrorCode::dimension_mismatch,
         where + " has " + std::to_string(v.size()) + " labels, expected " + std::to_string(width));
  std::vector<std::size_t> digits;
  digits.reserve(width);
  for (const auto& label : v) {
    if (!label.is_string()) fail(ConfigErrorCode::malformed, where + " labels must be strings");
    auto it = index_of.find(label.get<std::string>());
    if (it == index_of.end()) fail(ConfigErrorCode::unknown_label, where + ": '" + label.get<std::string>() + "'");
    digits.push_back(it->second);
  }
  return labels::encode(digits, radix);
}

}  // namespace detail

// Largest per-relay virtual-queue table the simulator will allocate.
inline constexpr std::uint64_t kMaxStateSpace = std::uint64_t{1} << 62;

// Builds a NetworkConfig from a JSON document, enforcing every type invariant.
// Throws ConfigError.
inline NetworkConfig validate_config(const Json& raw) {
  using detail::fail;
  detail::require_keys(raw, {"shape", "fading", "schemes", "support"}, {"shape", "fading", "schemes", "support"},
                       "config");

  NetworkConfig config;

  const Json& shape = raw.at("shape");
  detail::require_keys(shape, {"N", "K", "T"}, {"N", "K", "T"}, "shape");
  config.shape.relays = detail::positive_size(shape.at("N"), "shape.N");
  config.shape.destinations = detail::positive_size(shape.at("K"), "shape.K");
  config.shape.block_length = detail::positive_size(shape.at("T"), "shape.T");
  const std::size_t n_relays = config.shape.relays;
  const std::size_t n_dest = config.shape.destinations;

  const Json& fading = raw.at("fading");
  detail::require_keys(fading, {"alphabet", "states"}, {"alphabet", "states"}, "fading");
  if (!fading.at("alphabet").is_array() || fading.at("alphabet").empty())
    fail(ConfigErrorCode::malformed, "fading.alphabet must be a non-empty array");
  std::unordered_map<std::string, std::size_t> index_of;
  for (const auto& label : fading.at("alphabet")) {
    if (!label.is_string()) fail(ConfigErrorCode::malformed, "fading.alphabet entries must be strings");
    const auto name = label.get<std::string>();
    if (!index_of.emplace(name, config.fading.alphabet.size()).second)
      fail(ConfigErrorCode::duplicate_entry, "fading.alphabet repeats '" + name + "'");
    config.fading.alphabet.push_back(name);
  }
  const std::size_t radix = config.fading.alphabet.size();
  auto first_count = labels::checked_power(radix, n_relays, kMaxStateSpace);
  auto second_count = labels::checked_power(radix, n_relays * n_dest, kMaxStateSpace);
  if (!first_count || !second_count) fail(ConfigErrorCode::state_space_too_large, "|F|^(NK) exceeds 2^62");
  config.fading.first_hop_states = *first_count;
  config.fading.second_hop_states = *second_count;

  if (!fading.at("states").is_array()) fail(ConfigErrorCode::malformed, "fading.states must be an array");
  double total = 0.0;
  for (std::size_t i = 0; i < fading.at("states").size(); ++i) {
    const Json& entry = fading.at("states")[i];
    const std::string where = "fading.states[" + std::to_string(i) + "]";
    detail::require_keys(entry, {"f1", "f2", "p"}, {"f1", "f2", "p"}, where);
    FadingState f{FirstHopState{detail::parse_state(entry.at("f1"), index_of, radix, n_relays, where + ".f1")},
                  SecondHopState{detail::parse_state(entry.at("f2"), index_of, radix, n_relays * n_dest, where + ".f2")}};
    const double p = detail::finite_number(entry.at("p"), where + ".p");
    if (p < 0.0) fail(ConfigErrorCode::negative_probability, where);
    total += p;
    if (p > 0.0) config.fading.states.push_back({f, p});
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ConfigErrorCode::distribution_not_normalized, "probabilities sum to " + std::to_string(total));
  std::sort(config.fading.states.begin(), config.fading.states.end(),
            [](const WeightedState& a, const WeightedState& b) { return a.state < b.state; });
  for (std::size_t i = 1; i < config.fading.states.size(); ++i) {
    if (config.fading.states[i].state == config.fading.states[i - 1].state)
      fail(ConfigErrorCode::duplicate_entry, "fading state listed twice");
  }
  double running = 0.0;
  for (const auto& w : config.fading.states) {
    running += w.probability;
    config.fading.cumulative.push_back(running);
  }

  const Json& schemes = raw.at("schemes");
  if (!schemes.is_array()) fail(ConfigErrorCode::malformed, "schemes must be an array");
  if (schemes.empty()) fail(ConfigErrorCode::empty_scheme_set, "no encoding schemes");
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const std::string where = "schemes[" + std::to_string(i) + "]";
    detail::require_keys(schemes[i], {"id", "rates"}, {"id", "rates"}, where);
    EncodingScheme scheme;
    if (!schemes[i].at("id").is_number_integer()) fail(ConfigErrorCode::malformed, where + ".id must be an integer");
    scheme.id = schemes[i].at("id").get<long long>();
    const Json& rates = schemes[i].at("rates");
    if (!rates.is_array()) fail(ConfigErrorCode::malformed, where + ".rates must be an array");
    if (rates.size() != n_dest)
      fail(ConfigErrorCode::dimension_mismatch, where + ".rates has " + std::to_string(rates.size()) + " entries");
    bool any_positive = false;
    for (const auto& r : rates) {
      const double x = detail::finite_number(r, where + ".rates");
      if (x < 0.0) fail(ConfigErrorCode::negative_rate, where);
      any_positive = any_positive || x > 0.0;
      scheme.rates.push_back(x);
    }
    if (!any_positive) fail(ConfigErrorCode::zero_rate_vector, where);
    config.schemes.push_back(std::move(scheme));
  }
  std::sort(config.schemes.begin(), config.schemes.end(),
            [](const EncodingScheme& a, const EncodingScheme& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < config.schemes.size(); ++i) {
    if (config.schemes[i].id == config.schemes[i - 1].id)
      fail(ConfigErrorCode::duplicate_entry, "scheme id " + std::to_string(config.schemes[i].id) + " repeated");
  }

  const Json& support = raw.at("support");
  if (!support.is_array()) fail(ConfigErrorCode::malformed, "support must be an array");
  std::vector<SupportTriple> triples;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const std::string where = "support[" + std::to_string(i) + "]";
    detail::require_keys(support[i], {"m", "g1", "g2"}, {"m", "g1", "g2"}, where);
    if (!support[i].at("m").is_number_integer()) fail(ConfigErrorCode::malformed, where + ".m must be an integer");
    auto m = config.find_scheme(support[i].at("m").get<long long>());
    if (!m) fail(ConfigErrorCode::support_references_unknown_scheme, where);
    triples.push_back(
        {*m, FirstHopState{detail::parse_state(support[i].at("g1"), index_of, radix, n_relays, where + ".g1")},
         SecondHopState{detail::parse_state(support[i].at("g2"), index_of, radix, n_relays * n_dest, where + ".g2")}});
  }
  config.support = SupportRelation(std::move(triples));
  return config;
}

inline Json to_json(const NetworkConfig& config) {
  const std::size_t n = config.shape.relays;
  const std::size_t nk = config.shape.relays * config.shape.destinations;
  Json out;
  out["shape"] = {{"N", config.shape.relays}, {"K", config.shape.destinations}, {"T", config.shape.block_length}};
  Json states = Json::array();
  for (const auto& w : config.fading.states) {
    states.push_back({{"f1", labels::names(config.fading, w.state.first.value, n)},
                      {"f2", labels::names(config.fading, w.state.second.value, nk)},
                      {"p", w.probability}});
  }
  out["fading"] = {{"alphabet", config.fading.alphabet}, {"states", std::move(states)}};
  Json schemes = Json::array();
  for (const auto& s : config.schemes) schemes.push_back({{"id", s.id}, {"rates", s.rates}});
  out["schemes"] = std::move(schemes);
  Json support = Json::array();
  for (const auto& t : config.support.triples()) {
    support.push_back({{"m", config.schemes[t.scheme.value].id},
                       {"g1", labels::names(config.fading, t.first.value, n)},
                       {"g2", labels::names(config.fading, t.second.value, nk)}});
  }
  out["support"] = std::move(support);
  return out;
}

inline NetworkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorCode::malformed, "cannot open " + path);
  Json raw;
  try {
    raw = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(ConfigErrorCode::malformed, path + ": " + e.what());
  }
  return validate_config(raw);
}

// One i.i.d. block-fading draw from the joint table.
inline FadingState sample_fading(const NetworkConfig& config, Rng& rng) {
  const auto& cdf = config.fading.cumulative;
  const double u = rng.uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return config.fading.states[static_cast<std::size_t>(it - cdf.begin())].state;
}

// Virtual-queue counts. Counts are unsigned 128-bit; overflow throws.
using Count = unsigned __int128;

class CountOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace detail {

inline Count checked_mul(Count a, Count b) {
  Count out;
  if (__builtin_mul_overflow(a, b, &out)) throw CountOverflow("queue count exceeds 128 bits");
  return out;
}

inline Count checked_pow(Count base, Count exponent) {
  if (base <= 1) return (base == 0 && exponent > 0) ? 0 : 1;
  Count out = 1;
  for (Count i = 0; i < exponent; ++i) out = checked_mul(out, base);
  return out;
}

}  // namespace detail

inline std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

// |M| * |F|^N virtual queues per relay.
inline Count queue_count_encoding_based(std::uint64_t schemes, std::uint64_t alphabet, std::uint64_t relays) {
  return detail::checked_mul(schemes, detail::checked_pow(alphabet, relays));
}

inline Count queue_count_encoding_based(const NetworkConfig& config) {
  return queue_count_encoding_based(config.schemes.size(), config.fading.alphabet.size(), config.shape.relays);
}

// L^K * |F|^(K(N+1)) queues for the state-based architecture.
inline Count queue_count_state_based(std::uint64_t levels, std::uint64_t destinations, std::uint64_t alphabet,
                                     std::uint64_t relays) {
  if (levels < 1 || destinations < 1 || alphabet < 1 || relays < 1)
    throw std::invalid_argument("queue_count_state_based: arguments must be >= 1");
  const Count exponent = detail::checked_mul(destinations, Count{relays} + 1);
  return detail::checked_mul(detail::checked_pow(levels, destinations), detail::checked_pow(alphabet, exponent));
}

}  // namespace coopsim
