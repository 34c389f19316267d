#ifndef CARDFN_TOPOLOGY_HPP
#define CARDFN_TOPOLOGY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cardfn/series.hpp"

namespace cardfn {

enum class Decision { No, Yes, Undecided };

const char* to_string(Decision d);

struct ConvergenceProfile {
  Decision quick = Decision::Undecided;       // x_n > r_n for all n
  std::optional<std::uint64_t> slow_from;     // x_n <= r_n for all n >= slow_from
  Decision property_A = Decision::Undecided;  // x_i > r_i + sum_{m >= i} r_m
  Decision property_B = Decision::Undecided;  // r_{i-1} > r_i + sum_{m >= i} r_m
  // Index settling each decision: the first failure for "no", the first
  // index of the closed-form tail for "yes".
  std::map<std::string, std::uint64_t> witnesses;
};

ConvergenceProfile convergence_profile(const SeriesSpec& spec);

struct Interval {
  Rat lo;
  Rat hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct TopologyClass {
  enum class Kind { FiniteSet, CantorSet, IntervalUnion, CantorvalCandidate };
  Kind kind = Kind::FiniteSet;
  std::size_t components = 0;        // IntervalUnion only
  std::vector<Interval> intervals;   // IntervalUnion with exact remainders
  std::uint64_t decided_from = 1;    // inequality pattern constant from here on
};

const char* to_string(TopologyClass::Kind kind);

// Throws Error(Precondition) unless the terms are eventually nonincreasing.
TopologyClass classify(const SeriesSpec& spec);

inline constexpr std::size_t kMaxCoverDepth = 24;
inline constexpr std::size_t kMaxCoverIntervals = std::size_t{1} << 20;

// Merged intervals [sigma_F, sigma_F + r_depth] over F in [1, depth]. Block
// tails use the upper enclosure of r_depth. Throws Error(BudgetExceeded)
// past kMaxCoverDepth or kMaxCoverIntervals.
std::vector<Interval> cover(const SeriesSpec& spec, std::size_t depth);

struct Gap {
  Rat lo;
  Rat hi;
  bool certified = false;  // width > 2 * r_depth
};

struct GapReport {
  std::vector<Gap> gaps;
  std::optional<std::size_t> leftmost_longest;
  // k with (lo, hi) = (r_k, x_k) for the leftmost-longest gap.
  std::optional<std::uint64_t> form_index;
};

GapReport gaps(const SeriesSpec& spec, std::size_t depth);

}  // namespace cardfn

#endif  // CARDFN_TOPOLOGY_HPP
