#ifndef CARDFN_CONSTRUCTIONS_HPP
#define CARDFN_CONSTRUCTIONS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cardfn/series.hpp"

namespace cardfn {

// Atoms of a measure on [1, j].
using FiniteMeasure = std::vector<Rat>;

// y_{2n-1} = r_{n-1}, y_{2n} = x_n. The label records "(A)" or "(B) not (A)".
// Throws Error(NotBSeries) unless the base has property (B) and
// Error(Unsupported) for block tails.
SeriesSpec interleave(const SeriesSpec& base);

struct Doubled {
  SeriesSpec spec;
  // The input is interval filling, so every interior point of the range has
  // continuum many representations.
  bool continuum_on_interior = false;
};

Doubled double_terms(const SeriesSpec& spec);

// Prefix m_i * total(spec) for each multiplier, then the old terms.
SeriesSpec prepend_scaled(const SeriesSpec& spec, const std::vector<Rat>& multipliers);
SeriesSpec add_total(const SeriesSpec& spec);
SeriesSpec add_two_totals(const SeriesSpec& spec);
SeriesSpec add_m_totals(const SeriesSpec& spec, std::size_t m);
SeriesSpec add_m_double_totals(const SeriesSpec& spec, std::size_t m);

// Smallest positive difference between distinct subset sums.
Rat min_subset_gap(const FiniteMeasure& tau);

// tau's atoms followed by nu scaled by 2^-k, k the least exponent with
// total < min_subset_gap(tau).
SeriesSpec product(const FiniteMeasure& tau, const SeriesSpec& nu);

// The geometric series with ratio 1/3: every point has one representation.
SeriesSpec unique_base();

std::vector<std::string> preset_names();

// Accepts the catalog names and INTERLEAVED_GEO(p/q). Throws
// Error(UnknownPreset).
SeriesSpec preset(const std::string& name);

struct InequalityCheck {
  int family = 0;  // 1..6 for (i)..(vi)
  std::uint64_t k = 0;
  bool holds = false;
};

// The six inequality families of EX_3_15 for 1 <= k <= bound.
std::vector<InequalityCheck> check_ex_3_15(std::uint64_t bound);

inline constexpr std::size_t kMaxFiniteAtoms = 22;

struct FiniteRange {
  std::map<Rat, std::uint64_t> counts;  // subset sum -> number of subsets
  std::set<std::uint64_t> range;        // R(f)
};

// Throws Error(SizeLimit) past kMaxFiniteAtoms.
FiniteRange finite_range(const FiniteMeasure& tau);

struct SearchOptions {
  // For the target {1, 4} only measures with pairwise distinct atoms can
  // qualify; skip the others.
  bool distinct_filter = true;
};

// Multisets of at most max_atoms atoms from the Farey fractions in (0, 1]
// with denominator <= denominator_bound, reported as sorted, gcd-normalized
// integer atoms.
std::vector<FiniteMeasure> search_finite_ranges(const std::set<std::uint64_t>& target,
                                                std::size_t max_atoms,
                                                std::uint64_t denominator_bound,
                                                const SearchOptions& options = {});

}  // namespace cardfn

#endif  // CARDFN_CONSTRUCTIONS_HPP
