#ifndef CARDFN_SERIES_HPP
#define CARDFN_SERIES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cardfn/rational.hpp"

namespace cardfn {

struct ZeroTail {
  friend bool operator==(const ZeroTail&, const ZeroTail&) = default;
};

// Tail term i >= 1 is c * q^i.
struct GeometricTail {
  Rat c;
  Rat q;
  friend bool operator==(const GeometricTail&, const GeometricTail&) = default;
};

// Tail term i >= 1 is coeffs[(i-1) mod p] * q^((i-1) div p).
struct MultigeometricTail {
  std::vector<Rat> coeffs;
  Rat q;
  friend bool operator==(const MultigeometricTail&, const MultigeometricTail&) = default;
};

// s_n = slope * n + offset.
struct SizeRule {
  std::uint64_t slope = 0;
  std::uint64_t offset = 1;

  std::uint64_t at(std::uint64_t n) const { return slope * n + offset; }
  friend bool operator==(const SizeRule&, const SizeRule&) = default;
};

// One summand coeff * base^{-(n + shift)^2} of a block entry.
struct BlockTerm {
  Rat coeff;
  std::uint32_t shift = 0;
  friend bool operator==(const BlockTerm&, const BlockTerm&) = default;
};

// Block n (n >= 1) is s_n consecutive copies of `pattern`; pattern entry e in
// block n has value sum over its terms of coeff * base^{-(n+shift)^2}. The
// plain shape {pattern = [[1@0]]} gives s_n equal atoms base^{-n^2}.
struct BlocksTail {
  std::uint32_t base = 10;
  SizeRule sizes;
  std::vector<std::vector<BlockTerm>> pattern{{BlockTerm{Rat(1), 0}}};
  friend bool operator==(const BlocksTail&, const BlocksTail&) = default;
};

using TailSpec = std::variant<ZeroTail, GeometricTail, MultigeometricTail, BlocksTail>;

struct SeriesSpec {
  std::vector<Rat> prefix;
  TailSpec tail = ZeroTail{};
  std::optional<std::string> label;

  std::uint64_t prefix_size() const { return prefix.size(); }
  friend bool operator==(const SeriesSpec&, const SeriesSpec&) = default;
};

// Self-similar view of a Geometric or Multigeometric tail.
struct SelfSimilarTail {
  std::vector<Rat> coeffs;
  Rat q;

  std::size_t period() const { return coeffs.size(); }
  Rat block_mass() const;
  // Normalized mass remaining before tail offset s (0 <= s <= period()):
  // sum_{s' >= s} coeffs[s'] + q * block_mass / (1 - q).
  Rat mass_from(std::size_t offset) const;
};

std::optional<SelfSimilarTail> self_similar(const TailSpec& tail);
bool has_exact_remainders(const SeriesSpec& spec);
bool is_zero_tail(const SeriesSpec& spec);

// Closed interval [lo, hi] containing a remainder. Exact remainders have
// lo == hi. For block tails `refined()` tightens the bound by a factor of at
// least four.
class Remainder {
 public:
  static Remainder exact(Rat value);

  bool is_exact() const { return exact_; }
  const Rat& lo() const { return lo_; }
  const Rat& hi() const { return hi_; }
  Rat width() const { return hi_ - lo_; }
  const Rat& value() const;
  unsigned level() const { return level_; }
  Remainder refined() const;

 private:
  friend Remainder remainder(const SeriesSpec&, std::uint64_t, unsigned);

  Rat lo_;
  Rat hi_;
  bool exact_ = true;
  unsigned level_ = 0;
  // Refinement context for block tails.
  std::optional<BlocksTail> blocks_;
  Rat fixed_;  // exactly known part outside the block tail
  std::uint64_t tail_pos_ = 0;
};

// x_n, 1-based.
Rat term(const SeriesSpec& spec, std::uint64_t n);

// r_n = sum_{k > n} x_k.
Remainder remainder(const SeriesSpec& spec, std::uint64_t n, unsigned level = 0);

// Exact r_n; throws Error(Unsupported) for block tails.
Rat exact_remainder(const SeriesSpec& spec, std::uint64_t n);

Remainder total(const SeriesSpec& spec);

inline constexpr unsigned kDefaultRefinements = 64;

// Sign of value - r, refining up to `max_refinements` times. Returns 0 only
// for an exact remainder equal to value. Throws
// Error(UndecidableComparison) when the enclosure never separates.
int compare(const Rat& value, const Remainder& r, unsigned max_refinements = kDefaultRefinements);

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> problems;
  // First n with x_n < x_{n+1}; empty when sorted everywhere.
  std::optional<std::uint64_t> first_unsorted;
  // Smallest N with x_n >= x_{n+1} for all n >= N; empty when order fails
  // infinitely often or cannot be settled.
  std::optional<std::uint64_t> sorted_from;
  bool eventual_order_decided = true;

  bool sorted() const { return !first_unsorted.has_value(); }
};

ValidationReport validate(const SeriesSpec& spec);

// Throws Error(Invalid) with the first problem when validation fails.
void require_valid(const SeriesSpec& spec);

// Smallest N such that x_n >= x_{n+1} and x_n <= r_n for every n >= N, so
// that the terms from N on fill the interval [0, r_{N-1}]. Empty for Zero and
// Blocks tails or when the self-similar tail never qualifies.
std::optional<std::uint64_t> interval_filling_from(const SeriesSpec& spec);

// Signed atoms: prefix entries and tail coefficients may be negative (never
// zero). Block tails are not accepted.
struct SignedSeries {
  std::vector<Rat> prefix;
  TailSpec tail = ZeroTail{};
};

struct Normalized {
  SeriesSpec spec;
  Rat shift;  // sum of the negative parts; f_signed(t) = f_abs(t + shift)
};

Normalized signed_normalize(const SignedSeries& series);

// Multiply every atom by factor > 0.
SeriesSpec scaled(const SeriesSpec& spec, const Rat& factor);

// The series (x_{k+1}, x_{k+2}, ...).
SeriesSpec drop_terms(const SeriesSpec& spec, std::uint64_t count);

std::string describe(const TailSpec& tail);

}  // namespace cardfn

#endif  // CARDFN_SERIES_HPP
