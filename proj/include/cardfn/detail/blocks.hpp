#ifndef CARDFN_DETAIL_BLOCKS_HPP
#define CARDFN_DETAIL_BLOCKS_HPP

// Exact arithmetic on super-exponential block tails.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cardfn/series.hpp"

namespace cardfn::detail {

struct BlockPosition {
  std::uint64_t block = 1;   // n >= 1
  std::uint64_t entry = 0;   // entries of block n already consumed
};

std::uint64_t entries_in_block(const BlocksTail& tail, std::uint64_t block);

// Position of tail entry index i (0-based count of consumed tail entries).
BlockPosition locate(const BlocksTail& tail, std::uint64_t consumed);

// Value of pattern entry e in block n.
Rat entry_value(const BlocksTail& tail, std::uint64_t block, std::size_t pattern_entry);

// Value of the (entry)-th item (0-based) of block n.
Rat item_value(const BlocksTail& tail, std::uint64_t block, std::uint64_t item);

// Sum of one pattern copy in block n.
Rat pattern_sum(const BlocksTail& tail, std::uint64_t block);

Rat block_sum(const BlocksTail& tail, std::uint64_t block);

// Sum of all coefficients of the pattern.
Rat coefficient_mass(const BlocksTail& tail);

// Upper bound for sum_{m > block} block_sum(m).
Rat tail_bound_after(const BlocksTail& tail, std::uint64_t block);

struct TailEnclosure {
  Rat lo;
  Rat hi;
};

// Enclosure for the mass of the tail after `consumed` entries; blocks up to
// locate(consumed).block + level are summed exactly.
TailEnclosure tail_enclosure(const BlocksTail& tail, std::uint64_t consumed, unsigned level);

// c0 + c1 * n.
struct Affine {
  Rat c0;
  Rat c1;
  Rat at(std::uint64_t n) const { return c0 + c1 * Rat(static_cast<unsigned long>(n)); }
  bool is_zero() const { return c0 == 0 && c1 == 0; }
};

// sum_k coeff[k](n) * base^{-(n+k)^2}, optionally minus sum_{m > n} block_sum(m).
struct Expansion {
  std::map<std::uint32_t, Affine> coeff;
  bool minus_tail = false;

  void add(std::uint32_t order, const Rat& c0, const Rat& c1 = Rat(0));
  Rat finite_value(const BlocksTail& tail, std::uint64_t n) const;
};

// Entry e of block n (order 0 relative to n).
Expansion entry_expansion(const BlocksTail& tail, std::size_t pattern_entry, int sign,
                          std::uint32_t block_shift = 0);
Expansion combine(const Expansion& a, const Expansion& b);

struct EventualSign {
  int sign = 0;          // sign of the expansion for every n >= from
  std::uint64_t from = 1;
};

// Sign of the expansion for all sufficiently large n, with an explicit
// threshold; empty when no nonzero leading order is found.
std::optional<EventualSign> eventual_sign(const BlocksTail& tail, const Expansion& expansion);

// Exact sign of the expansion at block n (enclosure refinement for the tail
// part). Throws Error(UndecidableComparison).
int sign_at(const BlocksTail& tail, const Expansion& expansion, std::uint64_t n,
            unsigned max_refinements = kDefaultRefinements);

}  // namespace cardfn::detail

#endif  // CARDFN_DETAIL_BLOCKS_HPP
