#include "cardfn/detail/blocks.hpp"

#include <algorithm>

#include "cardfn/error.hpp"

namespace cardfn::detail {

namespace {

Rat inverse_power(std::uint32_t base, std::uint64_t exponent) {
  Int den;
  mpz_ui_pow_ui(den.get_mpz_t(), base, exponent);
  Rat out;
  out.get_num() = 1;
  out.get_den() = den;
  return out;
}

// base^{-(n+k)^2}
Rat scale(const BlocksTail& tail, std::uint64_t n, std::uint32_t order) {
  std::uint64_t m = n + order;
  return inverse_power(tail.base, m * m);
}

Rat size_rat(const BlocksTail& tail, std::uint64_t n) {
  return Rat(Int(std::to_string(tail.sizes.at(n))));
}

Rat abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

}  // namespace

std::uint64_t entries_in_block(const BlocksTail& tail, std::uint64_t block) {
  return tail.sizes.at(block) * tail.pattern.size();
}

BlockPosition locate(const BlocksTail& tail, std::uint64_t consumed) {
  if (tail.sizes.slope == 0) {
    std::uint64_t per = tail.sizes.offset * tail.pattern.size();
    return {consumed / per + 1, consumed % per};
  }
  std::uint64_t block = 1;
  while (consumed >= entries_in_block(tail, block)) {
    consumed -= entries_in_block(tail, block);
    ++block;
  }
  return {block, consumed};
}

Rat entry_value(const BlocksTail& tail, std::uint64_t block, std::size_t pattern_entry) {
  Rat value = 0;
  for (const auto& t : tail.pattern[pattern_entry]) value += t.coeff * scale(tail, block, t.shift);
  return value;
}

Rat item_value(const BlocksTail& tail, std::uint64_t block, std::uint64_t item) {
  return entry_value(tail, block, item % tail.pattern.size());
}

Rat pattern_sum(const BlocksTail& tail, std::uint64_t block) {
  Rat sum = 0;
  for (std::size_t e = 0; e < tail.pattern.size(); ++e) sum += entry_value(tail, block, e);
  return sum;
}

Rat block_sum(const BlocksTail& tail, std::uint64_t block) {
  return size_rat(tail, block) * pattern_sum(tail, block);
}

Rat coefficient_mass(const BlocksTail& tail) {
  Rat mass = 0;
  for (const auto& entry : tail.pattern)
    for (const auto& t : entry) mass += t.coeff;
  return mass;
}

// sum_{m > M} s_m * A * b^{-m^2} <= (4/3) s_{M+1} A b^{-(M+1)^2}: successive
// ratios are at most 2 * b^{-3} <= 1/4 because s is affine with nonnegative
// coefficients and b >= 2.
Rat tail_bound_after(const BlocksTail& tail, std::uint64_t block) {
  return Rat(4, 3) * coefficient_mass(tail) * size_rat(tail, block + 1) *
         scale(tail, block + 1, 0);
}

TailEnclosure tail_enclosure(const BlocksTail& tail, std::uint64_t consumed, unsigned level) {
  auto pos = locate(tail, consumed);
  const std::uint64_t per = tail.pattern.size();
  const std::uint64_t copies = tail.sizes.at(pos.block);
  Rat exact = 0;
  std::uint64_t copy = pos.entry / per;
  for (std::uint64_t e = pos.entry % per; e < per; ++e) exact += entry_value(tail, pos.block, e);
  if (copies > copy + 1) {
    exact += Rat(Int(std::to_string(copies - copy - 1))) * pattern_sum(tail, pos.block);
  }
  for (unsigned l = 1; l <= level; ++l) exact += block_sum(tail, pos.block + l);
  return {exact, exact + tail_bound_after(tail, pos.block + level)};
}

void Expansion::add(std::uint32_t order, const Rat& c0, const Rat& c1) {
  auto& slot = coeff[order];
  slot.c0 += c0;
  slot.c1 += c1;
}

Rat Expansion::finite_value(const BlocksTail& tail, std::uint64_t n) const {
  Rat value = 0;
  for (const auto& [order, c] : coeff) value += c.at(n) * scale(tail, n, order);
  return value;
}

Expansion entry_expansion(const BlocksTail& tail, std::size_t pattern_entry, int sign,
                          std::uint32_t block_shift) {
  Expansion out;
  for (const auto& t : tail.pattern[pattern_entry]) {
    out.add(t.shift + block_shift, sign > 0 ? t.coeff : Rat(-t.coeff));
  }
  return out;
}

Expansion combine(const Expansion& a, const Expansion& b) {
  Expansion out = a;
  for (const auto& [order, c] : b.coeff) out.add(order, c.c0, c.c1);
  out.minus_tail = a.minus_tail || b.minus_tail;
  return out;
}

std::optional<EventualSign> eventual_sign(const BlocksTail& tail, const Expansion& expansion) {
  std::uint32_t max_finite = expansion.coeff.empty() ? 0 : expansion.coeff.rbegin()->first;
  std::uint32_t max_shift = 0;
  for (const auto& entry : tail.pattern)
    for (const auto& t : entry) max_shift = std::max(max_shift, t.shift);
  const std::uint32_t horizon = max_finite + max_shift + 3;

  // Combined coefficients: finite part plus tail contributions. A tail term
  // (a, d) of block n + j lands at order j + d with coefficient
  // -a * s_{n+j} = -a * (slope * (n + j) + offset).
  std::map<std::uint32_t, Affine> combined = expansion.coeff;
  if (expansion.minus_tail) {
    const Rat slope(Int(std::to_string(tail.sizes.slope)));
    const Rat offset(Int(std::to_string(tail.sizes.offset)));
    for (std::uint32_t k = 1; k <= horizon; ++k) {
      for (const auto& entry : tail.pattern) {
        for (const auto& t : entry) {
          if (t.shift >= k) continue;
          const Rat j(static_cast<unsigned long>(k - t.shift));
          auto& slot = combined[k];
          slot.c1 -= t.coeff * slope;
          slot.c0 -= t.coeff * (slope * j + offset);
        }
      }
    }
  }

  std::optional<std::uint32_t> leading;
  for (const auto& [order, c] : combined) {
    if (order > horizon) break;
    if (!c.is_zero()) {
      leading = order;
      break;
    }
  }
  if (!leading) {
    if (!expansion.minus_tail) return EventualSign{0, 1};
    return std::nullopt;
  }
  const std::uint32_t K = *leading;
  const Affine lead = combined[K];
  const Rat mass = coefficient_mass(tail);

  for (std::uint64_t n = 1; n <= 512; ++n) {
    Rat c = lead.at(n);
    if (c == 0) continue;
    // |C_K(n)| must be nondecreasing from here on.
    if (lead.c1 != 0 && ((c > 0) != (lead.c1 > 0))) continue;
    Rat residual = 0;
    for (const auto& [order, f] : expansion.coeff) {
      if (order <= K) continue;
      residual += abs(f.c0) + abs(f.c1) * Rat(static_cast<unsigned long>(n));
    }
    if (expansion.minus_tail) residual += Rat(4, 3) * mass * size_rat(tail, n + K + 1);
    Int growth;
    mpz_ui_pow_ui(growth.get_mpz_t(), tail.base, 2 * (n + K) + 1);
    if (abs(c) * Rat(growth) > residual) return EventualSign{c > 0 ? 1 : -1, n};
  }
  return std::nullopt;
}

int sign_at(const BlocksTail& tail, const Expansion& expansion, std::uint64_t n,
            unsigned max_refinements) {
  Rat finite = expansion.finite_value(tail, n);
  if (!expansion.minus_tail) return finite > 0 ? 1 : (finite < 0 ? -1 : 0);
  Rat exact = 0;
  for (unsigned level = 0; level <= max_refinements; ++level) {
    if (level > 0) exact += block_sum(tail, n + level);
    Rat hi = exact + tail_bound_after(tail, n + level);
    // The tail strictly exceeds every finite partial sum.
    if (finite <= exact) return -1;
    if (finite > hi) return 1;
  }
  throw Error(ErrorKind::UndecidableComparison,
              "block tail comparison unresolved after " + std::to_string(max_refinements) +
                  " refinements");
}

}  // namespace cardfn::detail
