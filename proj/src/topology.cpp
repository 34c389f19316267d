#include "cardfn/topology.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cardfn/detail/blocks.hpp"
#include "cardfn/error.hpp"

namespace cardfn {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::No: return "no";
    case Decision::Yes: return "yes";
    case Decision::Undecided: return "undecided";
  }
  return "?";
}

const char* to_string(TopologyClass::Kind kind) {
  switch (kind) {
    case TopologyClass::Kind::FiniteSet: return "FiniteSet";
    case TopologyClass::Kind::CantorSet: return "CantorSet";
    case TopologyClass::Kind::IntervalUnion: return "IntervalUnion";
    case TopologyClass::Kind::CantorvalCandidate: return "CantorvalCandidate";
  }
  return "?";
}

namespace {

// Truth values of the three inequalities at one index.
struct Check {
  std::uint64_t index = 0;
  Decision quick = Decision::Undecided;  // x > r
  Decision a = Decision::Undecided;      // x > r + S
  Decision b = Decision::Undecided;      // r_prev > r + S
};

Decision truth(bool v) { return v ? Decision::Yes : Decision::No; }

// Explicit checks for the prefix plus one representative per recurring class,
// and the index from which the recurring classes describe every term.
struct Layout {
  std::vector<Check> explicit_checks;
  std::vector<Check> recurring;
  std::uint64_t recurring_from = 1;
  bool finite = false;
  bool decided = true;
};

Layout exact_layout(const SeriesSpec& spec) {
  Layout out;
  const std::uint64_t P = spec.prefix.size();
  auto ss = self_similar(spec.tail);
  out.finite = !ss;
  // W(t0): sum of U(t) over extended offsets t >= t0, with U(t + p) = q U(t).
  Rat tail_S = 0;
  std::vector<Rat> W;
  if (ss) {
    const std::size_t p = ss->period();
    Rat sumU = 0;
    for (std::size_t t = 0; t < p; ++t) sumU += ss->mass_from(t);
    const Rat wrap = ss->q / (1 - ss->q) * sumU;
    W.assign(p + 1, wrap);
    for (std::size_t t = p; t-- > 0;) W[t] = W[t + 1] + ss->mass_from(t);
    tail_S = W[0];
    for (std::size_t s = 0; s < p; ++s) {
      const Rat& x = ss->coeffs[s];
      const Rat r = ss->mass_from(s + 1);
      const Rat& S = W[s + 1];
      const Rat prev = ss->mass_from(s);
      out.recurring.push_back({P + s + 1, truth(x > r), truth(x > r + S), truth(prev > r + S)});
    }
  }
  std::vector<Rat> r(P + 1), S(P + 1);
  for (std::uint64_t n = 0; n <= P; ++n) r[n] = exact_remainder(spec, n);
  S[P] = tail_S;
  for (std::uint64_t n = P; n-- > 0;) S[n] = r[n] + S[n + 1];
  for (std::uint64_t n = 1; n <= P; ++n) {
    const Rat& x = spec.prefix[n - 1];
    out.explicit_checks.push_back(
        {n, truth(x > r[n]), truth(x > r[n] + S[n]), truth(r[n - 1] > r[n] + S[n])});
  }
  out.recurring_from = P + 1;
  return out;
}

std::uint64_t first_index_of_block(const SeriesSpec& spec, const BlocksTail& tail,
                                   std::uint64_t block) {
  std::uint64_t idx = spec.prefix.size();
  for (std::uint64_t m = 1; m < block; ++m) idx += detail::entries_in_block(tail, m);
  return idx + 1;
}

bool multi_copy_recurs(const BlocksTail& tail) {
  return tail.sizes.slope > 0 || tail.sizes.offset >= 2;
}

// Block tails: only x > r is tracked; (A) and (B) are never stronger.
Layout blocks_layout(const SeriesSpec& spec, const BlocksTail& tail) {
  Layout out;
  std::uint64_t B0 = 1;
  const std::size_t E = tail.pattern.size();
  std::vector<std::optional<detail::EventualSign>> signs;
  for (std::size_t e = 0; e < E; ++e) {
    auto ex = detail::entry_expansion(tail, e, 1);
    for (std::size_t f = e + 1; f < E; ++f) ex = detail::combine(ex, detail::entry_expansion(tail, f, -1));
    ex.minus_tail = true;
    auto sign = detail::eventual_sign(tail, ex);
    if (sign) {
      B0 = std::max(B0, sign->from);
    } else {
      out.decided = false;
    }
    signs.push_back(sign);
  }
  if (multi_copy_recurs(tail)) {
    // smallest block with at least two copies from which all later blocks
    // have at least two as well
    std::uint64_t n = 1;
    while (tail.sizes.at(n) < 2) ++n;
    B0 = std::max(B0, n);
  }
  const std::uint64_t end = first_index_of_block(spec, tail, B0);
  for (std::uint64_t n = 1; n < end; ++n) {
    Check c;
    c.index = n;
    try {
      c.quick = truth(compare(term(spec, n), remainder(spec, n)) > 0);
    } catch (const Error&) {
      c.quick = Decision::Undecided;
    }
    out.explicit_checks.push_back(c);
  }
  const std::uint64_t copies = tail.sizes.at(B0);
  for (std::size_t e = 0; e < E; ++e) {
    Check c;
    c.index = end + (copies - 1) * E + e;
    c.quick = signs[e] ? truth(signs[e]->sign > 0) : Decision::Undecided;
    out.recurring.push_back(c);
  }
  if (multi_copy_recurs(tail)) {
    Check c;
    c.index = end;
    c.quick = Decision::No;
    out.recurring.push_back(c);
  }
  out.recurring_from = end;
  return out;
}

Layout layout_of(const SeriesSpec& spec) {
  if (const auto* b = std::get_if<BlocksTail>(&spec.tail)) return blocks_layout(spec, *b);
  return exact_layout(spec);
}

// Conjunction over all checks with the first failing index.
std::pair<Decision, std::uint64_t> all_of(const Layout& l, Decision Check::*field) {
  std::vector<const Check*> all;
  for (const auto& c : l.explicit_checks) all.push_back(&c);
  for (const auto& c : l.recurring) all.push_back(&c);
  std::sort(all.begin(), all.end(), [](auto a, auto b) { return a->index < b->index; });
  bool undecided = false;
  for (auto c : all) {
    if (c->*field == Decision::No) return {Decision::No, c->index};
    if (c->*field == Decision::Undecided) undecided = true;
  }
  return {undecided ? Decision::Undecided : Decision::Yes, l.recurring_from};
}

std::optional<std::uint64_t> slow_from_of(const Layout& l) {
  for (const auto& c : l.recurring) {
    if (c.quick != Decision::No) return std::nullopt;
  }
  if (l.finite) {
    return l.explicit_checks.empty() ? std::optional<std::uint64_t>(1) : std::nullopt;
  }
  std::uint64_t from = 1;
  for (const auto& c : l.explicit_checks) {
    if (c.quick == Decision::Undecided) return std::nullopt;
    if (c.quick == Decision::Yes) from = c.index + 1;
  }
  return from;
}

// Sorted distinct subset sums of x_1..x_d.
std::vector<Rat> subset_sums(const SeriesSpec& spec, std::size_t d) {
  std::vector<Rat> sums{Rat(0)};
  for (std::size_t n = 1; n <= d; ++n) {
    const Rat x = term(spec, n);
    std::vector<Rat> shifted;
    shifted.reserve(sums.size());
    for (const auto& s : sums) shifted.push_back(s + x);
    std::vector<Rat> merged;
    merged.reserve(2 * sums.size());
    std::merge(sums.begin(), sums.end(), shifted.begin(), shifted.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    sums = std::move(merged);
  }
  return sums;
}

std::vector<Interval> merge_sorted(std::vector<Interval> parts) {
  std::vector<Interval> out;
  for (auto& iv : parts) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      if (iv.hi > out.back().hi) out.back().hi = iv.hi;
    } else {
      out.push_back(std::move(iv));
    }
  }
  return out;
}

// One cover step: C union (x + C), both sorted.
std::vector<Interval> cover_step(const std::vector<Interval>& c, const Rat& x) {
  std::vector<Interval> shifted;
  shifted.reserve(c.size());
  for (const auto& iv : c) shifted.push_back({iv.lo + x, iv.hi + x});
  std::vector<Interval> all;
  all.reserve(2 * c.size());
  std::merge(c.begin(), c.end(), shifted.begin(), shifted.end(), std::back_inserter(all),
             [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return merge_sorted(std::move(all));
}

void check_interval_budget(std::size_t n) {
  if (n > kMaxCoverIntervals) {
    throw Error(ErrorKind::BudgetExceeded,
                "cover has more than " + std::to_string(kMaxCoverIntervals) + " intervals");
  }
}

struct Scaled {
  std::int64_t lo;
  std::int64_t hi;
};

// Integer version of the cover recursion when everything fits a common
// denominator comfortably.
std::optional<std::vector<Interval>> cover_fast(const std::vector<Rat>& xs, const Rat& r) {
  Int L = r.get_den();
  for (const auto& x : xs) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.get_den_mpz_t());
  Rat sum = r;
  for (const auto& x : xs) sum += x;
  const Rat bound = sum * Rat(L);
  if (bound > Rat(Int(std::numeric_limits<std::int64_t>::max() / 4))) return std::nullopt;
  auto scale = [&](const Rat& v) {
    Rat s = v * Rat(L);
    return static_cast<std::int64_t>(s.get_num().get_si());
  };
  std::vector<Scaled> c{{0, scale(r)}};
  std::vector<Scaled> shifted, all;
  for (std::size_t k = xs.size(); k-- > 0;) {
    const std::int64_t x = scale(xs[k]);
    shifted.clear();
    for (const auto& iv : c) shifted.push_back({iv.lo + x, iv.hi + x});
    all.clear();
    std::merge(c.begin(), c.end(), shifted.begin(), shifted.end(), std::back_inserter(all),
               [](const Scaled& a, const Scaled& b) { return a.lo < b.lo; });
    c.clear();
    for (const auto& iv : all) {
      if (!c.empty() && iv.lo <= c.back().hi) {
        c.back().hi = std::max(c.back().hi, iv.hi);
      } else {
        c.push_back(iv);
      }
    }
    check_interval_budget(c.size());
  }
  std::vector<Interval> out;
  out.reserve(c.size());
  const Rat Lr(L);
  for (const auto& iv : c) out.push_back({Rat(iv.lo) / Lr, Rat(iv.hi) / Lr});
  return out;
}

}  // namespace

ConvergenceProfile convergence_profile(const SeriesSpec& spec) {
  require_valid(spec);
  const Layout l = layout_of(spec);
  ConvergenceProfile p;
  auto [quick, qi] = all_of(l, &Check::quick);
  p.quick = quick;
  p.witnesses["quick"] = qi;
  p.slow_from = slow_from_of(l);
  if (p.slow_from) p.witnesses["slow_from"] = *p.slow_from;
  if (std::holds_alternative<BlocksTail>(spec.tail)) {
    const Decision ab = quick == Decision::No ? Decision::No : Decision::Undecided;
    p.property_A = p.property_B = ab;
    if (ab == Decision::No) p.witnesses["A"] = p.witnesses["B"] = qi;
    return p;
  }
  auto [a, ai] = all_of(l, &Check::a);
  auto [b, bi] = all_of(l, &Check::b);
  p.property_A = a;
  p.property_B = b;
  p.witnesses["A"] = ai;
  p.witnesses["B"] = bi;
  return p;
}

TopologyClass classify(const SeriesSpec& spec) {
  const auto report = validate(spec);
  if (!report.valid) throw Error(ErrorKind::Invalid, report.problems.front());
  if (!report.sorted_from) {
    throw Error(ErrorKind::Precondition, "terms are not eventually nonincreasing");
  }
  TopologyClass out;
  if (is_zero_tail(spec)) {
    out.kind = TopologyClass::Kind::FiniteSet;
    return out;
  }
  const Layout l = layout_of(spec);
  out.decided_from = l.recurring_from;
  std::size_t strict = 0, weak = 0;
  for (const auto& c : l.recurring) {
    if (c.quick == Decision::Undecided) {
      throw Error(ErrorKind::UndecidableComparison, "eventual inequality pattern undecided");
    }
    (c.quick == Decision::Yes ? strict : weak) += 1;
  }
  if (weak == 0) {
    out.kind = TopologyClass::Kind::CantorSet;
    return out;
  }
  if (strict > 0) {
    out.kind = TopologyClass::Kind::CantorvalCandidate;
    return out;
  }
  out.kind = TopologyClass::Kind::IntervalUnion;
  const auto slow = slow_from_of(l);
  if (!slow) throw Error(ErrorKind::UndecidableComparison, "prefix inequality undecided");
  const std::uint64_t N = std::max(*slow, *report.sorted_from);
  if (N - 1 > kMaxCoverDepth) {
    throw Error(ErrorKind::SizeLimit, "too many strict-dominance prefix terms");
  }
  const auto sums = subset_sums(spec, N - 1);
  const Remainder r = remainder(spec, N - 1);
  out.components = 1;
  for (std::size_t i = 1; i < sums.size(); ++i) {
    if (compare(sums[i] - sums[i - 1], r) > 0) ++out.components;
  }
  if (r.is_exact()) {
    std::vector<Interval> parts;
    for (const auto& s : sums) parts.push_back({s, s + r.value()});
    out.intervals = merge_sorted(std::move(parts));
  }
  return out;
}

std::vector<Interval> cover(const SeriesSpec& spec, std::size_t depth) {
  require_valid(spec);
  if (depth > kMaxCoverDepth) {
    throw Error(ErrorKind::BudgetExceeded,
                "cover depth " + std::to_string(depth) + " exceeds " + std::to_string(kMaxCoverDepth));
  }
  if (is_zero_tail(spec)) depth = std::min<std::size_t>(depth, spec.prefix.size());
  const Rat r = remainder(spec, depth).hi();
  std::vector<Rat> xs;
  for (std::size_t n = 1; n <= depth; ++n) xs.push_back(term(spec, n));
  if (auto fast = cover_fast(xs, r)) return *fast;
  std::vector<Interval> c{{Rat(0), r}};
  for (std::size_t k = depth; k-- > 0;) {
    c = cover_step(c, xs[k]);
    check_interval_budget(c.size());
  }
  return c;
}

GapReport gaps(const SeriesSpec& spec, std::size_t depth) {
  const auto c = cover(spec, depth);
  std::size_t d = depth;
  if (is_zero_tail(spec)) d = std::min<std::size_t>(d, spec.prefix.size());
  const Rat r = remainder(spec, d).hi();
  GapReport out;
  for (std::size_t i = 1; i < c.size(); ++i) {
    Gap g{c[i - 1].hi, c[i].lo, false};
    g.certified = g.hi - g.lo > 2 * r;
    out.gaps.push_back(std::move(g));
  }
  if (out.gaps.empty()) return out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.gaps.size(); ++i) {
    if (out.gaps[i].hi - out.gaps[i].lo > out.gaps[best].hi - out.gaps[best].lo) best = i;
  }
  out.leftmost_longest = best;
  if (has_exact_remainders(spec)) {
    const auto& g = out.gaps[best];
    for (std::uint64_t k = 1; k <= d; ++k) {
      if (g.lo == exact_remainder(spec, k) && g.hi == term(spec, k)) {
        out.form_index = k;
        break;
      }
    }
  }
  return out;
}

}  // namespace cardfn
