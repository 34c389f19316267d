#include "cardfn/series.hpp"

#include <sstream>

#include "cardfn/detail/blocks.hpp"
#include "cardfn/error.hpp"

namespace cardfn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Rat prefix_sum_from(const SeriesSpec& spec, std::uint64_t n) {
  Rat sum = 0;
  for (std::uint64_t k = n; k < spec.prefix.size(); ++k) sum += spec.prefix[k];
  return sum;
}

bool ratio_ok(const Rat& q) { return q > 0 && q < 1; }

}  // namespace

Rat SelfSimilarTail::block_mass() const {
  Rat sum = 0;
  for (const auto& k : coeffs) sum += k;
  return sum;
}

Rat SelfSimilarTail::mass_from(std::size_t offset) const {
  Rat sum = q * block_mass() / (1 - q);
  for (std::size_t s = offset; s < coeffs.size(); ++s) sum += coeffs[s];
  return sum;
}

std::optional<SelfSimilarTail> self_similar(const TailSpec& tail) {
  return std::visit(
      Overloaded{
          [](const ZeroTail&) -> std::optional<SelfSimilarTail> { return std::nullopt; },
          [](const GeometricTail& g) -> std::optional<SelfSimilarTail> {
            return SelfSimilarTail{{g.c * g.q}, g.q};
          },
          [](const MultigeometricTail& m) -> std::optional<SelfSimilarTail> {
            return SelfSimilarTail{m.coeffs, m.q};
          },
          [](const BlocksTail&) -> std::optional<SelfSimilarTail> { return std::nullopt; },
      },
      tail);
}

bool has_exact_remainders(const SeriesSpec& spec) {
  return !std::holds_alternative<BlocksTail>(spec.tail);
}

bool is_zero_tail(const SeriesSpec& spec) { return std::holds_alternative<ZeroTail>(spec.tail); }

Remainder Remainder::exact(Rat value) {
  Remainder r;
  r.lo_ = value;
  r.hi_ = std::move(value);
  r.exact_ = true;
  return r;
}

const Rat& Remainder::value() const {
  if (!exact_) throw Error(ErrorKind::Unsupported, "remainder is only known as an enclosure");
  return lo_;
}

Remainder Remainder::refined() const {
  if (exact_) return *this;
  auto enc = detail::tail_enclosure(*blocks_, tail_pos_, level_ + 1);
  Remainder r = *this;
  r.level_ = level_ + 1;
  r.lo_ = fixed_ + enc.lo;
  r.hi_ = fixed_ + enc.hi;
  return r;
}

Rat term(const SeriesSpec& spec, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::Precondition, "term index is 1-based");
  if (n <= spec.prefix.size()) return spec.prefix[n - 1];
  const std::uint64_t i = n - spec.prefix.size();
  return std::visit(
      Overloaded{
          [&](const ZeroTail&) -> Rat {
            throw Error(ErrorKind::Precondition,
                        "index " + std::to_string(n) + " past the end of a finite series");
          },
          [&](const GeometricTail& g) -> Rat { return g.c * pow(g.q, i); },
          [&](const MultigeometricTail& m) -> Rat {
            const std::uint64_t p = m.coeffs.size();
            return m.coeffs[(i - 1) % p] * pow(m.q, (i - 1) / p);
          },
          [&](const BlocksTail& b) -> Rat {
            auto pos = detail::locate(b, i - 1);
            return detail::item_value(b, pos.block, pos.entry);
          },
      },
      spec.tail);
}

Remainder remainder(const SeriesSpec& spec, std::uint64_t n, unsigned level) {
  const std::uint64_t P = spec.prefix.size();
  const Rat fixed = prefix_sum_from(spec, n);
  const std::uint64_t i = n > P ? n - P : 0;
  if (const auto* b = std::get_if<BlocksTail>(&spec.tail)) {
    auto enc = detail::tail_enclosure(*b, i, level);
    Remainder r;
    r.exact_ = false;
    r.level_ = level;
    r.blocks_ = *b;
    r.fixed_ = fixed;
    r.tail_pos_ = i;
    r.lo_ = fixed + enc.lo;
    r.hi_ = fixed + enc.hi;
    return r;
  }
  auto ss = self_similar(spec.tail);
  if (!ss) return Remainder::exact(fixed);
  const std::uint64_t p = ss->period();
  return Remainder::exact(fixed + pow(ss->q, i / p) * ss->mass_from(i % p));
}

Rat exact_remainder(const SeriesSpec& spec, std::uint64_t n) {
  return remainder(spec, n).value();
}

Remainder total(const SeriesSpec& spec) { return remainder(spec, 0); }

int compare(const Rat& value, const Remainder& r, unsigned max_refinements) {
  if (r.is_exact()) return value < r.lo() ? -1 : (value > r.lo() ? 1 : 0);
  // Block-tail remainders strictly exceed their lower bound.
  Remainder cur = r;
  for (unsigned step = 0; step <= max_refinements; ++step) {
    if (value <= cur.lo()) return -1;
    if (value > cur.hi()) return 1;
    cur = cur.refined();
  }
  throw Error(ErrorKind::UndecidableComparison,
              "comparison with remainder unresolved after " + std::to_string(max_refinements) +
                  " refinements");
}

namespace {

bool canonical(const Rat& v) {
  Int g;
  mpz_gcd(g.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return v.get_den() > 0 && (g == 1 || v.get_num() == 0);
}

void check_canonical(const Rat& v, const std::string& where, ValidationReport& report) {
  if (!canonical(v)) {
    report.valid = false;
    report.problems.push_back("rational not in lowest terms at " + where + " (build it with make_rat)");
  }
}

void check_positive(const Rat& v, const std::string& where, ValidationReport& report) {
  if (!canonical(v)) {
    check_canonical(v, where, report);
    return;
  }
  if (v <= 0) {
    report.valid = false;
    report.problems.push_back("nonpositive term " + to_string(v) + " at " + where);
  }
}

// Sortedness of a self-similar tail: returns the first tail offset (1-based
// tail index) where order fails within block 0 or across the wrap, if any.
std::optional<std::uint64_t> self_similar_unsorted(const SelfSimilarTail& ss) {
  const std::size_t p = ss.period();
  for (std::size_t s = 0; s + 1 < p; ++s) {
    if (ss.coeffs[s] < ss.coeffs[s + 1]) return s + 1;
  }
  if (ss.coeffs[p - 1] < ss.q * ss.coeffs[0]) return p;
  return std::nullopt;
}

void validate_blocks(const SeriesSpec& spec, const BlocksTail& b, ValidationReport& report) {
  if (b.base < 2) {
    report.valid = false;
    report.problems.push_back("block base must be at least 2");
  }
  if (b.sizes.slope + b.sizes.offset == 0) {
    report.valid = false;
    report.problems.push_back("block sizes must be positive");
  }
  if (b.pattern.empty()) {
    report.valid = false;
    report.problems.push_back("block pattern is empty");
  }
  for (std::size_t e = 0; e < b.pattern.size(); ++e) {
    if (b.pattern[e].empty()) {
      report.valid = false;
      report.problems.push_back("block pattern entry " + std::to_string(e) + " is empty");
    }
    for (const auto& t : b.pattern[e]) check_positive(t.coeff, "block pattern", report);
  }
  if (!report.valid) return;

  const std::uint64_t P = spec.prefix.size();
  const std::size_t E = b.pattern.size();
  using detail::Expansion;
  // Comparisons x_item >= x_next that recur in every block: consecutive
  // pattern entries, pattern wrap inside a block (only when some block has
  // two copies), and the last entry of block n against the first of n + 1.
  std::vector<Expansion> recurring;
  for (std::size_t e = 0; e + 1 < E; ++e) {
    recurring.push_back(detail::combine(detail::entry_expansion(b, e, +1),
                                        detail::entry_expansion(b, e + 1, -1)));
  }
  const bool multi_copy = b.sizes.slope > 0 || b.sizes.offset >= 2;
  if (multi_copy) {
    recurring.push_back(detail::combine(detail::entry_expansion(b, E - 1, +1),
                                        detail::entry_expansion(b, 0, -1)));
  }
  recurring.push_back(detail::combine(detail::entry_expansion(b, E - 1, +1),
                                      detail::entry_expansion(b, 0, -1, 1)));

  std::uint64_t settled_from = 1;
  bool decided = true;
  for (const auto& expansion : recurring) {
    auto ev = detail::eventual_sign(b, expansion);
    if (!ev) {
      decided = false;
      continue;
    }
    if (ev->sign < 0) {
      report.eventual_order_decided = true;
      settled_from = 0;  // fails infinitely often
    } else if (settled_from != 0) {
      settled_from = std::max(settled_from, ev->from);
    }
  }
  report.eventual_order_decided = decided;

  // Explicit scan of the prefix and of the blocks below the threshold.
  std::uint64_t last_block = settled_from == 0 ? 4 : std::max<std::uint64_t>(settled_from, 1);
  std::uint64_t limit_items = P;
  for (std::uint64_t n = 1; n <= last_block; ++n) limit_items += detail::entries_in_block(b, n);
  std::optional<std::uint64_t> last_bad;
  for (std::uint64_t n = 1; n < limit_items; ++n) {
    if (term(spec, n) < term(spec, n + 1)) {
      if (!report.first_unsorted) report.first_unsorted = n;
      last_bad = n;
    }
  }
  if (settled_from == 0) {
    if (!report.first_unsorted) {
      // The recurring failure appears past the scanned window.
      report.first_unsorted = limit_items;
    }
    report.sorted_from.reset();
  } else if (decided) {
    report.sorted_from = last_bad ? *last_bad + 1 : 1;
  }
}

}  // namespace

ValidationReport validate(const SeriesSpec& spec) {
  ValidationReport report;
  for (std::size_t i = 0; i < spec.prefix.size(); ++i) {
    check_positive(spec.prefix[i], "index " + std::to_string(i + 1), report);
  }
  const std::uint64_t P = spec.prefix.size();
  auto scan_prefix = [&](std::uint64_t upto) {
    std::optional<std::uint64_t> last_bad;
    for (std::uint64_t n = 1; n < upto; ++n) {
      if (term(spec, n) < term(spec, n + 1)) {
        if (!report.first_unsorted) report.first_unsorted = n;
        last_bad = n;
      }
    }
    return last_bad;
  };

  std::visit(
      Overloaded{
          [&](const ZeroTail&) {
            if (!report.valid) return;
            auto last = scan_prefix(P);
            report.sorted_from = last ? *last + 1 : 1;
          },
          [&](const GeometricTail& g) {
            check_positive(g.c, "geometric coefficient", report);
            check_canonical(g.q, "ratio", report);
            if (report.valid && !ratio_ok(g.q)) {
              report.valid = false;
              report.problems.push_back("ratio not in (0,1): divergent tail");
            }
            if (!report.valid) return;
            auto last = scan_prefix(P + 1);
            report.sorted_from = last ? *last + 1 : 1;
          },
          [&](const MultigeometricTail& m) {
            if (m.coeffs.empty()) {
              report.valid = false;
              report.problems.push_back("multigeometric coefficient list is empty");
            }
            for (const auto& k : m.coeffs) check_positive(k, "multigeometric coefficient", report);
            check_canonical(m.q, "ratio", report);
            if (report.valid && !ratio_ok(m.q)) {
              report.valid = false;
              report.problems.push_back("ratio not in (0,1): divergent tail");
            }
            if (!report.valid) return;
            auto ss = *self_similar(m);
            auto last = scan_prefix(P + 1);
            if (auto bad = self_similar_unsorted(ss)) {
              if (!report.first_unsorted) report.first_unsorted = P + *bad;
              report.sorted_from.reset();
            } else {
              report.sorted_from = last ? *last + 1 : 1;
            }
          },
          [&](const BlocksTail& b) { validate_blocks(spec, b, report); },
      },
      spec.tail);
  if (!report.valid) {
    report.sorted_from.reset();
    report.first_unsorted.reset();
  }
  return report;
}

void require_valid(const SeriesSpec& spec) {
  auto report = validate(spec);
  if (!report.valid) throw Error(ErrorKind::Invalid, report.problems.front());
}

std::optional<std::uint64_t> interval_filling_from(const SeriesSpec& spec) {
  auto ss = self_similar(spec.tail);
  if (!ss || self_similar_unsorted(*ss)) return std::nullopt;
  for (std::size_t s = 0; s < ss->period(); ++s) {
    if (ss->coeffs[s] > ss->mass_from(s + 1)) return std::nullopt;
  }
  std::uint64_t n = spec.prefix.size();
  for (; n >= 1; --n) {
    if (term(spec, n) < term(spec, n + 1)) break;
    if (term(spec, n) > exact_remainder(spec, n)) break;
  }
  return n + 1;
}

Normalized signed_normalize(const SignedSeries& series) {
  Normalized out;
  Rat shift = 0;
  for (const auto& x : series.prefix) {
    if (x == 0) throw Error(ErrorKind::Invalid, "atoms must be nonzero");
    if (x < 0) shift -= x;
    out.spec.prefix.push_back(x < 0 ? Rat(-x) : x);
  }
  std::visit(Overloaded{
                 [&](const ZeroTail&) { out.spec.tail = ZeroTail{}; },
                 [&](const GeometricTail& g) {
                   if (g.c == 0) throw Error(ErrorKind::Invalid, "atoms must be nonzero");
                   if (!ratio_ok(g.q)) throw Error(ErrorKind::Invalid, "ratio not in (0,1)");
                   if (g.c < 0) shift += -g.c * g.q / (1 - g.q);
                   out.spec.tail = GeometricTail{g.c < 0 ? Rat(-g.c) : g.c, g.q};
                 },
                 [&](const MultigeometricTail& m) {
                   if (!ratio_ok(m.q)) throw Error(ErrorKind::Invalid, "ratio not in (0,1)");
                   MultigeometricTail abs_tail{{}, m.q};
                   for (const auto& k : m.coeffs) {
                     if (k == 0) throw Error(ErrorKind::Invalid, "atoms must be nonzero");
                     if (k < 0) shift += -k / (1 - m.q);
                     abs_tail.coeffs.push_back(k < 0 ? Rat(-k) : k);
                   }
                   out.spec.tail = std::move(abs_tail);
                 },
                 [&](const BlocksTail&) {
                   throw Error(ErrorKind::Unsupported, "signed block tails are not supported");
                 },
             },
             series.tail);
  out.shift = shift;
  return out;
}

SeriesSpec scaled(const SeriesSpec& spec, const Rat& factor) {
  if (factor <= 0) throw Error(ErrorKind::Invalid, "scale factor must be positive");
  SeriesSpec out = spec;
  for (auto& x : out.prefix) x *= factor;
  std::visit(Overloaded{
                 [](ZeroTail&) {},
                 [&](GeometricTail& g) { g.c *= factor; },
                 [&](MultigeometricTail& m) {
                   for (auto& k : m.coeffs) k *= factor;
                 },
                 [&](BlocksTail& b) {
                   for (auto& entry : b.pattern)
                     for (auto& t : entry) t.coeff *= factor;
                 },
             },
             out.tail);
  return out;
}

SeriesSpec drop_terms(const SeriesSpec& spec, std::uint64_t count) {
  SeriesSpec out;
  out.label = spec.label;
  const std::uint64_t P = spec.prefix.size();
  if (count <= P) {
    out.prefix.assign(spec.prefix.begin() + static_cast<std::ptrdiff_t>(count), spec.prefix.end());
    out.tail = spec.tail;
    return out;
  }
  const std::uint64_t i = count - P;
  std::visit(
      Overloaded{
          [&](const ZeroTail&) {
            throw Error(ErrorKind::Precondition, "cannot drop past the end of a finite series");
          },
          [&](const GeometricTail& g) { out.tail = GeometricTail{g.c * pow(g.q, i), g.q}; },
          [&](const MultigeometricTail& m) {
            const std::uint64_t p = m.coeffs.size();
            MultigeometricTail rotated{{}, m.q};
            const Rat s0 = pow(m.q, i / p);
            for (std::uint64_t s = 0; s < p; ++s) {
              std::uint64_t idx = (i % p + s);
              rotated.coeffs.push_back(m.coeffs[idx % p] * s0 * (idx >= p ? m.q : Rat(1)));
            }
            out.tail = std::move(rotated);
          },
          [&](const BlocksTail&) {
            throw Error(ErrorKind::Unsupported, "dropping block-tail terms is not supported");
          },
      },
      spec.tail);
  return out;
}

std::string describe(const TailSpec& tail) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ZeroTail&) { os << "zero"; },
                 [&](const GeometricTail& g) {
                   os << "geometric c=" << to_string(g.c) << " q=" << to_string(g.q);
                 },
                 [&](const MultigeometricTail& m) {
                   os << "multigeometric (";
                   for (std::size_t s = 0; s < m.coeffs.size(); ++s)
                     os << (s ? ", " : "") << to_string(m.coeffs[s]);
                   os << ") q=" << to_string(m.q);
                 },
                 [&](const BlocksTail& b) {
                   os << "blocks base=" << b.base << " sizes=" << b.sizes.slope << "n+"
                      << b.sizes.offset << " pattern=" << b.pattern.size();
                 },
             },
             tail);
  return os.str();
}

}  // namespace cardfn
