#include "cardfn/constructions.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cardfn/detail/blocks.hpp"
#include "cardfn/error.hpp"
#include "cardfn/topology.hpp"

namespace cardfn {

SeriesSpec interleave(const SeriesSpec& base) {
  if (std::holds_alternative<BlocksTail>(base.tail)) {
    throw Error(ErrorKind::Unsupported, "interleave needs an exact-remainder base");
  }
  const auto profile = convergence_profile(base);
  if (profile.property_B != Decision::Yes) {
    throw Error(ErrorKind::NotBSeries, "base lacks property (B) at index " +
                                           std::to_string(profile.witnesses.at("B")));
  }
  SeriesSpec out;
  const std::uint64_t P = base.prefix.size();
  for (std::uint64_t n = 1; n <= P; ++n) {
    out.prefix.push_back(exact_remainder(base, n - 1));
    out.prefix.push_back(base.prefix[n - 1]);
  }
  if (auto ss = self_similar(base.tail)) {
    MultigeometricTail tail;
    tail.q = ss->q;
    for (std::size_t s = 0; s < ss->period(); ++s) {
      tail.coeffs.push_back(ss->mass_from(s));
      tail.coeffs.push_back(ss->coeffs[s]);
    }
    out.tail = std::move(tail);
  }
  out.label = profile.property_A == Decision::Yes ? "(A)" : "(B) not (A)";
  return out;
}

Doubled double_terms(const SeriesSpec& spec) {
  require_valid(spec);
  Doubled out;
  for (const auto& x : spec.prefix) {
    out.spec.prefix.push_back(x);
    out.spec.prefix.push_back(x);
  }
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ZeroTail>) {
          out.spec.tail = ZeroTail{};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          const Rat first = t.c * t.q;
          out.spec.tail = MultigeometricTail{{first, first}, t.q};
        } else if constexpr (std::is_same_v<T, MultigeometricTail>) {
          MultigeometricTail m{{}, t.q};
          for (const auto& k : t.coeffs) {
            m.coeffs.push_back(k);
            m.coeffs.push_back(k);
          }
          out.spec.tail = std::move(m);
        } else {
          BlocksTail b = t;
          b.pattern.clear();
          for (const auto& entry : t.pattern) {
            b.pattern.push_back(entry);
            b.pattern.push_back(entry);
          }
          out.spec.tail = std::move(b);
        }
      },
      spec.tail);
  if (spec.label) out.spec.label = "doubled " + *spec.label;
  if (has_exact_remainders(spec) && !is_zero_tail(spec) && validate(spec).sorted_from) {
    const auto cls = classify(spec);
    out.continuum_on_interior =
        cls.kind == TopologyClass::Kind::IntervalUnion && cls.components == 1;
  }
  return out;
}

SeriesSpec prepend_scaled(const SeriesSpec& spec, const std::vector<Rat>& multipliers) {
  require_valid(spec);
  if (!has_exact_remainders(spec)) {
    throw Error(ErrorKind::Unsupported, "prepending needs an exact total");
  }
  const Rat tot = total(spec).value();
  SeriesSpec out;
  for (const auto& m : multipliers) {
    if (m <= 0) throw Error(ErrorKind::Precondition, "multipliers must be positive");
    out.prefix.push_back(m * tot);
  }
  out.prefix.insert(out.prefix.end(), spec.prefix.begin(), spec.prefix.end());
  out.tail = spec.tail;
  return out;
}

SeriesSpec add_total(const SeriesSpec& spec) { return prepend_scaled(spec, {Rat(1)}); }

SeriesSpec add_two_totals(const SeriesSpec& spec) { return prepend_scaled(spec, {Rat(1), Rat(1)}); }

SeriesSpec add_m_totals(const SeriesSpec& spec, std::size_t m) {
  return prepend_scaled(spec, std::vector<Rat>(m, Rat(1)));
}

SeriesSpec add_m_double_totals(const SeriesSpec& spec, std::size_t m) {
  return prepend_scaled(spec, std::vector<Rat>(m, Rat(2)));
}

Rat min_subset_gap(const FiniteMeasure& tau) {
  if (tau.empty()) throw Error(ErrorKind::Precondition, "empty finite measure");
  const auto r = finite_range(tau);
  std::optional<Rat> gap;
  const Rat* prev = nullptr;
  for (const auto& [v, n] : r.counts) {
    if (prev && (!gap || v - *prev < *gap)) gap = v - *prev;
    prev = &v;
  }
  if (!gap) throw Error(ErrorKind::Precondition, "all subset sums coincide");
  return *gap;
}

SeriesSpec product(const FiniteMeasure& tau, const SeriesSpec& nu) {
  require_valid(nu);
  const Rat gap = min_subset_gap(tau);
  const Rat nu_total = total(nu).hi();
  Rat factor = 1;
  while (nu_total * factor >= gap) factor /= 2;
  const SeriesSpec scaled_nu = scaled(nu, factor);
  SeriesSpec out;
  out.prefix = tau;
  out.prefix.insert(out.prefix.end(), scaled_nu.prefix.begin(), scaled_nu.prefix.end());
  out.tail = scaled_nu.tail;
  return out;
}

SeriesSpec unique_base() {
  SeriesSpec s;
  s.tail = GeometricTail{Rat(1), make_rat(1, 3)};
  return s;
}

namespace {

SeriesSpec with_multipliers(std::initializer_list<long> ms) {
  std::vector<Rat> v;
  for (long m : ms) v.push_back(Rat(m));
  return prepend_scaled(unique_base(), v);
}

SeriesSpec geometric(const Rat& c, const Rat& q) {
  SeriesSpec s;
  s.tail = GeometricTail{c, q};
  return s;
}

SeriesSpec multigeometric(std::vector<Rat> coeffs, const Rat& q) {
  SeriesSpec s;
  s.tail = MultigeometricTail{std::move(coeffs), q};
  return s;
}

const std::vector<std::string>& catalog() {
  static const std::vector<std::string> names = {
      "GN_CANTORVAL", "EX_2_6",  "EX_3_2",  "EX_3_5",  "REM_3_13", "EX_3_15", "EX_4_2",
      "EX_4_3",       "EX_4_4",  "EX_4_7",  "EX_4_8",  "EX_4_9",   "EX_4_10", "EX_4_11",
      "EX_4_14",      "EX_4_15", "EX_4_16", "EX_4_17", "EX_4_18",  "EX_4_19", "BLOCKS_2_5",
  };
  return names;
}

SeriesSpec build(const std::string& name) {
  if (name == "GN_CANTORVAL") return multigeometric({make_rat(3, 4), make_rat(1, 2)}, make_rat(1, 4));
  if (name == "EX_2_6") return multigeometric({make_rat(1, 2), make_rat(1, 2)}, make_rat(1, 2));
  if (name == "EX_3_2") {
    auto s = geometric(Rat(3), make_rat(1, 4));
    s.prefix = {make_rat(27, 32)};
    return s;
  }
  if (name == "EX_3_5") return geometric(Rat(1), make_rat(1, 2));
  if (name == "REM_3_13") {
    auto s = geometric(make_rat(1, 2), make_rat(1, 2));
    s.prefix = {make_rat(1, 2), make_rat(1, 2)};
    return s;
  }
  if (name == "EX_3_15") {
    SeriesSpec s;
    BlocksTail b;
    b.base = 10;
    b.sizes = SizeRule{0, 1};
    b.pattern = {{BlockTerm{Rat(1), 0}, BlockTerm{make_rat(1, 2), 1}}, {BlockTerm{Rat(1), 0}}};
    s.tail = b;
    return s;
  }
  if (name == "EX_4_2") return with_multipliers({1});
  if (name == "EX_4_3") {
    auto s = multigeometric({make_rat(1, 10), make_rat(3, 10)}, make_rat(1, 10));
    s.prefix = {make_rat(8, 9), make_rat(2, 3)};
    return s;
  }
  if (name == "EX_4_4") return with_multipliers({3, 1});
  if (name == "EX_4_7") return with_multipliers({1, 1});
  if (name == "EX_4_8") return with_multipliers({2, 2, 1});
  if (name == "EX_4_9") return with_multipliers({3, 3, 1});
  if (name == "EX_4_10") return with_multipliers({2, 2, 2});
  if (name == "EX_4_11") return with_multipliers({4, 2, 2, 2});
  if (name == "EX_4_14") return with_multipliers({6, 6, 2, 2, 2});
  if (name == "EX_4_15") return with_multipliers({12, 6, 2, 2, 2, 2});
  if (name == "EX_4_16") return with_multipliers({6, 4, 2, 2, 2});
  if (name == "EX_4_17") return with_multipliers({6, 4, 4, 2, 2});
  if (name == "EX_4_18") return with_multipliers({10, 6, 6, 4, 4});
  if (name == "EX_4_19") return with_multipliers({4, 4, 2, 2, 2});
  if (name == "BLOCKS_2_5") {
    SeriesSpec s;
    BlocksTail b;
    b.base = 10;
    b.sizes = SizeRule{1, 0};
    s.tail = b;
    return s;
  }
  throw Error(ErrorKind::UnknownPreset, "unknown preset " + name);
}

}  // namespace

std::vector<std::string> preset_names() {
  auto names = catalog();
  names.push_back("INTERLEAVED_GEO(q)");
  return names;
}

SeriesSpec preset(const std::string& name) {
  const std::string head = "INTERLEAVED_GEO(";
  if (name.rfind(head, 0) == 0 && name.size() > head.size() && name.back() == ')') {
    Rat q;
    try {
      q = parse_rat(name.substr(head.size(), name.size() - head.size() - 1));
    } catch (const Error&) {
      throw Error(ErrorKind::UnknownPreset, "bad ratio in preset " + name);
    }
    if (q <= 0 || q >= 1) throw Error(ErrorKind::Invalid, "ratio not in (0,1)");
    auto s = interleave(geometric(Rat(1), q));
    s.label = name;
    return s;
  }
  auto s = build(name);
  s.label = name;
  return s;
}

std::vector<InequalityCheck> check_ex_3_15(std::uint64_t bound) {
  const SeriesSpec s = preset("EX_3_15");
  auto x = [&](std::uint64_t n) { return term(s, n); };
  auto gt = [&](const Rat& lhs, std::uint64_t m) { return compare(lhs, remainder(s, m)) > 0; };
  std::vector<InequalityCheck> out;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    const std::uint64_t a = 2 * k;
    out.push_back({1, k, gt(x(a), a)});
    out.push_back({2, k, gt(x(a + 1), a + 2)});
    out.push_back({3, k, gt(x(a + 1) - x(a + 2), a + 5)});
    out.push_back({4, k, gt(x(a + 2) + x(a + 4) - x(a + 1), a + 4)});
    out.push_back({5, k, gt(x(a + 1) + x(a + 3) - x(a + 2) - x(a + 4), a + 4)});
    out.push_back({6, k, gt(x(a + 1) + x(a + 4) - x(a + 2) - x(a + 3), a + 4)});
  }
  return out;
}

namespace {

// Multiplicity of each subset sum of integer atoms, sorted by value.
std::vector<std::pair<std::int64_t, std::uint64_t>> integer_counts(const std::vector<std::int64_t>& atoms) {
  std::vector<std::int64_t> sums{0};
  sums.reserve(std::size_t{1} << atoms.size());
  for (auto a : atoms) {
    const std::size_t half = sums.size();
    for (std::size_t i = 0; i < half; ++i) sums.push_back(sums[i] + a);
  }
  std::sort(sums.begin(), sums.end());
  std::vector<std::pair<std::int64_t, std::uint64_t>> out;
  for (auto v : sums) {
    if (!out.empty() && out.back().first == v) {
      ++out.back().second;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

}  // namespace

FiniteRange finite_range(const FiniteMeasure& tau) {
  if (tau.size() > kMaxFiniteAtoms) {
    throw Error(ErrorKind::SizeLimit, std::to_string(tau.size()) + " atoms exceed the limit of " +
                                          std::to_string(kMaxFiniteAtoms));
  }
  for (const auto& a : tau) {
    if (a <= 0) throw Error(ErrorKind::Invalid, "atoms must be positive");
  }
  FiniteRange out;
  Int L = 1;
  Rat sum = 0;
  for (const auto& a : tau) {
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), a.get_den_mpz_t());
    sum += a;
  }
  const Rat Lr(L);
  if (sum * Lr < Rat(Int(std::numeric_limits<std::int64_t>::max() / 2))) {
    std::vector<std::int64_t> atoms;
    for (const auto& a : tau) atoms.push_back(Rat(a * Lr).get_num().get_si());
    for (auto [v, n] : integer_counts(atoms)) {
      out.counts.emplace(Rat(static_cast<long>(v)) / Lr, n);
      out.range.insert(n);
    }
    return out;
  }
  std::vector<Rat> sums{Rat(0)};
  for (const auto& a : tau) {
    const std::size_t half = sums.size();
    for (std::size_t i = 0; i < half; ++i) sums.push_back(sums[i] + a);
  }
  for (const auto& v : sums) ++out.counts[v];
  for (const auto& [v, n] : out.counts) out.range.insert(n);
  return out;
}

namespace {

class RangeSearch {
 public:
  RangeSearch(std::set<std::uint64_t> target, std::size_t max_atoms, std::vector<std::int64_t> pool,
              bool distinct)
      : target_(std::move(target)), max_atoms_(max_atoms), pool_(std::move(pool)), distinct_(distinct) {}

  std::set<std::vector<std::int64_t>> run() {
    std::vector<std::int64_t> sums{0};
    extend(0, sums);
    return found_;
  }

 private:
  bool matches(const std::vector<std::int64_t>& sums) {
    scratch_ = sums;
    std::sort(scratch_.begin(), scratch_.end());
    std::set<std::uint64_t> range;
    for (std::size_t i = 0; i < scratch_.size();) {
      std::size_t j = i;
      while (j < scratch_.size() && scratch_[j] == scratch_[i]) ++j;
      const std::uint64_t n = j - i;
      if (!target_.count(n)) return false;
      range.insert(n);
      i = j;
    }
    return range == target_;
  }

  void extend(std::size_t from, const std::vector<std::int64_t>& sums) {
    if (chosen_.size() == max_atoms_) return;
    for (std::size_t i = from; i < pool_.size(); ++i) {
      const std::int64_t a = pool_[i];
      std::vector<std::int64_t> next = sums;
      next.reserve(2 * sums.size());
      for (auto s : sums) next.push_back(s + a);
      chosen_.push_back(a);
      if (matches(next)) record();
      extend(distinct_ ? i + 1 : i, next);
      chosen_.pop_back();
    }
  }

  void record() {
    std::int64_t g = 0;
    for (auto a : chosen_) g = std::gcd(g, a);
    std::vector<std::int64_t> norm;
    for (auto a : chosen_) norm.push_back(a / g);
    std::sort(norm.begin(), norm.end());
    found_.insert(std::move(norm));
  }

  std::set<std::uint64_t> target_;
  std::size_t max_atoms_;
  std::vector<std::int64_t> pool_;
  bool distinct_;
  std::vector<std::int64_t> chosen_;
  std::vector<std::int64_t> scratch_;
  std::set<std::vector<std::int64_t>> found_;
};

}  // namespace

std::vector<FiniteMeasure> search_finite_ranges(const std::set<std::uint64_t>& target,
                                                std::size_t max_atoms,
                                                std::uint64_t denominator_bound,
                                                const SearchOptions& options) {
  if (denominator_bound == 0) throw Error(ErrorKind::Precondition, "denominator bound must be positive");
  if (max_atoms > kMaxFiniteAtoms) {
    throw Error(ErrorKind::SizeLimit, "at most " + std::to_string(kMaxFiniteAtoms) + " atoms");
  }
  if (target.empty() || target.count(0)) return {};
  std::int64_t L = 1;
  for (std::uint64_t d = 2; d <= denominator_bound; ++d) {
    L = std::lcm(L, static_cast<std::int64_t>(d));
    if (L > (std::int64_t{1} << 40)) throw Error(ErrorKind::SizeLimit, "denominator bound too large");
  }
  std::vector<std::int64_t> pool;
  for (std::uint64_t d = 1; d <= denominator_bound; ++d) {
    for (std::uint64_t n = 1; n <= d; ++n) {
      if (std::gcd(n, d) == 1) pool.push_back(static_cast<std::int64_t>(n) * (L / static_cast<std::int64_t>(d)));
    }
  }
  std::sort(pool.begin(), pool.end());
  const bool distinct = options.distinct_filter && target == std::set<std::uint64_t>{1, 4};
  RangeSearch search(target, max_atoms, std::move(pool), distinct);
  std::vector<FiniteMeasure> out;
  for (const auto& atoms : search.run()) {
    FiniteMeasure m;
    for (auto a : atoms) m.push_back(Rat(static_cast<long>(a)));
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace cardfn
