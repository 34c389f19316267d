#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cardfn/constructions.hpp"
#include "cardfn/counter.hpp"
#include "cardfn/error.hpp"
#include "cardfn/topology.hpp"
#include "support.hpp"

using namespace cardfn;
using testsupport::R;

namespace {

using Set = std::set<Cardinality>;

Set fins(std::initializer_list<std::uint64_t> ks) {
  Set out;
  for (auto k : ks) out.insert(Cardinality::fin(k));
  return out;
}

Set scan_set(const SeriesSpec& spec, std::size_t extra_depth = 6) {
  return range_scan(spec, spec.prefix.size() + extra_depth).cardinality_set;
}

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("interleaving a geometric base") {
  const auto a = interleave(testsupport::geo(R(1), R(1, 4)));
  const auto* mg = std::get_if<MultigeometricTail>(&a.tail);
  REQUIRE(mg);
  CHECK(mg->coeffs == std::vector<Rat>{R(1, 3), R(1, 4)});
  CHECK(mg->q == R(1, 4));
  CHECK(a.prefix.empty());

  try {
    interleave(testsupport::geo(R(1), R(1, 2)));
    FAIL("expected NotBSeries");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBSeries);
  }

  const auto b = interleave(testsupport::geo(R(1), R(3, 10)));
  CHECK(validate(b).valid);
  REQUIRE(b.label);
  CHECK(b.label->find("(B) not (A)") != std::string::npos);
}

TEST_CASE("interleaved terms alternate remainders and terms of the base") {
  for (const auto& base : {testsupport::geo(R(1), R(1, 5)), testsupport::geo(R(2), R(1, 4))}) {
    const auto y = interleave(base);
    for (std::uint64_t n = 1; n <= 20; ++n) {
      CHECK(term(y, 2 * n - 1) == exact_remainder(base, n - 1));
      CHECK(term(y, 2 * n) == term(base, n));
    }
  }
  // A prefixed base keeps the relation on its explicit part.
  auto base = testsupport::geo(R(1), R(1, 5));
  base.prefix = {R(3)};
  const auto y = interleave(base);
  for (std::uint64_t n = 1; n <= 12; ++n) {
    CHECK(term(y, 2 * n - 1) == exact_remainder(base, n - 1));
    CHECK(term(y, 2 * n) == term(base, n));
  }
}

TEST_CASE("doubling") {
  const auto d = double_terms(testsupport::geo(R(1), R(1, 2)));
  CHECK(d.spec.tail == preset("EX_2_6").tail);
  CHECK(d.spec.prefix == preset("EX_2_6").prefix);
  CHECK(d.continuum_on_interior);
  CHECK(scan_set(d.spec) == Set{Cardinality::fin(1), Cardinality::continuum()});

  const auto t = double_terms(testsupport::geo(R(1), R(1, 3)));
  CHECK(validate(t.spec).valid);
  CHECK_FALSE(t.continuum_on_interior);
  for (std::uint64_t n = 1; n <= 10; ++n) {
    CHECK(term(t.spec, 2 * n - 1) == term(testsupport::geo(R(1), R(1, 3)), n));
    CHECK(term(t.spec, 2 * n) == term(testsupport::geo(R(1), R(1, 3)), n));
  }
}

TEST_CASE("prepending multiples of the total") {
  const auto base = unique_base();
  const Rat tot = total(base).value();
  const auto s = prepend_scaled(base, {R(3), R(1, 2)});
  CHECK(s.prefix == std::vector<Rat>{3 * tot, tot / 2});
  CHECK(s.tail == base.tail);

  const auto g3 = add_m_totals(base, 3);
  const std::vector<std::uint64_t> expected{1, 4, 6, 4, 1};
  for (std::uint64_t k = 0; k <= 4; ++k) {
    CHECK(count(g3, Rat(static_cast<long>(k)) * tot).cardinality == Cardinality::fin(expected[k]));
  }
  CHECK(add_total(base) == prepend_scaled(base, {R(1)}));
  CHECK(add_two_totals(base) == prepend_scaled(base, {R(1), R(1)}));
  CHECK(add_m_double_totals(base, 2) == prepend_scaled(base, {R(2), R(2)}));
}

TEST_CASE("combinator range laws on a unique base") {
  const auto base = unique_base();
  CHECK(scan_set(base) == fins({1}));
  CHECK(scan_set(add_total(base)) == fins({1, 2}));
  CHECK(scan_set(add_two_totals(base)) == fins({1, 2, 3}));
  for (std::uint64_t m = 1; m <= 4; ++m) {
    CAPTURE(m);
    Set totals, doubles;
    for (std::uint64_t k = 0; k <= m; ++k) doubles.insert(Cardinality::fin(binom(m, k)));
    totals = doubles;
    for (std::uint64_t k = 0; k <= m + 1; ++k) totals.insert(Cardinality::fin(binom(m + 1, k)));
    CHECK(scan_set(add_m_totals(base, m)) == totals);
    CHECK(scan_set(add_m_double_totals(base, m)) == doubles);
  }
}

TEST_CASE("combinators on a base whose range is {1, 2}") {
  const auto nu = add_total(unique_base());
  CHECK(scan_set(nu) == fins({1, 2}));
  CHECK(scan_set(add_two_totals(nu)) == fins({1, 2, 3, 4}));
  CHECK(scan_set(add_m_double_totals(nu, 2)) == fins({1, 2, 4}));
}

TEST_CASE("product examples") {
  CHECK(scan_set(product({R(1), R(1)}, unique_base())) == fins({1, 2}));
  CHECK(scan_set(product({R(3), R(2), R(1)}, preset("EX_2_6"))) ==
        Set{Cardinality::fin(1), Cardinality::fin(2), Cardinality::continuum()});
  CHECK(scan_set(product({R(1), R(2), R(4)}, unique_base())) == fins({1}));
}

TEST_CASE("product rescales below the smallest subset-sum gap") {
  const FiniteMeasure tau{R(3), R(2), R(1)};
  CHECK(min_subset_gap(tau) == R(1));
  CHECK(min_subset_gap({R(1, 2), R(1, 3)}) == R(1, 6));
  const auto p = product(tau, preset("EX_2_6"));
  CHECK(std::equal(tau.begin(), tau.end(), p.prefix.begin()));
  CHECK(total(drop_terms(p, 3)).value() < min_subset_gap(tau));
  CHECK(total(drop_terms(p, 3)).value() * 2 >= min_subset_gap(tau));
}

TEST_CASE("product law over several factors") {
  const std::vector<FiniteMeasure> taus{{R(1), R(1)}, {R(2), R(1), R(1)}, {R(4), R(4), R(2), R(2), R(2)}};
  const std::vector<SeriesSpec> nus{unique_base(), preset("EX_2_6"), add_total(unique_base())};
  for (const auto& tau : taus) {
    for (const auto& nu : nus) {
      Set expected;
      const Set nu_set = scan_set(nu);
      for (auto a : finite_range(tau).range) {
        for (const auto& b : nu_set) expected.insert(Cardinality::fin(a) * b);
      }
      CHECK(scan_set(product(tau, nu)) == expected);
    }
  }
}

TEST_CASE("preset catalog") {
  const auto gn = preset("GN_CANTORVAL");
  CHECK(gn.prefix.empty());
  CHECK(gn.tail == testsupport::mgeo({R(3, 4), R(1, 2)}, R(1, 4)).tail);
  for (const auto& [name, spec] : testsupport::catalog()) {
    CAPTURE(name);
    CHECK(validate(spec).valid);
  }
  try {
    preset("NO_SUCH");
    FAIL("expected UnknownPreset");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownPreset);
  }
  CHECK_THROWS_AS(preset("INTERLEAVED_GEO(1/2)"), Error);
  CHECK_THROWS_AS(preset("INTERLEAVED_GEO(x)"), Error);
}

TEST_CASE("the unique-representation examples satisfy their inequalities") {
  const auto checks = check_ex_3_15(15);
  CHECK(checks.size() == 6 * 15);
  for (const auto& c : checks) {
    CAPTURE(c.family);
    CAPTURE(c.k);
    CHECK(c.holds);
  }
  const auto spec = preset("EX_3_15");
  CHECK(term(spec, 1) == R(1, 10) + R(1, 2) * R(1, 10000));
  CHECK(term(spec, 2) == R(1, 10));
  CHECK(term(spec, 3) == R(1, 10000) + R(1, 2) / pow(R(10), 9));
  CHECK(term(spec, 4) == R(1, 10000));
}

TEST_CASE("finite ranges") {
  CHECK(finite_range({R(4), R(4), R(2), R(2), R(2)}).range == std::set<std::uint64_t>{1, 3, 5, 7});
  CHECK(finite_range({R(1), R(1)}).range == std::set<std::uint64_t>{1, 2});
  CHECK(finite_range({R(1), R(2), R(4)}).range == std::set<std::uint64_t>{1});
  CHECK_THROWS_AS(finite_range(FiniteMeasure(kMaxFiniteAtoms + 1, R(1))), Error);
}

TEST_CASE("finite ranges agree with subset enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto xs = testsupport::random_atoms(rng, 12, 10);
    const auto fr = finite_range(xs);
    const auto brute = testsupport::brute_counts(xs);
    CHECK(fr.counts == brute);
    std::uint64_t sum = 0;
    std::set<std::uint64_t> range;
    for (const auto& [v, c] : brute) {
      sum += c;
      range.insert(c);
    }
    CHECK(sum == (std::uint64_t{1} << xs.size()));
    CHECK(fr.range == range);
  }
}

TEST_CASE("finite range search") {
  CHECK(search_finite_ranges({1, 4}, 5, 12).empty());
  const auto pair = search_finite_ranges({1, 2}, 2, 2);
  CHECK(std::find(pair.begin(), pair.end(), FiniteMeasure{R(1), R(1)}) != pair.end());
  const auto unique = search_finite_ranges({1}, 3, 4);
  CHECK(std::find(unique.begin(), unique.end(), FiniteMeasure{R(1), R(2), R(4)}) != unique.end());
  for (const auto& m : unique) CHECK(finite_range(m).range == std::set<std::uint64_t>{1});
}

TEST_CASE("distinct-atom filter matches the unpruned search") {
  SearchOptions off;
  off.distinct_filter = false;
  for (std::size_t atoms = 1; atoms <= 3; ++atoms) {
    for (std::uint64_t d = 1; d <= 6; ++d) {
      const auto pruned = search_finite_ranges({1, 4}, atoms, d);
      const auto full = search_finite_ranges({1, 4}, atoms, d, off);
      CHECK(pruned == full);
      for (const auto& m : full) {
        std::set<Rat> distinct(m.begin(), m.end());
        CHECK(distinct.size() == m.size());
      }
    }
  }
  // The filter only applies to {1, 4}; other targets keep repeated atoms.
  const auto reps = search_finite_ranges({1, 2}, 3, 3);
  CHECK(std::any_of(reps.begin(), reps.end(), [](const FiniteMeasure& m) {
    return std::adjacent_find(m.begin(), m.end()) != m.end();
  }));
}

TEST_CASE("search results are normalized and sorted") {
  for (const auto& m : search_finite_ranges({1, 2, 3}, 3, 4)) {
    CHECK(std::is_sorted(m.begin(), m.end()));
    Int g = 0;
    for (const auto& x : m) {
      CHECK(x.get_den() == 1);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_num_mpz_t());
    }
    CHECK(g == 1);
    CHECK(finite_range(m).range == std::set<std::uint64_t>{1, 2, 3});
  }
}

TEST_CASE("finitely many non-unique values have exactly two representations") {
  for (const char* name : {"EX_4_2", "EX_4_4", "EX_4_3"}) {
    CAPTURE(name);
    const auto spec = preset(name);
    const auto scan = range_scan(spec, spec.prefix.size() + 6, {}, {R(1)});
    for (const auto& [t, e] : scan.entries) {
      if (e.cardinality.is_fin()) CHECK(e.cardinality.count() <= 2);
    }
  }
}
