#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cardfn/cardinality.hpp"
#include "cardfn/constructions.hpp"
#include "cardfn/error.hpp"
#include "support.hpp"

using namespace cardfn;
using testsupport::R;

TEST_CASE("rationals parse exactly and print in lowest terms") {
  CHECK(parse_rat("6/8") == R(3, 4));
  CHECK(to_string(parse_rat("6/8")) == "3/4");
  CHECK(parse_rat(" -2 ") == R(-2));
  CHECK(to_string(parse_rat("-4/6")) == "-2/3");
  CHECK_THROWS_AS(parse_rat("4/-6"), Error);
  CHECK(to_string(make_rat(10, 4)) == "5/2");
  CHECK_THROWS_AS(parse_rat("1/0"), Error);
  CHECK_THROWS_AS(parse_rat("abc"), Error);
  CHECK_THROWS_AS(parse_rat(""), Error);
  CHECK(pow(R(2, 3), 3) == R(8, 27));
  CHECK(pow(R(5), 0) == R(1));
}

TEST_CASE("cardinality order, arithmetic and strings") {
  const auto f = [](std::uint64_t k) { return Cardinality::fin(k); };
  CHECK(f(0) < f(1));
  CHECK(f(7) < Cardinality::omega());
  CHECK(Cardinality::omega() < Cardinality::continuum());
  CHECK(f(2) + f(3) == f(5));
  CHECK(f(2) * f(3) == f(6));
  CHECK(f(3) * Cardinality::omega() == Cardinality::omega());
  CHECK(f(3) * Cardinality::continuum() == Cardinality::continuum());
  CHECK(f(0) * Cardinality::continuum() == f(0));
  CHECK(Cardinality::omega() + f(4) == Cardinality::omega());
  CHECK(Cardinality::omega() + Cardinality::continuum() == Cardinality::continuum());
  CHECK(Cardinality::at_least(3).surely_at_least(f(3)));
  CHECK_FALSE(Cardinality::at_least(3).surely_at_least(f(4)));

  CHECK(f(2).to_string() == "2");
  CHECK(Cardinality::omega().to_string() == "omega");
  CHECK(Cardinality::continuum().to_string() == "continuum");
  CHECK(Cardinality::at_least(5).to_string() == ">=5");
  CHECK(Cardinality::omega().pretty() == "ω");
  CHECK(Cardinality::continuum().pretty() == "𝔠");
  for (const auto& c : {f(0), f(9), Cardinality::omega(), Cardinality::continuum(), Cardinality::at_least(2),
                        Cardinality::infinite()}) {
    CHECK(parse_cardinality(c.to_string()) == c);
  }
}

TEST_CASE("term values") {
  CHECK(term(testsupport::geo(R(1), R(1, 2)), 3) == R(1, 8));
  const auto gn = testsupport::mgeo({R(3, 4), R(1, 2)}, R(1, 4));
  CHECK(term(gn, 1) == R(3, 4));
  CHECK(term(gn, 2) == R(1, 2));
  CHECK(term(gn, 3) == R(3, 16));
  CHECK(term(gn, 4) == R(1, 8));
  const auto ex32 = preset("EX_3_2");
  CHECK(term(ex32, 1) == R(27, 32));
  for (std::uint64_t n = 2; n <= 8; ++n) CHECK(term(ex32, n) == R(3) / pow(R(4), n - 1));
}

TEST_CASE("remainder values") {
  CHECK(remainder(testsupport::geo(R(1), R(1, 2)), 3).value() == R(1, 8));
  CHECK(remainder(testsupport::mgeo({R(3, 4), R(1, 2)}, R(1, 4)), 2).value() == R(5, 12));
  CHECK(remainder(testsupport::atoms({R(1, 2), R(1, 4)}), 1).value() == R(1, 4));
  CHECK(remainder(testsupport::atoms({R(1, 2), R(1, 4)}), 2).value() == R(0));
  CHECK(remainder(testsupport::atoms({R(1, 2), R(1, 4)}), 9).value() == R(0));
}

TEST_CASE("remainders agree with long partial sums") {
  // r_n - (x_{n+1} + ... + x_{n+L}) = r_{n+L}, and r_{n+L} shrinks geometrically.
  for (const auto& spec : {testsupport::geo(R(1), R(1, 3)), testsupport::mgeo({R(3, 4), R(1, 2)}, R(1, 4)),
                           preset("EX_3_2"), preset("EX_4_3")}) {
    for (std::uint64_t n = 0; n <= 4; ++n) {
      const Rat r = exact_remainder(spec, n);
      const Rat partial = testsupport::partial_sum(spec, n, 40);
      CHECK(partial < r);
      CHECK(r - partial == exact_remainder(spec, n + 40));
      CHECK(r - partial < R(1, 1000000));
    }
  }
}

TEST_CASE("totals") {
  CHECK(total(preset("EX_2_6")).value() == R(2));
  CHECK(total(preset("EX_4_3")).value() == R(2));
  CHECK(total(testsupport::atoms({R(3), R(2), R(1)})).value() == R(6));
}

TEST_CASE("remainder recurrence and decrease across the catalog") {
  for (const auto& [name, spec] : testsupport::catalog()) {
    CAPTURE(name);
    if (!has_exact_remainders(spec)) continue;
    CHECK(total(spec).value() == exact_remainder(spec, 0));
    for (std::uint64_t n = 0; n <= 64; ++n) {
      CHECK(exact_remainder(spec, n) == term(spec, n + 1) + exact_remainder(spec, n + 1));
    }
    for (std::uint64_t n = 0; n <= 32; ++n) CHECK(exact_remainder(spec, n + 8) < exact_remainder(spec, n));
  }
}

TEST_CASE("block remainders are enclosures that shrink") {
  const auto spec = preset("BLOCKS_2_5");
  for (std::uint64_t n = 0; n <= 12; ++n) {
    auto r = remainder(spec, n);
    CHECK(r.lo() <= r.hi());
    const Rat x = term(spec, n + 1);
    auto next = remainder(spec, n + 1);
    // r_n = x_{n+1} + r_{n+1}: the enclosures must be consistent.
    CHECK(r.lo() <= x + next.hi());
    CHECK(x + next.lo() <= r.hi());
    for (int step = 0; step < 4 && !r.is_exact(); ++step) {
      const auto finer = r.refined();
      CHECK(finer.lo() >= r.lo());
      CHECK(finer.hi() <= r.hi());
      CHECK(finer.width() * 2 <= r.width());
      r = finer;
    }
  }
  CHECK_THROWS_AS(exact_remainder(spec, 1), Error);
}

TEST_CASE("compare against remainders") {
  const auto g = testsupport::geo(R(1), R(1, 2));
  CHECK(compare(R(1, 8), remainder(g, 3)) == 0);
  CHECK(compare(R(1, 7), remainder(g, 3)) > 0);
  CHECK(compare(R(1, 9), remainder(g, 3)) < 0);
  const auto b = preset("BLOCKS_2_5");
  CHECK(compare(term(b, 1), remainder(b, 1)) > 0);
}

TEST_CASE("validate") {
  const auto ex26 = validate(preset("EX_2_6"));
  CHECK(ex26.valid);
  CHECK(ex26.sorted());

  const auto unsorted = validate(testsupport::atoms({R(1, 4), R(1, 2)}));
  CHECK(unsorted.valid);
  REQUIRE(unsorted.first_unsorted);
  CHECK(*unsorted.first_unsorted == 1);

  const auto divergent = validate(testsupport::geo(R(1), R(1)));
  CHECK_FALSE(divergent.valid);
  REQUIRE_FALSE(divergent.problems.empty());
  CHECK(divergent.problems.front().find("divergent") != std::string::npos);
  CHECK_THROWS_AS(require_valid(testsupport::geo(R(1), R(1))), Error);

  CHECK_FALSE(validate(testsupport::atoms({R(1), R(0)})).valid);
  CHECK_FALSE(validate(testsupport::atoms({R(-1)})).valid);
  CHECK_FALSE(validate(testsupport::mgeo({}, R(1, 2))).valid);
  CHECK_FALSE(validate(testsupport::geo(R(1), R(0))).valid);
}

TEST_CASE("signed normalization") {
  SignedSeries a;
  a.prefix = {R(1, 2), R(-1, 4)};
  const auto na = signed_normalize(a);
  CHECK(na.spec.prefix == std::vector<Rat>{R(1, 2), R(1, 4)});
  CHECK(na.shift == R(1, 4));

  SignedSeries pos;
  pos.prefix = {R(1), R(1, 3)};
  const auto np = signed_normalize(pos);
  CHECK(np.spec.prefix == pos.prefix);
  CHECK(np.shift == 0);

  SignedSeries neg;
  neg.tail = GeometricTail{R(-1), R(1, 2)};
  const auto nn = signed_normalize(neg);
  CHECK(nn.spec.tail == TailSpec{GeometricTail{R(1), R(1, 2)}});
  CHECK(nn.shift == R(1));

  SignedSeries zero;
  zero.prefix = {R(1), R(0)};
  CHECK_THROWS_AS(signed_normalize(zero), Error);
}

TEST_CASE("signed normalization preserves subset counts up to the shift") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto xs = testsupport::random_atoms(rng, 8, 12);
    std::bernoulli_distribution flip(0.4);
    for (auto& x : xs) {
      if (flip(rng)) x = -x;
    }
    SignedSeries s;
    s.prefix = xs;
    const auto n = signed_normalize(s);
    const auto signed_counts = testsupport::brute_counts(xs);
    const auto abs_counts = testsupport::brute_counts(n.spec.prefix);
    CHECK(signed_counts.size() == abs_counts.size());
    for (const auto& [t, c] : signed_counts) {
      const auto it = abs_counts.find(t + n.shift);
      REQUIRE(it != abs_counts.end());
      CHECK(it->second == c);
    }
  }
}

TEST_CASE("scaling and dropping terms") {
  const auto gn = preset("GN_CANTORVAL");
  const auto s = scaled(gn, R(2, 3));
  for (std::uint64_t n = 1; n <= 10; ++n) CHECK(term(s, n) == R(2, 3) * term(gn, n));
  const auto d = drop_terms(preset("EX_3_2"), 1);
  for (std::uint64_t n = 1; n <= 10; ++n) CHECK(term(d, n) == term(preset("EX_3_2"), n + 1));
  CHECK(exact_remainder(d, 0) == exact_remainder(preset("EX_3_2"), 1));
}
