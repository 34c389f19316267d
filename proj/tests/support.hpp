#ifndef CARDFN_TESTS_SUPPORT_HPP
#define CARDFN_TESTS_SUPPORT_HPP

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "cardfn/constructions.hpp"
#include "cardfn/series.hpp"

namespace testsupport {

using cardfn::Rat;
using cardfn::SeriesSpec;

inline Rat R(long p, long q = 1) { return cardfn::make_rat(p, q); }

inline SeriesSpec geo(const Rat& c, const Rat& q) {
  SeriesSpec s;
  s.tail = cardfn::GeometricTail{c, q};
  return s;
}

inline SeriesSpec mgeo(std::vector<Rat> coeffs, const Rat& q) {
  SeriesSpec s;
  s.tail = cardfn::MultigeometricTail{std::move(coeffs), q};
  return s;
}

inline SeriesSpec atoms(std::vector<Rat> xs) {
  SeriesSpec s;
  s.prefix = std::move(xs);
  return s;
}

// Subset-sum multiplicities by direct enumeration of all 2^j masks.
inline std::map<Rat, std::uint64_t> brute_counts(const std::vector<Rat>& xs) {
  std::map<Rat, std::uint64_t> out;
  const std::uint64_t n = xs.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Rat s = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s += xs[i];
    }
    ++out[s];
  }
  return out;
}

// Partial sum x_{n+1} + ... + x_{n+len}, term by term.
inline Rat partial_sum(const SeriesSpec& s, std::uint64_t n, std::uint64_t len) {
  Rat acc = 0;
  for (std::uint64_t k = n + 1; k <= n + len; ++k) acc += cardfn::term(s, k);
  return acc;
}

inline std::vector<Rat> random_atoms(std::mt19937_64& rng, std::size_t max_atoms, long max_den) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_int_distribution<long> den(1, max_den);
  std::vector<Rat> xs(count(rng));
  for (auto& x : xs) {
    const long d = den(rng);
    std::uniform_int_distribution<long> num(1, d);
    x = cardfn::make_rat(num(rng), d);
  }
  return xs;
}

// Every catalog preset, with the parametrized family instantiated at two ratios.
inline std::vector<std::pair<std::string, SeriesSpec>> catalog() {
  std::vector<std::pair<std::string, SeriesSpec>> out;
  for (const auto& name : cardfn::preset_names()) {
    if (name.find("(q)") != std::string::npos) {
      for (const char* q : {"1/5", "1/3"}) {
        const std::string inst = "INTERLEAVED_GEO(" + std::string(q) + ")";
        out.emplace_back(inst, cardfn::preset(inst));
      }
    } else {
      out.emplace_back(name, cardfn::preset(name));
    }
  }
  return out;
}

}  // namespace testsupport

#endif  // CARDFN_TESTS_SUPPORT_HPP
