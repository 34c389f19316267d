#ifndef CARDFN_RATIONAL_HPP
#define CARDFN_RATIONAL_HPP

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace cardfn {

// Exact rational. gmpxx keeps results of arithmetic canonical (lowest terms,
// positive denominator); values built from a numerator/denominator pair go
// through make_rat which canonicalizes.
using Rat = mpq_class;
using Int = mpz_class;

Rat make_rat(const Int& num, const Int& den);
Rat make_rat(long num, long den = 1);

// Parses "p/q", "p", "-p/q". Throws Error(Parse) on malformed input or a
// zero denominator.
Rat parse_rat(std::string_view text);

// "p/q" or "p" when the denominator is one.
std::string to_string(const Rat& value);

// q^e for e >= 0.
Rat pow(const Rat& base, std::uint64_t exponent);

// Number of bits of max(|num|, den).
std::size_t bit_size(const Rat& value);

double to_double(const Rat& value);

struct RatHash {
  std::size_t operator()(const Rat& value) const noexcept;
};

}  // namespace cardfn

#endif  // CARDFN_RATIONAL_HPP
