#include "cardfn/rational.hpp"

#include <algorithm>
#include <cctype>

#include "cardfn/error.hpp"

namespace cardfn {

namespace {

bool parse_int(std::string_view digits, Int& out) {
  if (digits.empty()) return false;
  std::size_t start = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
  if (start == digits.size()) return false;
  for (std::size_t i = start; i < digits.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(digits[i]))) return false;
  }
  std::string text(digits[0] == '+' ? digits.substr(1) : digits);
  return out.set_str(text, 10) == 0;
}

}  // namespace

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw Error(ErrorKind::Invalid, "zero denominator");
  Rat value(num, den);
  value.canonicalize();
  return value;
}

Rat make_rat(long num, long den) { return make_rat(Int(num), Int(den)); }

Rat parse_rat(std::string_view text) {
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
    trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
    trimmed.remove_suffix(1);
  Int num;
  Int den = 1;
  auto slash = trimmed.find('/');
  bool ok = slash == std::string_view::npos
                ? parse_int(trimmed, num)
                : parse_int(trimmed.substr(0, slash), num) &&
                      parse_int(trimmed.substr(slash + 1), den) &&
                      trimmed[slash + 1] != '-' && trimmed[slash + 1] != '+';
  if (!ok) throw Error(ErrorKind::Parse, "malformed rational '" + std::string(text) + "'");
  if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
  return make_rat(num, den);
}

std::string to_string(const Rat& value) { return value.get_str(10); }

Rat pow(const Rat& base, std::uint64_t exponent) {
  Int num;
  Int den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  // Powers of coprime integers stay coprime.
  Rat out;
  out.get_num() = num;
  out.get_den() = den;
  return out;
}

std::size_t bit_size(const Rat& value) {
  return std::max(mpz_sizeinbase(value.get_num_mpz_t(), 2),
                  mpz_sizeinbase(value.get_den_mpz_t(), 2));
}

double to_double(const Rat& value) { return value.get_d(); }

std::size_t RatHash::operator()(const Rat& value) const noexcept {
  auto limbs = [](mpz_srcptr z) {
    std::size_t h = static_cast<std::size_t>(z->_mp_size) * 0x9e3779b97f4a7c15ULL;
    int n = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
    for (int i = 0; i < n; ++i) {
      h ^= static_cast<std::size_t>(z->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  };
  std::size_t h = limbs(value.get_num_mpz_t());
  return h ^ (limbs(value.get_den_mpz_t()) * 0xff51afd7ed558ccdULL);
}

}  // namespace cardfn
