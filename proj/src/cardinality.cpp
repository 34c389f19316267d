#include "cardfn/cardinality.hpp"

#include <limits>

namespace cardfn {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  return __builtin_add_overflow(a, b, &out) ? kSaturated : out;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  return __builtin_mul_overflow(a, b, &out) ? kSaturated : out;
}

int rank(Cardinality::Kind kind) {
  switch (kind) {
    case Cardinality::Kind::Fin: return 0;
    case Cardinality::Kind::Omega: return 1;
    case Cardinality::Kind::Continuum: return 2;
    case Cardinality::Kind::AtLeast: return 3;
    case Cardinality::Kind::Infinite: return 4;
  }
  return 5;
}

}  // namespace

std::uint64_t Cardinality::lower_bound() const {
  return (kind_ == Kind::Fin || kind_ == Kind::AtLeast) ? k_ : kSaturated;
}

bool Cardinality::surely_at_least(const Cardinality& other) const {
  // Smallest value *this can take versus largest value other can take.
  switch (other.kind_) {
    case Kind::Fin:
      return lower_bound() >= other.k_;
    case Kind::Omega:
      return is_infinite();
    case Kind::Continuum:
      return kind_ == Kind::Continuum;
    case Kind::AtLeast:
    case Kind::Infinite:
      return false;
  }
  return false;
}

std::optional<std::strong_ordering> compare_exact(const Cardinality& a, const Cardinality& b) {
  if (!a.is_exact() || !b.is_exact()) return std::nullopt;
  if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
  return a.k_ <=> b.k_;
}

bool operator<(const Cardinality& a, const Cardinality& b) {
  if (a.kind_ != b.kind_) return rank(a.kind_) < rank(b.kind_);
  return a.k_ < b.k_;
}

Cardinality operator+(const Cardinality& a, const Cardinality& b) {
  using K = Cardinality::Kind;
  if (a.kind_ == K::Continuum || b.kind_ == K::Continuum) return Cardinality::continuum();
  const bool exact = a.is_exact() && b.is_exact();
  if (a.is_infinite() || b.is_infinite()) {
    if (exact) return Cardinality::omega();
    return Cardinality::infinite();
  }
  const std::uint64_t k = sat_add(a.k_, b.k_);
  return exact ? Cardinality::fin(k) : Cardinality::at_least(k);
}

Cardinality operator*(const Cardinality& a, const Cardinality& b) {
  using K = Cardinality::Kind;
  if ((a.kind_ == K::Fin && a.k_ == 0) || (b.kind_ == K::Fin && b.k_ == 0)) {
    return Cardinality::fin(0);
  }
  const bool exact = a.is_exact() && b.is_exact();
  // Each factor is now either >= 1 or a bound that may still be zero.
  const bool a_pos = a.lower_bound() >= 1;
  const bool b_pos = b.lower_bound() >= 1;
  if (exact) {
    if (a.kind_ == K::Continuum || b.kind_ == K::Continuum) return Cardinality::continuum();
    if (a.kind_ == K::Omega || b.kind_ == K::Omega) return Cardinality::omega();
    return Cardinality::fin(sat_mul(a.k_, b.k_));
  }
  if (a_pos && b_pos) {
    if (a.kind_ == K::Continuum || b.kind_ == K::Continuum) {
      return Cardinality::continuum();
    }
    if (a.is_infinite() || b.is_infinite()) return Cardinality::infinite();
  }
  if (!a_pos || !b_pos) return Cardinality::at_least(0);
  return Cardinality::at_least(sat_mul(a.k_, b.k_));
}

std::string Cardinality::to_string() const {
  switch (kind_) {
    case Kind::Fin: return std::to_string(k_);
    case Kind::AtLeast: return ">=" + std::to_string(k_);
    case Kind::Infinite: return ">=omega";
    case Kind::Omega: return "omega";
    case Kind::Continuum: return "continuum";
  }
  return "?";
}

std::string Cardinality::pretty() const {
  switch (kind_) {
    case Kind::Fin: return std::to_string(k_);
    case Kind::AtLeast: return "≥" + std::to_string(k_);
    case Kind::Infinite: return "≥ω";
    case Kind::Omega: return "ω";
    case Kind::Continuum: return "\U0001D520";
  }
  return "?";
}

std::optional<Cardinality> parse_cardinality(const std::string& text) {
  if (text == "omega") return Cardinality::omega();
  if (text == "continuum") return Cardinality::continuum();
  if (text == ">=omega") return Cardinality::infinite();
  auto digits = [](const std::string& s) -> std::optional<std::uint64_t> {
    if (s.empty() || s.size() > 19) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  };
  if (text.rfind(">=", 0) == 0) {
    if (auto k = digits(text.substr(2))) return Cardinality::at_least(*k);
    return std::nullopt;
  }
  if (auto k = digits(text)) return Cardinality::fin(*k);
  return std::nullopt;
}

}  // namespace cardfn
