#ifndef CARDFN_CARDINALITY_HPP
#define CARDFN_CARDINALITY_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace cardfn {

// Values of the cardinal function: Fin(k) < Omega < Continuum. The two lower
// bounds AtLeast(k) and Infinite (at least omega, exact value unknown) come
// out of budget-limited or certificate-based answers.
class Cardinality {
 public:
  enum class Kind { Fin, AtLeast, Infinite, Omega, Continuum };

  static Cardinality fin(std::uint64_t k) { return {Kind::Fin, k}; }
  static Cardinality at_least(std::uint64_t k) { return {Kind::AtLeast, k}; }
  static Cardinality infinite() { return {Kind::Infinite, 0}; }
  static Cardinality omega() { return {Kind::Omega, 0}; }
  static Cardinality continuum() { return {Kind::Continuum, 0}; }

  Kind kind() const { return kind_; }
  // k for Fin and AtLeast, zero otherwise.
  std::uint64_t count() const { return k_; }

  bool is_exact() const { return kind_ == Kind::Fin || kind_ == Kind::Omega || kind_ == Kind::Continuum; }
  bool is_fin() const { return kind_ == Kind::Fin; }
  // Certainly Omega or Continuum.
  bool is_infinite() const {
    return kind_ == Kind::Infinite || kind_ == Kind::Omega || kind_ == Kind::Continuum;
  }
  // Guaranteed lower bound in the finite part; UINT64_MAX for infinite values.
  std::uint64_t lower_bound() const;

  // True when every value compatible with *this is >= every value compatible
  // with other (so AtLeast(3) >= Fin(2) holds, AtLeast(3) >= Fin(4) does not).
  bool surely_at_least(const Cardinality& other) const;

  // Total order on exact values; nullopt if either side is a bound.
  friend std::optional<std::strong_ordering> compare_exact(const Cardinality& a,
                                                           const Cardinality& b);

  friend Cardinality operator+(const Cardinality& a, const Cardinality& b);
  friend Cardinality operator*(const Cardinality& a, const Cardinality& b);

  friend bool operator==(const Cardinality&, const Cardinality&) = default;
  // Arbitrary but fixed order for use as a set key: exact values in their
  // natural order, bounds after.
  friend bool operator<(const Cardinality& a, const Cardinality& b);

  // Machine form: "3", "omega", "continuum", ">=3", ">=omega".
  std::string to_string() const;
  // Human form with the glyphs ω and 𝔠.
  std::string pretty() const;

 private:
  Cardinality(Kind kind, std::uint64_t k) : kind_(kind), k_(k) {}

  Kind kind_ = Kind::Fin;
  std::uint64_t k_ = 0;
};

// Parses the machine form.
std::optional<Cardinality> parse_cardinality(const std::string& text);

}  // namespace cardfn

#endif  // CARDFN_CARDINALITY_HPP
