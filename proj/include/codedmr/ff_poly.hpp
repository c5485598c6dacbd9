#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace codedmr {

/// Element of GF(p). The modulus lives in the owning PrimeField; an element
/// is only meaningful together with the field that produced it.
struct FieldElement {
  std::uint64_t value = 0;

  friend bool operator==(FieldElement, FieldElement) = default;
  friend auto operator<=>(FieldElement, FieldElement) = default;
};

/// A data point (or coded row): fixed-length vector over the field.
using DataPoint = std::vector<FieldElement>;

class PrimeField {
 public:
  static constexpr std::uint64_t kDefaultModulus = 2147483647ULL;  // 2^31 - 1

  /// Throws InvalidConfig unless `modulus` is a prime below 2^62.
  explicit PrimeField(std::uint64_t modulus = kDefaultModulus);

  std::uint64_t modulus() const { return p_; }

  FieldElement element(std::int64_t v) const;
  FieldElement zero() const { return {0}; }
  FieldElement one() const { return {1}; }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint64_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElement sub(FieldElement a, FieldElement b) const {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElement neg(FieldElement a) const { return {a.value == 0 ? 0 : p_ - a.value}; }
  FieldElement mul(FieldElement a, FieldElement b) const {
    if (p_ < (std::uint64_t{1} << 32)) return {a.value * b.value % p_};
    return {static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.value) * b.value % p_)};
  }
  FieldElement pow(FieldElement a, std::uint64_t e) const;

  /// Multiplicative inverse; throws DivisionByZero for 0.
  FieldElement inv(FieldElement a) const;
  FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

  FieldElement random(std::mt19937_64& rng) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t p_;
};

bool is_prime(std::uint64_t n);

/// Free-function form of PrimeField::inv.
FieldElement field_inverse(const PrimeField& field, FieldElement x);

/// Multivariate polynomial over GF(p) in canonical form: terms sorted by
/// exponent vector, duplicates merged, zero coefficients dropped.
class MultivariatePolynomial {
 public:
  struct Term {
    FieldElement coeff;
    std::vector<unsigned> exponents;
  };

  MultivariatePolynomial(const PrimeField& field, std::size_t arity, std::vector<Term> terms);

  /// Zero polynomial of the given arity.
  static MultivariatePolynomial zero(const PrimeField& field, std::size_t arity) {
    return MultivariatePolynomial(field, arity, {});
  }

  /// Random polynomial of total degree exactly `degree`: a random dense
  /// coefficient for every monomial up to that degree, with at least one
  /// nonzero top-degree term.
  static MultivariatePolynomial random(const PrimeField& field, std::size_t arity, unsigned degree,
                                       std::mt19937_64& rng);

  std::size_t arity() const { return arity_; }
  /// Total degree; 0 for constants and for the zero polynomial.
  unsigned degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

 private:
  std::size_t arity_;
  unsigned degree_ = 0;
  std::vector<Term> terms_;
};

/// Evaluates f at x. Throws ShapeError when x has the wrong arity.
FieldElement poly_eval(const PrimeField& field, const MultivariatePolynomial& f, const DataPoint& x);

/// Dense univariate polynomial, coefficients low to high, no trailing zeros.
class UnivariatePolynomial {
 public:
  UnivariatePolynomial() = default;
  explicit UnivariatePolynomial(std::vector<FieldElement> coeffs);

  const std::vector<FieldElement>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

  friend bool operator==(const UnivariatePolynomial&, const UnivariatePolynomial&) = default;

 private:
  std::vector<FieldElement> coeffs_;
};

struct InterpolationPoint {
  FieldElement x;
  FieldElement y;
};

/// Unique polynomial of degree < points.size() through every point.
/// Throws DegenerateNodes on repeated x and on an empty point set.
UnivariatePolynomial interpolate(const PrimeField& field, std::span<const InterpolationPoint> points);

FieldElement eval_univariate(const PrimeField& field, const UnivariatePolynomial& g, FieldElement z);

/// Barycentric weights w_i = 1 / prod_{j != i} (x_i - x_j). Throws
/// DegenerateNodes on repeated nodes.
std::vector<FieldElement> barycentric_weights(const PrimeField& field, std::span<const FieldElement> nodes);

}  // namespace codedmr
