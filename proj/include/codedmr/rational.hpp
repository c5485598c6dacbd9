#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace codedmr {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Binomial coefficient with C(n, k) = 0 whenever n < k, k < 0 or n < 0.
BigInt binom(long n, long k);

/// Parses "p/q", an integer, or a decimal literal ("0.75", "1e-1") exactly.
/// Throws InvalidConfig on malformed input.
Rational parse_rational(std::string_view text);

/// Rational extended with +infinity. Infinity compares greater than every
/// finite value and equal to itself; it absorbs addition.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational v) : value_(std::move(v)) { value_.canonicalize(); }
  ExtRational(long v) : value_(v) {}

  static ExtRational infinity() {
    ExtRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  // Only meaningful for finite values.
  const Rational& value() const { return value_; }

  double to_double() const;

  ExtRational& operator+=(const ExtRational& o);
  friend ExtRational operator+(ExtRational a, const ExtRational& b) { return a += b; }

  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

 private:
  Rational value_{0};
  bool infinite_ = false;
};

/// Decimal rendering at `digits` significant digits, computed from the exact
/// value with 256-bit floating precision. Infinity renders as "inf".
std::string format_sig(const Rational& v, int digits = 12);
std::string format_sig(const ExtRational& v, int digits = 12);

/// "p/q" (or "p" for integers); "inf" for infinity.
std::string format_exact(const Rational& v);
std::string format_exact(const ExtRational& v);

}  // namespace codedmr
