#include "codedmr/ff_poly.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "codedmr/errors.hpp"

namespace codedmr {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Enumerates exponent vectors of total degree <= max_degree in lexicographic order.
void enumerate_monomials(std::size_t arity, unsigned max_degree, std::vector<unsigned>& current,
                         unsigned used, std::vector<std::vector<unsigned>>& out) {
  if (current.size() == arity) {
    out.push_back(current);
    return;
  }
  for (unsigned e = 0; e + used <= max_degree; ++e) {
    current.push_back(e);
    enumerate_monomials(arity, max_degree, current, used + e, out);
    current.pop_back();
  }
}

unsigned total_degree(const std::vector<unsigned>& exps) {
  unsigned s = 0;
  for (unsigned e : exps) s += e;
  return s;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic Miller-Rabin bases for 64-bit inputs.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t modulus) : p_(modulus) {
  if (modulus >= (1ULL << 62) || !is_prime(modulus))
    throw InvalidConfig("field modulus " + std::to_string(modulus) + " is not a prime below 2^62");
}

FieldElement PrimeField::element(std::int64_t v) const {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return {static_cast<std::uint64_t>(r)};
}

FieldElement PrimeField::pow(FieldElement a, std::uint64_t e) const { return {powmod(a.value, e, p_)}; }

FieldElement PrimeField::inv(FieldElement a) const {
  if (a.value == 0) throw DivisionByZero("inverse of zero in GF(" + std::to_string(p_) + ")");
  return {powmod(a.value, p_ - 2, p_)};
}

FieldElement PrimeField::random(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint64_t> dist(0, p_ - 1);
  return {dist(rng)};
}

FieldElement field_inverse(const PrimeField& field, FieldElement x) { return field.inv(x); }

MultivariatePolynomial::MultivariatePolynomial(const PrimeField& field, std::size_t arity, std::vector<Term> terms)
    : arity_(arity) {
  std::map<std::vector<unsigned>, FieldElement> merged;
  for (auto& t : terms) {
    if (t.exponents.size() != arity)
      throw ShapeError("term has " + std::to_string(t.exponents.size()) + " exponents, expected " +
                       std::to_string(arity));
    auto [it, inserted] = merged.try_emplace(t.exponents, FieldElement{t.coeff.value % field.modulus()});
    if (!inserted) it->second = field.add(it->second, FieldElement{t.coeff.value % field.modulus()});
  }
  for (auto& [exps, c] : merged) {
    if (c.value == 0) continue;
    degree_ = std::max(degree_, total_degree(exps));
    terms_.push_back({c, exps});
  }
}

MultivariatePolynomial MultivariatePolynomial::random(const PrimeField& field, std::size_t arity, unsigned degree,
                                                      std::mt19937_64& rng) {
  std::vector<std::vector<unsigned>> monomials;
  std::vector<unsigned> scratch;
  enumerate_monomials(arity, degree, scratch, 0, monomials);
  std::vector<Term> terms;
  terms.reserve(monomials.size());
  for (auto& exps : monomials) terms.push_back({field.random(rng), exps});
  if (degree > 0 && arity > 0) {
    // Force the pure x_0^degree term to be nonzero so the total degree is exact.
    for (auto& t : terms) {
      if (t.exponents[0] == degree) {
        while (t.coeff.value == 0) t.coeff = field.random(rng);
      }
    }
  }
  return MultivariatePolynomial(field, arity, std::move(terms));
}

FieldElement poly_eval(const PrimeField& field, const MultivariatePolynomial& f, const DataPoint& x) {
  if (x.size() != f.arity())
    throw ShapeError("data point has " + std::to_string(x.size()) + " coordinates, polynomial expects " +
                     std::to_string(f.arity()));
  // powers[i][e] = x_i^e
  std::vector<std::vector<FieldElement>> powers(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    powers[i].resize(f.degree() + 1);
    powers[i][0] = field.one();
    for (unsigned e = 1; e <= f.degree(); ++e) powers[i][e] = field.mul(powers[i][e - 1], x[i]);
  }
  FieldElement acc = field.zero();
  for (const auto& t : f.terms()) {
    FieldElement v = t.coeff;
    for (std::size_t i = 0; i < x.size(); ++i) v = field.mul(v, powers[i][t.exponents[i]]);
    acc = field.add(acc, v);
  }
  return acc;
}

UnivariatePolynomial::UnivariatePolynomial(std::vector<FieldElement> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().value == 0) coeffs_.pop_back();
}

std::vector<FieldElement> barycentric_weights(const PrimeField& field, std::span<const FieldElement> nodes) {
  const std::size_t n = nodes.size();
  std::vector<FieldElement> w(n, field.one());
  for (std::size_t i = 0; i < n; ++i) {
    FieldElement denom = field.one();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      FieldElement diff = field.sub(nodes[i], nodes[j]);
      if (diff.value == 0) throw DegenerateNodes("repeated interpolation node " + std::to_string(nodes[i].value));
      denom = field.mul(denom, diff);
    }
    w[i] = field.inv(denom);
  }
  return w;
}

UnivariatePolynomial interpolate(const PrimeField& field, std::span<const InterpolationPoint> points) {
  const std::size_t n = points.size();
  if (n == 0) throw DegenerateNodes("interpolation needs at least one point");
  std::vector<FieldElement> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = points[i].x;
  const auto w = barycentric_weights(field, xs);

  // master(z) = prod_i (z - x_i), degree n, coefficients low to high.
  std::vector<FieldElement> master(n + 1, field.zero());
  master[0] = field.one();
  for (std::size_t i = 0; i < n; ++i) {
    const FieldElement neg_x = field.neg(xs[i]);
    for (std::size_t k = i + 1; k > 0; --k) master[k] = field.add(master[k - 1], field.mul(master[k], neg_x));
    master[0] = field.mul(master[0], neg_x);
  }

  std::vector<FieldElement> out(n, field.zero());
  std::vector<FieldElement> quotient(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FieldElement scale = field.mul(points[i].y, w[i]);
    if (scale.value == 0) continue;
    // quotient = master / (z - x_i) by synthetic division, high to low.
    FieldElement carry = field.zero();
    for (std::size_t k = n; k > 0; --k) {
      carry = field.add(master[k], field.mul(carry, xs[i]));
      quotient[k - 1] = carry;
    }
    for (std::size_t k = 0; k < n; ++k) out[k] = field.add(out[k], field.mul(scale, quotient[k]));
  }
  return UnivariatePolynomial(std::move(out));
}

FieldElement eval_univariate(const PrimeField& field, const UnivariatePolynomial& g, FieldElement z) {
  FieldElement acc = field.zero();
  const auto& c = g.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = field.add(field.mul(acc, z), *it);
  return acc;
}

}  // namespace codedmr
