#include "codedmr/delay_model.hpp"

#include <algorithm>
#include <cassert>

#include "codedmr/errors.hpp"

namespace codedmr {

namespace {

constexpr int kInteriorGridPoints = 64;

Rational floor_rational(const Rational& v) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return Rational(f);
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::CodedMulticasting:
      return "cm";
    case Scheme::ZeroForcing:
      return "zf";
    case Scheme::Superposition:
      return "sc";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "cm" || s == "coded_multicasting") return Scheme::CodedMulticasting;
  if (s == "zf" || s == "zero_forcing") return Scheme::ZeroForcing;
  if (s == "sc" || s == "superposition") return Scheme::Superposition;
  throw InvalidConfig("unknown scheme '" + std::string(s) + "'");
}

std::string_view mode_name(Mode m) { return m == Mode::Analytic ? "analytic" : "concrete"; }

Mode parse_mode(std::string_view s) {
  if (s == "analytic") return Mode::Analytic;
  if (s == "concrete") return Mode::Concrete;
  throw InvalidConfig("unknown mode '" + std::string(s) + "'");
}

Rational map_delay(const Rational& mu, unsigned q, unsigned K) {
  Rational harmonic{0};
  for (unsigned j = K - q + 1; j <= K; ++j) harmonic += Rational(1, j);
  Rational out = mu / 2 * (1 + harmonic);
  out.canonicalize();
  return out;
}

Rational gain(Scheme scheme, int j, unsigned q, const Rational& alpha) {
  const Rational cm(j);
  const Rational zf = alpha * std::min<long>(q, 2L * j);
  Rational out;
  switch (scheme) {
    case Scheme::CodedMulticasting:
      out = cm;
      break;
    case Scheme::ZeroForcing:
      out = zf;
      break;
    case Scheme::Superposition:
      out = (1 - alpha) * cm + zf;
      break;
  }
  out.canonicalize();
  return out;
}

ExtRational shuffle_delay_fixed(Scheme scheme, const MultiplicityProfile& profile, std::size_t m, unsigned q,
                                const Rational& alpha) {
  if (profile.empty()) return ExtRational(0);
  const Rational mm(static_cast<unsigned long>(m));
  ExtRational total(0);
  auto add_group = [&](const Rational& count, int j) {
    if (count == 0) return;
    const Rational g = gain(scheme, j, q, alpha);
    if (g == 0) {
      total += ExtRational::infinity();
      return;
    }
    total += ExtRational(Rational(count / (mm * g)));
  };
  for (int j = profile.s_q; j <= profile.s_max; ++j) add_group(profile.count(j), j);
  if (profile.remainder > 0) {
    assert(profile.s_q - 1 >= 1);
    add_group(profile.remainder, profile.s_q - 1);
  }
  return total;
}

CodeChoice make_code_choice(const SystemConfig& cfg, const Rational& r1, unsigned r2) {
  CodeChoice c;
  c.r1 = r1;
  c.r2 = r2;
  const auto m = static_cast<unsigned long>(cfg.m);
  c.b = r1 * m / Rational(binom(cfg.K, r2));
  c.b.canonicalize();
  const unsigned long d_prime = (r1 == 1) ? 1 : cfg.d;
  c.m_star = Rational((m - 1) * d_prime + 1);
  c.stored = stored_per_device(cfg.K, r2, c.b);
  return c;
}

std::optional<ExtRational> shuffle_delay_for_code(Scheme scheme, const SystemConfig& cfg, unsigned q,
                                                  const Rational& r1, unsigned r2) {
  if (r1 * r2 > cfg.mu * cfg.K) return std::nullopt;
  if (!feasibility(cfg.K, q, cfg.m, cfg.d, r1, r2)) return std::nullopt;
  const CodeChoice c = make_code_choice(cfg, r1, r2);
  const MultiplicityProfile profile = multiplicity_profile(cfg.K, q, r2, c.b, c.m_star, c.stored);
  return shuffle_delay_fixed(scheme, profile, cfg.m, q, cfg.alpha);
}

std::vector<Rational> r1_candidates(const SystemConfig& cfg, unsigned r2, Mode mode) {
  std::vector<Rational> out;
  const Rational top = cfg.mu * cfg.K / r2;
  const auto m = static_cast<unsigned long>(cfg.m);
  const BigInt batches = binom(cfg.K, r2);
  if (mode == Mode::Analytic) {
    out.emplace_back(1);
    if (top > 1) {
      for (int i = 1; i <= kInteriorGridPoints; ++i) {
        Rational r = 1 + (top - 1) * Rational(i, kInteriorGridPoints + 1);
        r.canonicalize();
        out.push_back(r);
      }
      out.push_back(top);
    }
    return out;
  }
  // Concrete: r1 = C(K, r2) b / m for integer b >= 1.
  if (batches == 0) return out;
  Rational r1_unit = Rational(batches) / m;
  r1_unit.canonicalize();
  if (BigInt(m) % batches == 0) out.emplace_back(1);
  // Smallest b with r1 > 1, i.e. b > m / C(K, r2).
  const Rational lo = floor_rational(Rational(BigInt(m), batches)) + 1;
  const Rational hi = floor_rational(top / r1_unit);
  for (BigInt b = lo.get_num(); b <= hi.get_num(); ++b) {
    Rational r = r1_unit * Rational(b);
    r.canonicalize();
    if (r > 1 && r <= top) out.push_back(r);
  }
  return out;
}

ShuffleOptimum min_shuffle_delay(Scheme scheme, const SystemConfig& cfg, unsigned q, Mode mode) {
  ShuffleOptimum best;
  if (q == 0 || q > cfg.K) return best;
  const unsigned r2_max = std::min(cfg.max_r2(), cfg.K);
  for (unsigned r2 = 1; r2 <= r2_max; ++r2) {
    for (const Rational& r1 : r1_candidates(cfg, r2, mode)) {
      auto delay = shuffle_delay_for_code(scheme, cfg, q, r1, r2);
      if (!delay) continue;
      // Ties go to the smaller r1 (less coding), then the smaller r2.
      const bool better = !best.feasible || *delay < best.delay ||
                          (*delay == best.delay && (r1 < best.r1 || (r1 == best.r1 && r2 < best.r2)));
      if (better) {
        best.feasible = true;
        best.delay = *delay;
        best.r1 = r1;
        best.r2 = r2;
        best.b = make_code_choice(cfg, r1, r2).b;
      }
    }
  }
  return best;
}

DelayBreakdown total_delay(Scheme scheme, const SystemConfig& cfg, unsigned q, Mode mode) {
  DelayBreakdown out;
  out.scheme = scheme;
  out.q = q;
  out.map_delay = map_delay(cfg.mu, q, cfg.K);
  const ShuffleOptimum s = min_shuffle_delay(scheme, cfg, q, mode);
  out.feasible = s.feasible;
  out.shuffle_delay = s.delay;
  out.r1 = s.r1;
  out.r2 = s.r2;
  out.b = s.b;
  out.total_delay = ExtRational(Rational(cfg.gamma * out.map_delay)) + out.shuffle_delay;
  return out;
}

std::vector<DelayBreakdown> sweep_q_serial(Scheme scheme, const SystemConfig& cfg, Mode mode) {
  std::vector<DelayBreakdown> out;
  for (unsigned q = q_min(cfg.K, cfg.mu, cfg.m, cfg.d); q <= cfg.K; ++q) out.push_back(total_delay(scheme, cfg, q, mode));
  return out;
}

std::vector<DelayBreakdown> sweep_q_parallel(Scheme scheme, const SystemConfig& cfg, Mode mode) {
  const unsigned lo = q_min(cfg.K, cfg.mu, cfg.m, cfg.d);
  if (lo > cfg.K) return {};
  const long n = static_cast<long>(cfg.K - lo + 1);
  std::vector<DelayBreakdown> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = total_delay(scheme, cfg, lo + static_cast<unsigned>(i), mode);
  return out;
}

DelayBreakdown optimize_q(Scheme scheme, const SystemConfig& cfg, Mode mode) {
  const auto rows = sweep_q_parallel(scheme, cfg, mode);
  DelayBreakdown best;
  best.scheme = scheme;
  bool have = false;
  for (const auto& row : rows) {
    if (!have || row.total_delay < best.total_delay) {
      best = row;
      have = true;
    }
  }
  return best;
}

}  // namespace codedmr
