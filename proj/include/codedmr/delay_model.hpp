#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codedmr/placement.hpp"
#include "codedmr/rational.hpp"

namespace codedmr {

enum class Scheme { CodedMulticasting, ZeroForcing, Superposition };
enum class Mode { Analytic, Concrete };

inline constexpr Scheme kAllSchemes[] = {Scheme::CodedMulticasting, Scheme::ZeroForcing, Scheme::Superposition};

std::string_view scheme_name(Scheme s);  // "cm", "zf", "sc"
Scheme parse_scheme(std::string_view s);   // throws InvalidConfig
std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view s);

/// Normalized Map delay (mu/2)(1 + sum_{j=K-q+1}^{K} 1/j).
Rational map_delay(const Rational& mu, unsigned q, unsigned K);

/// Delivered IVs per unit of normalized time for an IV group of multiplicity j:
/// CM -> j, ZF -> alpha min(q, 2j), SC -> (1-alpha) j + alpha min(q, 2j).
Rational gain(Scheme scheme, int j, unsigned q, const Rational& alpha);

/// Shuffle delay of a fixed profile; +inf when a required group has zero gain.
ExtRational shuffle_delay_fixed(Scheme scheme, const MultiplicityProfile& profile, std::size_t m, unsigned q,
                                const Rational& alpha);

/// Everything the closed form needs for one (r1, r2) code at q.
struct CodeChoice {
  Rational r1{1};
  unsigned r2 = 0;
  Rational b{0};
  Rational m_star{0};
  Rational stored{0};
};

/// Builds the choice for (r1, r2) under cfg. Does not check feasibility.
CodeChoice make_code_choice(const SystemConfig& cfg, const Rational& r1, unsigned r2);

/// Shuffle delay for a fixed (r1, r2); nullopt when infeasible for q.
std::optional<ExtRational> shuffle_delay_for_code(Scheme scheme, const SystemConfig& cfg, unsigned q,
                                                  const Rational& r1, unsigned r2);

/// Candidate Lagrange redundancies for repetition factor r2 (ascending, 1 first).
std::vector<Rational> r1_candidates(const SystemConfig& cfg, unsigned r2, Mode mode);

struct ShuffleOptimum {
  ExtRational delay = ExtRational::infinity();
  bool feasible = false;  // some (r1, r2) satisfied the constraints
  Rational r1{0};
  unsigned r2 = 0;
  Rational b{0};
};

/// Minimum over r2 in [1, floor(mu K)] and r1 candidates subject to
/// feasibility and r1 r2 <= mu K. Ties go to the smallest r1, then the
/// smallest r2.
ShuffleOptimum min_shuffle_delay(Scheme scheme, const SystemConfig& cfg, unsigned q, Mode mode);

struct DelayBreakdown {
  Scheme scheme = Scheme::CodedMulticasting;
  unsigned q = 0;
  Rational map_delay{0};
  ExtRational shuffle_delay = ExtRational::infinity();
  ExtRational total_delay = ExtRational::infinity();
  bool feasible = false;
  Rational r1{0};
  unsigned r2 = 0;
  Rational b{0};
};

DelayBreakdown total_delay(Scheme scheme, const SystemConfig& cfg, unsigned q, Mode mode);

/// total_delay for every q in [q_min, K], in order. The parallel variant
/// evaluates q values concurrently and returns the identical vector.
std::vector<DelayBreakdown> sweep_q_serial(Scheme scheme, const SystemConfig& cfg, Mode mode);
std::vector<DelayBreakdown> sweep_q_parallel(Scheme scheme, const SystemConfig& cfg, Mode mode);

/// argmin of total delay over q in [q_min, K]; ties go to the smaller q.
DelayBreakdown optimize_q(Scheme scheme, const SystemConfig& cfg, Mode mode);

}  // namespace codedmr
