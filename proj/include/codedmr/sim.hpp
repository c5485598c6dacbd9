#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codedmr/delay_model.hpp"
#include "codedmr/ff_poly.hpp"
#include "codedmr/lagrange_code.hpp"
#include "codedmr/placement.hpp"

namespace codedmr {

// ---------------------------------------------------------------------------
// Map phase: straggler sampling
// ---------------------------------------------------------------------------

struct MapSample {
  std::vector<double> times;            // per device, normalized units
  std::vector<unsigned> nonstragglers;  // q earliest finishers, ascending id
  double map_delay_sample = 0;          // q-th order statistic
};

/// T_k = (mu/2)(1 + X_k) from the given standard-exponential draws X_k
/// (one per device). Ties in completion time go to the lower device id.
MapSample sample_map_times(const Rational& mu, unsigned q, std::span<const double> exponential_draws);

/// Same, drawing X_k from a generator seeded by `seed`.
MapSample sample_map_times(const SystemConfig& cfg, unsigned q, std::uint64_t seed);

/// Seed for trial `trial` under master seed `seed`; trials are independent of
/// execution order.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

struct MonteCarloResult {
  std::uint64_t trials = 0;
  double mean = 0;
  double closed_form = 0;
  double relative_error = 0;
};

MonteCarloResult map_delay_monte_carlo_serial(const SystemConfig& cfg, unsigned q, std::uint64_t trials,
                                              std::uint64_t seed);
/// Bit-identical to the serial version for any thread count.
MonteCarloResult map_delay_monte_carlo_parallel(const SystemConfig& cfg, unsigned q, std::uint64_t trials,
                                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Shuffle phase: schedules
// ---------------------------------------------------------------------------

/// Reduce-function assignment: non-stragglers in ascending id order take
/// consecutive blocks of N/q function ids.
struct Assignment {
  std::vector<unsigned> devices;                 // ascending
  std::vector<std::vector<unsigned>> functions;  // functions[i] belongs to devices[i]

  const std::vector<unsigned>& functions_of(unsigned device) const;
};

/// Throws InfeasibleConfig when q does not divide N.
Assignment make_assignment(const std::vector<unsigned>& nonstragglers, unsigned N);

struct IvId {
  unsigned function = 0;
  std::size_t row = 0;

  friend bool operator==(IvId, IvId) = default;
  friend auto operator<=>(IvId, IvId) = default;
};

enum class Layer { Multicast, Precoded };

struct Delivery {
  IvId iv;
  unsigned receiver = 0;
  Layer layer = Layer::Multicast;
};

struct Transmission {
  int group_multiplicity = 0;
  DeviceSet senders = 0;
  DeviceSet receivers = 0;
  // Coded-multicast layer: one sender XORs one IV per receiver.
  std::optional<unsigned> multicast_sender;
  // Precoded layer: two clusters exchanging IVs simultaneously.
  std::vector<DeviceSet> clusters;
  std::vector<Delivery> payload;
  ExtRational duration;  // |payload| / gain, normalized IV-time
};

struct ShuffleSchedule {
  Scheme scheme = Scheme::CodedMulticasting;
  unsigned q = 0;
  Rational alpha{1};
  std::vector<Transmission> transmissions;
};

/// Delivers to every non-straggler, for each assigned function, the full
/// groups s_max..s_q and `remainder` IVs (smallest row ids) of group s_q-1.
/// Throws ScheduleError when the placement does not match the profile.
ShuffleSchedule build_schedule(Scheme scheme, const PlacementMap& placement, const MultiplicityProfile& profile,
                               const std::vector<unsigned>& nonstragglers, const Assignment& assignment,
                               const Rational& alpha);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> diagnostics;

  explicit operator bool() const { return ok; }
};

/// Completeness, side-information decodability of multicast deliveries,
/// cluster validity of precoded deliveries, and group ordering.
VerifyResult verify_schedule(const ShuffleSchedule& schedule, const PlacementMap& placement,
                             const std::vector<unsigned>& nonstragglers, const Assignment& assignment,
                             std::size_t m_star);

/// Sum of durations normalized by N m.
ExtRational schedule_delay(const ShuffleSchedule& schedule, std::size_t m, unsigned N);

// ---------------------------------------------------------------------------
// End to end
// ---------------------------------------------------------------------------

struct EndToEndReport {
  std::vector<unsigned> nonstragglers;
  std::vector<std::vector<FieldElement>> outputs;   // outputs[n][i] decoded f_n(a_i)
  std::vector<std::vector<FieldElement>> expected;  // direct evaluation
  bool all_correct = false;
  bool schedule_verified = false;
  std::vector<std::string> diagnostics;
  ExtRational schedule_delay;
  ExtRational closed_form_delay;
  std::size_t transmissions = 0;

  /// |schedule - closed form|; zero when both are infinite.
  Rational residual() const;
};

/// Encode, Map at the non-stragglers, Shuffle, Reduce, compare against
/// direct evaluation. Throws InfeasibleConfig before any phase when the
/// code is infeasible for q, q does not divide N, or shapes disagree.
EndToEndReport run_end_to_end(const PrimeField& field, const SystemConfig& cfg, const CodeParams& code,
                              Scheme scheme, DeviceSet straggler_set,
                              std::span<const MultivariatePolynomial> functions, std::span<const DataPoint> data);

/// Straggler set drawn from sampled Map times (the K - q slowest devices).
EndToEndReport run_end_to_end_sampled(const PrimeField& field, const SystemConfig& cfg, const CodeParams& code,
                                      Scheme scheme, unsigned q, std::span<const MultivariatePolynomial> functions,
                                      std::span<const DataPoint> data, std::uint64_t seed);

}  // namespace codedmr
