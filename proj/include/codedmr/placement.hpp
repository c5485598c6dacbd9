#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "codedmr/rational.hpp"

namespace codedmr {

/// Bitmask over device ids 0..K-1 (K <= 64).
using DeviceSet = std::uint64_t;

inline constexpr unsigned kMaxDevices = 64;

inline bool contains(DeviceSet s, unsigned k) { return (s >> k) & 1U; }
inline unsigned set_size(DeviceSet s) { return static_cast<unsigned>(__builtin_popcountll(s)); }
std::vector<unsigned> members(DeviceSet s);
DeviceSet make_set(const std::vector<unsigned>& ids);

struct SystemConfig {
  unsigned K = 1;
  Rational mu{1};
  unsigned N = 1;
  std::size_t m = 1;
  unsigned d = 1;
  Rational gamma{1};
  Rational alpha{1};

  /// Throws InvalidConfig when an invariant fails: 1 <= K <= 64,
  /// 1/K <= mu <= 1, mu*m >= 1, alpha in [0,1], gamma >= 0, N, m, d >= 1.
  void validate() const;
  /// floor(mu K), the largest admissible repetition factor.
  unsigned max_r2() const;
};

struct Batch {
  DeviceSet devices = 0;
  std::size_t first_row = 0;
  std::size_t size = 0;
};

/// Lexicographic assignment of contiguous b-row batches to r2-subsets.
struct PlacementMap {
  unsigned K = 0;
  unsigned r2 = 0;
  std::size_t b = 0;
  std::vector<Batch> batches;
  std::vector<std::vector<std::size_t>> per_device;  // sorted row ids per device
  std::vector<DeviceSet> row_holders;                // devices storing each row

  std::size_t rows() const { return row_holders.size(); }
};

/// Throws InfeasibleBatching when m_prime != b C(K, r2) or r2 is out of range,
/// ResourceLimit when there are too many batches to enumerate.
PlacementMap assign_batches(unsigned K, unsigned r2, std::size_t b, std::size_t m_prime);

/// r1 = 1: r2 > K - q. r1 > 1: the worst q-subset keeps at least m* rows,
/// i.e. C(K, r2) - C(K - q, r2) >= m* C(K, r2) / (r1 m), plus r1 m >= m*.
bool feasibility(unsigned K, unsigned q, std::size_t m, unsigned d, const Rational& r1, unsigned r2);

unsigned q_min(unsigned K, const Rational& mu, std::size_t m, unsigned d);

/// b C(K-1, r2-1): rows stored per device.
Rational stored_per_device(unsigned K, unsigned r2, const Rational& b);

struct MultiplicityProfile {
  int s_min = 0;
  int s_max = 0;
  std::map<int, Rational> counts;  // B_j for j in [s_min, s_max]
  int s_q = 0;
  Rational remainder{0};
  Rational need{0};

  /// No shuffling required (need <= 0).
  bool empty() const { return need <= 0; }
  const Rational& count(int j) const;
};

/// Throws InfeasibleShuffle if the non-stragglers cannot supply `need` IVs.
MultiplicityProfile multiplicity_profile(unsigned K, unsigned q, unsigned r2, const Rational& b,
                                         const Rational& m_star, const Rational& stored);

/// Exhaustive check over every straggler set of size K - q. `uncoded`
/// demands that every row survives, otherwise at least m_star distinct rows.
/// Throws ResourceLimit for K > 20.
bool coverage_check_bruteforce_serial(const PlacementMap& placement, unsigned q, std::size_t m_star, bool uncoded);
bool coverage_check_bruteforce_parallel(const PlacementMap& placement, unsigned q, std::size_t m_star,
                                        bool uncoded);
inline bool coverage_check_bruteforce(const PlacementMap& placement, unsigned q, std::size_t m_star, bool uncoded) {
  return coverage_check_bruteforce_parallel(placement, q, m_star, uncoded);
}

}  // namespace codedmr
