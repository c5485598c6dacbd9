#include "codedmr/placement.hpp"

#include <algorithm>
#include <string>

#include "codedmr/errors.hpp"

namespace codedmr {

namespace {

constexpr std::size_t kMaxBatches = 1u << 22;
constexpr unsigned kMaxBruteForceDevices = 20;

// Next subset with the same popcount (Gosper's hack).
DeviceSet next_combination(DeviceSet x) {
  const DeviceSet c = x & (~x + 1);
  const DeviceSet r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

// Rows surviving when `alive` devices are the non-stragglers.
std::size_t surviving_rows(const PlacementMap& placement, DeviceSet alive) {
  std::size_t n = 0;
  for (const auto& batch : placement.batches)
    if (batch.devices & alive) n += batch.size;
  return n;
}

std::uint64_t binom_u64(unsigned n, unsigned k) {
  BigInt v = binom(n, k);
  return v.get_ui();
}

// Unranks the idx-th k-subset of [0, n) in colexicographic order.
DeviceSet unrank_combination(std::uint64_t idx, unsigned n, unsigned k) {
  DeviceSet s = 0;
  for (unsigned kk = k; kk > 0; --kk) {
    unsigned c = kk - 1;
    while (c + 1 < n && binom_u64(c + 1, kk) <= idx) ++c;
    idx -= binom_u64(c, kk);
    s |= DeviceSet{1} << c;
    n = c;
  }
  return s;
}

void check_bruteforce_limits(const PlacementMap& placement, unsigned q) {
  if (placement.K > kMaxBruteForceDevices)
    throw ResourceLimit("brute-force coverage is limited to K <= " + std::to_string(kMaxBruteForceDevices));
  if (q == 0 || q > placement.K) throw InvalidConfig("q must lie in [1, K]");
}

bool covered(const PlacementMap& placement, DeviceSet alive, std::size_t m_star, bool uncoded) {
  const std::size_t rows = surviving_rows(placement, alive);
  return uncoded ? rows == placement.rows() : rows >= m_star;
}

}  // namespace

std::vector<unsigned> members(DeviceSet s) {
  std::vector<unsigned> out;
  while (s) {
    out.push_back(static_cast<unsigned>(__builtin_ctzll(s)));
    s &= s - 1;
  }
  return out;
}

DeviceSet make_set(const std::vector<unsigned>& ids) {
  DeviceSet s = 0;
  for (unsigned k : ids) s |= DeviceSet{1} << k;
  return s;
}

void SystemConfig::validate() const {
  if (K == 0 || K > kMaxDevices) throw InvalidConfig("K must lie in [1, 64]");
  if (N == 0) throw InvalidConfig("N must be positive");
  if (m == 0) throw InvalidConfig("m must be positive");
  if (d == 0) throw InvalidConfig("d must be positive");
  if (mu * K < 1 || mu > 1) throw InvalidConfig("mu must lie in [1/K, 1]");
  if (mu * static_cast<unsigned long>(m) < 1) throw InvalidConfig("mu * m must be at least 1");
  if (alpha < 0 || alpha > 1) throw InvalidConfig("alpha must lie in [0, 1]");
  if (gamma < 0) throw InvalidConfig("gamma must be non-negative");
}

unsigned SystemConfig::max_r2() const {
  Rational v = mu * K;
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return static_cast<unsigned>(f.get_ui());
}

PlacementMap assign_batches(unsigned K, unsigned r2, std::size_t b, std::size_t m_prime) {
  if (K == 0 || K > kMaxDevices) throw InfeasibleBatching("K must lie in [1, 64]");
  if (r2 == 0 || r2 > K) throw InfeasibleBatching("r2 must lie in [1, K]");
  if (b == 0) throw InfeasibleBatching("batch size must be positive");
  const BigInt count = binom(K, r2);
  if (count > kMaxBatches) throw ResourceLimit("C(K, r2) = " + count.get_str() + " batches is too many to place");
  if (count * static_cast<unsigned long>(b) != static_cast<unsigned long>(m_prime))
    throw InfeasibleBatching("m' = " + std::to_string(m_prime) + " is not b * C(K, r2) = " + std::to_string(b) +
                             " * " + count.get_str());

  PlacementMap p;
  p.K = K;
  p.r2 = r2;
  p.b = b;
  p.per_device.resize(K);
  p.row_holders.resize(m_prime);

  // Lexicographic r2-subsets of {0..K-1}.
  std::vector<unsigned> idx(r2);
  for (unsigned i = 0; i < r2; ++i) idx[i] = i;
  std::size_t row = 0;
  while (true) {
    Batch batch{make_set(idx), row, b};
    for (std::size_t t = 0; t < b; ++t, ++row) {
      p.row_holders[row] = batch.devices;
      for (unsigned k : idx) p.per_device[k].push_back(row);
    }
    p.batches.push_back(batch);
    int i = static_cast<int>(r2) - 1;
    while (i >= 0 && idx[i] == K - r2 + static_cast<unsigned>(i)) --i;
    if (i < 0) break;
    ++idx[i];
    for (unsigned t = static_cast<unsigned>(i) + 1; t < r2; ++t) idx[t] = idx[t - 1] + 1;
  }
  return p;
}

bool feasibility(unsigned K, unsigned q, std::size_t m, unsigned d, const Rational& r1, unsigned r2) {
  if (q == 0 || q > K || r2 == 0 || r2 > K || r1 < 1) return false;
  if (r1 == 1) return r2 > K - q;
  const Rational m_star(static_cast<unsigned long>((m - 1) * d + 1));
  const Rational rows = r1 * static_cast<unsigned long>(m);
  if (rows < m_star) return false;
  const BigInt total = binom(K, r2);
  const BigInt lost = binom(static_cast<long>(K) - static_cast<long>(q), r2);
  return Rational(total - lost) >= m_star / rows * total;
}

unsigned q_min(unsigned K, const Rational& mu, std::size_t m, unsigned d) {
  const Rational ratio = Rational(static_cast<unsigned long>((m - 1) * d + 1)) / (mu * static_cast<unsigned long>(m));
  BigInt ceil_ratio;
  mpz_cdiv_q(ceil_ratio.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  const Rational muK = mu * K;
  BigInt floor_muK;
  mpz_fdiv_q(floor_muK.get_mpz_t(), muK.get_num_mpz_t(), muK.get_den_mpz_t());
  const BigInt second = BigInt(K) - floor_muK + 1;
  const BigInt best = ceil_ratio < second ? ceil_ratio : second;
  return static_cast<unsigned>(best.get_ui());
}

Rational stored_per_device(unsigned K, unsigned r2, const Rational& b) {
  Rational out = b * Rational(binom(static_cast<long>(K) - 1, static_cast<long>(r2) - 1));
  out.canonicalize();
  return out;
}

const Rational& MultiplicityProfile::count(int j) const {
  static const Rational kZero{0};
  auto it = counts.find(j);
  return it == counts.end() ? kZero : it->second;
}

MultiplicityProfile multiplicity_profile(unsigned K, unsigned q, unsigned r2, const Rational& b,
                                         const Rational& m_star, const Rational& stored) {
  MultiplicityProfile p;
  const long Kl = K, ql = q, r2l = r2;
  p.s_min = static_cast<int>(std::max(r2l - (Kl - ql), 0L));
  p.s_max = static_cast<int>(std::min(ql - 1, r2l));
  for (int j = p.s_min; j <= p.s_max; ++j) {
    Rational bj = b * Rational(binom(ql - 1, j) * binom(Kl - ql, r2l - j));
    bj.canonicalize();
    p.counts[j] = bj;
  }
  p.need = m_star - stored;
  p.need.canonicalize();
  if (p.need <= 0) {
    p.s_q = p.s_max + 1;
    return p;
  }
  // s_q = smallest s (over multiplicities >= 1) whose tail sum fits in need.
  const int lowest = std::max(p.s_min, 1);
  Rational tail{0};
  p.s_q = p.s_max + 1;
  for (int s = p.s_max; s >= lowest; --s) {
    if (tail + p.count(s) > p.need) break;
    tail += p.count(s);
    p.s_q = s;
  }
  p.remainder = p.need - tail;
  p.remainder.canonicalize();
  if (p.remainder > 0 && p.s_q - 1 < lowest)
    throw InfeasibleShuffle("non-straggling devices hold fewer than the " + format_exact(p.need) +
                            " IVs each device is missing");
  return p;
}

bool coverage_check_bruteforce_serial(const PlacementMap& placement, unsigned q, std::size_t m_star, bool uncoded) {
  check_bruteforce_limits(placement, q);
  const unsigned K = placement.K;
  const unsigned stragglers = K - q;
  const DeviceSet all = (K == 64) ? ~DeviceSet{0} : ((DeviceSet{1} << K) - 1);
  if (stragglers == 0) return covered(placement, all, m_star, uncoded);
  for (DeviceSet s = (DeviceSet{1} << stragglers) - 1; s <= all && !(s >> K); s = next_combination(s)) {
    if (!covered(placement, all & ~s, m_star, uncoded)) return false;
  }
  return true;
}

bool coverage_check_bruteforce_parallel(const PlacementMap& placement, unsigned q, std::size_t m_star,
                                        bool uncoded) {
  check_bruteforce_limits(placement, q);
  const unsigned K = placement.K;
  const unsigned stragglers = K - q;
  const DeviceSet all = (DeviceSet{1} << K) - 1;
  const auto total = static_cast<long long>(binom_u64(K, stragglers));
  if (stragglers == 0) return covered(placement, all, m_star, uncoded);
  // Each chunk unranks its first subset, then walks colex order with Gosper's step.
  constexpr long long kChunk = 4096;
  const long long chunks = (total + kChunk - 1) / kChunk;
  bool ok = true;
#pragma omp parallel for schedule(dynamic, 1) reduction(&& : ok)
  for (long long c = 0; c < chunks; ++c) {
    const long long end = std::min(total, (c + 1) * kChunk);
    DeviceSet s = unrank_combination(static_cast<std::uint64_t>(c * kChunk), K, stragglers);
    for (long long i = c * kChunk; i < end && ok; ++i, s = next_combination(s))
      ok = covered(placement, all & ~s, m_star, uncoded);
  }
  return ok;
}

}  // namespace codedmr
