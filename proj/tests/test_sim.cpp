#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>

#include "codedmr/errors.hpp"
#include "codedmr/lagrange_code.hpp"
#include "codedmr/sim.hpp"

using namespace codedmr;

namespace {

struct SmallInstance {
  PrimeField field{2147483647};
  SystemConfig cfg{4, Rational(1), 3, 3, 2, Rational(1), Rational(3, 4)};
  CodeParams code = concatenated_params(field, 4, 3, 2, 2, 1);
  PlacementMap placement = assign_batches(4, 2, 1, 6);
  std::vector<unsigned> alive{0, 1, 2};
  Assignment assignment = make_assignment(alive, 3);
  MultiplicityProfile profile = multiplicity_profile(4, 3, 2, Rational(1), Rational(5), Rational(3));

  ShuffleSchedule schedule(Scheme s) const {
    return build_schedule(s, placement, profile, alive, assignment, cfg.alpha);
  }
};

}  // namespace

TEST(SampleMapTimes, ZeroDrawsGiveShiftOnly) {
  const std::vector<double> zeros(6, 0.0);
  const auto s = sample_map_times(Rational(1, 2), 4, zeros);
  for (double t : s.times) EXPECT_DOUBLE_EQ(t, 0.25);
  EXPECT_DOUBLE_EQ(s.map_delay_sample, 0.25);
  EXPECT_EQ(s.nonstragglers, (std::vector<unsigned>{0, 1, 2, 3}));
}

TEST(SampleMapTimes, PicksEarliest) {
  const std::vector<double> draws{3.0, 0.5, 2.0, 0.1};
  const auto s = sample_map_times(Rational(1), 2, draws);
  EXPECT_EQ(s.nonstragglers, (std::vector<unsigned>{1, 3}));
  EXPECT_DOUBLE_EQ(s.map_delay_sample, 0.75);
}

TEST(SampleMapTimes, Deterministic) {
  const SystemConfig cfg{30, Rational(1, 2), 120, 600, 1, Rational(1), Rational(3, 4)};
  const auto a = sample_map_times(cfg, 15, 99), b = sample_map_times(cfg, 15, 99);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.nonstragglers.size(), 15u);
  EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
}

TEST(MonteCarlo, SerialEqualsParallelBitwise) {
  const SystemConfig cfg{30, Rational(1, 2), 120, 600, 1, Rational(1), Rational(3, 4)};
  const auto s = map_delay_monte_carlo_serial(cfg, 15, 20000, 5);
  const auto p = map_delay_monte_carlo_parallel(cfg, 15, 20000, 5);
  EXPECT_EQ(s.mean, p.mean);
  EXPECT_LT(s.relative_error, 0.01);
}

TEST(MonteCarlo, TwoDeviceOrderStatistic) {
  const SystemConfig cfg{2, Rational(1, 2), 2, 2, 1, Rational(1), Rational(3, 4)};
  const auto r = map_delay_monte_carlo_parallel(cfg, 1, 100000, 17);
  EXPECT_DOUBLE_EQ(r.closed_form, 0.375);
  EXPECT_LT(r.relative_error, 0.01);
}

TEST(Assignment, RequiresDivisibility) {
  EXPECT_THROW(make_assignment({0, 1, 2}, 4), InfeasibleConfig);
  const auto a = make_assignment({3, 1}, 4);
  EXPECT_EQ(a.devices, (std::vector<unsigned>{1, 3}));
  EXPECT_EQ(a.functions_of(3), (std::vector<unsigned>{2, 3}));
}

TEST(Schedule, SmallInstanceMatchesClosedForm) {
  const SmallInstance s;
  const std::pair<Scheme, Rational> cases[] = {{Scheme::CodedMulticasting, Rational(1, 2)},
                                               {Scheme::ZeroForcing, Rational(10, 27)},
                                               {Scheme::Superposition, Rational(24, 77)}};
  for (const auto& [scheme, expected] : cases) {
    const auto sched = s.schedule(scheme);
    const auto v = verify_schedule(sched, s.placement, s.alive, s.assignment, 5);
    EXPECT_TRUE(v.ok) << (v.diagnostics.empty() ? "" : v.diagnostics.front());
    EXPECT_EQ(schedule_delay(sched, 3, 3), ExtRational(expected));
  }
}

TEST(Schedule, CodedMulticastDeliversOnePerMultiplicity) {
  const SmallInstance s;
  const auto sched = s.schedule(Scheme::CodedMulticasting);
  std::map<std::pair<unsigned, int>, int> got;  // (receiver, multiplicity) -> IVs
  for (const auto& tx : sched.transmissions)
    for (const auto& del : tx.payload) ++got[{del.receiver, tx.group_multiplicity}];
  for (unsigned k : s.alive) {
    EXPECT_EQ((got[{k, 2}]), 1);
    EXPECT_EQ((got[{k, 1}]), 1);
  }
}

TEST(Schedule, DeletedTransmissionFailsVerification) {
  const SmallInstance s;
  for (Scheme scheme : kAllSchemes) {
    auto sched = s.schedule(scheme);
    ASSERT_FALSE(sched.transmissions.empty());
    sched.transmissions.pop_back();
    EXPECT_FALSE(verify_schedule(sched, s.placement, s.alive, s.assignment, 5).ok);
  }
}

TEST(Schedule, WrongSenderFailsVerification) {
  const SmallInstance s;
  auto sched = s.schedule(Scheme::CodedMulticasting);
  for (auto& tx : sched.transmissions)
    if (tx.multicast_sender && !tx.payload.empty()) {
      tx.multicast_sender = tx.payload.front().receiver;
      break;
    }
  EXPECT_FALSE(verify_schedule(sched, s.placement, s.alive, s.assignment, 5).ok);
}

TEST(Schedule, EmptyWhenNothingNeeded) {
  const SmallInstance s;
  const auto empty = multiplicity_profile(4, 3, 2, Rational(1), Rational(3), Rational(3));
  const auto sched = build_schedule(Scheme::Superposition, s.placement, empty, s.alive, s.assignment, Rational(1, 2));
  EXPECT_TRUE(sched.transmissions.empty());
  EXPECT_TRUE(verify_schedule(sched, s.placement, s.alive, s.assignment, 3).ok);
  EXPECT_EQ(schedule_delay(sched, 3, 3), ExtRational(0L));
}

TEST(EndToEnd, EveryStragglerSingleton) {
  const SmallInstance s;
  const MultivariatePolynomial sq(s.field, 1, {{{1}, {2}}});
  const std::vector<MultivariatePolynomial> fns(3, sq);
  const std::vector<DataPoint> data{{{5}}, {{11}}, {{1234567}}};
  for (Scheme scheme : kAllSchemes)
    for (unsigned k = 0; k < 4; ++k) {
      const auto r = run_end_to_end(s.field, s.cfg, s.code, scheme, DeviceSet{1} << k, fns, data);
      EXPECT_TRUE(r.all_correct);
      EXPECT_TRUE(r.schedule_verified);
      EXPECT_EQ(r.residual(), 0);
    }
}

TEST(EndToEnd, NoStragglersUncoded) {
  const PrimeField f(2147483647);
  const SystemConfig cfg{3, Rational(1, 3), 3, 3, 2, Rational(1), Rational(1, 2)};
  const auto code = concatenated_params(f, 3, 3, 2, 1, 1);
  EXPECT_TRUE(code.uncoded());
  std::mt19937_64 rng(4);
  std::vector<MultivariatePolynomial> fns;
  for (int i = 0; i < 3; ++i) fns.push_back(MultivariatePolynomial::random(f, 2, 2, rng));
  const std::vector<DataPoint> data{{{1}, {2}}, {{3}, {4}}, {{5}, {6}}};
  for (Scheme scheme : kAllSchemes) {
    const auto r = run_end_to_end(f, cfg, code, scheme, 0, fns, data);
    EXPECT_TRUE(r.all_correct);
    EXPECT_TRUE(r.schedule_verified);
    EXPECT_EQ(r.residual(), 0);
  }
}

TEST(EndToEnd, IdentityOnSingleRow) {
  const PrimeField f(2147483647);
  const SystemConfig cfg{2, Rational(1), 1, 1, 1, Rational(1), Rational(1, 2)};
  const auto code = concatenated_params(f, 2, 1, 1, 2, 1);
  const MultivariatePolynomial id(f, 1, {{{1}, {1}}});
  const std::vector<MultivariatePolynomial> fns{id};
  const std::vector<DataPoint> data{{{987}}};
  const auto r = run_end_to_end(f, cfg, code, Scheme::CodedMulticasting, 0b10, fns, data);
  EXPECT_TRUE(r.all_correct);
  EXPECT_EQ(r.outputs[0][0].value, 987u);
}

TEST(EndToEnd, InfeasibleRejectedUpFront) {
  const SmallInstance s;
  const std::vector<MultivariatePolynomial> fns(3, MultivariatePolynomial(s.field, 1, {{{1}, {2}}}));
  const std::vector<DataPoint> data{{{1}}, {{2}}, {{3}}};
  // Two stragglers: q = 2 does not divide N = 3.
  EXPECT_THROW(run_end_to_end(s.field, s.cfg, s.code, Scheme::ZeroForcing, 0b1100, fns, data), InfeasibleConfig);
  // r2 = 1 with one straggler loses rows outright.
  const auto weak = concatenated_params(s.field, 4, 3, 2, 1, 1);
  EXPECT_THROW(run_end_to_end(s.field, s.cfg, weak, Scheme::ZeroForcing, 0b1000, fns, data), InfeasibleConfig);
}

TEST(EndToEnd, RandomConcreteInstances) {
  const PrimeField f(2147483647);
  std::mt19937_64 rng(99);
  int ran = 0;
  for (int t = 0; t < 200 && ran < 40; ++t) {
    const unsigned K = 3 + rng() % 5;
    const unsigned q = 1 + rng() % K;
    const std::size_t m = 1 + rng() % 5;
    const unsigned d = 1 + rng() % 3;
    const unsigned r2 = 1 + rng() % K;
    const std::size_t b = 1 + rng() % 2;
    const std::size_t rows = binom(K, r2).get_ui() * b;
    if (rows < m) continue;
    Rational r1(rows, m);
    r1.canonicalize();
    if (!feasibility(K, q, m, d, r1, r2) || r1 * r2 > K) continue;
    SystemConfig cfg{K, Rational(1), q, m, d, Rational(1), Rational(static_cast<long>(rng() % 5), 4)};
    cfg.alpha.canonicalize();
    const auto code = concatenated_params(f, K, m, d, r2, b);
    std::vector<MultivariatePolynomial> fns;
    for (unsigned n = 0; n < q; ++n) fns.push_back(MultivariatePolynomial::random(f, 2, d, rng));
    std::vector<DataPoint> data(m, DataPoint(2));
    for (auto& row : data)
      for (auto& x : row) x = f.random(rng);
    std::vector<unsigned> ids(K);
    std::iota(ids.begin(), ids.end(), 0u);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(K - q);
    for (Scheme scheme : kAllSchemes) {
      if (scheme == Scheme::ZeroForcing && cfg.alpha == 0) continue;
      const auto r = run_end_to_end(f, cfg, code, scheme, make_set(ids), fns, data);
      EXPECT_TRUE(r.all_correct) << K << ' ' << q << ' ' << m << ' ' << d << ' ' << r2 << ' ' << b;
      EXPECT_TRUE(r.schedule_verified) << (r.diagnostics.empty() ? "" : r.diagnostics.front());
      EXPECT_EQ(r.residual(), 0);
    }
    ++ran;
  }
  EXPECT_GE(ran, 20);
}
