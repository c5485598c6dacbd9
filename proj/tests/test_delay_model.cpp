#include <gtest/gtest.h>

#include "codedmr/delay_model.hpp"
#include "codedmr/errors.hpp"

using namespace codedmr;

namespace {

SystemConfig k30(unsigned d = 1, Rational alpha = Rational(3, 4)) {
  return {30, Rational(1, 2), 120, 600, d, Rational(1), alpha};
}

SystemConfig small() { return {4, Rational(1), 3, 3, 2, Rational(1), Rational(3, 4)}; }

Rational q(const char* s) { return Rational(s); }

}  // namespace

TEST(MapDelay, Examples) {
  EXPECT_EQ(map_delay(Rational(1), 1, 1), 1);
  EXPECT_EQ(format_sig(map_delay(Rational(1, 2), 30, 30)), "1.24874678273");
  EXPECT_EQ(format_sig(map_delay(Rational(1, 2), 15, 30)), "0.419189534423");
  EXPECT_EQ(map_delay(Rational(1, 2), 1, 2), Rational(3, 8));
}

TEST(MapDelay, StrictlyIncreasing) {
  for (unsigned K = 1; K <= 40; ++K)
    for (unsigned qq = 2; qq <= K; ++qq)
      EXPECT_LT(map_delay(Rational(1, 3), qq - 1, K), map_delay(Rational(1, 3), qq, K));
}

TEST(Gain, Examples) {
  EXPECT_EQ(gain(Scheme::ZeroForcing, 2, 3, Rational(3, 4)), Rational(9, 4));
  EXPECT_EQ(gain(Scheme::Superposition, 1, 3, Rational(3, 4)), Rational(7, 4));
  EXPECT_EQ(gain(Scheme::CodedMulticasting, 3, 5, Rational(1, 4)), 3);
  for (int j = 0; j <= 6; ++j)
    for (unsigned qq = 1; qq <= 8; ++qq) {
      EXPECT_EQ(gain(Scheme::Superposition, j, qq, Rational(0)), gain(Scheme::CodedMulticasting, j, qq, Rational(0)));
      EXPECT_EQ(gain(Scheme::Superposition, j, qq, Rational(1)), gain(Scheme::ZeroForcing, j, qq, Rational(1)));
    }
}

TEST(ShuffleDelay, SmallInstance) {
  const auto prof = multiplicity_profile(4, 3, 2, Rational(1), Rational(5), Rational(3));
  EXPECT_EQ(shuffle_delay_fixed(Scheme::CodedMulticasting, prof, 3, 3, Rational(3, 4)), ExtRational(Rational(1, 2)));
  EXPECT_EQ(shuffle_delay_fixed(Scheme::ZeroForcing, prof, 3, 3, Rational(3, 4)), ExtRational(Rational(10, 27)));
  EXPECT_EQ(shuffle_delay_fixed(Scheme::Superposition, prof, 3, 3, Rational(3, 4)), ExtRational(Rational(24, 77)));
  EXPECT_TRUE(shuffle_delay_fixed(Scheme::ZeroForcing, prof, 3, 3, Rational(0)).is_infinite());
  const auto empty = multiplicity_profile(4, 3, 2, Rational(1), Rational(3), Rational(3));
  EXPECT_EQ(shuffle_delay_fixed(Scheme::ZeroForcing, empty, 3, 3, Rational(0)), ExtRational(0L));
}

TEST(ShuffleDelay, ZeroForcingScalesWithInverseAlpha) {
  const auto cfg = k30();
  for (unsigned qq : {5u, 10u, 20u}) {
    SystemConfig a = cfg, b = cfg;
    a.alpha = Rational(1, 4);
    b.alpha = Rational(9, 10);
    const auto da = shuffle_delay_for_code(Scheme::ZeroForcing, a, qq, Rational(15, 14), 14);
    const auto db = shuffle_delay_for_code(Scheme::ZeroForcing, b, qq, Rational(15, 14), 14);
    ASSERT_TRUE(da && db);
    EXPECT_EQ(da->value() * a.alpha, db->value() * b.alpha);
  }
}

TEST(MinShuffleDelay, Examples) {
  SystemConfig full{2, Rational(1), 2, 2, 1, Rational(1), Rational(3, 4)};
  const auto o = min_shuffle_delay(Scheme::CodedMulticasting, full, 2, Mode::Analytic);
  EXPECT_EQ(o.delay, ExtRational(0L));
  EXPECT_EQ(o.r1, 1);
  EXPECT_EQ(o.r2, 2u);

  SystemConfig k4{4, Rational(1, 2), 3, 3, 2, Rational(1), Rational(3, 4)};
  const auto c = min_shuffle_delay(Scheme::CodedMulticasting, k4, 3, Mode::Analytic);
  EXPECT_EQ(c.delay, ExtRational(Rational(5, 12)));
  EXPECT_EQ(c.r1, 1);
  EXPECT_EQ(c.r2, 2u);

  const auto none = min_shuffle_delay(Scheme::Superposition, k30(), 1, Mode::Analytic);
  EXPECT_TRUE(none.delay.is_infinite());
  EXPECT_FALSE(none.feasible);
}

struct K30Row {
  unsigned q;
  const char* cm;
  const char* zf;
  const char* sc;
  const char* r1;
  unsigned r2;
};

class K30Oracle : public ::testing::TestWithParam<K30Row> {};

TEST_P(K30Oracle, MatchesIndependentScript) {
  const auto row = GetParam();
  const auto cfg = k30();
  const auto cm = min_shuffle_delay(Scheme::CodedMulticasting, cfg, row.q, Mode::Analytic);
  const auto zf = min_shuffle_delay(Scheme::ZeroForcing, cfg, row.q, Mode::Analytic);
  const auto sc = min_shuffle_delay(Scheme::Superposition, cfg, row.q, Mode::Analytic);
  EXPECT_EQ(cm.delay, ExtRational(q(row.cm)));
  if (*row.zf) EXPECT_EQ(zf.delay, ExtRational(q(row.zf)));
  if (*row.sc) EXPECT_EQ(sc.delay, ExtRational(q(row.sc)));
  if (*row.r1) {
    EXPECT_EQ(cm.r1, q(row.r1));
    EXPECT_EQ(cm.r2, row.r2);
  }
}

INSTANTIATE_TEST_SUITE_P(
    K30Config, K30Oracle,
    ::testing::Values(K30Row{2, "1/2", "1/3", "2/7", "15", 1},
                      K30Row{5, "54/203", "2903/15834", "1237/7917", "15/11", 11},
                      K30Row{10, "503492/4412205", "248113/3151575", "901638338/13441047165", "15/14", 14},
                      K30Row{16, "155117519/2326762800", "", "", "1", 15},
                      K30Row{20, "186825239/3605401800", "337861/9454725", "1288853096929/42306648252750", "", 0},
                      K30Row{25, "6358411/156756600", "359263/12919500", "1736653/73171350", "", 0},
                      K30Row{30, "1/30", "1/45", "2/105", "", 0}),
    [](const ::testing::TestParamInfo<K30Row>& info) { return "q" + std::to_string(info.param.q); });

TEST(Dominance, ExhaustiveSmallK) {
  for (unsigned K = 2; K <= 5; ++K)
    for (unsigned t = 1; t <= K; ++t)
      for (std::size_t m = 1; m <= 3; ++m)
        for (unsigned d = 1; d <= 2; ++d)
          for (int a = 0; a <= 4; a += 2) {
            SystemConfig cfg{K, Rational(t, K), 1, m, d, Rational(1), Rational(a, 4)};
            cfg.mu.canonicalize();
            cfg.alpha.canonicalize();
            for (unsigned qq = 1; qq <= K; ++qq)
              for (unsigned r2 = 1; r2 <= cfg.max_r2(); ++r2)
                for (const auto& r1 : r1_candidates(cfg, r2, Mode::Analytic)) {
                  const auto cm = shuffle_delay_for_code(Scheme::CodedMulticasting, cfg, qq, r1, r2);
                  if (!cm) continue;
                  const auto zf = shuffle_delay_for_code(Scheme::ZeroForcing, cfg, qq, r1, r2);
                  const auto sc = shuffle_delay_for_code(Scheme::Superposition, cfg, qq, r1, r2);
                  ASSERT_TRUE(zf && sc);
                  EXPECT_LE(*sc, *cm);
                  EXPECT_LE(*sc, *zf);
                  if (a == 0) EXPECT_EQ(*sc, *cm);
                  if (a == 4) EXPECT_EQ(*sc, *zf);
                }
          }
}

TEST(TotalDelay, Additivity) {
  SystemConfig cfg = small();
  const auto t = total_delay(Scheme::Superposition, cfg, 3, Mode::Concrete);
  ASSERT_TRUE(t.feasible);
  EXPECT_EQ(t.total_delay, ExtRational(cfg.gamma * t.map_delay) + t.shuffle_delay);
  EXPECT_EQ(t.map_delay, map_delay(cfg.mu, 3, 4));
  cfg.gamma = 0;
  const auto z = total_delay(Scheme::Superposition, cfg, 3, Mode::Concrete);
  EXPECT_EQ(z.total_delay, z.shuffle_delay);
}

TEST(TotalDelay, K30SuperpositionNeverWorse) {
  const auto cfg = k30();
  for (unsigned qq = 2; qq <= 30; ++qq) {
    const auto sc = total_delay(Scheme::Superposition, cfg, qq, Mode::Analytic);
    EXPECT_LE(sc.total_delay, total_delay(Scheme::CodedMulticasting, cfg, qq, Mode::Analytic).total_delay);
    EXPECT_LE(sc.total_delay, total_delay(Scheme::ZeroForcing, cfg, qq, Mode::Analytic).total_delay);
  }
}

TEST(OptimizeQ, FullStorageOptimumIsPureMap) {
  SystemConfig cfg{6, Rational(1), 6, 4, 1, Rational(1), Rational(1, 2)};
  for (Scheme s : kAllSchemes) {
    const auto o = optimize_q(s, cfg, Mode::Analytic);
    EXPECT_EQ(o.shuffle_delay, ExtRational(0L));
    EXPECT_EQ(o.q, q_min(cfg.K, cfg.mu, cfg.m, cfg.d));
  }
}

TEST(OptimizeQ, SerialAndParallelSweepsAgree) {
  for (Mode mode : {Mode::Analytic, Mode::Concrete}) {
    const auto cfg = k30(2);
    for (Scheme s : kAllSchemes) {
      const auto a = sweep_q_serial(s, cfg, mode);
      const auto b = sweep_q_parallel(s, cfg, mode);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].total_delay, b[i].total_delay);
        EXPECT_EQ(a[i].r1, b[i].r1);
        EXPECT_EQ(a[i].r2, b[i].r2);
      }
    }
  }
}

TEST(R1Candidates, ConcreteAreIntegralBatches) {
  const auto cfg = k30();
  for (unsigned r2 = 1; r2 <= 3; ++r2)
    for (const auto& r1 : r1_candidates(cfg, r2, Mode::Concrete)) {
      const Rational b = r1 * Rational(600) / Rational(binom(30, r2));
      EXPECT_EQ(b.get_den(), 1);
      EXPECT_GE(r1, 1);
      EXPECT_LE(r1 * r2, 15);
    }
  const auto analytic = r1_candidates(cfg, 14, Mode::Analytic);
  EXPECT_EQ(analytic.front(), 1);
  EXPECT_EQ(analytic.back(), Rational(15, 14));
}

TEST(Names, RoundTrip) {
  for (Scheme s : kAllSchemes) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_EQ(parse_mode("concrete"), Mode::Concrete);
  EXPECT_THROW(parse_scheme("xx"), InvalidConfig);
}

TEST(DegreeSweep, MatchesIndependentScript) {
  const char* const q10[] = {"901638338/13441047165", "852833/1918350", "680557/639450", "18471/10150", "1348/525"};
  for (unsigned d = 1; d <= 5; ++d) {
    const auto o = min_shuffle_delay(Scheme::Superposition, k30(d), 10, Mode::Analytic);
    EXPECT_EQ(o.delay, ExtRational(q(q10[d - 1]))) << d;
  }
  EXPECT_TRUE(min_shuffle_delay(Scheme::Superposition, k30(6), 10, Mode::Analytic).delay.is_infinite());
  for (unsigned d = 1; d <= 6; ++d) {
    const auto o = min_shuffle_delay(Scheme::Superposition, k30(d), 20, Mode::Analytic);
    EXPECT_EQ(o.delay, ExtRational(q("1288853096929/42306648252750")));
    EXPECT_EQ(o.r1, 1);
    EXPECT_EQ(o.r2, 15u);
  }
}
