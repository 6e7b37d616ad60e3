#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "twrn/ratepower.hpp"

using namespace twrn;

namespace {

ChannelState up(double g1, double g2) { return {g1, g2, g1, g2}; }
ChannelState down(double g1, double g2) { return {1, 1, g1, g2}; }

// Sum power of a two-user successive-decoding uplink at common rate R when
// `last` is decoded interference-free and the other user is decoded first,
// seeing `last` as noise. Built from the single-user Shannon inversion only.
double sic_sum_power(double R, double g_first, double g_last) {
  const double p_last = (std::exp2(R) - 1.0) / g_last;
  const double p_first = (std::exp2(R) - 1.0) * (1.0 + p_last * g_last) / g_first;
  return p_first + p_last;
}

}  // namespace

TEST(RatePower, PncUplinkRate) {
  EXPECT_NEAR(pnc_uplink_rate(1.5), 1.0, 1e-15);
  EXPECT_EQ(pnc_uplink_rate(0.5), 0.0);
  EXPECT_NEAR(pnc_uplink_rate(3.5), 2.0, 1e-15);
  EXPECT_EQ(pnc_uplink_rate(0.1), 0.0);
  EXPECT_THROW(pnc_uplink_rate(-1.0), std::domain_error);
}

TEST(RatePower, PncUplinkSumPower) {
  EXPECT_NEAR(pnc_uplink_sum_power(1, up(1, 1)), 3.0, 1e-12);
  EXPECT_NEAR(pnc_uplink_sum_power(2, up(1, 1)), 7.0, 1e-12);
  EXPECT_NEAR(pnc_uplink_sum_power(1, up(1, 2)), 2.25, 1e-12);
}

TEST(RatePower, PncPowerInvertsRate) {
  // Each user at power (2^R - 1/2)/g_ir sees SNR that gives back rate R.
  const ChannelState s = up(0.3, 2.2);
  for (double R : {0.1, 0.7, 1.0, 3.3}) {
    const double p1 = (std::exp2(R) - 0.5) / s.g1r;
    EXPECT_NEAR(pnc_uplink_rate(p1 * s.g1r), R, 1e-12);
  }
}

TEST(RatePower, DncUplinkSumPower) {
  EXPECT_NEAR(dnc_uplink_sum_power(1, up(1, 1)), 3.0, 1e-12);
  EXPECT_NEAR(dnc_uplink_sum_power(2, up(1, 1)), 15.0, 1e-12);
  EXPECT_NEAR(dnc_uplink_sum_power(1, up(2, 1)), 2.0, 1e-12);
}

TEST(RatePower, DncUserPowers) {
  auto p = dnc_uplink_user_powers(1, up(1, 4));
  EXPECT_EQ(p.weak_node, 1);
  EXPECT_NEAR(p.weak, 1.0, 1e-12);
  EXPECT_NEAR(p.strong, 0.5, 1e-12);
  p = dnc_uplink_user_powers(1, up(4, 1));
  EXPECT_EQ(p.weak_node, 2);
  EXPECT_NEAR(p.weak, 1.0, 1e-12);
  EXPECT_NEAR(p.strong, 0.5, 1e-12);
  p = dnc_uplink_user_powers(2, up(1, 1));
  EXPECT_EQ(p.weak_node, 1);
  EXPECT_NEAR(p.weak, 3.0, 1e-12);
  EXPECT_NEAR(p.strong, 12.0, 1e-12);
}

TEST(RatePower, DownlinkPower) {
  EXPECT_NEAR(downlink_power(1, down(1, 4)), 1.0, 1e-12);
  EXPECT_NEAR(downlink_power(1, down(4, 1)), 1.0, 1e-12);
  EXPECT_NEAR(downlink_power(2, down(0.5, 2)), 6.0, 1e-12);
}

TEST(RatePower, EnergyGap) {
  EXPECT_EQ(energy_gap(1, up(1, 1)), 0.0);
  EXPECT_NEAR(energy_gap(2, up(1, 1)), -8.0, 1e-12);
  const double r2 = std::sqrt(2.0);
  const double want = 2.0 * (r2 - 0.5) - (r2 - 1.0) * (1.0 + r2);
  EXPECT_NEAR(want, 0.828427, 1e-6);
  EXPECT_NEAR(energy_gap(0.5, up(1, 1)), want, 1e-12);
}

TEST(RatePower, PreferPnc) {
  EXPECT_TRUE(prefer_pnc(2, up(1, 1)));
  EXPECT_FALSE(prefer_pnc(0.5, up(1, 1)));
  EXPECT_FALSE(prefer_pnc(1, up(0.1, 10)));
  EXPECT_TRUE(prefer_pnc(1, up(1, 1)));  // tie
  EXPECT_EQ(cheaper_mode(1, up(1, 1)), Mode::PNC);
}

TEST(RatePower, DomainErrors) {
  const ChannelState s = up(1, 1);
  for (double R : {0.0, -1.0}) {
    EXPECT_THROW(pnc_uplink_sum_power(R, s), std::domain_error);
    EXPECT_THROW(dnc_uplink_sum_power(R, s), std::domain_error);
    EXPECT_THROW(dnc_uplink_user_powers(R, s), std::domain_error);
    EXPECT_THROW(downlink_power(R, s), std::domain_error);
    EXPECT_THROW(energy_gap(R, s), std::domain_error);
    EXPECT_THROW(prefer_pnc(R, s), std::domain_error);
  }
}

TEST(RatePower, ModeNames) {
  EXPECT_EQ(parse_mode(to_string(Mode::PNC)), Mode::PNC);
  EXPECT_EQ(parse_mode(to_string(Mode::SPCDNC)), Mode::SPCDNC);
  EXPECT_EQ(parse_mode("DNC"), Mode::SPCDNC);
  EXPECT_THROW(parse_mode("XOR"), std::invalid_argument);
}

class RatePowerProperty : public ::testing::Test {
 protected:
  std::mt19937_64 rng{12345};
  double rate() { return std::uniform_real_distribution<double>(0.01, 6.0)(rng); }
  double gain() { return std::exp(std::uniform_real_distribution<double>(-4.0, 3.0)(rng)); }
  ChannelState state() { return {gain(), gain(), gain(), gain()}; }
};

TEST_F(RatePowerProperty, GapSignMatchesCriterion) {
  for (int i = 0; i < 10000; ++i) {
    const double R = rate();
    const auto s = state();
    const double direct = energy_gap(R, s);
    const double closed = energy_gap_closed(R, s);
    const double scale = std::max(pnc_uplink_sum_power(R, s), dnc_uplink_sum_power(R, s));
    ASSERT_LE(std::abs(direct - closed), 1e-12 * scale) << R;
    if (std::abs(closed) > 1e-9 * scale) {
      ASSERT_EQ(direct <= 0.0, prefer_pnc(R, s)) << R;
    }
  }
}

TEST_F(RatePowerProperty, EqualGainLaw) {
  for (int i = 0; i < 1000; ++i) {
    const double R = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
    const double g = gain();
    ASSERT_EQ(prefer_pnc(R, up(g, g)), R >= 1.0) << R << " " << g;
  }
  for (double g : {0.01, 1.0, 37.0}) EXPECT_TRUE(prefer_pnc(1.0, up(g, g)));
}

TEST_F(RatePowerProperty, Monotonicity) {
  for (int i = 0; i < 2000; ++i) {
    const auto s = state();
    const double R = rate(), R2 = R * 1.01;
    ASSERT_LT(pnc_uplink_sum_power(R, s), pnc_uplink_sum_power(R2, s));
    ASSERT_LT(dnc_uplink_sum_power(R, s), dnc_uplink_sum_power(R2, s));
    ASSERT_LT(downlink_power(R, s), downlink_power(R2, s));
    ChannelState t = s;
    t.g1r *= 1.5;
    ASSERT_GT(pnc_uplink_sum_power(R, s), pnc_uplink_sum_power(R, t));
    ASSERT_GT(dnc_uplink_sum_power(R, s), dnc_uplink_sum_power(R, t));
    t = s;
    t.g2r *= 1.5;
    ASSERT_GT(pnc_uplink_sum_power(R, s), pnc_uplink_sum_power(R, t));
    ASSERT_GT(dnc_uplink_sum_power(R, s), dnc_uplink_sum_power(R, t));
    t = s;
    (t.gr1 <= t.gr2 ? t.gr1 : t.gr2) *= 1.5;
    ASSERT_GT(downlink_power(R, s), downlink_power(R, t));
  }
}

TEST_F(RatePowerProperty, SwapSymmetry) {
  for (int i = 0; i < 2000; ++i) {
    const auto s = state();
    const ChannelState w{s.g2r, s.g1r, s.gr2, s.gr1};
    const double R = rate();
    ASSERT_EQ(pnc_uplink_sum_power(R, s), pnc_uplink_sum_power(R, w));
    ASSERT_EQ(dnc_uplink_sum_power(R, s), dnc_uplink_sum_power(R, w));
    ASSERT_EQ(downlink_power(R, s), downlink_power(R, w));
    ASSERT_EQ(energy_gap(R, s), energy_gap(R, w));
    ASSERT_EQ(prefer_pnc(R, s), prefer_pnc(R, w));
    const auto ps = dnc_uplink_user_powers(R, s), pw = dnc_uplink_user_powers(R, w);
    if (s.g1r != s.g2r) {
      ASSERT_NE(ps.weak_node, pw.weak_node);
    }
    ASSERT_EQ(ps.weak, pw.weak);
    ASSERT_EQ(ps.strong, pw.strong);
  }
}

TEST_F(RatePowerProperty, DecodeOrderOptimality) {
  for (int i = 0; i < 5000; ++i) {
    const auto s = state();
    const double R = rate();
    const double chosen = sic_sum_power(R, s.g_Mr(), s.g_mr());
    const double reversed = sic_sum_power(R, s.g_mr(), s.g_Mr());
    ASSERT_NEAR(dnc_uplink_sum_power(R, s), chosen, 1e-12 * chosen);
    ASSERT_LE(chosen, reversed * (1 + 1e-14));
    const auto p = dnc_uplink_user_powers(R, s);
    ASSERT_NEAR(p.weak + p.strong, dnc_uplink_sum_power(R, s), 1e-12 * chosen);
  }
}
