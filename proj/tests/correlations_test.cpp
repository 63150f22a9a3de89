#include <gtest/gtest.h>

#include "support.hpp"

using namespace vawar;
using fixtures::near;

TEST(Pairs, ResolveAndReject) {
  const auto tape = fixtures::fixture_a();
  const auto pair = resolve_pair(tape, {2, 2}, 1, 1, 1);
  EXPECT_EQ(pair.shift(), 1u);
  EXPECT_FALSE(pair.same_day());
  EXPECT_EQ(pair.second().start(), 1u);
  EXPECT_TRUE(self_pair(pair.first()).self_paired());

  try {
    (void)resolve_pair(tape, {1, 3}, 1, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientHistory);
  }
  const auto a = resolve(tape, {1, 3}, 1);
  const auto b = resolve(tape, {1, 2}, 1);
  const auto later = resolve(tape, {2, 2}, 1);
  EXPECT_THROW((void)PairedWindows::make(a, b), Error);
  EXPECT_THROW((void)PairedWindows::make(b, later), Error);
  const auto other = fixtures::fixture_a();
  EXPECT_THROW((void)PairedWindows::make(a, resolve(other, {1, 3}, 1)), Error);
}

TEST(Correlations, FixtureA) {
  const auto tape = fixtures::fixture_a();
  const auto pair = self_pair(resolve(tape, fixtures::kFixtureWindow, 1));
  const auto rep = correlation_report(pair);
  EXPECT_TRUE(near(rep.corr_r, 0.56, 1e-14));
  EXPECT_TRUE(near(rep.corr_rU, 2.0, 1e-14));
  EXPECT_TRUE(near(rep.corr_rp, 54.0 / 35.0, 1e-14));
  EXPECT_TRUE(near(rep.corr_r_normalized, 1.0, 1e-14));
  EXPECT_TRUE(near(rep.value_product, 600.0, 1e-14));
  EXPECT_TRUE(near(rep.return_product, 2.0, 1e-14));
  const auto pu = adjprice_volume_sq_corr(pair.first());
  EXPECT_TRUE(near(pu.identity, -25.0 / 3.0, 1e-14));
}

TEST(Correlations, NormalizedIsNanWithoutVolatility) {
  const std::vector<double> p(8, 5.0), u{1, 2, 3, 4, 5, 6, 7, 8};
  const auto tape = TradeTape::from_prices_volumes(p, u);
  const auto rep = correlation_report(resolve_pair(tape, {3, 4}, 1, 1, 2));
  EXPECT_TRUE(std::isnan(rep.corr_r_normalized));
  EXPECT_NEAR(rep.corr_r, 0.0, 1e-15);
}

TEST(Correlations, SameDayTwoLag) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = fixtures::random_case(seed);
    const auto sd = same_day_two_lag_autocorr(c.tape, c.window, c.lag, c.lag2);
    const auto pair = resolve_pair(c.tape, c.window, c.lag, c.lag2, 0);
    const auto ac = return_autocorr(pair);
    const double scale = return_moment(pair.first(), 1) * return_moment(pair.second(), 1);
    EXPECT_TRUE(near(sd.exact, ac.corr_r, 1e-10, scale)) << seed;
    EXPECT_DOUBLE_EQ(sd.residual, sd.exact - sd.approximation);
  }
}

// With every volume equal and prices constant within the pair the
// adjusted-value covariance vanishes, and the approximation becomes exact.
TEST(Correlations, SameDayApproximationExactWhenCorrCaVanishes) {
  const std::vector<double> p{3.0, 3.0, 3.0, 3.0, 3.0, 3.0}, u(6, 2.0);
  const auto tape = TradeTape::from_prices_volumes(p, u);
  const auto sd = same_day_two_lag_autocorr(tape, {2, 4}, 1, 2);
  EXPECT_NEAR(sd.residual, 0.0, 1e-15);
}

// corr_rU vanishes when volume is uncorrelated with value: constant volume.
TEST(Correlations, ReturnVolumeZeroForConstantVolume) {
  std::mt19937_64 rng(3);
  auto tape = fixtures::random_tape(rng, 40);
  std::vector<double> p, u(40, 7.0);
  for (const auto& t : tape.ticks()) p.push_back(t.price);
  tape = TradeTape::from_prices_volumes(p, u);
  for (std::size_t j = 0; j < 5; ++j) {
    const auto ru = return_volume_corr(resolve_pair(tape, {10, 20}, 1, 1, j));
    EXPECT_NEAR(ru.definitional, 0.0, 1e-12 * 7.0);
    EXPECT_NEAR(ru.closed_form, 0.0, 1e-12 * 7.0);
  }
}

TEST(Correlations, ValueFormZeroConditions) {
  // Identical returns at every tick: corr_r = 0 and the value form agrees.
  const std::vector<double> p{1.0, 1.1, 1.21, 1.331, 1.4641, 1.61051, 1.771561},
      u{3, 1, 4, 1, 5, 9, 2};
  const auto tape = TradeTape::from_prices_volumes(p, u);
  const auto ac = return_autocorr(resolve_pair(tape, {3, 4}, 1, 1, 2));
  EXPECT_NEAR(ac.corr_r, 0.0, 1e-14);
  EXPECT_NEAR(ac.value_form, 0.0, 1e-13);
  EXPECT_NEAR(ac.price_form, 0.0, 1e-13);
}

TEST(Correlations, HigherDegreeRoutesAgree) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto c = fixtures::random_case(seed);
    const auto pair = resolve_pair(c.tape, c.window, c.lag, c.lag2, c.shift);
    for (int n = 1; n <= 4; ++n) {
      for (int m = 1; m <= 4; ++m) {
        // The closed form subtracts corr_C/E[Ca^n U2^m] and a like term; at
        // high degree those are far larger than the result, so compare on
        // their magnitude.
        const auto rp = return_price_corr(pair, n, m);
        const double cau = paired_expectation(PairKind::adjvalue_volume, pair, n, m);
        const double corr_c = paired_expectation(PairKind::value_value, pair, n, m) -
                              value_moment(pair.first(), n) * value_moment(pair.second(), m);
        const double scale = std::max(std::abs(corr_c / cau), return_moment(pair.first(), n) *
                                                                  price_moment(pair.second(), m));
        EXPECT_TRUE(near(rp.closed_form, rp.definitional, 1e-10, scale)) << seed << " " << n << m;
      }
    }
  }
}

TEST(Correlations, OrderZeroThrows) {
  const auto tape = fixtures::fixture_a();
  const auto pair = self_pair(resolve(tape, fixtures::kFixtureWindow, 1));
  EXPECT_THROW((void)return_price_corr(pair, 0, 1), Error);
  EXPECT_THROW((void)paired_expectation(PairKind::value_value, pair, 1, 0), Error);
}
