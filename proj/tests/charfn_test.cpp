#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "support.hpp"

using namespace vawar;
using fixtures::near;

namespace {

std::vector<double> three_point_moments(int count) {
  const std::array<double, 3> v{0.9, 1.0, 1.3}, w{0.3, 0.5, 0.2};
  std::vector<double> out(count, 0.0);
  for (int n = 1; n <= count; ++n)
    for (int k = 0; k < 3; ++k) out[n - 1] += w[k] * std::pow(v[k], n);
  return out;
}

}  // namespace

TEST(Coeffs, AreCumulants) {
  const auto r = three_point_moments(4);
  const auto a = moments_to_coeffs(r);
  const double mu = r[0];
  double c2 = 0, c3 = 0, c4 = 0;
  const std::array<double, 3> v{0.9, 1.0, 1.3}, w{0.3, 0.5, 0.2};
  for (int k = 0; k < 3; ++k) {
    const double d = v[k] - mu;
    c2 += w[k] * d * d;
    c3 += w[k] * d * d * d;
    c4 += w[k] * d * d * d * d;
  }
  EXPECT_TRUE(near(a[0], mu, 1e-14));
  EXPECT_TRUE(near(a[1], c2, 1e-12));
  EXPECT_TRUE(near(a[2], c3, 1e-10, c2));
  EXPECT_TRUE(near(a[3], c4 - 3 * c2 * c2, 1e-10, c4));
}

TEST(Coeffs, GaussianHasNoHigherCumulants) {
  const double m = 1.3, s2 = 0.04;
  const std::vector<double> r{m, m * m + s2, m * m * m + 3 * m * s2,
                              std::pow(m, 4) + 6 * m * m * s2 + 3 * s2 * s2};
  const auto a = moments_to_coeffs(r);
  EXPECT_NEAR(a[2], 0.0, 1e-13);
  EXPECT_NEAR(a[3], 0.0, 1e-13);
}

TEST(Coeffs, EmptyThrows) {
  try {
    (void)moments_to_coeffs(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderZero);
  }
}

TEST(FitCharFn, Defaults) {
  const auto g = fit_charfn(std::vector<double>{1.2, 2.0});
  EXPECT_EQ(g.damping_q, 2);
  EXPECT_EQ(g.damping_b, 0.0);
  const auto q = fit_charfn(three_point_moments(4));
  EXPECT_EQ(q.damping_q, 3);
  EXPECT_GT(q.damping_b, 0.0);
  const auto odd = fit_charfn(three_point_moments(3));
  EXPECT_EQ(odd.damping_q, 2);
  EXPECT_THROW((void)fit_charfn(three_point_moments(4), {0.1, 2}), Error);
}

TEST(Charfn, TaylorAndExponentialAgreeNearZero) {
  const auto a = fit_charfn(three_point_moments(4));
  const double x = 1e-3;
  const auto e = eval_charfn(a, x, CharFnForm::exponential);
  const auto t = eval_charfn(a, x, CharFnForm::taylor);
  EXPECT_LT(std::abs(e - t), 1e-14);
  EXPECT_EQ(eval_charfn(a, 0.0), std::complex<double>(1.0, 0.0));
}

TEST(Density, GaussianMatchesClosedForm) {
  const auto a = fit_charfn(std::vector<double>{1.2, 2.0});
  const auto grid = invert_density(a);
  const auto gauss = gaussian2_density(1.2, 0.56);
  for (std::size_t j = 0; j < grid.r.size(); ++j)
    EXPECT_NEAR(grid.density[j], gauss(grid.r[j]), 1e-8);
  EXPECT_NEAR(grid.normalization, 1.0, 1e-6);
  EXPECT_EQ(grid.negative_points, 0u);
  EXPECT_TRUE(grid.diagnostics.empty());
  // Peak of N(1.2, 0.56).
  EXPECT_NEAR(gauss(1.2), 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.56), 1e-15);
  EXPECT_NEAR(gauss(1.2), 0.533109, 1e-6);
}

TEST(Density, FourthOrderMoments) {
  const auto r = three_point_moments(4);
  const auto grid = invert_density(fit_charfn(r));
  EXPECT_NEAR(grid.normalization, 1.0, 1e-6);
  for (int n = 1; n <= 4; ++n) EXPECT_TRUE(near(grid_moment(grid, n), r[n - 1], 1e-4)) << n;
}

// The damping term cannot move moments of order <= m; a larger b only
// changes the density shape.
TEST(Density, DampingLeavesLowMomentsAlone) {
  const auto r = three_point_moments(4);
  for (double b : {1e-4, 1e-3, 1e-2}) {
    const auto grid = invert_density(fit_charfn(r, {b, 3}));
    for (int n = 1; n <= 4; ++n)
      EXPECT_TRUE(near(grid_moment(grid, n), r[n - 1], 1e-4)) << b << " " << n;
  }
}

TEST(Density, NegativeLobesAreReported) {
  const auto grid = invert_density(fit_charfn(three_point_moments(4)));
  EXPECT_GT(grid.negative_points, 0u);
  EXPECT_LT(grid.min_density, 0.0);
  EXPECT_FALSE(grid.diagnostics.empty());
}

TEST(Density, Errors) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  // No damping and m > 2.
  auto undamped = fit_charfn(three_point_moments(4));
  undamped.damping_b = 0.0;
  EXPECT_EQ(code([&] { (void)invert_density(undamped); }), ErrorCode::NotIntegrable);
  // Zero variance at m = 2 with damping switched off.
  const auto flat = fit_charfn(std::vector<double>{1.0, 1.0}, {0.0, std::nullopt});
  EXPECT_EQ(code([&] { (void)invert_density(flat); }), ErrorCode::NotIntegrable);
  // x edge where Q_m has not decayed.
  GridSpec spec;
  spec.x_extent = 0.5;
  EXPECT_EQ(code([&] { (void)invert_density(fit_charfn(std::vector<double>{1.2, 2.0}), spec); }),
            ErrorCode::QuadratureDivergence);
  EXPECT_EQ(code([] { (void)gaussian2_density(0.0, -1.0); }), ErrorCode::NonPositiveVariance);
}

TEST(Density, ExplicitGrid) {
  GridSpec spec;
  spec.r_min = -2.0;
  spec.r_max = 4.0;
  spec.points = 61;
  const auto grid = invert_density(fit_charfn(std::vector<double>{1.2, 2.0}), spec);
  ASSERT_EQ(grid.r.size(), 61u);
  EXPECT_DOUBLE_EQ(grid.r.front(), -2.0);
  EXPECT_NEAR(grid.r.back(), 4.0, 1e-14);
  EXPECT_NEAR(grid.step, 0.1, 1e-15);
}
