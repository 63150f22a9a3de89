#pragma once

// Characteristic-function approximations built from the first m return
// moments, and their Fourier inversion to a density on a grid.
//
//   Taylor form:       R_m(x) = 1 + sum_n i^n/n! r_n x^n
//   Exponential form:  Q_m(x) = exp(sum_n i^n/n! a_n x^n - b x^(2q)),  2q > m, b >= 0
//
// With 2q > m the damping term has no derivative of order <= m at the
// origin, so matching d^n Q_m / (i^n dx^n)|_0 = r_n makes a_n the cumulants
// of the moment sequence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vawar/error.hpp"
#include "vawar/moments.hpp"

namespace vawar {

/// Cumulant-like coefficients a_1..a_m from moments r_1..r_m through
/// r_n = sum_{k=1}^{n} C(n-1, k-1) a_k r_{n-k}, r_0 = 1.
[[nodiscard]] inline std::vector<double> moments_to_coeffs(std::span<const double> moments) {
  if (moments.empty()) throw Error(ErrorCode::OrderZero, "need at least one moment");
  for (double r : moments) {
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "moment is not finite");
  }
  const std::size_t m = moments.size();
  auto raw = [&](std::size_t n) { return n == 0 ? 1.0 : moments[n - 1]; };
  std::vector<double> a(m);
  for (std::size_t n = 1; n <= m; ++n) {
    double acc = raw(n);
    double binom = 1.0;  // C(n-1, k-1)
    for (std::size_t k = 1; k < n; ++k) {
      acc -= binom * a[k - 1] * raw(n - k);
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k);
    }
    a[n - 1] = acc;
  }
  return a;
}

struct CharFnApprox {
  int order = 0;
  std::vector<double> coeffs;          ///< a_1..a_m
  double damping_b = 0.0;
  int damping_q = 1;
  std::vector<double> source_moments;  ///< r_1..r_m
};

struct ApproxOptions {
  std::optional<double> damping_b;
  std::optional<int> damping_q;
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

/// Fits Q_m. Defaults: q = floor(m/2) + 1; b = 0 for m = 2 with a_2 > 0,
/// otherwise b = |a_m|/m! * s^(2q-m) with s = sqrt(a_2) (or 1 when that is
/// unavailable), falling back to s^(2q)/(2q)! when a_m = 0.
[[nodiscard]] inline CharFnApprox fit_charfn(std::span<const double> moments,
                                             const ApproxOptions& options = {}) {
  CharFnApprox approx;
  approx.coeffs = moments_to_coeffs(moments);
  approx.source_moments.assign(moments.begin(), moments.end());
  const int m = static_cast<int>(moments.size());
  approx.order = m;
  approx.damping_q = options.damping_q.value_or(m / 2 + 1);
  if (2 * approx.damping_q <= m)
    throw Error(ErrorCode::InvalidArgument, "damping exponent needs 2q > m");

  if (options.damping_b) {
    approx.damping_b = *options.damping_b;
  } else if (m == 2 && approx.coeffs[1] > 0.0) {
    approx.damping_b = 0.0;
  } else {
    const double s = (m >= 2 && approx.coeffs[1] > 0.0) ? std::sqrt(approx.coeffs[1]) : 1.0;
    const int q2 = 2 * approx.damping_q;
    const double lead = std::abs(approx.coeffs[m - 1]) / detail::factorial(m);
    approx.damping_b = lead > 0.0 ? lead * std::pow(s, q2 - m)
                                  : std::pow(s, q2) / detail::factorial(q2);
  }
  if (!std::isfinite(approx.damping_b) || approx.damping_b < 0.0)
    throw Error(ErrorCode::InvalidArgument, "damping b must be finite and >= 0");
  return approx;
}

enum class CharFnForm { taylor, exponential };

namespace detail {

/// i^n as a complex unit.
inline std::complex<double> i_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Exponent of Q_m: sum i^n/n! a_n x^n - b x^(2q).
inline std::complex<double> log_q(const CharFnApprox& approx, double x) {
  std::complex<double> acc{0.0, 0.0};
  double xn = 1.0;
  double fact = 1.0;
  for (int n = 1; n <= approx.order; ++n) {
    xn *= x;
    fact *= n;
    acc += i_pow(n) * (approx.coeffs[n - 1] * xn / fact);
  }
  acc -= approx.damping_b * ipow(x, 2 * approx.damping_q);
  return acc;
}

}  // namespace detail

[[nodiscard]] inline std::complex<double> eval_charfn(const CharFnApprox& approx, double x,
                                                      CharFnForm form = CharFnForm::exponential) {
  if (form == CharFnForm::exponential) return std::exp(detail::log_q(approx, x));
  std::complex<double> acc{1.0, 0.0};
  double xn = 1.0;
  double fact = 1.0;
  for (int n = 1; n <= approx.order; ++n) {
    xn *= x;
    fact *= n;
    acc += detail::i_pow(n) * (approx.source_moments[n - 1] * xn / fact);
  }
  return acc;
}

struct GridSpec {
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::size_t points = 2001;
  /// Half-width of the r grid in units of the density's standard deviation
  /// when r_min/r_max are not given.
  double width_sigmas = 30.0;
  /// Lower bound on that half-width in units of b^(1/2q). The damping
  /// kernel's transform has slowly decaying oscillating tails.
  double damping_widths = 100.0;
  /// Integration half-extent in x; chosen so |Q_m| < tail at the edge when absent.
  std::optional<double> x_extent;
  std::size_t x_points = std::size_t{1} << 14;
  double tail = 1e-12;
  /// Largest |Q_m| tolerated at an explicitly chosen x edge.
  double edge_tolerance = 1e-8;
};

struct DensityGrid {
  std::vector<double> r;
  std::vector<double> density;
  double step = 0.0;
  double x_extent = 0.0;
  std::size_t x_points = 0;
  CharFnApprox approx;
  double normalization = 0.0;  ///< trapezoid integral of the density
  double min_density = 0.0;
  std::size_t negative_points = 0;
  std::vector<std::string> diagnostics;
};

namespace detail {

/// Smallest doubling of a starting extent beyond which |Q_m| stays below tail.
inline double auto_extent(const CharFnApprox& approx, double start, double tail) {
  const double log_tail = std::log(tail);
  double x = start;
  for (int iter = 0; iter < 80; ++iter, x *= 2.0) {
    bool below = true;
    for (int s = 0; s <= 128 && below; ++s) {
      const double probe = x * (1.0 + 7.0 * s / 128.0);
      below = log_q(approx, probe).real() < log_tail;
    }
    if (below) return x;
  }
  throw Error(ErrorCode::QuadratureDivergence, "|Q_m| does not decay below the tail threshold");
}

inline double trapezoid(std::span<const double> ys, double step) {
  if (ys.size() < 2) return 0.0;
  double s = 0.5 * (ys.front() + ys.back());
  for (std::size_t k = 1; k + 1 < ys.size(); ++k) s += ys[k];
  return s * step;
}

}  // namespace detail

/// Standard deviation of the density Fourier-paired with Q_m, used to size
/// default grids.
[[nodiscard]] inline double density_scale(const CharFnApprox& approx) {
  double var = approx.order >= 2 ? approx.coeffs[1] : 0.0;
  if (approx.damping_q == 1) var += 2.0 * approx.damping_b;
  if (var > 0.0) return std::sqrt(var);
  if (approx.damping_b > 0.0) return std::pow(approx.damping_b, 1.0 / (2.0 * approx.damping_q));
  return 1.0;
}

/// mu_m(r) = (1/2pi) int Q_m(x) exp(-i x r) dx by the trapezoid rule on a
/// symmetric x grid, folded onto x >= 0 through Q_m(-x) = conj(Q_m(x)).
[[nodiscard]] inline DensityGrid invert_density(const CharFnApprox& approx,
                                                const GridSpec& spec = {}) {
  const bool gaussian_ok = approx.order == 2 && approx.coeffs[1] > 0.0;
  if (approx.damping_b <= 0.0 && !gaussian_ok) {
    throw Error(ErrorCode::NotIntegrable,
                "Q_m needs b > 0 unless m = 2 with positive variance");
  }
  if (spec.points < 2 || spec.x_points < 4)
    throw Error(ErrorCode::InvalidArgument, "grid needs more points");

  const double scale = density_scale(approx);
  double extent = 0.0;
  if (spec.x_extent) {
    extent = *spec.x_extent;
    if (!(extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "x extent must be positive");
    if (std::abs(eval_charfn(approx, extent)) > spec.edge_tolerance) {
      throw Error(ErrorCode::QuadratureDivergence,
                  "|Q_m| at x edge " + format_double(extent) + " exceeds tolerance");
    }
  } else {
    extent = detail::auto_extent(approx, 1.0 / scale, spec.tail);
  }

  DensityGrid grid;
  grid.approx = approx;
  grid.x_extent = extent;
  grid.x_points = spec.x_points;

  const double center = approx.coeffs[0];
  double half_width = spec.width_sigmas * scale;
  if (approx.damping_b > 0.0) {
    half_width = std::max(half_width, spec.damping_widths * std::pow(approx.damping_b,
                                                                      1.0 / (2.0 * approx.damping_q)));
  }
  const double r_min = spec.r_min.value_or(center - half_width);
  const double r_max = spec.r_max.value_or(center + half_width);
  if (!(r_max > r_min)) throw Error(ErrorCode::InvalidArgument, "r grid is empty");
  grid.step = (r_max - r_min) / static_cast<double>(spec.points - 1);
  grid.r.resize(spec.points);
  for (std::size_t j = 0; j < spec.points; ++j)
    grid.r[j] = r_min + grid.step * static_cast<double>(j);

  const std::size_t half = spec.x_points / 2;
  const double h = extent / static_cast<double>(half);
  const double period = 2.0 * std::numbers::pi / h;
  if (period < 4.0 * std::max(std::abs(r_min), std::abs(r_max))) {
    throw Error(ErrorCode::InvalidArgument,
                "x grid too coarse for the requested r range; raise x_points");
  }
  std::vector<std::complex<double>> q(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    q[k] = eval_charfn(approx, h * static_cast<double>(k));
    if (k == 0 || k == half) q[k] *= 0.5;
  }

  grid.density.resize(spec.points);
  constexpr std::size_t kReseed = 64;
  for (std::size_t j = 0; j < spec.points; ++j) {
    const double r = grid.r[j];
    const std::complex<double> rot = std::polar(1.0, -h * r);
    std::complex<double> phase{1.0, 0.0};
    double acc = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
      if (k % kReseed == 0) phase = std::polar(1.0, -h * static_cast<double>(k) * r);
      acc += (q[k] * phase).real();
      phase *= rot;
    }
    grid.density[j] = acc * h / std::numbers::pi;
  }

  grid.normalization = detail::trapezoid(grid.density, grid.step);
  // Quadrature round-off leaves values of order 1e-16 * peak in the tails;
  // only count negatives beyond that noise floor.
  const double peak = *std::max_element(grid.density.begin(), grid.density.end());
  const double floor = -1e-12 * std::abs(peak);
  grid.min_density = grid.density.front();
  for (double d : grid.density) {
    grid.min_density = std::min(grid.min_density, d);
    if (d < floor) ++grid.negative_points;
  }
  if (grid.negative_points > 0) {
    grid.diagnostics.push_back("density negative at " + std::to_string(grid.negative_points) +
                               " grid points (min " + format_double(grid.min_density) + ")");
  }
  return grid;
}

/// Trapezoid estimate of int r^n mu(r) dr over the grid.
[[nodiscard]] inline double grid_moment(const DensityGrid& grid, int n) {
  std::vector<double> ys(grid.r.size());
  for (std::size_t j = 0; j < ys.size(); ++j) ys[j] = ipow(grid.r[j], n) * grid.density[j];
  return detail::trapezoid(ys, grid.step);
}

/// Closed-form 2-approximation: normal density with the given mean and variance.
class GaussianDensity {
 public:
  GaussianDensity(double mean, double variance) : mean_(mean), variance_(variance) {
    if (!(variance > 0.0) || !std::isfinite(variance))
      throw Error(ErrorCode::NonPositiveVariance, "variance must be > 0");
    norm_ = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
  }

  [[nodiscard]] double operator()(double r) const noexcept {
    const double d = r - mean_;
    return norm_ * std::exp(-d * d / (2.0 * variance_));
  }

  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept { return variance_; }

 private:
  double mean_;
  double variance_;
  double norm_;
};

[[nodiscard]] inline GaussianDensity gaussian2_density(double mean, double variance) {
  return GaussianDensity(mean, variance);
}

}  // namespace vawar
