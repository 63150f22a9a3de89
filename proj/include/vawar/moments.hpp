#pragma once

// Single-window statistics: frequency moments of values and volumes,
// volume-weighted price moments (VWAP and its higher orders), moments of
// lag-adjusted values and prices, value-weighted return moments (VaWAR at
// order 1) and the return volatility in three algebraically equal forms.
//
// Conditioning: prices are divided by the window VWAP and volumes by the
// window mean volume before raising to powers; scales are re-applied once
// per moment. Returns are scale free and need no rescaling.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vawar/error.hpp"
#include "vawar/trade_tape.hpp"

namespace vawar {

inline constexpr int kDefaultOrderCap = 8;

using Warnings = std::vector<std::string>;

struct MomentOptions {
  int order_cap = kDefaultOrderCap;
};

/// x^n by repeated squaring.
inline double ipow(double x, int n) noexcept {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

inline void check_order(int n) {
  if (n < 1) throw Error(ErrorCode::OrderZero, "moment order must be >= 1");
}

/// Appends non-fatal diagnostics for orders that are allowed but dubious.
inline void order_warnings(int n, std::size_t sample_size, int cap, Warnings* warnings) {
  if (!warnings) return;
  if (n > cap) {
    warnings->push_back("OrderTooLarge: order " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  }
  if (static_cast<std::size_t>(n) > sample_size) {
    warnings->push_back("order " + std::to_string(n) + " exceeds window size " +
                        std::to_string(sample_size));
  }
}

/// Plain arithmetic mean of x^n over the series.
inline double freq_moment(std::span<const double> xs, int n, Warnings* warnings = nullptr,
                          int order_cap = kDefaultOrderCap) {
  if (xs.empty()) throw Error(ErrorCode::EmptySeries, "series is empty");
  check_order(n);
  order_warnings(n, xs.size(), order_cap, warnings);
  double scale = 0.0;
  for (double x : xs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "series value is not finite");
    scale += std::abs(x);
  }
  scale /= static_cast<double>(xs.size());
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += ipow(x / scale, n);
  return sum / static_cast<double>(xs.size()) * ipow(scale, n);
}

namespace detail {

/// Window data normalized by VWAP (prices, including lagged prices) and by
/// mean volume.
struct WindowFrame {
  double price_scale = 1.0;
  double volume_scale = 1.0;
  std::vector<double> price;
  std::vector<double> lagged_price;
  std::vector<double> volume;
  std::vector<double> ratio;

  explicit WindowFrame(const ResolvedWindow& w)
      : price(w.size()), lagged_price(w.size()), volume(w.size()), ratio(w.size()) {
    double pu = 0.0;
    double u = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      pu += w.price(k) * w.volume(k);
      u += w.volume(k);
    }
    price_scale = pu / u;
    volume_scale = u / static_cast<double>(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
      price[k] = w.price(k) / price_scale;
      lagged_price[k] = w.lagged_price(k) / price_scale;
      volume[k] = w.volume(k) / volume_scale;
      ratio[k] = w.price(k) / w.lagged_price(k);
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return price.size(); }
  [[nodiscard]] double count() const noexcept { return static_cast<double>(price.size()); }

  [[nodiscard]] double volume_moment(int n) const {
    double s = 0.0;
    for (double u : volume) s += ipow(u, n);
    return s / count() * ipow(volume_scale, n);
  }

  [[nodiscard]] double value_moment(int n) const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += ipow(price[k] * volume[k], n);
    return s / count() * ipow(price_scale * volume_scale, n);
  }

  [[nodiscard]] double adjusted_value_moment(int n) const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += ipow(lagged_price[k] * volume[k], n);
    return s / count() * ipow(price_scale * volume_scale, n);
  }

  [[nodiscard]] double price_moment(int n) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double un = ipow(volume[k], n);
      num += ipow(price[k], n) * un;
      den += un;
    }
    return num / den * ipow(price_scale, n);
  }

  [[nodiscard]] double adjusted_price_moment(int n) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double un = ipow(volume[k], n);
      num += ipow(lagged_price[k], n) * un;
      den += un;
    }
    return num / den * ipow(price_scale, n);
  }

  /// Returns weighted by the n-th power of the adjusted value.
  [[nodiscard]] double return_moment(int n) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double wn = ipow(lagged_price[k] * volume[k], n);
      num += ipow(ratio[k], n) * wn;
      den += wn;
    }
    return num / den;
  }
};

}  // namespace detail

[[nodiscard]] inline double value_moment(const ResolvedWindow& w, int n) {
  check_order(n);
  return detail::WindowFrame(w).value_moment(n);
}

[[nodiscard]] inline double volume_moment(const ResolvedWindow& w, int n) {
  check_order(n);
  return detail::WindowFrame(w).volume_moment(n);
}

/// Volume-weighted price moment sum(p^n U^n) / sum(U^n); order 1 is VWAP.
[[nodiscard]] inline double price_moment(const ResolvedWindow& w, int n) {
  check_order(n);
  return detail::WindowFrame(w).price_moment(n);
}

/// p(t_i - tau) * U(t_i) for each tick of the window.
[[nodiscard]] inline std::vector<double> adjusted_value_series(const ResolvedWindow& w) {
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = w.lagged_price(k) * w.volume(k);
  return out;
}

struct AdjustedMoments {
  double value = 0.0;  ///< C_a(t,tau;n), frequency mean of C_a^n
  double price = 0.0;  ///< p_a(t,tau;n), lagged price weighted by U^n
};

[[nodiscard]] inline AdjustedMoments adjusted_moments(const ResolvedWindow& w, int n) {
  check_order(n);
  const detail::WindowFrame f(w);
  return {f.adjusted_value_moment(n), f.adjusted_price_moment(n)};
}

enum class ReturnForm { ratio, conventional, log };

[[nodiscard]] inline std::vector<double> return_series(const ResolvedWindow& w,
                                                       ReturnForm form = ReturnForm::ratio) {
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double p = w.price(k);
    const double prev = w.lagged_price(k);
    switch (form) {
      case ReturnForm::ratio: out[k] = p / prev; break;
      case ReturnForm::conventional: out[k] = p / prev - 1.0; break;
      case ReturnForm::log: out[k] = std::log(p) - std::log(prev); break;
    }
  }
  return out;
}

/// Value-weighted return moment; order 1 is VaWAR.
[[nodiscard]] inline double return_moment(const ResolvedWindow& w, int n) {
  check_order(n);
  return detail::WindowFrame(w).return_moment(n);
}

/// Second moment minus squared first moment of each series. The price
/// forms use different weights per order and can come out negative.
struct Dispersions {
  double value = 0.0;           ///< sigma_C^2
  double adjusted_value = 0.0;  ///< sigma_Ca^2
  double volume = 0.0;          ///< sigma_U^2
  double price = 0.0;           ///< sigma_p^2
  double adjusted_price = 0.0;  ///< sigma_pa^2
};

[[nodiscard]] inline Dispersions dispersions(const ResolvedWindow& w) {
  const detail::WindowFrame f(w);
  auto spread = [](double second, double first) { return second - first * first; };
  return {spread(f.value_moment(2), f.value_moment(1)),
          spread(f.adjusted_value_moment(2), f.adjusted_value_moment(1)),
          spread(f.volume_moment(2), f.volume_moment(1)),
          spread(f.price_moment(2), f.price_moment(1)),
          spread(f.adjusted_price_moment(2), f.adjusted_price_moment(1))};
}

/// Return volatility evaluated three ways: from return moments, from value
/// dispersions and from price dispersions.
struct VolatilityRoutes {
  double via_moments = 0.0;
  double via_values = 0.0;
  double via_prices = 0.0;
};

[[nodiscard]] inline VolatilityRoutes return_volatility(const ResolvedWindow& w) {
  const detail::WindowFrame f(w);
  const double r1 = f.return_moment(1);
  const double r2 = f.return_moment(2);

  const double c1 = f.value_moment(1);
  const double c2 = f.value_moment(2);
  const double ca1 = f.adjusted_value_moment(1);
  const double ca2 = f.adjusted_value_moment(2);
  const double var_c = c2 - c1 * c1;
  const double var_ca = ca2 - ca1 * ca1;

  const double p1 = f.price_moment(1);
  const double p2 = f.price_moment(2);
  const double pa1 = f.adjusted_price_moment(1);
  const double pa2 = f.adjusted_price_moment(2);
  const double var_p = p2 - p1 * p1;
  const double var_pa = pa2 - pa1 * pa1;

  return {r2 - r1 * r1,
          (var_c * ca1 * ca1 - var_ca * c1 * c1) / (ca1 * ca1 * ca2),
          (var_p * pa1 * pa1 - var_pa * p1 * p1) / (pa1 * pa1 * pa2)};
}

/// All order-n statistics of one window. Arrays hold orders 1..order_max
/// at positions 0..order_max-1.
struct MomentReport {
  std::size_t window_start = 0;
  std::size_t window_count = 0;
  std::size_t lag = 1;
  int order_max = 0;
  std::vector<double> value;           ///< C(t;n)
  std::vector<double> volume;          ///< U(t;n)
  std::vector<double> price;           ///< p(t;n)
  std::vector<double> adjusted_value;  ///< C_a(t,tau;n)
  std::vector<double> adjusted_price;  ///< p_a(t,tau;n)
  std::vector<double> returns;         ///< r(t,tau;n)
  Dispersions dispersion;
  VolatilityRoutes volatility;
  Warnings warnings;
};

[[nodiscard]] inline MomentReport moment_report(const ResolvedWindow& w, int order_max,
                                                const MomentOptions& options = {}) {
  check_order(order_max);
  MomentReport report;
  report.window_start = w.start();
  report.window_count = w.size();
  report.lag = w.lag();
  report.order_max = order_max;
  order_warnings(order_max, w.size(), options.order_cap, &report.warnings);

  const detail::WindowFrame f(w);
  for (int n = 1; n <= order_max; ++n) {
    report.value.push_back(f.value_moment(n));
    report.volume.push_back(f.volume_moment(n));
    report.price.push_back(f.price_moment(n));
    report.adjusted_value.push_back(f.adjusted_value_moment(n));
    report.adjusted_price.push_back(f.adjusted_price_moment(n));
    report.returns.push_back(f.return_moment(n));
  }
  report.dispersion = dispersions(w);
  report.volatility = return_volatility(w);
  return report;
}

}  // namespace vawar
