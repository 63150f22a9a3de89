#pragma once

// Cross-window expectations and the correlations built from them: return
// autocorrelation (value and price forms), return-volume, return-price of
// general degrees, and the adjusted price / squared volume correlation.
//
// A pair couples element k of the first window (time t_i) with element k of
// the second (time t_i - lambda). "corr" here is always a product
// expectation minus the product of the matching first-order expectations;
// nothing is divided by standard deviations except the explicitly
// normalized extension field of CorrelationReport.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>

#include "vawar/error.hpp"
#include "vawar/moments.hpp"
#include "vawar/trade_tape.hpp"

namespace vawar {

/// Two equally sized windows paired elementwise.
class PairedWindows {
 public:
  /// Requires equal counts, the same tape, and second.start() <= first.start().
  static PairedWindows make(const ResolvedWindow& first, const ResolvedWindow& second) {
    if (first.size() != second.size()) {
      throw Error(ErrorCode::MismatchedWindows,
                  "paired windows must have equal tick counts (" +
                      std::to_string(first.size()) + " vs " + std::to_string(second.size()) +
                      ")");
    }
    if (&first.tape() != &second.tape())
      throw Error(ErrorCode::MismatchedWindows, "paired windows must share a tape");
    if (second.start() > first.start())
      throw Error(ErrorCode::MismatchedWindows, "second window must not lead the first");
    return PairedWindows(first, second);
  }

  [[nodiscard]] const ResolvedWindow& first() const noexcept { return first_; }
  [[nodiscard]] const ResolvedWindow& second() const noexcept { return second_; }
  [[nodiscard]] std::size_t size() const noexcept { return first_.size(); }
  /// Pair shift j, so that lambda = epsilon * j.
  [[nodiscard]] std::size_t shift() const noexcept { return first_.start() - second_.start(); }
  [[nodiscard]] bool same_day() const noexcept { return shift() == 0; }
  [[nodiscard]] bool self_paired() const noexcept {
    return same_day() && first_.lag() == second_.lag();
  }

 private:
  PairedWindows(const ResolvedWindow& a, const ResolvedWindow& b) : first_(a), second_(b) {}
  ResolvedWindow first_;
  ResolvedWindow second_;
};

/// Pairs `window` (lag lag1) with the window shifted back by shift_j ticks (lag lag2).
inline PairedWindows resolve_pair(const TradeTape& tape, const WindowSpec& window,
                                  std::size_t lag1, std::size_t lag2, std::size_t shift_j) {
  const auto first = resolve(tape, window, lag1);
  if (window.start < shift_j) {
    throw Error(ErrorCode::InsufficientHistory,
                "pair shift " + std::to_string(shift_j) + " reaches before tape start");
  }
  const auto second = resolve(tape, WindowSpec{window.start - shift_j, window.count}, lag2);
  return PairedWindows::make(first, second);
}

inline PairedWindows self_pair(const ResolvedWindow& w) { return PairedWindows::make(w, w); }

enum class PairKind {
  value_value,
  adjvalue_adjvalue,
  volume_volume,
  price_price,
  adjprice_adjprice,
  value_volume,
  adjvalue_volume,
};

namespace detail {

/// Normalized views of both windows of a pair.
struct PairFrame {
  WindowFrame a;
  WindowFrame b;

  explicit PairFrame(const PairedWindows& pair) : a(pair.first()), b(pair.second()) {}

  [[nodiscard]] double count() const noexcept { return a.count(); }

  template <class F>
  [[nodiscard]] double mean_of(F&& term) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += term(k);
    return s / count();
  }

  template <class F, class W>
  [[nodiscard]] double weighted_mean(F&& term, W&& weight) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double w = weight(k);
      num += term(k) * w;
      den += w;
    }
    return num / den;
  }

  [[nodiscard]] double value_scale_a() const { return a.price_scale * a.volume_scale; }
  [[nodiscard]] double value_scale_b() const { return b.price_scale * b.volume_scale; }

  [[nodiscard]] double expectation(PairKind kind, int n, int m) const {
    switch (kind) {
      case PairKind::value_value:
        return mean_of([&](std::size_t k) {
                 return ipow(a.price[k] * a.volume[k], n) * ipow(b.price[k] * b.volume[k], m);
               }) *
               ipow(value_scale_a(), n) * ipow(value_scale_b(), m);
      case PairKind::adjvalue_adjvalue:
        return mean_of([&](std::size_t k) {
                 return ipow(a.lagged_price[k] * a.volume[k], n) *
                        ipow(b.lagged_price[k] * b.volume[k], m);
               }) *
               ipow(value_scale_a(), n) * ipow(value_scale_b(), m);
      case PairKind::volume_volume:
        return mean_of([&](std::size_t k) { return ipow(a.volume[k], n) * ipow(b.volume[k], m); }) *
               ipow(a.volume_scale, n) * ipow(b.volume_scale, m);
      case PairKind::value_volume:
        return mean_of([&](std::size_t k) {
                 return ipow(a.price[k] * a.volume[k], n) * ipow(b.volume[k], m);
               }) *
               ipow(value_scale_a(), n) * ipow(b.volume_scale, m);
      case PairKind::adjvalue_volume:
        return mean_of([&](std::size_t k) {
                 return ipow(a.lagged_price[k] * a.volume[k], n) * ipow(b.volume[k], m);
               }) *
               ipow(value_scale_a(), n) * ipow(b.volume_scale, m);
      case PairKind::price_price:
        return weighted_mean(
                   [&](std::size_t k) { return ipow(a.price[k], n) * ipow(b.price[k], m); },
                   [&](std::size_t k) { return ipow(a.volume[k], n) * ipow(b.volume[k], m); }) *
               ipow(a.price_scale, n) * ipow(b.price_scale, m);
      case PairKind::adjprice_adjprice:
        return weighted_mean(
                   [&](std::size_t k) {
                     return ipow(a.lagged_price[k], n) * ipow(b.lagged_price[k], m);
                   },
                   [&](std::size_t k) { return ipow(a.volume[k], n) * ipow(b.volume[k], m); }) *
               ipow(a.price_scale, n) * ipow(b.price_scale, m);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// E[r(t_i,tau) r(t_i2,tau2)] weighted by C_a(t_i,tau) C_a(t_i2,tau2).
  [[nodiscard]] double return_product() const {
    return weighted_mean([&](std::size_t k) { return a.ratio[k] * b.ratio[k]; },
                         [&](std::size_t k) {
                           return a.lagged_price[k] * a.volume[k] * b.lagged_price[k] *
                                  b.volume[k];
                         });
  }
};

}  // namespace detail

/// Frequency kinds average a^n b^m over the pair; price kinds weight
/// p^n p2^m by U^n U2^m.
[[nodiscard]] inline double paired_expectation(PairKind kind, const PairedWindows& pair,
                                               int n = 1, int m = 1) {
  check_order(n);
  check_order(m);
  return detail::PairFrame(pair).expectation(kind, n, m);
}

struct AutocorrResult {
  double corr_r = 0.0;      ///< E[r r2] - E[r] E[r2] with value-product weights
  double value_form = 0.0;  ///< through corr_C and corr_Ca
  double price_form = 0.0;  ///< through corr_p and corr_pa
};

[[nodiscard]] inline AutocorrResult return_autocorr(const PairedWindows& pair) {
  const detail::PairFrame f(pair);
  const double r1 = f.a.return_moment(1);
  const double r1b = f.b.return_moment(1);

  const double c12 = f.expectation(PairKind::value_value, 1, 1);
  const double ca12 = f.expectation(PairKind::adjvalue_adjvalue, 1, 1);
  const double corr_c = c12 - f.a.value_moment(1) * f.b.value_moment(1);
  const double corr_ca = ca12 - f.a.adjusted_value_moment(1) * f.b.adjusted_value_moment(1);

  const double p1 = f.a.price_moment(1);
  const double p1b = f.b.price_moment(1);
  const double pa1 = f.a.adjusted_price_moment(1);
  const double pa1b = f.b.adjusted_price_moment(1);
  const double corr_p = f.expectation(PairKind::price_price, 1, 1) - p1 * p1b;
  const double pa12 = f.expectation(PairKind::adjprice_adjprice, 1, 1);
  const double corr_pa = pa12 - pa1 * pa1b;

  AutocorrResult out;
  out.corr_r = f.return_product() - r1 * r1b;
  out.value_form = (corr_c - r1 * r1b * corr_ca) / ca12;
  out.price_form = (pa1 * pa1b * corr_p - p1 * p1b * corr_pa) / (pa12 * pa1 * pa1b);
  return out;
}

struct SameDayAutocorr {
  double exact = 0.0;          ///< corr_r(t,tau|t,tau2) through corr_C and corr_Ca
  double approximation = 0.0;  ///< sigma_C^2 / (C_a(t,tau;1) C_a(t,tau2;1)), i.e. corr_Ca dropped
  double residual = 0.0;       ///< exact - approximation; vanishes when corr_Ca = 0
};

/// Same-day returns at two lags.
[[nodiscard]] inline SameDayAutocorr same_day_two_lag_autocorr(const TradeTape& tape,
                                                               const WindowSpec& window,
                                                               std::size_t lag1,
                                                               std::size_t lag2) {
  const auto pair = resolve_pair(tape, window, lag1, lag2, 0);
  const detail::PairFrame f(pair);
  const double c1 = f.a.value_moment(1);
  const double var_c = f.a.value_moment(2) - c1 * c1;
  const double ca1 = f.a.adjusted_value_moment(1);
  const double ca1b = f.b.adjusted_value_moment(1);
  const double ca12 = f.expectation(PairKind::adjvalue_adjvalue, 1, 1);
  const double corr_ca = ca12 - ca1 * ca1b;
  const double r1 = f.a.return_moment(1);
  const double r1b = f.b.return_moment(1);

  SameDayAutocorr out;
  out.exact = (var_c - r1 * r1b * corr_ca) / ca12;
  out.approximation = var_c / (ca1 * ca1b);
  out.residual = out.exact - out.approximation;
  return out;
}

struct ReturnVolumeCorr {
  double definitional = 0.0;       ///< E[r U2] (weights C_a) - r(t,tau;1) U(t2;1)
  double closed_form = 0.0;        ///< corr_CU / C_a(t,tau;1)
  double closed_form_price = 0.0;  ///< corr_CU / (p_a(t,tau;1) U(t;1))
};

[[nodiscard]] inline ReturnVolumeCorr return_volume_corr(const PairedWindows& pair) {
  const detail::PairFrame f(pair);
  const double r1 = f.a.return_moment(1);
  const double u1b = f.b.volume_moment(1);
  const double ru = f.weighted_mean([&](std::size_t k) { return f.a.ratio[k] * f.b.volume[k]; },
                                    [&](std::size_t k) {
                                      return f.a.lagged_price[k] * f.a.volume[k];
                                    }) *
                    f.b.volume_scale;
  const double corr_cu = f.expectation(PairKind::value_volume, 1, 1) - f.a.value_moment(1) * u1b;

  ReturnVolumeCorr out;
  out.definitional = ru - r1 * u1b;
  out.closed_form = corr_cu / f.a.adjusted_value_moment(1);
  out.closed_form_price = corr_cu / (f.a.adjusted_price_moment(1) * f.a.volume_moment(1));
  return out;
}

struct ReturnPriceCorr {
  double definitional = 0.0;  ///< E[r^n p2^m] (weights C_a^n U2^m) - r(t,tau;n) p(t2;m)
  double closed_form = 0.0;   ///< through corr_C(n|m) and corr_CaU(n|m)
  /// Same-day first-degree form through sigma_C^2; only for same_day pairs with n = m = 1.
  std::optional<double> same_day_form;
};

[[nodiscard]] inline ReturnPriceCorr return_price_corr(const PairedWindows& pair, int n, int m) {
  check_order(n);
  check_order(m);
  const detail::PairFrame f(pair);
  const double rn = f.a.return_moment(n);
  const double pm = f.b.price_moment(m);

  const double rp = f.weighted_mean(
                        [&](std::size_t k) { return ipow(f.a.ratio[k], n) * ipow(f.b.price[k], m); },
                        [&](std::size_t k) {
                          return ipow(f.a.lagged_price[k] * f.a.volume[k], n) *
                                 ipow(f.b.volume[k], m);
                        }) *
                    ipow(f.b.price_scale, m);

  const double c_nm = f.expectation(PairKind::value_value, n, m);
  const double cau_nm = f.expectation(PairKind::adjvalue_volume, n, m);
  const double corr_c = c_nm - f.a.value_moment(n) * f.b.value_moment(m);
  const double corr_cau = cau_nm - f.a.adjusted_value_moment(n) * f.b.volume_moment(m);

  ReturnPriceCorr out;
  out.definitional = rp - rn * pm;
  out.closed_form = (corr_c - rn * pm * corr_cau) / cau_nm;
  if (pair.same_day() && n == 1 && m == 1) {
    const double c1 = f.a.value_moment(1);
    const double var_c = f.a.value_moment(2) - c1 * c1;
    out.same_day_form = (var_c - rn * f.a.price_moment(1) * corr_cau) / cau_nm;
  }
  return out;
}

struct AdjPriceVolumeSqCorr {
  double identity = 0.0;  ///< corr_CaU(t,tau|t) - p_a(t,tau;1) sigma_U^2
  double direct = 0.0;    ///< E[p(t_i - tau) U^2(t_i)] - p_a(t,tau;1) U(t;2)
};

[[nodiscard]] inline AdjPriceVolumeSqCorr adjprice_volume_sq_corr(const ResolvedWindow& w) {
  const auto pair = self_pair(w);
  const detail::PairFrame f(pair);
  const double cau = f.expectation(PairKind::adjvalue_volume, 1, 1);
  const double u1 = f.a.volume_moment(1);
  const double u2 = f.a.volume_moment(2);
  const double pa1 = f.a.adjusted_price_moment(1);
  const double corr_cau = cau - f.a.adjusted_value_moment(1) * u1;
  return {corr_cau - pa1 * (u2 - u1 * u1), cau - pa1 * u2};
}

/// Every first-degree cross expectation and correlation of a pair.
struct CorrelationReport {
  std::size_t shift = 0;
  std::size_t lag1 = 1;
  std::size_t lag2 = 1;

  double value_product = 0.0;           ///< C(t;t2)
  double adjusted_value_product = 0.0;  ///< C_a(t,tau;t2,tau2)
  double volume_product = 0.0;          ///< U(t;t2)
  double price_product = 0.0;           ///< p(t;t2)
  double adjusted_price_product = 0.0;  ///< p_a(t,tau;t2,tau2)
  double return_product = 0.0;          ///< r(t,tau;t2,tau2)

  double corr_C = 0.0;
  double corr_Ca = 0.0;
  double corr_U = 0.0;
  double corr_p = 0.0;
  double corr_pa = 0.0;
  double corr_r = 0.0;
  double corr_rU = 0.0;
  double corr_rp = 0.0;
  double corr_CaU = 0.0;

  /// Extension: corr_r / sqrt(sigma_r^2(t) sigma_r^2(t2)); NaN when either
  /// volatility is not positive.
  double corr_r_normalized = std::numeric_limits<double>::quiet_NaN();
};

[[nodiscard]] inline CorrelationReport correlation_report(const PairedWindows& pair) {
  const detail::PairFrame f(pair);
  CorrelationReport out;
  out.shift = pair.shift();
  out.lag1 = pair.first().lag();
  out.lag2 = pair.second().lag();

  out.value_product = f.expectation(PairKind::value_value, 1, 1);
  out.adjusted_value_product = f.expectation(PairKind::adjvalue_adjvalue, 1, 1);
  out.volume_product = f.expectation(PairKind::volume_volume, 1, 1);
  out.price_product = f.expectation(PairKind::price_price, 1, 1);
  out.adjusted_price_product = f.expectation(PairKind::adjprice_adjprice, 1, 1);
  out.return_product = f.return_product();

  out.corr_C = out.value_product - f.a.value_moment(1) * f.b.value_moment(1);
  out.corr_Ca =
      out.adjusted_value_product - f.a.adjusted_value_moment(1) * f.b.adjusted_value_moment(1);
  out.corr_U = out.volume_product - f.a.volume_moment(1) * f.b.volume_moment(1);
  out.corr_p = out.price_product - f.a.price_moment(1) * f.b.price_moment(1);
  out.corr_pa =
      out.adjusted_price_product - f.a.adjusted_price_moment(1) * f.b.adjusted_price_moment(1);
  out.corr_r = out.return_product - f.a.return_moment(1) * f.b.return_moment(1);
  out.corr_rU = return_volume_corr(pair).definitional;
  out.corr_rp = return_price_corr(pair, 1, 1).definitional;
  out.corr_CaU = f.expectation(PairKind::adjvalue_volume, 1, 1) -
                 f.a.adjusted_value_moment(1) * f.b.volume_moment(1);

  const double var_a = f.a.return_moment(2) - f.a.return_moment(1) * f.a.return_moment(1);
  const double var_b = f.b.return_moment(2) - f.b.return_moment(1) * f.b.return_moment(1);
  if (var_a > 0.0 && var_b > 0.0) out.corr_r_normalized = out.corr_r / std::sqrt(var_a * var_b);
  return out;
}

}  // namespace vawar
