#pragma once

// Seeded synthetic trade tapes and the frequency-vs-value weighting contrast.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "vawar/error.hpp"
#include "vawar/moments.hpp"
#include "vawar/trade_tape.hpp"

namespace vawar {

struct ConstantPrice {
  double value = 1.0;
};

/// Multiplicative walk: p_i = p_{i-1} * exp(log_vol * z_i), z_i ~ N(0,1).
struct WalkPrice {
  double start = 100.0;
  double log_vol = 0.01;
};

/// Deterministic cycle: p_i = base * (1 + amplitude * sin(2 pi i / period)).
struct CyclePrice {
  double base = 100.0;
  double amplitude = 0.1;
  double period = 16.0;
};

struct ConstantVolume {
  double value = 100.0;
};

/// Pareto volumes: scale * (1 - u)^(-1/shape), u ~ U[0,1).
struct HeavyTailVolume {
  double scale = 100.0;
  double shape = 2.5;
};

/// Constant base volume with a single trade of volume `whale` at `position`.
/// `price_jump` multiplies the price of that one trade.
struct OneWhaleVolume {
  double base = 1.0;
  double whale = 1e9;
  std::size_t position = 0;
  double price_jump = 1.0;
};

using PriceModel = std::variant<ConstantPrice, WalkPrice, CyclePrice>;
using VolumeModel = std::variant<ConstantVolume, HeavyTailVolume, OneWhaleVolume>;

struct GenConfig {
  std::size_t ticks = 64;
  std::uint64_t seed = 0;
  double epsilon = 1.0;
  double start_time = 0.0;
  PriceModel price = WalkPrice{};
  VolumeModel volume = ConstantVolume{};
  /// Volume multiplier exp(coupling * ln(p_i / p_{i-1})).
  double coupling = 0.0;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

inline bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

inline void validate_config(const GenConfig& c) {
  using detail::positive;
  using detail::require;
  require(c.ticks >= 1, "ticks must be >= 1");
  require(positive(c.epsilon), "epsilon must be > 0");
  require(std::isfinite(c.start_time), "start_time must be finite");
  require(std::isfinite(c.coupling), "coupling must be finite");
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantPrice>) {
          require(positive(m.value), "constant price must be > 0");
        } else if constexpr (std::is_same_v<T, WalkPrice>) {
          require(positive(m.start), "walk start must be > 0");
          require(std::isfinite(m.log_vol) && m.log_vol >= 0.0, "log_vol must be >= 0");
        } else {
          require(positive(m.base), "cycle base must be > 0");
          require(std::isfinite(m.amplitude) && m.amplitude >= 0.0 && m.amplitude < 1.0,
                  "cycle amplitude must be in [0, 1)");
          require(positive(m.period), "cycle period must be > 0");
        }
      },
      c.price);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantVolume>) {
          require(positive(m.value), "constant volume must be > 0");
        } else if constexpr (std::is_same_v<T, HeavyTailVolume>) {
          require(positive(m.scale), "heavy-tail scale must be > 0");
          require(positive(m.shape), "heavy-tail shape must be > 0");
        } else {
          require(positive(m.base) && positive(m.whale), "whale volumes must be > 0");
          require(m.position < c.ticks, "whale position outside tape");
          require(positive(m.price_jump), "whale price jump must be > 0");
        }
      },
      c.volume);
}

/// Deterministic for a given (config, seed).
inline TradeTape generate(const GenConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const std::size_t n = config.ticks;
  std::vector<double> prices(n);
  std::vector<double> volumes(n);

  for (std::size_t i = 0; i < n; ++i) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ConstantPrice>) {
            prices[i] = m.value;
          } else if constexpr (std::is_same_v<T, WalkPrice>) {
            const double z = normal(rng);
            prices[i] = i == 0 ? m.start : prices[i - 1] * std::exp(m.log_vol * z);
          } else {
            prices[i] = m.base * (1.0 + m.amplitude * std::sin(2.0 * std::numbers::pi *
                                                                static_cast<double>(i) /
                                                                m.period));
          }
        },
        config.price);
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ConstantVolume>) {
            volumes[i] = m.value;
          } else if constexpr (std::is_same_v<T, HeavyTailVolume>) {
            volumes[i] = m.scale * std::pow(1.0 - uniform(rng), -1.0 / m.shape);
          } else {
            volumes[i] = i == m.position ? m.whale : m.base;
            if (i == m.position) prices[i] *= m.price_jump;
          }
        },
        config.volume);
  }

  if (config.coupling != 0.0) {
    for (std::size_t i = 1; i < n; ++i)
      volumes[i] *= std::exp(config.coupling * std::log(prices[i] / prices[i - 1]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!detail::positive(prices[i]) || !detail::positive(volumes[i]))
      throw Error(ErrorCode::InvalidConfig, "configuration produced a non-positive tick");
  }
  return TradeTape::from_prices_volumes(prices, volumes, config.epsilon, config.start_time);
}

/// Tape with `small_count` trades of current value `small_value` and return
/// `small_return`, followed by one trade of current value `whale_value` and
/// return `whale_return`. `window` covers exactly those trades at lag 1.
struct WhaleTape {
  TradeTape tape;
  WindowSpec window;
};

inline WhaleTape make_whale_tape(std::size_t small_count = 1000, double small_value = 1.0,
                                 double small_return = 1.0, double whale_value = 1e9,
                                 double whale_return = 1.1) {
  if (small_count < 1) throw Error(ErrorCode::InvalidConfig, "need at least one small trade");
  std::vector<double> prices{1.0};
  std::vector<double> volumes{small_value};
  for (std::size_t i = 0; i < small_count; ++i) {
    prices.push_back(prices.back() * small_return);
    volumes.push_back(small_value / prices.back());
  }
  prices.push_back(prices.back() * whale_return);
  volumes.push_back(whale_value / prices.back());
  return {TradeTape::from_prices_volumes(prices, volumes), WindowSpec{1, small_count + 1}};
}

struct WeightingContrast {
  double freq_mean_return = 0.0;  ///< plain mean of r(t_i, tau)
  double vawar = 0.0;             ///< value-weighted average return
  double gap = 0.0;               ///< vawar - freq_mean_return
};

inline WeightingContrast weighting_contrast(const ResolvedWindow& w) {
  const auto rs = return_series(w, ReturnForm::ratio);
  WeightingContrast out;
  out.freq_mean_return = freq_moment(rs, 1);
  out.vawar = return_moment(w, 1);
  out.gap = out.vawar - out.freq_mean_return;
  return out;
}

}  // namespace vawar
