#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vawar/vawar.hpp"

namespace vawar::fixtures {

/// |a - b| <= tol * max(|a|, |b|, scale). `scale` carries the magnitude of
/// the operands when the compared quantity is a difference that cancels.
inline bool near(double a, double b, double tol, double scale = 0.0) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double mag = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  return std::abs(a - b) <= tol * mag;
}

inline double rel_err(double a, double b, double scale = 0.0) {
  const double mag = std::max({std::abs(a), std::abs(b), std::abs(scale)});
  return mag == 0.0 ? 0.0 : std::abs(a - b) / mag;
}

/// Fixture A: prices 2,2,4,2 and volumes 10,5,10,5; window = ticks 1..3 at lag 1.
inline TradeTape fixture_a() {
  const std::vector<double> prices{2.0, 2.0, 4.0, 2.0};
  const std::vector<double> volumes{10.0, 5.0, 10.0, 5.0};
  return TradeTape::from_prices_volumes(prices, volumes);
}
inline const WindowSpec kFixtureWindow{1, 3};

/// Positive tape with prices and volumes spread over several decades.
inline TradeTape random_tape(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double price0 = std::pow(10.0, -2.0 + 5.0 * unit(rng));
  const double vol = 0.5 * unit(rng);
  const double volume_scale = std::pow(10.0, -1.0 + 5.0 * unit(rng));
  const double shape = 1.5 + 3.0 * unit(rng);
  std::vector<double> prices(size), volumes(size);
  double p = price0;
  for (std::size_t i = 0; i < size; ++i) {
    if (i > 0) p *= std::exp(vol * normal(rng));
    prices[i] = p;
    volumes[i] = volume_scale * std::pow(1.0 - unit(rng), -1.0 / shape);
  }
  return TradeTape::from_prices_volumes(prices, volumes);
}

/// A random window with room for lag, a second lag and a pair shift.
struct RandomCase {
  TradeTape tape;
  WindowSpec window;
  std::size_t lag = 1;
  std::size_t lag2 = 1;
  std::size_t shift = 0;
};

inline RandomCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> count(2, 64), lag(1, 4), extra(0, 8);
  RandomCase c;
  const std::size_t N = count(rng);
  c.lag = lag(rng);
  c.lag2 = lag(rng);
  c.shift = std::uniform_int_distribution<std::size_t>(0, N + 2)(rng);
  const std::size_t start = c.shift + std::max(c.lag, c.lag2) + extra(rng);
  c.window = WindowSpec{start, N};
  c.tape = random_tape(rng, start + N + extra(rng));
  return c;
}

}  // namespace vawar::fixtures
