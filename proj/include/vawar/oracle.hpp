#pragma once

// Definitional oracle for tests. Every statistic is evaluated as a literal
// loop over its defining sums straight from the tape: no normalization, no
// shared kernels, and no includes from the moments/correlations headers.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "vawar/error.hpp"
#include "vawar/trade_tape.hpp"

namespace vawar::oracle {

struct Request {
  std::string statistic;
  int n = 1;
  int m = 1;
  /// Lag of the second window; 0 means "same as the first".
  std::size_t lag2 = 0;
};

/// `lags.lag_l` is the first window's lag and `lags.window_shift_j` the pair
/// shift. Single-window statistics ignore lag2 and the shift.
inline double evaluate(const TradeTape& tape, const WindowSpec& window, const LagSpec& lags,
                       const Request& req) {
  const std::size_t N = window.count;
  const std::size_t l1 = lags.lag_l;
  const std::size_t l2 = req.lag2 == 0 ? l1 : req.lag2;
  const std::size_t j = lags.window_shift_j;
  if (N == 0 || window.start + N > tape.size() || window.start < l1)
    throw Error(ErrorCode::WindowOutOfRange, "oracle window invalid");
  const bool needs_pair = req.statistic.find("pair") != std::string::npos ||
                          req.statistic.rfind("corr_", 0) == 0;
  if (needs_pair && req.statistic != "corr_paU2" && window.start < j + l2)
    throw Error(ErrorCode::InsufficientHistory, "oracle pair lacks history");

  // Tick accessors by absolute index.
  auto p = [&](std::size_t i) { return tape[i].price; };
  auto U = [&](std::size_t i) { return tape[i].volume; };
  auto C = [&](std::size_t i) { return tape[i].value; };
  // First-window element k and its paired element in the second window.
  auto t1 = [&](std::size_t k) { return window.start + k; };
  auto t2 = [&](std::size_t k) { return window.start + k - j; };
  auto Ca1 = [&](std::size_t k) { return p(t1(k) - l1) * U(t1(k)); };
  auto Ca2 = [&](std::size_t k) { return p(t2(k) - l2) * U(t2(k)); };
  auto r1 = [&](std::size_t k) { return p(t1(k)) / p(t1(k) - l1); };
  auto r2 = [&](std::size_t k) { return p(t2(k)) / p(t2(k) - l2); };
  const double Nd = static_cast<double>(N);

  auto mean = [&](const std::function<double(std::size_t)>& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += f(k);
    return s / Nd;
  };
  auto wmean = [&](const std::function<double(std::size_t)>& f,
                   const std::function<double(std::size_t)>& w) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      num += f(k) * w(k);
      den += w(k);
    }
    return num / den;
  };
  auto pw = [](double x, int e) { return std::pow(x, e); };

  // First-window moments.
  auto C_n = [&](int n) { return mean([&](std::size_t k) { return pw(C(t1(k)), n); }); };
  auto U_n = [&](int n) { return mean([&](std::size_t k) { return pw(U(t1(k)), n); }); };
  auto Ca_n = [&](int n) { return mean([&](std::size_t k) { return pw(Ca1(k), n); }); };
  auto p_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(p(t1(k)), n); },
                 [&](std::size_t k) { return pw(U(t1(k)), n); });
  };
  auto pa_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(p(t1(k) - l1), n); },
                 [&](std::size_t k) { return pw(U(t1(k)), n); });
  };
  auto r_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(r1(k), n); },
                 [&](std::size_t k) { return pw(Ca1(k), n); });
  };
  // Second-window moments.
  auto C2_n = [&](int n) { return mean([&](std::size_t k) { return pw(C(t2(k)), n); }); };
  auto U2_n = [&](int n) { return mean([&](std::size_t k) { return pw(U(t2(k)), n); }); };
  auto Ca2_n = [&](int n) { return mean([&](std::size_t k) { return pw(Ca2(k), n); }); };
  auto p2_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(p(t2(k)), n); },
                 [&](std::size_t k) { return pw(U(t2(k)), n); });
  };
  auto pa2_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(p(t2(k) - l2), n); },
                 [&](std::size_t k) { return pw(U(t2(k)), n); });
  };
  auto r2_n = [&](int n) {
    return wmean([&](std::size_t k) { return pw(r2(k), n); },
                 [&](std::size_t k) { return pw(Ca2(k), n); });
  };

  // Cross expectations.
  const int n = req.n;
  const int m = req.m;
  auto C_pair = [&] {
    return mean([&](std::size_t k) { return pw(C(t1(k)), n) * pw(C(t2(k)), m); });
  };
  auto Ca_pair = [&] {
    return mean([&](std::size_t k) { return pw(Ca1(k), n) * pw(Ca2(k), m); });
  };
  auto U_pair = [&] {
    return mean([&](std::size_t k) { return pw(U(t1(k)), n) * pw(U(t2(k)), m); });
  };
  auto CU_pair = [&] {
    return mean([&](std::size_t k) { return pw(C(t1(k)), n) * pw(U(t2(k)), m); });
  };
  auto CaU_pair = [&] {
    return mean([&](std::size_t k) { return pw(Ca1(k), n) * pw(U(t2(k)), m); });
  };
  auto p_pair = [&] {
    return wmean([&](std::size_t k) { return pw(p(t1(k)), n) * pw(p(t2(k)), m); },
                 [&](std::size_t k) { return pw(U(t1(k)), n) * pw(U(t2(k)), m); });
  };
  auto pa_pair = [&] {
    return wmean([&](std::size_t k) { return pw(p(t1(k) - l1), n) * pw(p(t2(k) - l2), m); },
                 [&](std::size_t k) { return pw(U(t1(k)), n) * pw(U(t2(k)), m); });
  };
  auto r_pair = [&] {
    return wmean([&](std::size_t k) { return r1(k) * r2(k); },
                 [&](std::size_t k) { return Ca1(k) * Ca2(k); });
  };

  const std::string& s = req.statistic;
  if (s == "C_n") return C_n(n);
  if (s == "U_n") return U_n(n);
  if (s == "p_n") return p_n(n);
  if (s == "Ca_n") return Ca_n(n);
  if (s == "pa_n") return pa_n(n);
  if (s == "r_n") return r_n(n);
  if (s == "sigma_C2") return C_n(2) - C_n(1) * C_n(1);
  if (s == "sigma_Ca2") return Ca_n(2) - Ca_n(1) * Ca_n(1);
  if (s == "sigma_U2") return U_n(2) - U_n(1) * U_n(1);
  if (s == "sigma_p2") return p_n(2) - p_n(1) * p_n(1);
  if (s == "sigma_pa2") return pa_n(2) - pa_n(1) * pa_n(1);
  if (s == "sigma_r2") return r_n(2) - r_n(1) * r_n(1);
  if (s == "freq_mean_return") return mean(r1);
  if (s == "vawar") return r_n(1);

  if (s == "C_pair") return C_pair();
  if (s == "Ca_pair") return Ca_pair();
  if (s == "U_pair") return U_pair();
  if (s == "CU_pair") return CU_pair();
  if (s == "CaU_pair") return CaU_pair();
  if (s == "p_pair") return p_pair();
  if (s == "pa_pair") return pa_pair();
  if (s == "r_pair") return r_pair();

  if (s == "corr_C") return C_pair() - C_n(n) * C2_n(m);
  if (s == "corr_Ca") return Ca_pair() - Ca_n(n) * Ca2_n(m);
  if (s == "corr_U") return U_pair() - U_n(n) * U2_n(m);
  if (s == "corr_p") return p_pair() - p_n(n) * p2_n(m);
  if (s == "corr_pa") return pa_pair() - pa_n(n) * pa2_n(m);
  if (s == "corr_CaU") return CaU_pair() - Ca_n(n) * U2_n(m);
  if (s == "corr_r") return r_pair() - r_n(1) * r2_n(1);
  if (s == "corr_rU") {
    const double rU = wmean([&](std::size_t k) { return r1(k) * U(t2(k)); }, Ca1);
    return rU - r_n(1) * U2_n(1);
  }
  if (s == "corr_rp") {
    const double rp =
        wmean([&](std::size_t k) { return pw(r1(k), n) * pw(p(t2(k)), m); },
              [&](std::size_t k) { return pw(Ca1(k), n) * pw(U(t2(k)), m); });
    return rp - r_n(n) * p2_n(m);
  }
  if (s == "corr_paU2") {
    const double e = mean([&](std::size_t k) { return p(t1(k) - l1) * pw(U(t1(k)), 2); });
    return e - pa_n(1) * U_n(2);
  }
  throw Error(ErrorCode::UnknownStatistic, "oracle has no statistic '" + s + "'");
}

}  // namespace vawar::oracle
