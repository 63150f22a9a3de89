#pragma once

// Machine-readable report formats: JSON documents (versioned by
// schema_version), sweep CSVs, density grids, and GenConfig documents.
// All numbers are printed with 17 significant digits.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vawar/charfn.hpp"
#include "vawar/correlations.hpp"
#include "vawar/error.hpp"
#include "vawar/format.hpp"
#include "vawar/moments.hpp"
#include "vawar/synth.hpp"

namespace vawar {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline void write_json_string(std::ostream& out, const std::string& s) {
  out << Json(s).dump();
}

inline void write_json(std::ostream& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad;
        write_json_string(out, it.key());
        out << ": ";
        write_json(out, it.value(), indent, depth + 1);
      }
      out << '\n' << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << ", ";
        first = false;
        write_json(out, v, indent, depth + 1);
      }
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x)) {
        out << format_double(x);
      } else {
        out << "null";
      }
      return;
    }
    default:
      out << j.dump();
  }
}

inline Json array_of(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

}  // namespace detail

/// Pretty-printed JSON with 17-digit floats; non-finite floats become null.
inline void dump_json(std::ostream& out, const Json& j) {
  detail::write_json(out, j, 2, 0);
  out << '\n';
}

inline std::string dump_json(const Json& j) {
  std::ostringstream ss;
  dump_json(ss, j);
  return ss.str();
}

// ---------------------------------------------------------------------------
// MomentReport

inline Json to_json(const MomentReport& r) {
  Json j;
  j["window_start"] = r.window_start;
  j["window_count"] = r.window_count;
  j["lag"] = r.lag;
  j["order_max"] = r.order_max;
  Json orders = Json::array();
  for (int n = 1; n <= r.order_max; ++n) orders.push_back(n);
  j["orders"] = orders;
  j["C_n"] = detail::array_of(r.value);
  j["U_n"] = detail::array_of(r.volume);
  j["p_n"] = detail::array_of(r.price);
  j["Ca_n"] = detail::array_of(r.adjusted_value);
  j["pa_n"] = detail::array_of(r.adjusted_price);
  j["r_n"] = detail::array_of(r.returns);
  j["sigma_C2"] = r.dispersion.value;
  j["sigma_Ca2"] = r.dispersion.adjusted_value;
  j["sigma_U2"] = r.dispersion.volume;
  j["sigma_p2"] = r.dispersion.price;
  j["sigma_pa2"] = r.dispersion.adjusted_price;
  j["sigma_r2"] = r.volatility.via_moments;
  j["sigma_r2_value_form"] = r.volatility.via_values;
  j["sigma_r2_price_form"] = r.volatility.via_prices;
  Json warnings = Json::array();
  for (const auto& w : r.warnings) warnings.push_back(w);
  j["warnings"] = warnings;
  return j;
}

inline void write_moment_csv_header(std::ostream& out, int order_max) {
  out << "window_start,window_count,lag";
  for (const char* key : {"C", "U", "p", "Ca", "pa", "r"}) {
    for (int n = 1; n <= order_max; ++n) out << ',' << key << '_' << n;
  }
  out << ",sigma_C2,sigma_Ca2,sigma_U2,sigma_p2,sigma_pa2,sigma_r2,sigma_r2_value_form,"
         "sigma_r2_price_form\n";
}

inline void write_moment_csv_row(std::ostream& out, const MomentReport& r) {
  out << r.window_start << ',' << r.window_count << ',' << r.lag;
  for (const auto* series : {&r.value, &r.volume, &r.price, &r.adjusted_value,
                             &r.adjusted_price, &r.returns}) {
    for (double x : *series) out << ',' << format_double(x);
  }
  for (double x : {r.dispersion.value, r.dispersion.adjusted_value, r.dispersion.volume,
                   r.dispersion.price, r.dispersion.adjusted_price, r.volatility.via_moments,
                   r.volatility.via_values, r.volatility.via_prices}) {
    out << ',' << format_double(x);
  }
  out << '\n';
}

// ---------------------------------------------------------------------------
// Correlation sweeps

/// One record of a correlation-vs-lag sweep. Forms that do not exist for a
/// statistic are left empty in CSV and null in JSON.
struct SweepRow {
  std::size_t j = 0;
  std::size_t l1 = 1;
  std::size_t l2 = 1;
  int n = 1;
  int m = 1;
  std::string statistic;
  std::optional<double> value_form;
  std::optional<double> price_form;
  std::optional<double> definitional;
};

inline void write_sweep_csv_header(std::ostream& out) {
  out << "j,l1,l2,n,m,statistic,value_form,price_form,definitional\n";
}

inline void write_sweep_csv_row(std::ostream& out, const SweepRow& row) {
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  out << row.j << ',' << row.l1 << ',' << row.l2 << ',' << row.n << ',' << row.m << ','
      << row.statistic << ',' << opt(row.value_form) << ',' << opt(row.price_form) << ','
      << opt(row.definitional) << '\n';
}

inline Json to_json(const SweepRow& row) {
  auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
  Json j;
  j["j"] = row.j;
  j["l1"] = row.l1;
  j["l2"] = row.l2;
  j["n"] = row.n;
  j["m"] = row.m;
  j["statistic"] = row.statistic;
  j["value_form"] = opt(row.value_form);
  j["price_form"] = opt(row.price_form);
  j["definitional"] = opt(row.definitional);
  return j;
}

inline Json to_json(const CorrelationReport& r) {
  Json j;
  j["j"] = r.shift;
  j["l1"] = r.lag1;
  j["l2"] = r.lag2;
  j["C_pair"] = r.value_product;
  j["Ca_pair"] = r.adjusted_value_product;
  j["U_pair"] = r.volume_product;
  j["p_pair"] = r.price_product;
  j["pa_pair"] = r.adjusted_price_product;
  j["r_pair"] = r.return_product;
  j["corr_C"] = r.corr_C;
  j["corr_Ca"] = r.corr_Ca;
  j["corr_U"] = r.corr_U;
  j["corr_p"] = r.corr_p;
  j["corr_pa"] = r.corr_pa;
  j["corr_r"] = r.corr_r;
  j["corr_rU"] = r.corr_rU;
  j["corr_rp"] = r.corr_rp;
  j["corr_CaU"] = r.corr_CaU;
  j["corr_r_normalized_ext"] =
      std::isfinite(r.corr_r_normalized) ? Json(r.corr_r_normalized) : Json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Density grids

inline void write_density_csv(std::ostream& out, const DensityGrid& grid) {
  out << "r,density\n";
  for (std::size_t k = 0; k < grid.r.size(); ++k)
    out << format_double(grid.r[k]) << ',' << format_double(grid.density[k]) << '\n';
}

inline Json density_sidecar(const DensityGrid& grid) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["m"] = grid.approx.order;
  j["a_n"] = detail::array_of(grid.approx.coeffs);
  j["source_moments"] = detail::array_of(grid.approx.source_moments);
  j["b"] = grid.approx.damping_b;
  j["q"] = grid.approx.damping_q;
  Json spec;
  spec["r_min"] = grid.r.empty() ? 0.0 : grid.r.front();
  spec["r_max"] = grid.r.empty() ? 0.0 : grid.r.back();
  spec["points"] = grid.r.size();
  spec["step"] = grid.step;
  spec["x_extent"] = grid.x_extent;
  spec["x_points"] = grid.x_points;
  j["grid"] = spec;
  j["normalization"] = grid.normalization;
  j["normalization_residual"] = grid.normalization - 1.0;
  Json moments = Json::array();
  for (int n = 1; n <= grid.approx.order; ++n) moments.push_back(grid_moment(grid, n));
  j["grid_moments"] = moments;
  j["min_density"] = grid.min_density;
  j["negative_points"] = grid.negative_points;
  Json diags = Json::array();
  for (const auto& d : grid.diagnostics) diags.push_back(d);
  j["diagnostics"] = diags;
  return j;
}

// ---------------------------------------------------------------------------
// GenConfig
//
// {"ticks": 64, "seed": 7, "epsilon": 1, "start_time": 0, "coupling": 0,
//  "price":  {"model": "constant"|"walk"|"cycle", ...},
//  "volume": {"model": "constant"|"heavy_tail"|"one_whale", ...}}

inline GenConfig gen_config_from_json(const Json& j) {
  try {
    GenConfig c;
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    c.ticks = j.value("ticks", c.ticks);
    c.seed = j.value("seed", c.seed);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.start_time = j.value("start_time", c.start_time);
    c.coupling = j.value("coupling", c.coupling);
    if (j.contains("price")) {
      const auto& p = j.at("price");
      const auto model = p.at("model").get<std::string>();
      if (model == "constant") {
        c.price = ConstantPrice{p.value("value", 1.0)};
      } else if (model == "walk") {
        c.price = WalkPrice{p.value("start", 100.0), p.value("log_vol", 0.01)};
      } else if (model == "cycle") {
        c.price = CyclePrice{p.value("base", 100.0), p.value("amplitude", 0.1),
                             p.value("period", 16.0)};
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown price model '" + model + "'");
      }
    }
    if (j.contains("volume")) {
      const auto& v = j.at("volume");
      const auto model = v.at("model").get<std::string>();
      if (model == "constant") {
        c.volume = ConstantVolume{v.value("value", 100.0)};
      } else if (model == "heavy_tail") {
        c.volume = HeavyTailVolume{v.value("scale", 100.0), v.value("shape", 2.5)};
      } else if (model == "one_whale") {
        c.volume = OneWhaleVolume{v.value("base", 1.0), v.value("whale", 1e9),
                                  v.value("position", std::size_t{0}),
                                  v.value("price_jump", 1.0)};
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown volume model '" + model + "'");
      }
    }
    validate_config(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

inline Json to_json(const GenConfig& c) {
  Json j;
  j["ticks"] = c.ticks;
  j["seed"] = c.seed;
  j["epsilon"] = c.epsilon;
  j["start_time"] = c.start_time;
  j["coupling"] = c.coupling;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantPrice>) {
          j["price"] = {{"model", "constant"}, {"value", m.value}};
        } else if constexpr (std::is_same_v<T, WalkPrice>) {
          j["price"] = {{"model", "walk"}, {"start", m.start}, {"log_vol", m.log_vol}};
        } else {
          j["price"] = {{"model", "cycle"},
                        {"base", m.base},
                        {"amplitude", m.amplitude},
                        {"period", m.period}};
        }
      },
      c.price);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantVolume>) {
          j["volume"] = {{"model", "constant"}, {"value", m.value}};
        } else if constexpr (std::is_same_v<T, HeavyTailVolume>) {
          j["volume"] = {{"model", "heavy_tail"}, {"scale", m.scale}, {"shape", m.shape}};
        } else {
          j["volume"] = {{"model", "one_whale"},
                         {"base", m.base},
                         {"whale", m.whale},
                         {"position", m.position},
                         {"price_jump", m.price_jump}};
        }
      },
      c.volume);
  return j;
}

}  // namespace vawar
