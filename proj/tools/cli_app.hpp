#pragma once

// Command-line surface. `run` is separated from main() so tests can drive
// it in-process with string streams.
//
// Exit status: 0 success, 1 validation/data failure, 2 usage error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vawar/io.hpp"
#include "vawar/vawar.hpp"

namespace vawar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Worker count for sweeps: VAWAR_THREADS if set and positive, else 1.
inline std::size_t thread_count() {
  if (const char* env = std::getenv("VAWAR_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// Evaluates f(0..count-1) on up to `threads` workers; results keep index order.
template <class T>
std::vector<T> ordered_map(std::size_t count, std::size_t threads,
                           const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < count; i += threads) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, count));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct InputOptions {
  std::string path = "-";
  std::string value_format = "derive_value";
  std::optional<double> epsilon;
};

struct WindowOptions {
  std::size_t count = 0;
  std::optional<std::size_t> start;
  std::size_t lag = 1;
};

struct OutputOptions {
  std::string format = "json";
  std::string path = "-";
};

class App {
 public:
  App(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Value-weighted return statistics from trade tapes", "vawar"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "vawar 1.0.0");

    InputOptions input;
    WindowOptions window;
    OutputOptions output;

    auto add_input = [&](CLI::App* sub) {
      sub->add_option("-i,--input", input.path, "Tape CSV path, or - for stdin")
          ->capture_default_str();
      sub->add_option("--value-format", input.value_format, "with_value | derive_value")
          ->check(CLI::IsMember({"with_value", "derive_value"}))
          ->capture_default_str();
      sub->add_option("--epsilon", input.epsilon,
                      "Tick spacing (inferred from the first two rows when omitted)")
          ->check(CLI::PositiveNumber);
    };
    auto add_window = [&](CLI::App* sub) {
      sub->add_option("-w,--window", window.count, "Ticks per window (N >= 2)")
          ->required()
          ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
      sub->add_option("-s,--start", window.start, "First tick index of the window (default: lag)");
      sub->add_option("-l,--lag", window.lag, "Return lag l (tau = epsilon*l)")
          ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
          ->capture_default_str();
    };
    auto add_output = [&](CLI::App* sub, bool csv_ok) {
      auto* opt = sub->add_option("-f,--format", output.format, "json | csv")
                      ->capture_default_str();
      if (csv_ok) {
        opt->check(CLI::IsMember({"json", "csv"}));
      } else {
        opt->check(CLI::IsMember({"json"}));
      }
      sub->add_option("-o,--output", output.path, "Output path, or - for stdout")
          ->capture_default_str();
    };

    // validate
    auto* validate = app.add_subcommand("validate", "Check a tape and report row-level errors");
    add_input(validate);
    std::string validate_format = "text";
    validate->add_option("-f,--format", validate_format, "text | json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    // stats
    auto* stats = app.add_subcommand("stats", "Moment report per window");
    add_input(stats);
    add_window(stats);
    add_output(stats, true);
    int order = 2;
    int order_cap = kDefaultOrderCap;
    std::size_t windows = 1;
    std::optional<std::size_t> stride;
    stats->add_option("-m,--order", order, "Highest moment order")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    stats->add_option("--order-cap", order_cap, "Warn above this order")->capture_default_str();
    stats->add_option("--windows", windows, "Number of windows in the sweep")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    stats->add_option("--stride", stride, "Start increment between windows (default: N)")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));

    // acorr
    auto* acorr = app.add_subcommand("acorr", "Return autocorrelation vs pair shift j");
    add_input(acorr);
    add_window(acorr);
    add_output(acorr, true);
    std::optional<std::size_t> lag2;
    std::size_t max_shift = 0;
    acorr->add_option("--lag2", lag2, "Lag of the shifted window (default: lag)")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
    acorr->add_option("--max-shift", max_shift, "Sweep j = 0..max-shift")->capture_default_str();

    // xcorr
    auto* xcorr = app.add_subcommand("xcorr", "Return-volume and return-price correlations");
    add_input(xcorr);
    add_window(xcorr);
    add_output(xcorr, true);
    std::size_t shift = 0;
    int degree_n = 1;
    int degree_m = 1;
    xcorr->add_option("-j,--shift", shift, "Pair shift j")->capture_default_str();
    xcorr->add_option("-n,--n", degree_n, "Return degree")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    xcorr->add_option("-M,--m", degree_m, "Price degree")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();

    // density
    auto* density = app.add_subcommand("density", "Fit Q_m and write a density grid");
    add_input(density);
    density->add_option("-w,--window", window.count, "Ticks per window (N >= 2)")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    density->add_option("-s,--start", window.start, "First tick index of the window");
    density->add_option("-l,--lag", window.lag, "Return lag l")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    int density_order = 2;
    std::vector<double> given_moments;
    std::optional<double> damping_b;
    std::optional<int> damping_q;
    GridSpec grid_spec;
    std::optional<double> r_min, r_max, x_extent;
    std::string density_out = "-";
    std::optional<std::string> sidecar;
    density->add_option("-m,--order", density_order, "Approximation order m")
        ->check(CLI::Range(1, 16))
        ->capture_default_str();
    density->add_option("--moments", given_moments,
                        "Use these moments r_1..r_m instead of a tape window")
        ->delimiter(',');
    density->add_option("--b", damping_b, "Damping b")->check(CLI::NonNegativeNumber);
    density->add_option("--q", damping_q, "Damping exponent q (2q > m)");
    density->add_option("--points", grid_spec.points, "r grid points")->capture_default_str();
    density->add_option("--r-min", r_min, "Lower end of the r grid");
    density->add_option("--r-max", r_max, "Upper end of the r grid");
    density->add_option("--x-extent", x_extent, "Integration half-extent in x");
    density->add_option("--x-points", grid_spec.x_points, "Integration points")
        ->capture_default_str();
    density->add_option("-o,--output", density_out, "Density CSV path, or - for stdout")
        ->capture_default_str();
    density->add_option("--sidecar", sidecar,
                        "JSON sidecar path (default: <output>.json when writing a file)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic tape");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> ticks;
    bool with_value = false;
    simulate->add_option("-c,--config", config_path, "GenConfig JSON path, or - for stdin")
        ->required();
    simulate->add_option("--seed", seed, "Override the config seed");
    simulate->add_option("--ticks", ticks, "Override the config tick count");
    simulate->add_flag("--with-value", with_value, "Emit the value column");
    simulate->add_option("-o,--output", output.path, "Output path, or - for stdout")
        ->capture_default_str();

    // contrast
    auto* contrast = app.add_subcommand("contrast", "Frequency mean vs value-weighted return");
    add_input(contrast);
    add_window(contrast);
    add_output(contrast, true);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::CallForVersion& e) {
      out_ << e.what() << '\n';
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << "usage error: " << e.what() << '\n';
      return kExitUsage;
    }

    try {
      if (*validate) return cmd_validate(input, validate_format);
      if (*stats) {
        return cmd_stats(input, window, output, order, order_cap, windows,
                         stride.value_or(window.count));
      }
      if (*acorr) return cmd_acorr(input, window, output, lag2.value_or(window.lag), max_shift);
      if (*xcorr) return cmd_xcorr(input, window, output, shift, degree_n, degree_m);
      if (*density) {
        ApproxOptions approx;
        approx.damping_b = damping_b;
        approx.damping_q = damping_q;
        grid_spec.r_min = r_min;
        grid_spec.r_max = r_max;
        grid_spec.x_extent = x_extent;
        return cmd_density(input, window, density_order, given_moments, approx, grid_spec,
                           density_out, sidecar);
      }
      if (*simulate) return cmd_simulate(config_path, seed, ticks, with_value, output.path);
      if (*contrast) return cmd_contrast(input, window, output);
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitData;
    }
    return kExitUsage;
  }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;

  static ValueFormat parse_format(const std::string& s) {
    return s == "with_value" ? ValueFormat::with_value : ValueFormat::derive_value;
  }

  /// Runs `body` with the requested input stream open.
  template <class F>
  auto with_input(const std::string& path, F&& body) {
    if (path == "-") return body(in_);
    std::ifstream file(path);
    if (!file) throw UsageError("cannot open input '" + path + "'");
    return body(file);
  }

  TradeTape load(const InputOptions& input) {
    return with_input(input.path, [&](std::istream& s) {
      return ingest(s, IngestOptions{parse_format(input.value_format), input.epsilon});
    });
  }

  template <class F>
  void emit(const std::string& path, F&& body) {
    if (path == "-") {
      body(out_);
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError("cannot open output '" + path + "'");
    body(file);
  }

  static Json envelope(const char* command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
  }

  static WindowSpec window_at(const WindowOptions& w) {
    return WindowSpec{w.start.value_or(w.lag), w.count};
  }

  /// Prefixes data errors with the window coordinates they came from.
  template <class F>
  static auto at_window(std::size_t start, std::size_t count, F&& body) {
    try {
      return body();
    } catch (const Error& e) {
      throw Error(e.code(),
                  e.message() + " [window start=" + std::to_string(start) +
                      " count=" + std::to_string(count) + "]",
                  e.row());
    }
  }

  int cmd_validate(const InputOptions& input, const std::string& format) {
    std::vector<Error> errors;
    std::size_t ticks = 0;
    std::string text;
    with_input(input.path, [&](std::istream& s) {
      std::ostringstream copy;
      copy << s.rdbuf();
      text = copy.str();
      return 0;
    });
    {
      std::istringstream s(text);
      errors = validate(s, IngestOptions{parse_format(input.value_format), input.epsilon});
    }
    if (errors.empty()) {
      std::istringstream s(text);
      ticks = ingest(s, IngestOptions{parse_format(input.value_format), input.epsilon}).size();
    }
    if (format == "json") {
      Json j = envelope("validate");
      j["ok"] = errors.empty();
      j["ticks"] = ticks;
      Json list = Json::array();
      for (const auto& e : errors) {
        Json item;
        item["row"] = e.row() ? Json(*e.row()) : Json(nullptr);
        item["code"] = std::string(to_string(e.code()));
        item["message"] = e.what();
        list.push_back(item);
      }
      j["errors"] = list;
      dump_json(out_, j);
    } else if (errors.empty()) {
      out_ << "ok: " << ticks << " ticks\n";
    } else {
      for (const auto& e : errors) out_ << e.what() << '\n';
    }
    return errors.empty() ? kExitOk : kExitData;
  }

  int cmd_stats(const InputOptions& input, const WindowOptions& wopt,
                const OutputOptions& output, int order, int order_cap, std::size_t windows,
                std::size_t stride) {
    const TradeTape tape = load(input);
    const WindowSpec first = window_at(wopt);
    const auto reports = ordered_map<MomentReport>(
        windows, thread_count(), [&](std::size_t k) {
          const WindowSpec spec{first.start + k * stride, first.count};
          return at_window(spec.start, spec.count, [&] {
            return moment_report(resolve(tape, spec, wopt.lag), order,
                                 MomentOptions{order_cap});
          });
        });
    for (const auto& r : reports) {
      for (const auto& w : r.warnings)
        err_ << "warning: window " << r.window_start << ": " << w << '\n';
    }
    emit(output.path, [&](std::ostream& os) {
      if (output.format == "csv") {
        write_moment_csv_header(os, order);
        for (const auto& r : reports) write_moment_csv_row(os, r);
      } else {
        Json j = envelope("stats");
        Json list = Json::array();
        for (const auto& r : reports) list.push_back(to_json(r));
        j["reports"] = list;
        dump_json(os, j);
      }
    });
    return kExitOk;
  }

  void emit_rows(const OutputOptions& output, const char* command,
                 const std::vector<SweepRow>& rows, const std::optional<Json>& extra = {}) {
    emit(output.path, [&](std::ostream& os) {
      if (output.format == "csv") {
        write_sweep_csv_header(os);
        for (const auto& r : rows) write_sweep_csv_row(os, r);
      } else {
        Json j = envelope(command);
        Json list = Json::array();
        for (const auto& r : rows) list.push_back(to_json(r));
        j["rows"] = list;
        if (extra) j["correlation_report"] = *extra;
        dump_json(os, j);
      }
    });
  }

  int cmd_acorr(const InputOptions& input, const WindowOptions& wopt,
                const OutputOptions& output, std::size_t lag2, std::size_t max_shift) {
    const TradeTape tape = load(input);
    const WindowSpec spec = window_at(wopt);
    const auto per_shift = ordered_map<std::vector<SweepRow>>(
        max_shift + 1, thread_count(), [&](std::size_t j) {
          return at_window(spec.start, spec.count, [&] {
            const auto pair = resolve_pair(tape, spec, wopt.lag, lag2, j);
            const auto ac = return_autocorr(pair);
            std::vector<SweepRow> rows;
            rows.push_back({j, wopt.lag, lag2, 1, 1, "corr_r", ac.value_form, ac.price_form,
                            ac.corr_r});
            if (j == 0 && lag2 != wopt.lag) {
              const auto sd = same_day_two_lag_autocorr(tape, spec, wopt.lag, lag2);
              rows.push_back({j, wopt.lag, lag2, 1, 1, "corr_r_same_day_approx",
                              sd.approximation, std::nullopt, sd.exact});
            }
            return rows;
          });
        });
    std::vector<SweepRow> rows;
    for (const auto& chunk : per_shift) rows.insert(rows.end(), chunk.begin(), chunk.end());
    emit_rows(output, "acorr", rows);
    return kExitOk;
  }

  int cmd_xcorr(const InputOptions& input, const WindowOptions& wopt,
                const OutputOptions& output, std::size_t shift, int n, int m) {
    const TradeTape tape = load(input);
    const WindowSpec spec = window_at(wopt);
    return at_window(spec.start, spec.count, [&] {
      const auto pair = resolve_pair(tape, spec, wopt.lag, wopt.lag, shift);
      const auto ru = return_volume_corr(pair);
      const auto rp = return_price_corr(pair, n, m);
      const auto pu = adjprice_volume_sq_corr(pair.first());
      std::vector<SweepRow> rows;
      rows.push_back({shift, wopt.lag, wopt.lag, 1, 1, "corr_rU", ru.closed_form,
                      ru.closed_form_price, ru.definitional});
      rows.push_back({shift, wopt.lag, wopt.lag, n, m, "corr_rp", rp.closed_form,
                      rp.same_day_form, rp.definitional});
      rows.push_back({0, wopt.lag, wopt.lag, 1, 2, "corr_paU2", pu.identity, std::nullopt,
                      pu.direct});
      emit_rows(output, "xcorr", rows, to_json(correlation_report(pair)));
      return kExitOk;
    });
  }

  int cmd_density(const InputOptions& input, const WindowOptions& wopt, int order,
                  const std::vector<double>& given, const ApproxOptions& approx_options,
                  const GridSpec& spec, const std::string& out_path,
                  const std::optional<std::string>& sidecar) {
    std::vector<double> moments = given;
    if (moments.empty()) {
      if (wopt.count < 2) throw UsageError("density needs --window or --moments");
      const TradeTape tape = load(input);
      const WindowSpec w = window_at(wopt);
      const auto report =
          at_window(w.start, w.count, [&] { return moment_report(resolve(tape, w, wopt.lag), order); });
      moments = report.returns;
    }
    const auto approx = fit_charfn(moments, approx_options);
    const auto grid = invert_density(approx, spec);
    for (const auto& d : grid.diagnostics) err_ << "warning: " << d << '\n';
    emit(out_path, [&](std::ostream& os) { write_density_csv(os, grid); });
    std::optional<std::string> sidecar_path = sidecar;
    if (!sidecar_path && out_path != "-") {
      const auto dot = out_path.rfind('.');
      const auto slash = out_path.find_last_of('/');
      const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
      sidecar_path = (has_ext ? out_path.substr(0, dot) : out_path) + ".json";
    }
    if (sidecar_path) emit(*sidecar_path, [&](std::ostream& os) { dump_json(os, density_sidecar(grid)); });
    return kExitOk;
  }

  int cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                   const std::optional<std::size_t>& ticks, bool with_value,
                   const std::string& out_path) {
    Json doc = with_input(config_path, [&](std::istream& s) {
      try {
        return Json::parse(s);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
      }
    });
    GenConfig config = gen_config_from_json(doc);
    if (seed) config.seed = *seed;
    if (ticks) config.ticks = *ticks;
    const TradeTape tape = generate(config);
    emit(out_path, [&](std::ostream& os) { write_csv(os, tape, with_value); });
    return kExitOk;
  }

  int cmd_contrast(const InputOptions& input, const WindowOptions& wopt,
                   const OutputOptions& output) {
    const TradeTape tape = load(input);
    const WindowSpec spec = window_at(wopt);
    const auto c = at_window(spec.start, spec.count,
                             [&] { return weighting_contrast(resolve(tape, spec, wopt.lag)); });
    emit(output.path, [&](std::ostream& os) {
      if (output.format == "csv") {
        os << "window_start,window_count,lag,freq_mean_return,vawar,gap\n";
        os << spec.start << ',' << spec.count << ',' << wopt.lag << ','
           << format_double(c.freq_mean_return) << ',' << format_double(c.vawar) << ','
           << format_double(c.gap) << '\n';
      } else {
        Json j = envelope("contrast");
        j["window_start"] = spec.start;
        j["window_count"] = spec.count;
        j["lag"] = wopt.lag;
        j["freq_mean_return"] = c.freq_mean_return;
        j["vawar"] = c.vawar;
        j["gap"] = c.gap;
        dump_json(os, j);
      }
    });
    return kExitOk;
  }
};

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
               std::ostream& err) {
  return App(in, out, err).run(argc, argv);
}

}  // namespace vawar::cli
