#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vawar/error.hpp"
#include "vawar/format.hpp"

namespace vawar {

/// One executed trade. `value` is the traded amount in currency and equals
/// price * volume.
struct TradeTick {
  std::size_t index = 0;
  double time = 0.0;
  double price = 0.0;
  double volume = 0.0;
  double value = 0.0;
};

inline constexpr double kValueTolerance = 1e-9;
inline constexpr double kSpacingTolerance = 1e-6;

/// Checks one tick in isolation. Throws Error tagged with `row` if given.
inline void check_tick(const TradeTick& t, std::optional<std::size_t> row = std::nullopt) {
  if (!std::isfinite(t.time) || !std::isfinite(t.price) || !std::isfinite(t.volume) ||
      !std::isfinite(t.value)) {
    throw Error(ErrorCode::NonFinite, "tick fields must be finite", row);
  }
  if (t.price <= 0.0) throw Error(ErrorCode::NonPositiveField, "price must be > 0", row);
  if (t.volume <= 0.0) throw Error(ErrorCode::NonPositiveField, "volume must be > 0", row);
  if (t.value <= 0.0) throw Error(ErrorCode::NonPositiveField, "value must be > 0", row);
  const double expected = t.price * t.volume;
  if (std::abs(t.value - expected) / t.value > kValueTolerance) {
    throw Error(ErrorCode::ValueMismatch,
                "value " + format_double(t.value) + " != price*volume " +
                    format_double(expected),
                row);
  }
}

inline void check_spacing(double previous_time, double time, double epsilon,
                          std::optional<std::size_t> row = std::nullopt) {
  const double step = time - previous_time;
  if (std::abs(step - epsilon) > kSpacingTolerance * epsilon) {
    throw Error(ErrorCode::NonUniformSpacing,
                "time step " + format_double(step) + " differs from epsilon " +
                    format_double(epsilon),
                row);
  }
}

/// Immutable, uniformly spaced sequence of trades. Indices run 0..size()-1.
class TradeTape {
 public:
  TradeTape() = default;

  /// Validates and takes ownership. Tick indices are reassigned to 0..n-1.
  static TradeTape from_ticks(std::vector<TradeTick> ticks, double epsilon) {
    if (ticks.empty()) throw Error(ErrorCode::EmptyTape, "tape has no ticks");
    if (!std::isfinite(epsilon) || epsilon <= 0.0)
      throw Error(ErrorCode::InvalidArgument, "epsilon must be positive and finite");
    for (std::size_t i = 0; i < ticks.size(); ++i) {
      ticks[i].index = i;
      check_tick(ticks[i]);
      if (i > 0) check_spacing(ticks[i - 1].time, ticks[i].time, epsilon);
    }
    TradeTape tape;
    tape.ticks_ = std::move(ticks);
    tape.epsilon_ = epsilon;
    return tape;
  }

  /// Builds ticks at times start_time + i*epsilon with value = price*volume.
  static TradeTape from_prices_volumes(std::span<const double> prices,
                                       std::span<const double> volumes,
                                       double epsilon = 1.0, double start_time = 0.0) {
    if (prices.size() != volumes.size())
      throw Error(ErrorCode::InvalidArgument, "prices and volumes differ in length");
    std::vector<TradeTick> ticks(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
      ticks[i] = {i, start_time + epsilon * static_cast<double>(i), prices[i], volumes[i],
                  prices[i] * volumes[i]};
    }
    return from_ticks(std::move(ticks), epsilon);
  }

  [[nodiscard]] std::size_t size() const noexcept { return ticks_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ticks_.empty(); }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
  [[nodiscard]] std::span<const TradeTick> ticks() const noexcept { return ticks_; }
  [[nodiscard]] const TradeTick& operator[](std::size_t i) const noexcept { return ticks_[i]; }

  [[nodiscard]] double price(std::size_t i) const noexcept { return ticks_[i].price; }
  [[nodiscard]] double volume(std::size_t i) const noexcept { return ticks_[i].volume; }
  [[nodiscard]] double value(std::size_t i) const noexcept { return ticks_[i].value; }
  [[nodiscard]] double time(std::size_t i) const noexcept { return ticks_[i].time; }

 private:
  std::vector<TradeTick> ticks_;
  double epsilon_ = 1.0;
};

/// Averaging interval ("trading day") of `count` consecutive ticks.
struct WindowSpec {
  std::size_t start = 0;
  std::size_t count = 2;
};

/// Return lag tau = epsilon * lag_l and pair shift lambda = epsilon * window_shift_j.
struct LagSpec {
  std::size_t lag_l = 1;
  std::size_t window_shift_j = 0;
};

/// Window whose every tick has its lagged price inside the tape.
///
/// Holds a view of the tape; the tape must outlive it. Element k of the
/// window is tape tick start()+k and its lagged partner is start()+k-lag().
class ResolvedWindow {
 public:
  ResolvedWindow(const TradeTape& tape, std::size_t start, std::size_t count, std::size_t lag)
      : tape_(&tape), start_(start), count_(count), lag_(lag) {}

  [[nodiscard]] const TradeTape& tape() const noexcept { return *tape_; }
  [[nodiscard]] std::size_t start() const noexcept { return start_; }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t lag() const noexcept { return lag_; }

  [[nodiscard]] std::size_t index(std::size_t k) const noexcept { return start_ + k; }
  [[nodiscard]] std::size_t lagged_index(std::size_t k) const noexcept {
    return start_ + k - lag_;
  }

  [[nodiscard]] double price(std::size_t k) const noexcept { return tape_->price(index(k)); }
  [[nodiscard]] double lagged_price(std::size_t k) const noexcept {
    return tape_->price(lagged_index(k));
  }
  [[nodiscard]] double volume(std::size_t k) const noexcept { return tape_->volume(index(k)); }
  [[nodiscard]] double value(std::size_t k) const noexcept { return tape_->value(index(k)); }

  [[nodiscard]] std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out(count_);
    for (std::size_t k = 0; k < count_; ++k) out[k] = index(k);
    return out;
  }

 private:
  const TradeTape* tape_;
  std::size_t start_;
  std::size_t count_;
  std::size_t lag_;
};

inline ResolvedWindow resolve(const TradeTape& tape, const WindowSpec& window, std::size_t lag_l) {
  if (window.count < 2)
    throw Error(ErrorCode::WindowOutOfRange, "window needs at least 2 ticks");
  if (window.start >= tape.size() || window.count > tape.size() - window.start) {
    throw Error(ErrorCode::WindowOutOfRange,
                "window [" + std::to_string(window.start) + ", " +
                    std::to_string(window.start + window.count) + ") exceeds tape of " +
                    std::to_string(tape.size()) + " ticks");
  }
  if (lag_l < 1) throw Error(ErrorCode::InvalidArgument, "lag must be >= 1");
  if (window.start < lag_l) {
    throw Error(ErrorCode::InsufficientHistory,
                "window start " + std::to_string(window.start) + " needs lag " +
                    std::to_string(lag_l) + " ticks of history");
  }
  return ResolvedWindow(tape, window.start, window.count, lag_l);
}

inline ResolvedWindow resolve(const TradeTape& tape, const WindowSpec& window,
                              const LagSpec& lags) {
  return resolve(tape, window, lags.lag_l);
}

// ---------------------------------------------------------------------------
// CSV ingestion

enum class ValueFormat { with_value, derive_value };

struct IngestOptions {
  ValueFormat format = ValueFormat::derive_value;
  /// Tick spacing. Inferred from the first two rows when absent.
  std::optional<double> epsilon;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      return out;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
}

/// Streaming row reader shared by strict ingest and the collecting validator.
class CsvTickReader {
 public:
  CsvTickReader(std::istream& in, ValueFormat format) : in_(in), format_(format) {}

  /// Reads and checks the header. Throws MalformedRow at row 1.
  void read_header() {
    std::string line;
    if (!std::getline(in_, line)) throw Error(ErrorCode::EmptyTape, "empty input", 1);
    row_ = 1;
    auto s = std::string_view(line);
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    const auto cols = split_commas(s);
    const bool base = cols.size() >= 3 && cols[0] == "time" && cols[1] == "price" &&
                      cols[2] == "volume";
    if (!base || cols.size() > 4 || (cols.size() == 4 && cols[3] != "value")) {
      throw Error(ErrorCode::MalformedRow, "header must be time,price,volume[,value]", 1);
    }
    has_value_ = cols.size() == 4;
    if (format_ == ValueFormat::with_value && !has_value_) {
      throw Error(ErrorCode::MalformedRow, "with_value format needs a value column", 1);
    }
  }

  /// Next data row, or nullopt at end. Row-level problems throw with the row number.
  std::optional<TradeTick> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++row_;
      if (trim(line).empty()) continue;
      const auto cols = split_commas(line);
      const std::size_t expected = has_value_ ? 4 : 3;
      if (cols.size() != expected) {
        throw Error(ErrorCode::MalformedRow,
                    "expected " + std::to_string(expected) + " fields, got " +
                        std::to_string(cols.size()),
                    row_);
      }
      double fields[4] = {0, 0, 0, 0};
      for (std::size_t c = 0; c < expected; ++c) {
        auto v = parse_double(cols[c]);
        if (!v) {
          throw Error(ErrorCode::MalformedRow,
                      "cannot parse field '" + std::string(cols[c]) + "'", row_);
        }
        fields[c] = *v;
      }
      TradeTick t{count_++, fields[0], fields[1], fields[2], 0.0};
      t.value = format_ == ValueFormat::with_value ? fields[3] : t.price * t.volume;
      return t;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t row() const noexcept { return row_; }

 private:
  std::istream& in_;
  ValueFormat format_;
  bool has_value_ = false;
  std::size_t row_ = 0;
  std::size_t count_ = 0;
};

}  // namespace detail

/// Strict ingestion: fails on the first bad row, reporting its line number
/// (the header is row 1).
inline TradeTape ingest(std::istream& source, const IngestOptions& options = {}) {
  detail::CsvTickReader reader(source, options.format);
  reader.read_header();
  std::vector<TradeTick> ticks;
  std::vector<std::size_t> rows;
  std::optional<double> epsilon = options.epsilon;
  if (epsilon && (!std::isfinite(*epsilon) || *epsilon <= 0.0))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be positive and finite");
  while (auto tick = reader.next()) {
    check_tick(*tick, reader.row());
    if (!ticks.empty()) {
      if (!epsilon) epsilon = tick->time - ticks.back().time;
      if (!(*epsilon > 0.0)) {
        throw Error(ErrorCode::NonUniformSpacing, "times must be strictly increasing",
                    reader.row());
      }
      check_spacing(ticks.back().time, tick->time, *epsilon, reader.row());
    }
    ticks.push_back(*tick);
  }
  if (ticks.empty()) throw Error(ErrorCode::EmptyTape, "no data rows");
  return TradeTape::from_ticks(std::move(ticks), epsilon.value_or(1.0));
}

/// Collecting validation: reports every bad row instead of stopping.
/// Malformed rows are skipped; spacing is checked between consecutive
/// rows that parsed.
inline std::vector<Error> validate(std::istream& source, const IngestOptions& options = {}) {
  std::vector<Error> errors;
  detail::CsvTickReader reader(source, options.format);
  try {
    reader.read_header();
  } catch (const Error& e) {
    errors.push_back(e);
    return errors;
  }
  std::optional<double> epsilon = options.epsilon;
  std::optional<double> previous_time;
  std::size_t good = 0;
  while (true) {
    std::optional<TradeTick> tick;
    try {
      tick = reader.next();
    } catch (const Error& e) {
      errors.push_back(e);
      // Assume the unreadable row sat on the grid so it does not also
      // produce a spacing error on the next good row.
      if (previous_time && epsilon) *previous_time += *epsilon;
      continue;
    }
    if (!tick) break;
    try {
      check_tick(*tick, reader.row());
      ++good;
    } catch (const Error& e) {
      errors.push_back(e);
    }
    if (std::isfinite(tick->time)) {
      if (previous_time) {
        if (!epsilon) epsilon = tick->time - *previous_time;
        try {
          if (!(*epsilon > 0.0))
            throw Error(ErrorCode::NonUniformSpacing, "times must be strictly increasing",
                        reader.row());
          check_spacing(*previous_time, tick->time, *epsilon, reader.row());
        } catch (const Error& e) {
          errors.push_back(e);
        }
      }
      previous_time = tick->time;
    }
  }
  if (good == 0 && errors.empty()) errors.emplace_back(ErrorCode::EmptyTape, "no data rows");
  return errors;
}

/// Writes the ingest CSV format. Numbers use 17 significant digits so a
/// derive_value tape re-ingests bit-for-bit.
inline void write_csv(std::ostream& out, const TradeTape& tape, bool with_value = false) {
  out << (with_value ? "time,price,volume,value\n" : "time,price,volume\n");
  for (const auto& t : tape.ticks()) {
    out << format_double(t.time) << ',' << format_double(t.price) << ','
        << format_double(t.volume);
    if (with_value) out << ',' << format_double(t.value);
    out << '\n';
  }
}

}  // namespace vawar
