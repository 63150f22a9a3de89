#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace vawar;

namespace {

TradeTape ingest_text(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return ingest(in, opts);
}

ErrorCode ingest_error(const std::string& text, IngestOptions opts = {}) {
  try {
    ingest_text(text, opts);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Ingest, DerivesValueAndInfersEpsilon) {
  const auto tape = ingest_text("time,price,volume\n10,2,10\n10.5,2,5\n11,4,10\n");
  ASSERT_EQ(tape.size(), 3u);
  EXPECT_DOUBLE_EQ(tape.epsilon(), 0.5);
  EXPECT_DOUBLE_EQ(tape.value(2), 40.0);
  EXPECT_EQ(tape[2].index, 2u);
}

TEST(Ingest, AcceptsBomBlankLinesAndCrlf) {
  const auto tape = ingest_text("\xEF\xBB\xBFtime,price,volume\r\n0,1,1\r\n\r\n1,2,3\r\n");
  ASSERT_EQ(tape.size(), 2u);
  EXPECT_DOUBLE_EQ(tape.value(1), 6.0);
}

TEST(Ingest, WithValueChecksConsistency) {
  IngestOptions opts{ValueFormat::with_value, std::nullopt};
  EXPECT_NO_THROW(ingest_text("time,price,volume,value\n0,2,3,6\n1,2,3,6.000000000001\n", opts));
  EXPECT_EQ(ingest_error("time,price,volume,value\n0,2,3,6\n1,2,3,7\n", opts),
            ErrorCode::ValueMismatch);
  EXPECT_EQ(ingest_error("time,price,volume\n0,2,3\n", opts), ErrorCode::MalformedRow);
}

TEST(Ingest, RejectsBadFields) {
  EXPECT_EQ(ingest_error("time,price,volume\n0,0,1\n"), ErrorCode::NonPositiveField);
  EXPECT_EQ(ingest_error("time,price,volume\n0,1,-1\n"), ErrorCode::NonPositiveField);
  EXPECT_EQ(ingest_error("time,price,volume\n0,nan,1\n"), ErrorCode::NonFinite);
  EXPECT_EQ(ingest_error("time,price,volume\n0,abc,1\n"), ErrorCode::MalformedRow);
  EXPECT_EQ(ingest_error("time,price,volume\n0,1\n"), ErrorCode::MalformedRow);
  EXPECT_EQ(ingest_error("price,time,volume\n0,1,1\n"), ErrorCode::MalformedRow);
  EXPECT_EQ(ingest_error(""), ErrorCode::EmptyTape);
  EXPECT_EQ(ingest_error("time,price,volume\n"), ErrorCode::EmptyTape);
}

TEST(Ingest, RejectsNonUniformSpacing) {
  EXPECT_EQ(ingest_error("time,price,volume\n0,1,1\n1,1,1\n3,1,1\n"),
            ErrorCode::NonUniformSpacing);
  EXPECT_EQ(ingest_error("time,price,volume\n1,1,1\n0,1,1\n"), ErrorCode::NonUniformSpacing);
  EXPECT_EQ(ingest_error("time,price,volume\n0,1,1\n1,1,1\n", {ValueFormat::derive_value, 2.0}),
            ErrorCode::NonUniformSpacing);
}

TEST(Ingest, ReportsRowNumbers) {
  try {
    ingest_text("time,price,volume\n0,1,1\n1,1,1\n2,-1,1\n");
    FAIL();
  } catch (const Error& e) {
    ASSERT_TRUE(e.row().has_value());
    EXPECT_EQ(*e.row(), 4u);
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos);
  }
}

TEST(Validate, CollectsEveryRowError) {
  std::istringstream in("time,price,volume\n0,1,1\n1,-1,1\n2,x,1\n3,1,0\n5,1,1\n");
  const auto errors = validate(in);
  ASSERT_EQ(errors.size(), 4u);
  EXPECT_EQ(errors[0].code(), ErrorCode::NonPositiveField);
  EXPECT_EQ(*errors[0].row(), 3u);
  EXPECT_EQ(errors[1].code(), ErrorCode::MalformedRow);
  EXPECT_EQ(*errors[1].row(), 4u);
  EXPECT_EQ(errors[2].code(), ErrorCode::NonPositiveField);
  EXPECT_EQ(errors[3].code(), ErrorCode::NonUniformSpacing);
  EXPECT_EQ(*errors[3].row(), 6u);
}

TEST(Validate, CleanTapeHasNoErrors) {
  std::istringstream in("time,price,volume\n0,2,10\n1,2,5\n");
  EXPECT_TRUE(validate(in).empty());
}

TEST(WriteCsv, RoundTripsExactly) {
  std::mt19937_64 rng(7);
  const auto tape = fixtures::random_tape(rng, 50);
  for (bool with_value : {false, true}) {
    std::ostringstream out;
    write_csv(out, tape, with_value);
    const auto back = ingest_text(
        out.str(), {with_value ? ValueFormat::with_value : ValueFormat::derive_value, 1.0});
    ASSERT_EQ(back.size(), tape.size());
    for (std::size_t i = 0; i < tape.size(); ++i) {
      EXPECT_EQ(back.price(i), tape.price(i));
      EXPECT_EQ(back.volume(i), tape.volume(i));
      EXPECT_EQ(back.value(i), tape.value(i));
    }
  }
}

TEST(Resolve, WindowBoundsAndHistory) {
  const auto tape = fixtures::fixture_a();
  const auto w = resolve(tape, {1, 3}, 1);
  EXPECT_EQ(w.size(), 3u);
  EXPECT_EQ(w.lagged_index(0), 0u);
  EXPECT_DOUBLE_EQ(w.lagged_price(1), 2.0);
  EXPECT_DOUBLE_EQ(w.price(1), 4.0);

  auto code = [&](WindowSpec spec, std::size_t lag) {
    try {
      (void)resolve(tape, spec, lag);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code({0, 3}, 1), ErrorCode::InsufficientHistory);
  EXPECT_EQ(code({2, 3}, 1), ErrorCode::WindowOutOfRange);
  EXPECT_EQ(code({1, 1}, 1), ErrorCode::WindowOutOfRange);
  EXPECT_EQ(code({1, 3}, 2), ErrorCode::InsufficientHistory);
  EXPECT_THROW((void)resolve(tape, WindowSpec{1, 3}, std::size_t{0}), Error);
}

TEST(TradeTape, RejectsEmptyAndBadEpsilon) {
  EXPECT_THROW(TradeTape::from_ticks({}, 1.0), Error);
  const std::vector<double> p{1.0, 2.0}, u{1.0, 1.0};
  EXPECT_THROW(TradeTape::from_prices_volumes(p, u, 0.0), Error);
  const std::vector<double> short_u{1.0};
  EXPECT_THROW(TradeTape::from_prices_volumes(p, short_u), Error);
}
