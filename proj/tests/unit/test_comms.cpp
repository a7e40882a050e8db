#include "mgsync/comms.hpp"
#include "mgsync/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace mgsync {
namespace {

TEST(DelayTrace, ZeroBoundIsZero) {
  const auto tr = generate_delay_trace({0.0, 1.0}, 1e-3, 2.0, 11);
  EXPECT_EQ(tr.size(), 2001u);
  for (double v : tr.samples) EXPECT_EQ(v, 0.0);
}

TEST(DelayTrace, WithinBoundsAndRate) {
  for (std::uint64_t seed : {1u, 2u, 99u, 12345u}) {
    const double h = 5e-5;
    const auto tr = generate_delay_trace({0.5, 1000.0}, h, 20.0, seed);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      ASSERT_GE(tr.at(k), 0.0);
      ASSERT_LE(tr.at(k), 0.5);
      if (k > 0) ASSERT_LE(std::abs(tr.at(k) - tr.at(k - 1)) / h, 1.0 + 1e-9);
    }
  }
}

TEST(DelayTrace, ReachesBothClampsOverLongRun) {
  const auto tr = generate_delay_trace({0.05, 1.0}, 1e-3, 200.0, 4, 0.0);
  EXPECT_EQ(tr.at(0), 0.0);
  double hi = 0.0;
  for (double v : tr.samples) hi = std::max(hi, v);
  EXPECT_GT(hi, 0.04);
}

TEST(DelayTrace, Deterministic) {
  const auto a = generate_delay_trace({0.5, 1.0}, 5e-5, 5.0, 77);
  const auto b = generate_delay_trace({0.5, 1.0}, 5e-5, 5.0, 77);
  const auto c = generate_delay_trace({0.5, 1.0}, 5e-5, 5.0, 78);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

TEST(DelayTrace, InitialValue) {
  const auto tr = generate_delay_trace({0.5, 1.0}, 1e-3, 1.0, 1, 0.25);
  EXPECT_EQ(tr.at(0), 0.25);
  EXPECT_THROW(generate_delay_trace({0.5, 1.0}, 0.0, 1.0, 1), Error);
}

Eigen::VectorXd vec(double a) { return Eigen::VectorXd::Constant(2, a); }

TEST(HistoryBuffer, ZeroOrderHold) {
  HistoryBuffer buf(0.01, 1e-3, vec(-1.0));
  EXPECT_EQ(buf.query(0.0)(0), -1.0);  // warm-up
  for (int k = 0; k < 5; ++k) buf.push(k * 1e-3, vec(k));
  EXPECT_EQ(buf.query(2e-3)(0), 2.0);
  EXPECT_EQ(buf.query(2.5e-3)(0), 2.0);
  EXPECT_EQ(buf.query(4e-3)(0), 4.0);
  EXPECT_DOUBLE_EQ(buf.query_time(3.7e-3), 3e-3);
  EXPECT_EQ(buf.query(-1.0)(0), -1.0);
  EXPECT_TRUE(std::isnan(buf.query_time(-1.0)));
}

TEST(HistoryBuffer, FutureAndEvictedQueriesThrow) {
  HistoryBuffer buf(0.005, 1e-3, vec(0.0));
  for (int k = 0; k < 50; ++k) buf.push(k * 1e-3, vec(k));
  EXPECT_LE(buf.size(), buf.capacity());
  EXPECT_NO_THROW((void)buf.query(49e-3 - 0.005));
  try {
    (void)buf.query(0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kBuffer);
  }
  EXPECT_THROW((void)buf.query(0.06), Error);
}

TEST(HistoryBuffer, TimestampsMustIncrease) {
  HistoryBuffer buf(0.01, 1e-3, vec(0.0));
  buf.push(0.0, vec(1));
  EXPECT_THROW(buf.push(0.0, vec(2)), Error);
}

TEST(HistoryBuffer, RetrievedAgeWithinOneStepOfDelay) {
  const double h = 1e-3;
  const auto tr = generate_delay_trace({0.1, 1.0}, h, 2.0, 5);
  HistoryBuffer buf(0.1, h, vec(0.0));
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = static_cast<double>(k) * h;
    buf.push(t, vec(t));
    const double tq = t - tr.at(k);
    const double got = buf.query_time(tq);
    if (std::isnan(got)) {
      EXPECT_LT(tq, 0.0);
      continue;
    }
    EXPECT_GE(t - got, tr.at(k) - 1e-12);
    EXPECT_LE(t - got, tr.at(k) + h + 1e-12);
  }
}

}  // namespace
}  // namespace mgsync
