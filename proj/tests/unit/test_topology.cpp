#include "mgsync/errors.hpp"
#include "mgsync/linalg.hpp"
#include "mgsync/topology.hpp"

#include <gtest/gtest.h>

#include <random>

namespace mgsync {
namespace {

CommTopology line4() { return {4, {{0, 1}, {1, 2}, {2, 3}}, {0}}; }

GainSet reference_gains() {
  GainSet g;
  g.k = {{{0, kLeader}, 2.18}, {{0, 1}, 1.58}, {{1, 0}, 1.65}, {{1, 2}, 1.7},
         {{2, 1}, 1.69},       {{2, 3}, 1.65}, {{3, 2}, 1.83}};
  g.k_bar = {{{0, 1}, 1.91}, {{1, 0}, 1.65}, {{1, 2}, 1.7}, {{2, 1}, 1.7}, {{2, 3}, 1.65}, {{3, 2}, 1.83}};
  g.m = {0.1, 0.1, 0.1, 0.1};
  return g;
}

TEST(PinnedMatrix, TwoNodes) {
  CommTopology top(2, {{0, 1}}, {0});
  GainSet g;
  g.k = {{{0, kLeader}, 1.0}, {{0, 1}, 1.0}, {{1, 0}, 1.0}};
  g.k_bar = {{{0, 1}, 1.0}, {{1, 0}, 1.0}};
  Matrix expected(2, 2);
  expected << 2, -1, -1, 1;
  EXPECT_TRUE(pinned_matrix(top, g).isApprox(expected));
  Matrix lap(2, 2);
  lap << 1, -1, -1, 1;
  EXPECT_TRUE(follower_matrix(top, g).isApprox(lap));
}

TEST(PinnedMatrix, ReferenceGainDiagonals) {
  const auto g = reference_gains();
  const Matrix k = pinned_matrix(line4(), g);
  const Matrix kb = follower_matrix(line4(), g);
  const double kd[] = {3.76, 3.35, 3.34, 1.83};
  const double kbd[] = {1.91, 1.65 + 1.7, 1.7 + 1.65, 1.83};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(k(i, i), kd[i], 1e-12);
    EXPECT_NEAR(kb(i, i), kbd[i], 1e-12);
  }
  EXPECT_DOUBLE_EQ(k(0, 1), -1.58);
  EXPECT_DOUBLE_EQ(k(1, 0), -1.65);
  EXPECT_DOUBLE_EQ(k(0, 2), 0.0);
}

TEST(PinnedMatrix, RowSumsAreThePinGains) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  CommTopology top(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}}, {1, 3});
  for (int trial = 0; trial < 20; ++trial) {
    GainSet g;
    for (const auto& e : top.augmented_directed_edges()) g.k[e] = u(rng);
    for (const auto& e : top.follower_directed_edges()) g.k_bar[e] = u(rng);
    const Matrix k = pinned_matrix(top, g);
    const Matrix kb = follower_matrix(top, g);
    for (int i = 0; i < 5; ++i) {
      const double pin = top.is_pinned(i) ? g.k.at({i, kLeader}) : 0.0;
      EXPECT_NEAR(k.row(i).sum(), pin, 1e-12);
      EXPECT_NEAR(kb.row(i).sum(), 0.0, 1e-12);
    }
  }
}

TEST(Disagreement, SmallCases) {
  EXPECT_EQ(disagreement_matrix(1)(0, 0), 0.0);
  Matrix two(2, 2);
  two << 0.5, -0.5, -0.5, 0.5;
  EXPECT_TRUE(disagreement_matrix(2).isApprox(two));
}

TEST(Disagreement, ProjectorProperties) {
  for (int n = 1; n <= 8; ++n) {
    const Matrix om = disagreement_matrix(n);
    EXPECT_LT((om * om - om).cwiseAbs().maxCoeff(), 1e-14) << n;
    EXPECT_LT((om - om.transpose()).cwiseAbs().maxCoeff(), 1e-15) << n;
    EXPECT_LT((om * Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-14) << n;
  }
  const Vector ev = symmetric_eigenvalues(disagreement_matrix(4));
  EXPECT_NEAR(ev(0), 0.0, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev(i), 1.0, 1e-12);
}

TEST(ErrorDynamics, SingleDg) {
  CommTopology top(1, {}, {0});
  GainSet g;
  g.k = {{{0, kLeader}, 1.0}};
  const Matrix a = error_dynamics_matrix(pinned_matrix(top, g), follower_matrix(top, g), disagreement_matrix(1));
  Matrix expected(2, 2);
  expected << -1, 0, 0, 0;
  EXPECT_TRUE(a.isApprox(expected));
}

TEST(ErrorDynamics, ReferenceGainsSpectrum) {
  const auto g = reference_gains();
  const Matrix a =
      error_dynamics_matrix(pinned_matrix(line4(), g), follower_matrix(line4(), g), disagreement_matrix(4));
  Eigen::EigenSolver<Matrix> es(a);
  int zeros = 0;
  for (int i = 0; i < 8; ++i) {
    EXPECT_LE(es.eigenvalues()(i).real(), 1e-10);
    if (std::abs(es.eigenvalues()(i)) < 1e-9) ++zeros;
  }
  // rank(A) <= N
  EXPECT_EQ(zeros, 4);
  Eigen::FullPivLU<Matrix> lu(a);
  EXPECT_EQ(lu.rank(), 4);
}

TEST(Topology, RejectsBadGraphs) {
  EXPECT_THROW(CommTopology(3, {{0, 1}}, {0}), Error);            // disconnected
  EXPECT_THROW(CommTopology(2, {{0, 1}}, {}), Error);              // unpinned
  EXPECT_THROW(CommTopology(2, {{0, 0}, {0, 1}}, {0}), Error);     // self-loop
  EXPECT_THROW(ElectricalGraph(2, {{0, 1, 0.0, 0.0}}), Error);     // no susceptance
  EXPECT_THROW(ElectricalGraph(2, {{0, 2, 0.0, 1.0}}), Error);
}

TEST(Gains, Validation) {
  auto g = reference_gains();
  EXPECT_NO_THROW(validate_gains(line4(), g));
  auto missing = g;
  missing.k.erase({3, 2});
  EXPECT_THROW(validate_gains(line4(), missing), Error);
  auto off_edge = g;
  off_edge.k[{0, 3}] = 1.0;
  EXPECT_THROW(validate_gains(line4(), off_edge), Error);
  auto negative = g;
  negative.k_bar[{0, 1}] = -1.0;
  EXPECT_THROW(validate_gains(line4(), negative), Error);
}

}  // namespace
}  // namespace mgsync
