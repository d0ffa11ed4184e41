#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qnav/parallel.hpp"
#include "qnav/quadrature.hpp"
#include "qnav/roots.hpp"

using namespace qnav;

TEST(TanhSinh, OffsetsAreComplementaryAndInside) {
  const auto rule = TanhSinhRule::make(64);
  ASSERT_EQ(rule.size(), 64u);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    EXPECT_GT(rule.from_lower[k], 0.0);
    EXPECT_GT(rule.from_upper[k], 0.0);
    EXPECT_NEAR(rule.from_lower[k] + rule.from_upper[k], 1.0, 1e-15);
  }
}

TEST(TanhSinh, IntegratesPolynomialsAndEndpointSingularities) {
  const auto rule = TanhSinhRule::make(128);
  auto integrate = [&](auto f) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weight[k] * f(rule.from_lower[k], rule.from_upper[k]);
    return s;
  };
  EXPECT_NEAR(integrate([](double, double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(integrate([](double x, double) { return x * x * x; }), 0.25, 1e-13);
  // Truncation at the outermost node x ≈ 2e-17 leaves a tail of 2√x ≈ 9e-9.
  EXPECT_NEAR(integrate([](double x, double) { return 1.0 / std::sqrt(x); }), 2.0, 2e-8);
  EXPECT_NEAR(integrate([](double, double u) { return std::log(u); }), -1.0, 1e-12);
  EXPECT_NEAR(integrate([](double x, double) { return std::sqrt(x); }), 2.0 / 3.0, 1e-13);
}

TEST(Roots, BisectionReachesTolerance) {
  auto f = [](double x) { return x * x - 2.0; };
  EXPECT_NEAR(bisect(f, 0.0, 2.0, f(0.0), 1e-12), std::sqrt(2.0), 1e-12);
}

TEST(Roots, ScanFindsEverySignChange) {
  const auto roots = scan_roots([](double x) { return std::sin(x); }, 0.5, 10.0, 100, 1e-12);
  ASSERT_EQ(roots.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(roots[k], (k + 1) * std::numbers::pi, 1e-12);
}

TEST(Roots, ExactZeroAtNodeIsReportedOnce) {
  const auto roots = scan_roots([](double x) { return x - 1.0; }, 0.0, 2.0, 4, 1e-12);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0], 1.0);
  EXPECT_THROW(scan_roots([](double x) { return x; }, 1.0, 1.0, 4, 1e-12), std::invalid_argument);
}

TEST(ParallelFor, VisitsEachIndexOnce) {
  for (unsigned workers : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
