#include <gtest/gtest.h>

#include <cmath>

#include "gencs/conditions.hpp"
#include "gencs/experiments.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace gencs {
namespace {

using testing::random_net;

TEST(Wdc, HandInstance) {
  const Matrix w{{1}, {-1}};
  // one active row: masked sum 1, Q = 1/2
  EXPECT_DOUBLE_EQ(wdc_pair_deviation(w, Vector{1}, Vector{1}), 0.5);
  Rng rng(1);
  const ConditionReport r = wdc_deviation(w, 20, rng);
  EXPECT_EQ(r.max_deviation, 0.5);
  EXPECT_EQ(r.kind, ConditionKind::WDC);
  EXPECT_EQ(r.samples, 20);
  EXPECT_EQ(r.deviations.size(), 22u);  // two canonical pairs when k = 1
  EXPECT_EQ(r.argmax_index, 0u);
  ASSERT_EQ(r.witness.size(), 2u);
  EXPECT_EQ(r.witness[0], Vector{1});
}

TEST(Wdc, AntiparallelPairHasNoActiveRows) {
  Rng rng(2);
  const Matrix w = gaussian_matrix(50, 3, 1.0 / 50, rng);
  // Q vanishes up to sin(pi) rounding
  EXPECT_LT(wdc_pair_deviation(w, Vector{1, 0, 0}, Vector{-1, 0, 0}), 1e-15);
}

TEST(Wdc, MonotoneInSampleCount) {
  Rng wr(3);
  const Matrix w = gaussian_matrix(100, 4, 1.0 / 100, wr);
  double prev = 0.0;
  for (int n : {5, 20, 80}) {
    Rng rng(4);
    const double dev = wdc_deviation(w, n, rng).max_deviation;
    EXPECT_GE(dev, prev) << n;
    prev = dev;
  }
}

TEST(Wdc, ScaleInvariant) {
  Rng wr(5);
  const Matrix w = gaussian_matrix(80, 4, 1.0 / 80, wr);
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Vector x = sphere_sample(4, rng);
    const Vector y = sphere_sample(4, rng);
    EXPECT_NEAR(wdc_pair_deviation(w, 3.7 * x, 0.02 * y), wdc_pair_deviation(w, x, y), 1e-12);
  }
}

TEST(Wdc, ReproducibleAcrossThreadCounts) {
  Rng wr(7);
  const Matrix w = gaussian_matrix(120, 5, 1.0 / 120, wr);
  Rng a(8), b(8);
  const auto r1 = wdc_deviation(w, 60, a, 1);
  const auto r2 = wdc_deviation(w, 60, b, 3);
  EXPECT_EQ(r1.max_deviation, r2.max_deviation);
  EXPECT_EQ(r1.argmax_index, r2.argmax_index);
  ASSERT_EQ(r1.deviations.size(), r2.deviations.size());
  for (std::size_t i = 0; i < r1.deviations.size(); ++i)
    EXPECT_EQ(r1.deviations[i].deviation, r2.deviations[i].deviation);
  EXPECT_EQ(r1.seed, 8u);
}

TEST(Wdc, RejectsBadArguments) {
  Rng rng(9);
  EXPECT_THROW(wdc_deviation(Matrix{{1}}, 0, rng), std::invalid_argument);
  EXPECT_THROW(wdc_pair_deviation(Matrix{{1, 2}}, Vector{1}, Vector{1}), std::invalid_argument);
}

TEST(Rric, IdentityIsExact) {
  const auto net = random_net({3, 10, 16}, 10);
  Rng rng(11);
  const auto r = rric_deviation(Matrix::identity(16), net, 50, rng);
  EXPECT_EQ(r.max_deviation, 0.0);
}

TEST(Rric, DoubledIdentityGivesThreeTimesCosine) {
  const auto net = random_net({3, 10, 16}, 12);
  const Matrix a = 2.0 * Matrix::identity(16);
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    std::vector<Vector> x;
    for (int j = 0; j < 4; ++j) x.push_back(sphere_sample(3, rng));
    const Vector u = forward(net, x[0]).output - forward(net, x[1]).output;
    const Vector v = forward(net, x[2]).output - forward(net, x[3]).output;
    const double cosine = dot(u, v) / (u.norm() * v.norm());
    EXPECT_NEAR(rric_tuple_deviation(a, net, x[0], x[1], x[2], x[3]), 3.0 * std::abs(cosine), 1e-14);
  }
  // parallel differences reach the full factor of 3
  const Vector p{1, 0, 0}, q{0, 1, 0};
  EXPECT_NEAR(rric_tuple_deviation(a, net, p, q, p, q), 3.0, 1e-14);
}

TEST(Rric, DegenerateSampling) {
  const GeneratorNetwork flat({Matrix(4, 2)});
  Rng rng(14);
  EXPECT_THROW(rric_deviation(Matrix::identity(4), flat, 10, rng), DegenerateSamplingError);
  const Vector p{1, 0};
  EXPECT_EQ(rric_tuple_deviation(Matrix::identity(4), flat, p, p, p, p), -1.0);
}

TEST(Rric, MonotoneAndReproducible) {
  const auto p = make_problem(4, {40, 80}, 30, kNoiseless, 15);
  double prev = 0.0;
  for (int n : {5, 25, 100}) {
    Rng a(16), b(16);
    const auto r1 = rric_deviation(p.measurement, p.net, n, a, 1);
    const auto r2 = rric_deviation(p.measurement, p.net, n, b, 2);
    EXPECT_EQ(r1.max_deviation, r2.max_deviation);
    EXPECT_GE(r1.max_deviation, prev);
    prev = r1.max_deviation;
  }
}

TEST(Rric, DimensionMismatch) {
  const auto net = random_net({3, 10, 16}, 17);
  Rng rng(18);
  EXPECT_THROW(rric_deviation(Matrix(5, 15), net, 10, rng), std::invalid_argument);
}

TEST(SummaryJson, Fields) {
  Rng rng(19);
  const auto r = wdc_deviation(Matrix{{1}, {-1}}, 4, rng);
  const auto j = nlohmann::json::parse(summary_json(r));
  EXPECT_EQ(j["kind"], "WDC");
  EXPECT_EQ(j["samples"], 4);
  EXPECT_EQ(j["max_deviation"].get<double>(), 0.5);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 19u);
  EXPECT_EQ(j["lower_bound_only"], true);
  EXPECT_EQ(to_string(ConditionKind::RRIC), "RRIC");
}

}  // namespace
}  // namespace gencs
