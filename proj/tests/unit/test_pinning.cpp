#include <gtest/gtest.h>

#include <random>

#include "sca/pinning.hpp"
#include "support/battery.hpp"
#include "support/oracles.hpp"

using namespace sca;
using sca::testing::random_model;
using sca::testing::triangle;

TEST(LargestEigenvalue, SmallExamples) {
  EXPECT_NEAR(largest_eigenvalue(sca::testing::single_bond()).lambda, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(largest_eigenvalue(IsingModel(3, {}, {0.1, 0.2, 0.3})).lambda, 0.0);
  // -J for the triangle has spectrum {-2, 1, 1}.
  const auto info = largest_eigenvalue(triangle());
  EXPECT_NEAR(info.lambda, 1.0, 1e-12);
  EXPECT_EQ(info.method, EigenMethod::kDenseExact);
  EXPECT_LE(info.tolerance, 1e-8);
}

TEST(LargestEigenvalue, PowerIterationAgreesWithDense) {
  for (std::size_t n : {2u, 3u, 5u, 8u, 16u, 33u, 64u}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto m = random_model({n, 0.3}, 1000 * n + seed);
      const auto dense = largest_eigenvalue(m, EigenMethod::kDenseExact);
      const auto power = largest_eigenvalue(m, EigenMethod::kPowerIteration);
      EXPECT_NEAR(dense.lambda, power.lambda, 1e-6) << "n=" << n << " seed=" << seed;
      EXPECT_GE(dense.lambda, -1e-12);
    }
  }
}

TEST(LargestEigenvalue, AutoSwitchesToPowerIterationAboveDenseLimit) {
  const auto m = random_model({kDenseEigenLimit + 6, 0.1}, 77);
  const auto info = largest_eigenvalue(m);
  EXPECT_EQ(info.method, EigenMethod::kPowerIteration);
  EXPECT_NEAR(info.lambda, largest_eigenvalue(m, EigenMethod::kDenseExact).lambda, 1e-6);
}

TEST(LargestEigenvalue, IterationCapReportsBestEstimate) {
  const auto m = random_model({20, 0.5}, 3);
  try {
    power_iteration_largest_eigenvalue(m, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
  }
}

TEST(BuildPinning, AllVerticesIsHalfRowSum) {
  const auto m = random_model({7}, 9);
  const auto q = build_pinning(m, all_vertices(m));
  for (Vertex x = 0; x < 7; ++x) EXPECT_NEAR(q[x], 0.5 * m.abs_coupling_sum(x), 1e-15);
  ASSERT_TRUE(std::holds_alternative<SpectralProvenance>(q.provenance));
  EXPECT_EQ(std::get<SpectralProvenance>(q.provenance).C.size(), 7u);
}

TEST(BuildPinning, EmptySetIsHalfLambda) {
  const auto m = random_model({6}, 10);
  const double lambda = largest_eigenvalue(m).lambda;
  const auto q = build_pinning(m, {});
  for (Vertex x = 0; x < 6; ++x) EXPECT_NEAR(q[x], 0.5 * lambda, 1e-15);
}

TEST(BuildPinning, TriangleSingleMember) {
  const auto m = triangle();
  const auto q = build_pinning(m, {0});
  EXPECT_NEAR(q[0], 2.0, 1e-15);
  EXPECT_NEAR(q[1], 0.5, 1e-12);
  EXPECT_NEAR(q[2], 0.5, 1e-12);
  EXPECT_TRUE(verify_min_diagonal(m, q).holds);
}

TEST(BuildPinning, SlackScalesAndMustBeAtLeastOne) {
  const auto m = triangle();
  const auto q = build_pinning(m, all_vertices(m), 1.5);
  EXPECT_NEAR(q[0], 1.5, 1e-15);
  EXPECT_THROW(build_pinning(m, {}, 0.5), ConfigError);
  EXPECT_THROW(build_pinning(m, {5}), IndexError);
}

// Scaling every |J| up never lowers a q_x computed by the C-member formula.
TEST(BuildPinning, MemberBranchMonotoneInCouplings) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto m = random_model({6}, 500 + rep);
    const auto c = sca::testing::random_subset(6, gen);
    std::vector<Coupling> bigger;
    for (const auto& e : m.couplings()) bigger.push_back({e.a, e.b, e.J * (1.0 + 0.5 * (gen() % 3))});
    const IsingModel m2(6, bigger, std::vector<double>(m.fields().begin(), m.fields().end()));
    const auto q1 = build_pinning(m, c);
    const auto q2 = build_pinning(m2, c);
    for (Vertex x : c) EXPECT_GE(q2[x], q1[x] - 1e-15);
  }
}

TEST(VerifyMinDiagonal, SpectralPinningHolds) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 40; ++rep) {
    const auto m = random_model({3 + static_cast<std::size_t>(rep % 6)}, 900 + rep);
    const auto q = build_pinning(m, sca::testing::random_subset(m.size(), gen));
    const auto report = verify_min_diagonal(m, q);
    EXPECT_TRUE(report.holds) << "instance " << rep;
  }
}

TEST(VerifyMinDiagonal, ZeroPinningOnBondHolds) {
  const auto m = sca::testing::single_bond();
  const auto report = verify_min_diagonal(m, PinningVector::zero(2));
  EXPECT_NEAR(report.min_pair, sca::testing::min_extended_energy_scan(m, PinningVector::zero(2)), 1e-12);
  EXPECT_NEAR(report.min_diagonal, -1.0, 1e-12);
  EXPECT_TRUE(report.holds);
}

// Antiferromagnetic triangle, q = 0: H~(+++, ---) = -3 undercuts the diagonal minimum -1.
TEST(VerifyMinDiagonal, FrustratedTriangleWithoutPinningFails) {
  const auto m = triangle(-1.0);
  const auto q = PinningVector::zero(3);
  const auto report = verify_min_diagonal(m, q);
  EXPECT_FALSE(report.holds);
  EXPECT_NEAR(report.min_pair, -3.0, 1e-12);
  EXPECT_NEAR(report.min_diagonal, -1.0, 1e-12);
  ASSERT_TRUE(report.witness.has_value());
  const auto& [s, t] = *report.witness;
  EXPECT_NEAR(extended_energy(m, q, s, t), -3.0, 1e-12);
  EXPECT_TRUE(verify_min_diagonal(m, build_pinning(m, all_vertices(m))).holds);
}

TEST(VerifyMinDiagonal, NoCouplingsHoldsWithZeroPinning) {
  const IsingModel m(4, {}, {0.3, -1.0, 0.7, 2.0});
  EXPECT_TRUE(verify_min_diagonal(m, PinningVector::zero(4)).holds);
}

TEST(VerifyMinDiagonal, SeparableInnerMinMatchesFullScan) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = random_model({5}, 40 + seed);
    const PinningVector q(std::vector<double>(5, 0.1 * static_cast<double>(seed)));
    EXPECT_NEAR(verify_min_diagonal(m, q).min_pair, sca::testing::min_extended_energy_scan(m, q), 1e-12);
  }
}

TEST(VerifyMinDiagonal, RejectsLargeInstances) {
  const auto m = random_model({kMinDiagonalLimit + 1, 0.2}, 1);
  EXPECT_THROW(verify_min_diagonal(m, PinningVector::zero(m.size())), SizeError);
}
