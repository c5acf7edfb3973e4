#include "prime/membership_estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "prime/evaluation.hpp"
#include "test_support.hpp"

namespace prime {
namespace {

SimplexVertices Vertices(const Matrix& v) { return SimplexVertices{v, 0.0}; }

// Unit theta, `pure` pure rows split evenly, remaining rows mixed.
DcmmParams OracleModel(int K) {
  const int n = 60;
  DcmmParams p;
  p.theta = Vector::Ones(n);
  p.pi = Matrix::Zero(n, K);
  const int pure = K == 2 ? 40 : 45;
  for (int i = 0; i < pure; ++i) p.pi(i, i * K / pure) = 1.0;
  for (int i = pure; i < n; ++i) {
    if (K == 2) {
      p.pi.row(i) << 0.5, 0.5;
    } else {
      const double a = 0.2 + 0.6 * (i - pure) / (n - pure);
      p.pi(i, 0) = a;
      p.pi(i, 1) = 0.5 * (1 - a);
      p.pi(i, 2) = 0.5 * (1 - a);
    }
  }
  p.b = MakePlantedB(K, 0.9);
  return p;
}

DcmmParams NoisyModel(int n, int K, double scale, std::uint64_t seed) {
  RandomStream rng(seed);
  DcmmParams p;
  p.theta = Vector(n);
  for (int i = 0; i < n; ++i) p.theta(i) = scale * rng.Uniform(0.5, 1.0);
  p.pi = Matrix::Zero(n, K);
  for (int i = 0; i < n; ++i) {
    if (i < n / 2) {
      p.pi(i, i % K) = 1.0;
    } else {
      for (int k = 0; k < K; ++k) p.pi(i, k) = rng.Exponential();
      p.pi.row(i) /= p.pi.row(i).sum();
    }
  }
  p.b = MakePlantedB(K, 0.9);
  return p;
}

void ExpectRowStochastic(const Matrix& pi) {
  EXPECT_GE(pi.minCoeff(), 0.0);
  for (int i = 0; i < pi.rows(); ++i) EXPECT_NEAR(pi.row(i).sum(), 1.0, 1e-12);
}

TEST(SolveBarycentricTest, Examples) {
  Matrix tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  for (int k = 0; k < 3; ++k) {
    const Vector w = SolveBarycentric(tri.row(k).transpose(), Vertices(tri));
    EXPECT_LE((w - Vector::Unit(3, k)).cwiseAbs().maxCoeff(), 1e-14);
  }
  const Vector centroid = tri.colwise().mean().transpose();
  EXPECT_LE((SolveBarycentric(centroid, Vertices(tri)) - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff(),
            1e-14);
  Vector r(2);
  r << 0.2, 0.3;
  Vector expected(3);
  expected << 0.5, 0.2, 0.3;
  EXPECT_LE((SolveBarycentric(r, Vertices(tri)) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SolveBarycentricTest, NegativeWeightsOutsideTheSimplex) {
  Matrix seg(2, 1);
  seg << 0, 1;
  Vector r(1);
  r << 1.25;
  const Vector w = SolveBarycentric(r, Vertices(seg));
  EXPECT_NEAR(w(0), -0.25, 1e-14);
  EXPECT_NEAR(w(1), 1.25, 1e-14);
}

TEST(SolveBarycentricTest, IllConditionedFallsBackToConstrainedLeastSquares) {
  Matrix line(3, 2);
  line << 0, 0, 1, 0, 2, 0;  // collinear: the square system is singular
  Vector r(2);
  r << 1.5, 0.5;
  const Vector w = SolveBarycentric(r, Vertices(line));
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_NEAR((w.transpose() * line)(0), 1.5, 1e-12);  // best fit of the first coordinate
  const Matrix same = Matrix::Zero(3, 2);
  EXPECT_PRIME_ERROR(SolveBarycentric(r, Vertices(same)), ErrorCode::kDegenerateGeometry);
}

TEST(ReconstructPiRowTest, Examples) {
  const PiRow basis = ReconstructPiRow(Vector::Unit(3, 1), Vector::Constant(3, 0.7));
  EXPECT_EQ(basis.row, Vector::Unit(3, 1));
  EXPECT_FALSE(basis.fallback);

  Vector w(2);
  w << -0.1, 1.1;
  EXPECT_EQ(ReconstructPiRow(w, Vector::Ones(2)).row, Vector::Unit(2, 1));

  Vector w3(3), v1(3), expected(3);
  w3 << 0.5, 0.2, 0.3;
  v1 << 2, 1, 1;
  expected << 1.0 / 3, 4.0 / 15, 2.0 / 5;
  EXPECT_LE((ReconstructPiRow(w3, v1).row - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ReconstructPiRowTest, FallbacksAreUniformAndFlagged) {
  Vector w(2);
  w << -0.5, -0.5;
  const PiRow clamped = ReconstructPiRow(w, Vector::Ones(2));
  EXPECT_TRUE(clamped.fallback);
  EXPECT_EQ(clamped.row, Vector::Constant(2, 0.5));
  Vector v1(2);
  v1 << 1.0, std::nan("");
  EXPECT_TRUE(ReconstructPiRow(Vector::Unit(2, 0), v1).fallback);
}

TEST(ComputeV1Test, Examples) {
  Matrix v(2, 1);
  v << 0.3, -4.0;
  Vector l(2);
  l << 1.0, 0.0;
  EXPECT_EQ(ComputeV1(l, Vertices(v)), Vector::Ones(2));

  v << 1.0, -1.0;
  l << 2.0, -1.0;
  EXPECT_LE((ComputeV1(l, Vertices(v)) - Vector::Ones(2)).cwiseAbs().maxCoeff(), 1e-15);

  Matrix one(2, 1);
  one << 1.0, 0.0;
  l << 0.5, -1.0;
  const Vector v1 = ComputeV1(l, Vertices(one));
  EXPECT_TRUE(std::isnan(v1(0)));
  EXPECT_NEAR(v1(1), 1.0 / std::sqrt(0.5), 1e-15);
}

TEST(OracleEstimateTest, RecoversMembershipsExactlyForTwoCommunities) {
  const DcmmParams p = OracleModel(2);
  EstimatorConfig cfg;
  cfg.K = 2;
  const MembershipEstimate est = OracleEstimate(BuildOmega(p), cfg);
  EXPECT_FALSE(est.vertex_hunt_failed);
  EXPECT_LE(PermutationLoss(est.pi_hat, p.pi).loss, 1e-6);
  EXPECT_LE(PermutationLoss(est.pi_hat, p.pi).per_node_l1.maxCoeff(), 1e-6);
}

TEST(OracleEstimateTest, RecoversMembershipsExactlyForThreeCommunities) {
  const DcmmParams p = OracleModel(3);
  EstimatorConfig cfg;
  cfg.K = 3;
  const MembershipEstimate est = OracleEstimate(BuildOmega(p), cfg);
  EXPECT_LE(PermutationLoss(est.pi_hat, p.pi).loss, 1e-6);
}

TEST(OracleEstimateTest, ZeroOmegaFailsRegularization) {
  EstimatorConfig cfg;
  EXPECT_PRIME_ERROR(OracleEstimate(EdgeProbabilityMatrix{Matrix::Zero(10, 10)}, cfg),
                     ErrorCode::kRegularizationFailure);
}

TEST(EstimateMembershipsTest, InfeasibleHuntGivesAllDefaultRows) {
  const DcmmParams p = NoisyModel(120, 2, 0.8, 3);
  RandomStream rng(1);
  EstimatorConfig cfg;
  cfg.c = 1e9;  // nothing survives the degree truncation
  const MembershipEstimate est = EstimateMemberships(NonPrivate(SampleGraph(p, rng)), cfg);
  EXPECT_TRUE(est.vertex_hunt_failed);
  EXPECT_FALSE(est.warnings.empty());
  EXPECT_EQ(est.pi_hat, Matrix::Constant(120, 2, 0.5));
  EXPECT_TRUE(std::all_of(est.default_row.begin(), est.default_row.end(), [](bool b) { return b; }));
}

TEST(EstimateMembershipsTest, RowsStochasticAndDefaultsMatchTruncation) {
  for (int K : {2, 3}) {
    const DcmmParams p = NoisyModel(300, K, 0.9, 10 + static_cast<std::uint64_t>(K));
    RandomStream rng(4);
    EstimatorConfig cfg;
    cfg.K = K;
    cfg.epsilon = 3.0;
    RandomStream mech(5);
    const PrivatizedGraph released =
        SymmetricEdgeFlip(SampleGraph(p, rng), PrivacyParams(3.0), mech);
    const MembershipEstimate est = EstimateMemberships(Debias(released), cfg);
    ExpectRowStochastic(est.pi_hat);
    std::vector<bool> in_s_hat(300, false);
    for (int i : est.spectral.s_hat) in_s_hat[i] = true;
    for (int i = 0; i < 300; ++i) EXPECT_EQ(est.default_row[i], !in_s_hat[i]);
    EXPECT_TRUE(std::includes(est.spectral.s_hat.begin(), est.spectral.s_hat.end(),
                              est.spectral.s_gamma.begin(), est.spectral.s_gamma.end()));
    EXPECT_LT(PermutationLoss(est.pi_hat, p.pi).loss, 0.6);
  }
}

TEST(EstimateMembershipsTest, EstimateFromGraphDebiasesWhenBudgetGiven) {
  const DcmmParams p = NoisyModel(200, 2, 0.9, 6);
  RandomStream rng(2);
  const AdjacencyMatrix g = SampleGraph(p, rng);
  EstimatorConfig cfg;
  cfg.epsilon = 2.0;
  const MembershipEstimate a = EstimateFromGraph(g, cfg);
  const MembershipEstimate b =
      EstimateMemberships(Debias(PrivatizedGraph{g.a, PrivacyParams(2.0)}), cfg);
  EXPECT_EQ(a.pi_hat, b.pi_hat);
  cfg.epsilon.reset();
  EXPECT_EQ(EstimateFromGraph(g, cfg).pi_hat, EstimateMemberships(NonPrivate(g), cfg).pi_hat);
}

TEST(EstimateMembershipsTest, NodeRelabelingPermutesRows) {
  const int n = 240;
  const DcmmParams p = NoisyModel(n, 2, 0.9, 8);
  RandomStream rng(3);
  const AdjacencyMatrix g = SampleGraph(p, rng);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = (i * 7) % n;  // 7 is coprime to 240
  AdjacencyMatrix h{BitMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h.a(i, j) = g.a(perm[i], perm[j]);
  }
  EstimatorConfig cfg;
  const Matrix a = EstimateMemberships(NonPrivate(g), cfg).pi_hat;
  const Matrix b = EstimateMemberships(NonPrivate(h), cfg).pi_hat;
  Matrix a_perm(n, 2);
  for (int i = 0; i < n; ++i) a_perm.row(i) = a.row(perm[i]);
  EXPECT_LE(PermutationLoss(b, a_perm).loss, 1e-8);
}

}  // namespace
}  // namespace prime
