#pragma once

#include <vector>

#include "prime/dcmm_model.hpp"

namespace prime {

struct PseudoDegrees {
  Vector d;  // d_i = sum_{j != i} M_ij
  double d_bar = 0.0;
};

// Row sums excluding the diagonal, so the same routine serves the debiased
// matrix and the population matrix Omega (whose diagonal is nonzero).
PseudoDegrees ComputePseudoDegrees(const Matrix& m);

struct RegularizedLaplacian {
  Matrix l;  // H^{-1/2} M H^{-1/2}
  double tau = 0.0;
  Vector h_diag;  // d_i + tau * d_bar
};

// Throws kRegularizationFailure (reporting min H_ii) when some
// d_i + tau * d_bar <= 0, and kInvalidParameters for tau <= 0.
RegularizedLaplacian BuildLaplacian(const Matrix& m, const PseudoDegrees& deg, double tau);

struct EigenPairs {
  Vector lambdas;  // decreasing signed order
  Matrix xi;       // n x K, orthonormal columns
  double max_residual = 0.0;
};

// The K eigenpairs of the symmetric matrix with largest |lambda|, returned in
// decreasing signed order (so lambda_1 is the largest signed value among the
// selected ones). Column 0 is flipped so its entries sum to a positive value;
// every other column so that its largest-magnitude entry is positive.
//
// Backed by LAPACK dsyevr restricted to the K largest and K smallest signed
// eigenvalues, which together contain the K largest in magnitude.
EigenPairs TopKEigen(const Matrix& l, int K);

// min{ sqrt(K) (lambda_1 - lambda_2), sqrt(K) |lambda_K| }.
double ComputeDeltaHat(const Vector& lambdas);

struct NodeSelection {
  std::vector<int> s_hat;    // d_i * delta_hat_sq >= c K^3 log n
  std::vector<int> s_gamma;  // subset of s_hat with d_i >= gamma * d_bar
};

// Throws kVertexHuntInfeasible when s_gamma comes out empty.
NodeSelection SelectNodes(const PseudoDegrees& deg, double delta_hat_sq, double c,
                          double gamma, int K, int n);

// Minimum admissible leading-eigenvector entry for the SCORE ratios.
inline constexpr double kScoreFloor = 1e-12;

struct ScoreRatios {
  std::vector<int> nodes;  // retained members of s_hat, in input order
  Matrix ratios;           // nodes.size() x (K - 1)
  int evicted = 0;         // members of s_hat dropped for xi_i1 <= floor
};

// Row i of the result is (xi_i2 / xi_i1, ..., xi_iK / xi_i1).
ScoreRatios ComputeScoreRatios(const Matrix& xi, const std::vector<int>& s_hat,
                               double floor = kScoreFloor);

}  // namespace prime
