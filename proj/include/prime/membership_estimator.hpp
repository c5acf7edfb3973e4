#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prime/dcmm_model.hpp"
#include "prime/privacy_mechanism.hpp"
#include "prime/spectral_core.hpp"
#include "prime/vertex_hunting.hpp"

namespace prime {

struct EstimatorConfig {
  int K = 2;
  double tau = 1.0;
  double c = 0.01;
  double gamma = 0.5;
  // Budget the observed graph was released under. Only consulted by
  // EstimateFromGraph; empty means the graph is the raw adjacency matrix.
  std::optional<double> epsilon;
  HuntConfig hunt;
  // Above this condition number the barycentric system is solved in the
  // least-squares sense.
  double barycentric_condition_limit = 1e10;
};

// Snapshot of the spectral stage.
struct SpectralState {
  PseudoDegrees degrees;
  Vector h_diag;
  Vector lambdas;
  Matrix xi;
  double eigen_residual = 0.0;
  double delta_hat_sq = 0.0;
  std::vector<int> s_hat;       // after eviction of nodes with xi_i1 <= floor
  std::vector<int> s_gamma;     // subset of s_hat used for vertex search
  std::vector<int> ratio_nodes;  // == s_hat; row r of `ratios` is node ratio_nodes[r]
  Matrix ratios;
  int evicted = 0;
};

struct MembershipEstimate {
  Matrix pi_hat;                    // n x K, rows on the probability simplex
  std::vector<bool> default_row;    // node outside S_hat (or every node on fallback)
  std::vector<bool> degenerate_row;  // node in S_hat whose reconstruction collapsed
  SpectralState spectral;
  SimplexVertices vertices;
  Vector v1;
  bool vertex_hunt_failed = false;
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(pi_hat.rows()); }
  int K() const { return static_cast<int>(pi_hat.cols()); }
};

// Weights w with sum_k w_k v_k = r and sum_k w_k = 1. Entries may be
// negative. Throws kDegenerateGeometry if even the least-squares fallback has
// no solution.
Vector SolveBarycentric(const Vector& r, const SimplexVertices& vertices,
                        double condition_limit = 1e10);

// v1_j = (lambda_1 + v_j^T diag(lambda_2..lambda_K) v_j)^{-1/2}; NaN where the
// radicand is not positive.
Vector ComputeV1(const Vector& lambdas, const SimplexVertices& vertices);

struct PiRow {
  Vector row;
  bool fallback = false;  // true when the uniform row was substituted
};

// max(w_k / v1_k, 0), normalized to sum 1.
PiRow ReconstructPiRow(const Vector& w, const Vector& v1);

// The full estimator, from the debiased (or raw) matrix to Pi_hat.
// Propagates kRegularizationFailure and kDegenerateGeometry; an infeasible
// vertex search yields the all-uniform estimate with vertex_hunt_failed set.
MembershipEstimate EstimateMemberships(const DebiasedMatrix& m, const EstimatorConfig& cfg);

// Debiases `observed` under cfg.epsilon when set, otherwise treats it as the
// raw adjacency matrix, then runs EstimateMemberships.
MembershipEstimate EstimateFromGraph(const AdjacencyMatrix& observed,
                                     const EstimatorConfig& cfg);

// Population counterpart: the Laplacian is built from Omega itself with
// degrees E(d_i) = sum_{j != i} Omega_ij. No sampling and no privacy.
MembershipEstimate OracleEstimate(const EdgeProbabilityMatrix& omega,
                                  const EstimatorConfig& cfg);

}  // namespace prime
