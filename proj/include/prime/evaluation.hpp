#pragma once

#include <vector>

#include "prime/dcmm_model.hpp"

namespace prime {

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// result[row] is the column assigned to that row.
std::vector<int> SolveAssignment(const Matrix& cost);

struct LossReport {
  double loss = 0.0;
  // Column a of the estimate is matched to column best_permutation[a] of the
  // reference.
  std::vector<int> best_permutation;
  Vector per_node_l1;
};

// min over column relabelings of (1/n) sum_i || pi_hat_i - pi_i ||_1, solved
// exactly as a K x K assignment problem. For K <= 5 the result is
// cross-checked against full enumeration.
LossReport PermutationLoss(const Matrix& pi_hat, const Matrix& pi);

// Enumeration of all K! relabelings; the cross-check path.
LossReport PermutationLossBruteForce(const Matrix& pi_hat, const Matrix& pi);

// (e^eps + 1) / (e^eps - 1) = coth(eps / 2); 1 for eps = +inf.
double CothFactor(double epsilon);

// K^{3/2} coth(eps/2) / (delta_n sqrt(n theta_bar^2)).
double ComputeErrN(int K, double delta_n, int n, double theta_bar, double epsilon);

// min{beta_n, alpha_n / sqrt(K)}.
double ComputeDeltaN(double alpha_n, double beta_n, int K);

// theta_i / theta_bar.
Vector RelativeDegrees(const Vector& theta);

// Both integrals are taken against the empirical distribution of the
// relative degrees t_i = theta_i / theta_bar.
// (1/n) sum_i min{ err_n / min(t_i, 1), 1 }.
double RiskBoundIntegral(double err_n, const Vector& relative_degrees);
// (1/n) sum_i min{ err_n / sqrt(min(t_i, 1)), 1 }.
double LowerBoundIntegral(double err_n, const Vector& relative_degrees);

struct TheoryDiagnostics {
  double err_n = 0.0;
  double delta_n = 0.0;
  double alpha_n = 0.0;
  double beta_n = 0.0;
  double coth_factor = 0.0;
  Vector f_n;  // sorted theta_i / theta_bar
  double risk_integral = 0.0;
  double lower_integral = 0.0;
  // upper / lower integral; the sqrt(log n) factor and constants are not
  // included.
  double optimality_ratio = 0.0;
  double log_n_err_sq = 0.0;  // log(n) err_n^2; should be small for the bounds to apply
};

// alpha_n, beta_n: typically AssumptionReport::alpha_n / beta_n.
TheoryDiagnostics MakeTheoryDiagnostics(const DcmmParams& params, double epsilon,
                                        double alpha_n, double beta_n);

}  // namespace prime
