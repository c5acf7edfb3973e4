#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "prime/random.hpp"

namespace prime {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Generative triple of the degree-corrected mixed-membership block model:
// P[(i,j) is an edge] = theta_i theta_j pi_i^T B pi_j.
struct DcmmParams {
  Vector theta;  // length n, positive
  Matrix pi;     // n x K, rows on the probability simplex
  Matrix b;      // K x K symmetric, entries in [0, 1]

  int n() const { return static_cast<int>(theta.size()); }
  int K() const { return static_cast<int>(b.rows()); }
  double theta_bar() const { return theta.mean(); }
  // sqrt(n * theta_bar^2), the degree scale used by the simulation grids.
  double b_n() const;
};

struct ModelLimits {
  double theta_bound = 10.0;
  double row_sum_tol = 1e-12;
};

// Throws kInvalidParameters when shapes, the simplex rows of pi, positivity
// and boundedness of theta, or symmetry/range of B are violated. Does not
// look at edge probabilities; BuildOmega does that.
void ValidateParams(const DcmmParams& params, const ModelLimits& limits = {});

struct EdgeProbabilityMatrix {
  Matrix omega;  // Theta Pi B Pi^T Theta
  int n() const { return static_cast<int>(omega.rows()); }
};

struct AdjacencyMatrix {
  BitMatrix a;  // symmetric, zero diagonal
  int n() const { return static_cast<int>(a.rows()); }
  std::int64_t EdgeCount() const;
  Matrix ToDense() const { return a.cast<double>(); }
};

// Checks that `a` is square, symmetric, 0/1 valued with a zero diagonal.
AdjacencyMatrix CheckedAdjacency(BitMatrix a);

EdgeProbabilityMatrix BuildOmega(const DcmmParams& params,
                                 const ModelLimits& limits = {});

// One uniform draw per pair (i < j), consumed in row-major upper-triangular
// order; the pair is an edge iff the draw is below omega_ij.
AdjacencyMatrix SampleGraph(const EdgeProbabilityMatrix& omega, RandomStream& rng);
AdjacencyMatrix SampleGraph(const DcmmParams& params, RandomStream& rng);

// Draws raw_i ~ U[lo, hi] and rescales so that sqrt(n * theta_bar^2) == b_n.
Vector GenTheta(int n, double b_n, double lo, double hi, RandomStream& rng);
// The deterministic rescaling step of GenTheta.
Vector ScaleTheta(const Vector& raw, double b_n);

// beta_n I + (1 - beta_n) 1 1^T.
Matrix MakePlantedB(int K, double beta_n);

enum class DegreeCentering {
  kLiteral,       // D_ii = E(d_i - d_bar)
  kConventional,  // D_ii = E(d_i)
};

struct AuditConfig {
  double c1 = 10.0;
  double c2 = 0.05;
  double c3 = 0.05;
  double c4 = 0.1;
  DegreeCentering centering = DegreeCentering::kLiteral;
  // Relative threshold below which a diagonal entry of D or an eigenvalue
  // of BG is treated as zero.
  double zero_tol = 1e-10;
};

// Regularity conditions on (theta, Pi, B) that the risk bounds rely on.
struct AssumptionReport {
  // Community balance.
  double min_community_mass = 0.0;  // min_k sum_i theta_i Pi_ik
  double theta_l1 = 0.0;
  bool community_mass_ok = false;   // min mass >= ||theta||_1 / c1

  // G = K Pi^T Theta D^-1 Theta Pi.
  Vector expected_degree;  // E(d_i), i.e. row sums of Omega off the diagonal
  Vector d_theta;          // diagonal of D under the configured centering
  bool g_computable = false;
  double min_d_theta = 0.0;
  Matrix g;
  double g_norm = 0.0;
  double g_inv_norm = 0.0;
  bool g_norm_ok = false;
  bool g_inv_norm_ok = false;

  // Spectrum of BG, real parts sorted in decreasing order.
  Vector bg_eigenvalues;
  double bg_max_imag = 0.0;
  double lambda1 = 0.0;
  double lambda_k_abs = 0.0;
  double max_other = 0.0;  // max_{k != 1} lambda_k(BG)
  double alpha_n = 0.0;    // min(lambda_1, K)
  double beta_n = 0.0;     // min(|lambda_K|, 1)
  bool alpha_ok = false;   // lambda_1 >= 1
  bool beta_ok = false;    // |lambda_K| > 0
  bool gap_ok = false;     // max_other <= min((1-c2) lambda_1, sqrt(K)/c2)

  // Perron vector of BG.
  Vector perron;
  bool perron_positive = false;
  double perron_ratio = 0.0;
  bool perron_ratio_ok = false;

  // A pure node with theta_i >= c4 theta_bar in every community.
  std::vector<bool> pure_node_present;
  bool pure_nodes_ok = false;

  bool AllSatisfied() const;
};

AssumptionReport AuditAssumptions(const DcmmParams& params,
                                  const AuditConfig& cfg = {});

}  // namespace prime
