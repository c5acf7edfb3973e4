#include "prime/dcmm_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

double DcmmParams::b_n() const {
  const double tb = theta_bar();
  return std::sqrt(static_cast<double>(n()) * tb * tb);
}

void ValidateParams(const DcmmParams& params, const ModelLimits& limits) {
  const int n = params.n();
  const int K = params.K();
  if (n < 1) throw Error(ErrorCode::kInvalidParameters, "n must be positive");
  if (K < 1 || params.b.cols() != K) {
    throw Error(ErrorCode::kInvalidParameters, "B must be a non-empty square matrix");
  }
  if (K > n) throw Error(ErrorCode::kInvalidParameters, "K must not exceed n");
  if (params.pi.rows() != n || params.pi.cols() != K) {
    throw Error(ErrorCode::kInvalidParameters, "Pi must be n x K");
  }
  for (int i = 0; i < n; ++i) {
    const double t = params.theta(i);
    if (!(t > 0.0) || !(t <= limits.theta_bound)) {
      std::ostringstream msg;
      msg << "theta_" << i << " = " << t << " outside (0, " << limits.theta_bound << "]";
      throw Error(ErrorCode::kInvalidParameters, msg.str());
    }
    if ((params.pi.row(i).array() < 0.0).any() || !params.pi.row(i).allFinite()) {
      std::ostringstream msg;
      msg << "row " << i << " of Pi has a negative or non-finite entry";
      throw Error(ErrorCode::kInvalidParameters, msg.str());
    }
    if (std::abs(params.pi.row(i).sum() - 1.0) > limits.row_sum_tol) {
      std::ostringstream msg;
      msg << "row " << i << " of Pi sums to " << params.pi.row(i).sum();
      throw Error(ErrorCode::kInvalidParameters, msg.str());
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      const double v = params.b(k, l);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kInvalidParameters, "B entries must lie in [0, 1]");
      }
      if (v != params.b(l, k)) {
        throw Error(ErrorCode::kInvalidParameters, "B must be symmetric");
      }
    }
  }
}

std::int64_t AdjacencyMatrix::EdgeCount() const {
  std::int64_t count = 0;
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < j; ++i) count += a(i, j);
  }
  return count;
}

EdgeProbabilityMatrix BuildOmega(const DcmmParams& params, const ModelLimits& limits) {
  ValidateParams(params, limits);
  const Matrix weighted = params.theta.asDiagonal() * params.pi;
  Matrix omega = weighted * params.b * weighted.transpose();
  // Symmetrize exactly; the product is symmetric only up to rounding.
  omega = (0.5 * (omega + omega.transpose())).eval();
  const int n = params.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double p = omega(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "edge probability Omega(" << i << "," << j << ") = " << p
            << " lies outside [0, 1]";
        throw Error(ErrorCode::kInvalidParameters, msg.str());
      }
    }
  }
  return {std::move(omega)};
}

AdjacencyMatrix CheckedAdjacency(BitMatrix a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "adjacency matrix must be square");
  }
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (a(j, j) != 0) throw Error(ErrorCode::kInvalidParameters, "adjacency diagonal must be 0");
    for (Eigen::Index i = 0; i < j; ++i) {
      if (a(i, j) > 1) {
        throw Error(ErrorCode::kInvalidParameters, "adjacency entries must be 0 or 1");
      }
      if (a(i, j) != a(j, i)) {
        throw Error(ErrorCode::kInvalidParameters, "adjacency matrix must be symmetric");
      }
    }
  }
  return AdjacencyMatrix{std::move(a)};
}

AdjacencyMatrix SampleGraph(const EdgeProbabilityMatrix& omega, RandomStream& rng) {
  const int n = omega.n();
  AdjacencyMatrix out{BitMatrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::uint8_t bit = rng.Uniform() < omega.omega(i, j) ? 1 : 0;
      out.a(i, j) = bit;
      out.a(j, i) = bit;
    }
  }
  return out;
}

AdjacencyMatrix SampleGraph(const DcmmParams& params, RandomStream& rng) {
  return SampleGraph(BuildOmega(params), rng);
}

Vector ScaleTheta(const Vector& raw, double b_n) {
  if (!(b_n > 0.0)) throw Error(ErrorCode::kInvalidParameters, "b_n must be positive");
  const double total = raw.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters, "raw degree parameters must have positive sum");
  }
  const double n = static_cast<double>(raw.size());
  return raw * (std::sqrt(n) * b_n / total);
}

Vector GenTheta(int n, double b_n, double lo, double hi, RandomStream& rng) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameters, "n must be positive");
  if (!(b_n > 0.0)) throw Error(ErrorCode::kInvalidParameters, "b_n must be positive");
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorCode::kInvalidParameters, "theta range requires 0 < lo <= hi");
  }
  Vector raw(n);
  for (int i = 0; i < n; ++i) raw(i) = rng.Uniform(lo, hi);
  return ScaleTheta(raw, b_n);
}

Matrix MakePlantedB(int K, double beta_n) {
  if (K < 1) throw Error(ErrorCode::kInvalidParameters, "K must be positive");
  if (!(beta_n > 0.0 && beta_n < 1.0)) {
    throw Error(ErrorCode::kInvalidParameters, "beta_n must lie in (0, 1)");
  }
  Matrix b = Matrix::Constant(K, K, 1.0 - beta_n);
  b.diagonal().setOnes();
  return b;
}

bool AssumptionReport::AllSatisfied() const {
  return community_mass_ok && g_computable && g_norm_ok && g_inv_norm_ok && alpha_ok &&
         beta_ok && gap_ok && perron_positive && perron_ratio_ok && pure_nodes_ok;
}

AssumptionReport AuditAssumptions(const DcmmParams& params, const AuditConfig& cfg) {
  ValidateParams(params);
  const int n = params.n();
  const int K = params.K();
  const Matrix& pi = params.pi;
  const Vector& theta = params.theta;
  AssumptionReport r;

  const Vector mass = pi.transpose() * theta;
  r.min_community_mass = mass.minCoeff();
  r.theta_l1 = theta.sum();
  r.community_mass_ok = r.min_community_mass >= r.theta_l1 / cfg.c1;

  // Expected pseudo-degrees: the debiased matrix has mean Omega - diag(Omega)
  // regardless of the privacy budget.
  const Matrix weighted = theta.asDiagonal() * pi;
  const Matrix omega = weighted * params.b * weighted.transpose();
  r.expected_degree = omega.rowwise().sum() - omega.diagonal();
  r.d_theta = r.expected_degree;
  if (cfg.centering == DegreeCentering::kLiteral) {
    r.d_theta.array() -= r.expected_degree.mean();
  }
  r.min_d_theta = r.d_theta.minCoeff();
  const double d_scale = std::max(1.0, r.expected_degree.cwiseAbs().maxCoeff());
  r.g_computable = r.min_d_theta > cfg.zero_tol * d_scale;

  if (r.g_computable) {
    const Vector inv_d = r.d_theta.cwiseInverse();
    r.g = static_cast<double>(K) * weighted.transpose() * inv_d.asDiagonal() * weighted;
    r.g = (0.5 * (r.g + r.g.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> g_eig(r.g, Eigen::EigenvaluesOnly);
    const Vector abs_eig = g_eig.eigenvalues().cwiseAbs();
    r.g_norm = abs_eig.maxCoeff();
    const double min_abs = abs_eig.minCoeff();
    r.g_inv_norm = min_abs > cfg.zero_tol * std::max(1.0, r.g_norm)
                       ? 1.0 / min_abs
                       : std::numeric_limits<double>::infinity();
    r.g_norm_ok = r.g_norm <= cfg.c1;
    r.g_inv_norm_ok = r.g_inv_norm <= cfg.c1;

    const Matrix bg = params.b * r.g;
    Eigen::EigenSolver<Matrix> bg_eig(bg);
    if (bg_eig.info() != Eigen::Success) {
      throw Error(ErrorCode::kNumericalFailure, "eigen-decomposition of BG did not converge");
    }
    const Eigen::VectorXcd values = bg_eig.eigenvalues();
    std::vector<int> order(K);
    for (int k = 0; k < K; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values(a).real() > values(b).real(); });
    r.bg_eigenvalues.resize(K);
    for (int k = 0; k < K; ++k) {
      r.bg_eigenvalues(k) = values(order[k]).real();
      r.bg_max_imag = std::max(r.bg_max_imag, std::abs(values(order[k]).imag()));
    }
    r.lambda1 = r.bg_eigenvalues(0);
    r.lambda_k_abs = std::abs(r.bg_eigenvalues(K - 1));
    r.max_other = K > 1 ? r.bg_eigenvalues(1) : -std::numeric_limits<double>::infinity();
    r.alpha_n = std::min(r.lambda1, static_cast<double>(K));
    r.beta_n = std::min(r.lambda_k_abs, 1.0);
    r.alpha_ok = r.lambda1 >= 1.0;
    r.beta_ok = r.lambda_k_abs > cfg.zero_tol * std::max(1.0, std::abs(r.lambda1));
    r.gap_ok = K == 1 || r.max_other <= std::min((1.0 - cfg.c2) * r.lambda1,
                                                 std::sqrt(static_cast<double>(K)) / cfg.c2);

    r.perron = bg_eig.eigenvectors().col(order[0]).real();
    if (r.perron.sum() < 0.0) r.perron = -r.perron;
    const double norm = r.perron.norm();
    if (norm > 0.0) r.perron /= norm;
    const double pmin = r.perron.minCoeff();
    const double pmax = r.perron.maxCoeff();
    r.perron_positive = pmin > 0.0;
    r.perron_ratio = pmax > 0.0 ? pmin / pmax : 0.0;
    r.perron_ratio_ok = r.perron_positive && r.perron_ratio >= cfg.c3;
  }

  const double theta_bar = params.theta_bar();
  r.pure_node_present.assign(K, false);
  for (int i = 0; i < n; ++i) {
    if (theta(i) < cfg.c4 * theta_bar) continue;
    for (int k = 0; k < K; ++k) {
      if (pi(i, k) == 1.0) r.pure_node_present[k] = true;
    }
  }
  r.pure_nodes_ok = std::all_of(r.pure_node_present.begin(), r.pure_node_present.end(),
                                [](bool b) { return b; });
  return r;
}

}  // namespace prime
