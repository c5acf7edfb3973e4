#include "prime/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

std::vector<int> SolveAssignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::kShapeMismatch, "cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation with 1-based sentinel column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int r0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost(r0 - 1, col - 1) - u[r0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

namespace {

void CheckShapes(const Matrix& pi_hat, const Matrix& pi) {
  if (pi_hat.rows() != pi.rows() || pi_hat.cols() != pi.cols()) {
    std::ostringstream msg;
    msg << "estimate is " << pi_hat.rows() << "x" << pi_hat.cols() << " but reference is "
        << pi.rows() << "x" << pi.cols();
    throw Error(ErrorCode::kShapeMismatch, msg.str());
  }
  if (pi.rows() == 0 || pi.cols() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "membership matrices must be non-empty");
  }
}

LossReport ReportFor(const Matrix& pi_hat, const Matrix& pi, std::vector<int> perm) {
  const int n = static_cast<int>(pi.rows());
  const int K = static_cast<int>(pi.cols());
  LossReport report;
  report.per_node_l1 = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < K; ++a) s += std::abs(pi_hat(i, a) - pi(i, perm[a]));
    report.per_node_l1(i) = s;
  }
  report.loss = report.per_node_l1.mean();
  report.best_permutation = std::move(perm);
  return report;
}

}  // namespace

LossReport PermutationLossBruteForce(const Matrix& pi_hat, const Matrix& pi) {
  CheckShapes(pi_hat, pi);
  const int K = static_cast<int>(pi.cols());
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  LossReport best;
  bool first = true;
  do {
    LossReport candidate = ReportFor(pi_hat, pi, perm);
    if (first || candidate.loss < best.loss) {
      best = std::move(candidate);
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

LossReport PermutationLoss(const Matrix& pi_hat, const Matrix& pi) {
  CheckShapes(pi_hat, pi);
  const int K = static_cast<int>(pi.cols());
  Matrix cost(K, K);
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) cost(a, b) = (pi_hat.col(a) - pi.col(b)).cwiseAbs().sum();
  }
  LossReport report = ReportFor(pi_hat, pi, SolveAssignment(cost));
  if (K <= 5) {
    const LossReport check = PermutationLossBruteForce(pi_hat, pi);
    if (std::abs(check.loss - report.loss) > 1e-9 * std::max(1.0, report.loss)) {
      std::ostringstream msg;
      msg << "assignment loss " << report.loss << " disagrees with enumeration "
          << check.loss;
      throw Error(ErrorCode::kNumericalFailure, msg.str());
    }
  }
  return report;
}

double CothFactor(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidPrivacyBudget, "epsilon must be strictly positive");
  }
  if (std::isinf(epsilon)) return 1.0;
  return 1.0 / std::tanh(0.5 * epsilon);
}

double ComputeErrN(int K, double delta_n, int n, double theta_bar, double epsilon) {
  if (K < 1 || !(delta_n > 0.0) || n < 1 || !(theta_bar > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters,
                "err_n needs K >= 1, delta_n > 0, n >= 1 and theta_bar > 0");
  }
  const double k = static_cast<double>(K);
  const double degree_scale = std::sqrt(static_cast<double>(n) * theta_bar * theta_bar);
  return k * std::sqrt(k) / (delta_n * degree_scale) * CothFactor(epsilon);
}

double ComputeDeltaN(double alpha_n, double beta_n, int K) {
  if (K < 1) throw Error(ErrorCode::kInvalidParameters, "K must be positive");
  return std::min(beta_n, alpha_n / std::sqrt(static_cast<double>(K)));
}

namespace {

template <typename Fn>
double DegreeIntegral(double err_n, const Vector& relative, Fn&& shape) {
  if (!(err_n >= 0.0)) throw Error(ErrorCode::kInvalidParameters, "err_n must be nonnegative");
  if (relative.size() == 0) {
    throw Error(ErrorCode::kInvalidParameters, "relative degrees must be non-empty");
  }
  if (!(relative.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters, "relative degrees must be positive");
  }
  double total = 0.0;
  for (int i = 0; i < relative.size(); ++i) {
    const double t = std::min(relative(i), 1.0);
    total += std::min(err_n / shape(t), 1.0);
  }
  return total / static_cast<double>(relative.size());
}

}  // namespace

Vector RelativeDegrees(const Vector& theta) {
  if (theta.size() == 0 || !(theta.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kInvalidParameters, "theta must be non-empty and positive");
  }
  return theta / theta.mean();
}

double RiskBoundIntegral(double err_n, const Vector& relative_degrees) {
  return DegreeIntegral(err_n, relative_degrees, [](double t) { return t; });
}

double LowerBoundIntegral(double err_n, const Vector& relative_degrees) {
  return DegreeIntegral(err_n, relative_degrees, [](double t) { return std::sqrt(t); });
}

TheoryDiagnostics MakeTheoryDiagnostics(const DcmmParams& params, double epsilon,
                                        double alpha_n, double beta_n) {
  TheoryDiagnostics d;
  const int n = params.n();
  const int K = params.K();
  d.alpha_n = alpha_n;
  d.beta_n = beta_n;
  d.delta_n = ComputeDeltaN(d.alpha_n, d.beta_n, K);
  d.coth_factor = CothFactor(epsilon);
  d.err_n = ComputeErrN(K, d.delta_n, n, params.theta_bar(), epsilon);
  d.f_n = RelativeDegrees(params.theta);
  std::sort(d.f_n.data(), d.f_n.data() + d.f_n.size());
  d.risk_integral = RiskBoundIntegral(d.err_n, d.f_n);
  d.lower_integral = LowerBoundIntegral(d.err_n, d.f_n);
  d.optimality_ratio = d.lower_integral > 0.0 ? d.risk_integral / d.lower_integral : 0.0;
  d.log_n_err_sq = std::log(static_cast<double>(n)) * d.err_n * d.err_n;
  return d;
}

}  // namespace prime
