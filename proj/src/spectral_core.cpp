#include "prime/spectral_core.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

PseudoDegrees ComputePseudoDegrees(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kShapeMismatch, "matrix must be square");
  PseudoDegrees deg;
  deg.d = m.rowwise().sum() - m.diagonal();
  deg.d_bar = m.rows() > 0 ? deg.d.mean() : 0.0;
  return deg;
}

RegularizedLaplacian BuildLaplacian(const Matrix& m, const PseudoDegrees& deg, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidParameters, "tau must be positive");
  if (m.rows() != m.cols() || deg.d.size() != m.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "degree vector does not match matrix");
  }
  RegularizedLaplacian out;
  out.tau = tau;
  out.h_diag = deg.d.array() + tau * deg.d_bar;
  const double h_min = m.rows() > 0 ? out.h_diag.minCoeff() : 0.0;
  if (!(h_min > 0.0)) {
    std::ostringstream msg;
    msg << "regularized degree matrix is not positive (min H_ii = " << h_min
        << "); increase tau";
    throw Error(ErrorCode::kRegularizationFailure, msg.str());
  }
  const Vector inv_sqrt = out.h_diag.cwiseSqrt().cwiseInverse();
  const Eigen::Index n = m.rows();
  out.l.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      out.l(i, j) = m(i, j) * inv_sqrt(i) * inv_sqrt(j);
      out.l(j, i) = out.l(i, j);
    }
  }
  return out;
}

namespace {

// Eigenpairs with signed indices [il, iu] (1-based, ascending order).
void SymmetricEigenRange(const Matrix& a, int il, int iu, Vector& values, Matrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int count = iu - il + 1;
  Matrix work = a;
  Vector w(n);
  vectors.resize(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(count, 1)));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, il, iu,
                     0.0, &found, w.data(), vectors.data(), n, support.data());
  if (info != 0 || found != count) {
    std::ostringstream msg;
    msg << "dsyevr failed (info = " << info << ", found " << found << " of " << count << ")";
    throw Error(ErrorCode::kNumericalFailure, msg.str());
  }
  values = w.head(count);
}

}  // namespace

EigenPairs TopKEigen(const Matrix& l, int K) {
  const int n = static_cast<int>(l.rows());
  if (l.cols() != n) throw Error(ErrorCode::kShapeMismatch, "matrix must be square");
  if (K < 1 || K > n) throw Error(ErrorCode::kInvalidParameters, "K must lie in [1, n]");

  Vector values;
  Matrix vectors;
  if (2 * K >= n) {
    SymmetricEigenRange(l, 1, n, values, vectors);
  } else {
    Vector low_v, high_v;
    Matrix low_x, high_x;
    SymmetricEigenRange(l, 1, K, low_v, low_x);
    SymmetricEigenRange(l, n - K + 1, n, high_v, high_x);
    values.resize(2 * K);
    values << low_v, high_v;
    vectors.resize(n, 2 * K);
    vectors << low_x, high_x;
  }

  // Largest magnitude first; on equal magnitude the positive value wins.
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double fa = std::abs(values(a));
    const double fb = std::abs(values(b));
    if (fa != fb) return fa > fb;
    return values(a) > values(b);
  });
  idx.resize(K);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values(a) > values(b); });

  EigenPairs out;
  out.lambdas.resize(K);
  out.xi.resize(n, K);
  for (int k = 0; k < K; ++k) {
    out.lambdas(k) = values(idx[k]);
    out.xi.col(k) = vectors.col(idx[k]);
  }

  for (int k = 0; k < K; ++k) {
    auto col = out.xi.col(k);
    bool flip;
    const double total = col.sum();
    if (k == 0 && total != 0.0) {
      flip = total < 0.0;
    } else {
      Eigen::Index arg = 0;
      col.cwiseAbs().maxCoeff(&arg);
      flip = col(arg) < 0.0;
    }
    if (flip) col = -col;
  }

  for (int k = 0; k < K; ++k) {
    const double res = (l * out.xi.col(k) - out.lambdas(k) * out.xi.col(k)).norm();
    out.max_residual = std::max(out.max_residual, res);
  }
  const double scale = std::max(1.0, std::abs(out.lambdas(0)));
  if (!(out.max_residual <= 1e-6 * scale)) {
    std::ostringstream msg;
    msg << "eigenpairs did not converge (residual norm " << out.max_residual << ")";
    throw Error(ErrorCode::kNumericalFailure, msg.str());
  }
  return out;
}

double ComputeDeltaHat(const Vector& lambdas) {
  const int K = static_cast<int>(lambdas.size());
  if (K < 2) throw Error(ErrorCode::kInvalidParameters, "delta_hat requires K >= 2");
  const double root_k = std::sqrt(static_cast<double>(K));
  return std::min(root_k * (lambdas(0) - lambdas(1)), root_k * std::abs(lambdas(K - 1)));
}

NodeSelection SelectNodes(const PseudoDegrees& deg, double delta_hat_sq, double c,
                          double gamma, int K, int n) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidParameters, "c must be positive");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::kInvalidParameters, "gamma must be nonnegative");
  const double k = static_cast<double>(K);
  const double threshold = c * k * k * k * std::log(static_cast<double>(n));
  NodeSelection sel;
  for (int i = 0; i < deg.d.size(); ++i) {
    if (deg.d(i) * delta_hat_sq >= threshold) {
      sel.s_hat.push_back(i);
      if (deg.d(i) >= gamma * deg.d_bar) sel.s_gamma.push_back(i);
    }
  }
  if (sel.s_gamma.empty()) {
    std::ostringstream msg;
    msg << "no node passes both truncation rules (|S| = " << sel.s_hat.size()
        << ", delta_hat^2 = " << delta_hat_sq << ")";
    throw Error(ErrorCode::kVertexHuntInfeasible, msg.str());
  }
  return sel;
}

ScoreRatios ComputeScoreRatios(const Matrix& xi, const std::vector<int>& s_hat, double floor) {
  const int K = static_cast<int>(xi.cols());
  ScoreRatios out;
  out.nodes.reserve(s_hat.size());
  for (int i : s_hat) {
    if (xi(i, 0) > floor) {
      out.nodes.push_back(i);
    } else {
      ++out.evicted;
    }
  }
  out.ratios.resize(static_cast<Eigen::Index>(out.nodes.size()), K - 1);
  for (std::size_t r = 0; r < out.nodes.size(); ++r) {
    const int i = out.nodes[r];
    for (int j = 1; j < K; ++j) out.ratios(r, j - 1) = xi(i, j) / xi(i, 0);
  }
  return out;
}

}  // namespace prime
