#include "prime/membership_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

Vector SolveBarycentric(const Vector& r, const SimplexVertices& vertices,
                        double condition_limit) {
  const int K = vertices.K();
  if (r.size() != K - 1 || vertices.v.cols() != K - 1) {
    throw Error(ErrorCode::kShapeMismatch, "ratio vector does not match vertex dimension");
  }
  Matrix system(K, K);
  system.topRows(K - 1) = vertices.v.transpose();
  system.row(K - 1).setOnes();
  Vector rhs(K);
  rhs.head(K - 1) = r;
  rhs(K - 1) = 1.0;

  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  Vector w;
  if (sv(K - 1) > 0.0 && sv(0) / sv(K - 1) <= condition_limit) {
    w = svd.solve(rhs);
  } else {
    // Eliminate the last weight through sum(w) = 1 and solve the rest in the
    // least-squares sense.
    Matrix diff(K - 1, K - 1);
    for (int k = 0; k < K - 1; ++k) {
      diff.col(k) = (vertices.v.row(k) - vertices.v.row(K - 1)).transpose();
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(diff);
    if (cod.rank() == 0) {
      throw Error(ErrorCode::kDegenerateGeometry, "all simplex vertices coincide");
    }
    const Vector u = cod.solve(r - vertices.v.row(K - 1).transpose());
    w.resize(K);
    w.head(K - 1) = u;
    w(K - 1) = 1.0 - u.sum();
  }
  if (!w.allFinite()) {
    throw Error(ErrorCode::kDegenerateGeometry, "barycentric system has no finite solution");
  }
  return w;
}

Vector ComputeV1(const Vector& lambdas, const SimplexVertices& vertices) {
  const int K = vertices.K();
  if (lambdas.size() != K) {
    throw Error(ErrorCode::kShapeMismatch, "need one eigenvalue per community");
  }
  Vector v1(K);
  for (int j = 0; j < K; ++j) {
    double radicand = lambdas(0);
    for (int k = 1; k < K; ++k) {
      const double coord = vertices.v(j, k - 1);
      radicand += lambdas(k) * coord * coord;
    }
    v1(j) = radicand > 0.0 ? 1.0 / std::sqrt(radicand)
                           : std::numeric_limits<double>::quiet_NaN();
  }
  return v1;
}

PiRow ReconstructPiRow(const Vector& w, const Vector& v1) {
  const int K = static_cast<int>(w.size());
  PiRow out{Vector::Constant(K, 1.0 / K), true};
  if (v1.size() != K || !v1.allFinite()) return out;
  Vector row(K);
  for (int k = 0; k < K; ++k) row(k) = std::max(w(k) / v1(k), 0.0);
  const double total = row.sum();
  if (!(total > 0.0) || !std::isfinite(total)) return out;
  out.row = row / total;
  out.fallback = false;
  return out;
}

namespace {

MembershipEstimate AllDefault(int n, int K, SpectralState spectral, std::string why) {
  MembershipEstimate est;
  est.pi_hat = Matrix::Constant(n, K, 1.0 / K);
  est.default_row.assign(n, true);
  est.degenerate_row.assign(n, false);
  est.spectral = std::move(spectral);
  est.vertex_hunt_failed = true;
  est.warnings.push_back(std::move(why));
  return est;
}

// Steps shared by the sample and population estimators. `numerator` is the
// matrix sandwiched by H^{-1/2}; pseudo-degrees are its off-diagonal row sums.
MembershipEstimate RunPipeline(const Matrix& numerator, const EstimatorConfig& cfg) {
  const int n = static_cast<int>(numerator.rows());
  const int K = cfg.K;
  if (K < 2 || K > n) throw Error(ErrorCode::kInvalidParameters, "K must lie in [2, n]");

  SpectralState spec;
  spec.degrees = ComputePseudoDegrees(numerator);
  const RegularizedLaplacian lap = BuildLaplacian(numerator, spec.degrees, cfg.tau);
  spec.h_diag = lap.h_diag;
  EigenPairs eig = TopKEigen(lap.l, K);
  spec.lambdas = eig.lambdas;
  spec.xi = std::move(eig.xi);
  spec.eigen_residual = eig.max_residual;
  spec.delta_hat_sq = ComputeDeltaHat(spec.lambdas);

  NodeSelection selection;
  try {
    selection = SelectNodes(spec.degrees, spec.delta_hat_sq, cfg.c, cfg.gamma, K, n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kVertexHuntInfeasible) throw;
    return AllDefault(n, K, std::move(spec), e.what());
  }

  const ScoreRatios ratios = ComputeScoreRatios(spec.xi, selection.s_hat);
  spec.s_hat = ratios.nodes;
  spec.ratio_nodes = ratios.nodes;
  spec.ratios = ratios.ratios;
  spec.evicted = ratios.evicted;
  std::vector<bool> in_s_hat(n, false);
  for (int i : spec.s_hat) in_s_hat[i] = true;
  std::vector<int> row_of(n, -1);
  for (std::size_t r = 0; r < spec.ratio_nodes.size(); ++r) row_of[spec.ratio_nodes[r]] = static_cast<int>(r);
  for (int i : selection.s_gamma) {
    if (in_s_hat[i]) spec.s_gamma.push_back(i);
  }

  std::vector<std::string> warnings;
  if (spec.evicted > 0) {
    std::ostringstream msg;
    msg << spec.evicted << " node(s) evicted for a non-positive leading eigenvector entry";
    warnings.push_back(msg.str());
  }

  Matrix hunt_points(static_cast<Eigen::Index>(spec.s_gamma.size()), K - 1);
  for (std::size_t r = 0; r < spec.s_gamma.size(); ++r) {
    hunt_points.row(r) = spec.ratios.row(row_of[spec.s_gamma[r]]);
  }
  SimplexVertices vertices;
  try {
    vertices = SketchedVertexSearch(hunt_points, K, cfg.hunt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kVertexHuntInfeasible) throw;
    MembershipEstimate est = AllDefault(n, K, std::move(spec), e.what());
    est.warnings.insert(est.warnings.begin(), warnings.begin(), warnings.end());
    return est;
  }

  MembershipEstimate est;
  est.pi_hat = Matrix::Constant(n, K, 1.0 / K);
  est.default_row.assign(n, true);
  est.degenerate_row.assign(n, false);
  est.v1 = ComputeV1(spec.lambdas, vertices);
  if (!est.v1.allFinite()) {
    warnings.push_back("non-positive radicand in v1; affected rows use the uniform profile");
  }
  int degenerate = 0;
  for (std::size_t r = 0; r < spec.ratio_nodes.size(); ++r) {
    const int i = spec.ratio_nodes[r];
    est.default_row[i] = false;
    const Vector w = SolveBarycentric(spec.ratios.row(r).transpose(), vertices,
                                      cfg.barycentric_condition_limit);
    const PiRow row = ReconstructPiRow(w, est.v1);
    est.pi_hat.row(i) = row.row.transpose();
    if (row.fallback) {
      est.degenerate_row[i] = true;
      ++degenerate;
    }
  }
  if (degenerate > 0) {
    std::ostringstream msg;
    msg << degenerate << " row(s) clamped to zero and replaced by the uniform profile";
    warnings.push_back(msg.str());
  }
  est.vertices = std::move(vertices);
  est.spectral = std::move(spec);
  est.warnings = std::move(warnings);
  return est;
}

}  // namespace

MembershipEstimate EstimateMemberships(const DebiasedMatrix& m, const EstimatorConfig& cfg) {
  return RunPipeline(m.m, cfg);
}

MembershipEstimate EstimateFromGraph(const AdjacencyMatrix& observed,
                                     const EstimatorConfig& cfg) {
  if (cfg.epsilon) {
    const PrivatizedGraph released{observed.a, PrivacyParams(*cfg.epsilon)};
    return EstimateMemberships(Debias(released), cfg);
  }
  return EstimateMemberships(NonPrivate(observed), cfg);
}

MembershipEstimate OracleEstimate(const EdgeProbabilityMatrix& omega,
                                  const EstimatorConfig& cfg) {
  return RunPipeline(omega.omega, cfg);
}

}  // namespace prime
