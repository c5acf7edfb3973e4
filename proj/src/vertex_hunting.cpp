#include "prime/vertex_hunting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "prime/error.hpp"
#include "prime/random.hpp"

namespace prime {

int DefaultCenterCount(int K, int n_points) {
  const double by_log = std::ceil(K * std::log2(std::max(n_points, 1)));
  return std::max(K + 10, static_cast<int>(by_log));
}

namespace {

// Weights on the active vertices minimizing the distance from their affine
// hull, with the base vertex absorbing 1 - sum of the others. Minimum-norm
// solution when the active vertices are affinely dependent.
Vector AffineLeastSquares(const Vector& point, const Matrix& vertices,
                          const std::vector<int>& active) {
  const int K = static_cast<int>(vertices.rows());
  Vector z = Vector::Zero(K);
  const int base = active.front();
  if (active.size() == 1) {
    z(base) = 1.0;
    return z;
  }
  const int m = static_cast<int>(active.size()) - 1;
  Matrix diff(vertices.cols(), m);
  for (int c = 0; c < m; ++c) {
    diff.col(c) = (vertices.row(active[c + 1]) - vertices.row(base)).transpose();
  }
  const Vector rhs = point - vertices.row(base).transpose();
  const Vector u = diff.completeOrthogonalDecomposition().solve(rhs);
  double rest = 1.0;
  for (int c = 0; c < m; ++c) {
    z(active[c + 1]) = u(c);
    rest -= u(c);
  }
  z(base) = rest;
  return z;
}

}  // namespace

SimplexProjection ProjectOntoSimplex(const Vector& point, const Matrix& vertices) {
  const int K = static_cast<int>(vertices.rows());
  if (K < 1 || vertices.cols() != point.size()) {
    throw Error(ErrorCode::kShapeMismatch, "vertex dimension does not match point");
  }
  const double scale =
      1.0 + std::max(vertices.cwiseAbs().maxCoeff(), point.cwiseAbs().maxCoeff());
  const double grad_tol = 1e-13 * scale * scale;

  int nearest = 0;
  (vertices.rowwise() - point.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
  Vector w = Vector::Zero(K);
  w(nearest) = 1.0;
  std::vector<bool> in_support(K, false);
  in_support[nearest] = true;

  auto gradient = [&](const Vector& weights) {
    const Vector residual = vertices.transpose() * weights - point;
    return Vector(2.0 * vertices * residual);
  };

  const int max_iter = 50 * K + 50;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> active;
    for (int k = 0; k < K; ++k) {
      if (in_support[k]) active.push_back(k);
    }
    const Vector z = AffineLeastSquares(point, vertices, active);
    bool interior = true;
    for (int k : active) interior = interior && z(k) > 0.0;

    if (interior) {
      w = z;
      const Vector g = gradient(w);
      double nu = 0.0;
      for (int k : active) nu += w(k) * g(k);
      int entering = -1;
      double most_negative = -grad_tol;
      for (int k = 0; k < K; ++k) {
        if (!in_support[k] && g(k) - nu < most_negative) {
          most_negative = g(k) - nu;
          entering = k;
        }
      }
      if (entering < 0) break;
      in_support[entering] = true;
      continue;
    }

    // Step toward z until the first active weight hits zero.
    double alpha = 1.0;
    for (int k : active) {
      if (z(k) <= 0.0) alpha = std::min(alpha, w(k) / (w(k) - z(k)));
    }
    w += alpha * (z - w);
    for (int k : active) {
      if (w(k) <= 1e-15) {
        w(k) = 0.0;
        in_support[k] = false;
      }
    }
    if (std::none_of(in_support.begin(), in_support.end(), [](bool b) { return b; })) {
      // Cannot happen with exact arithmetic; recover the nearest vertex.
      in_support[nearest] = true;
      w.setZero();
      w(nearest) = 1.0;
    }
    w /= w.sum();
  }

  SimplexProjection out;
  out.weights = w;
  out.distance = (vertices.transpose() * w - point).norm();
  const Vector g = gradient(w);
  double nu = 0.0;
  for (int k = 0; k < K; ++k) nu += w(k) * g(k);
  double kkt = 0.0;
  for (int k = 0; k < K; ++k) {
    kkt = std::max(kkt, w(k) > 0.0 ? std::abs(g(k) - nu) : std::max(0.0, nu - g(k)));
  }
  out.kkt_residual = kkt / (scale * scale);
  return out;
}

double DistanceToSimplex(const Vector& point, const SimplexVertices& vertices) {
  return ProjectOntoSimplex(point, vertices.v).distance;
}

namespace {

struct Atoms {
  Matrix x;  // one distinct point per row
  Vector w;  // multiplicities
};

bool RowLess(const Matrix& m, int a, int b) {
  for (int c = 0; c < m.cols(); ++c) {
    if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
  }
  return false;
}

Atoms MergeDuplicates(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return RowLess(points, a, b); });
  std::vector<int> firsts;
  std::vector<double> counts;
  for (int r = 0; r < n; ++r) {
    if (r > 0 && points.row(order[r]) == points.row(order[r - 1])) {
      counts.back() += 1.0;
    } else {
      firsts.push_back(order[r]);
      counts.push_back(1.0);
    }
  }
  Atoms atoms;
  atoms.x.resize(static_cast<Eigen::Index>(firsts.size()), points.cols());
  atoms.w.resize(static_cast<Eigen::Index>(firsts.size()));
  for (std::size_t a = 0; a < firsts.size(); ++a) {
    atoms.x.row(a) = points.row(firsts[a]);
    atoms.w(a) = counts[a];
  }
  return atoms;
}

int SampleProportional(const Vector& mass, RandomStream& rng) {
  const double total = mass.sum();
  double target = rng.Uniform() * total;
  for (int i = 0; i < mass.size(); ++i) {
    target -= mass(i);
    if (target < 0.0) return i;
  }
  // Rounding left a sliver; take the last atom with positive mass.
  for (int i = static_cast<int>(mass.size()) - 1; i >= 0; --i) {
    if (mass(i) > 0.0) return i;
  }
  return 0;
}

// Weighted Lloyd iterations from k-means++ seeding; best inertia over restarts.
Matrix WeightedKMeans(const Atoms& atoms, int n_centers, int restarts, int iters,
                      RandomStream rng) {
  const int n = static_cast<int>(atoms.x.rows());
  const int dim = static_cast<int>(atoms.x.cols());
  Matrix best_centers;
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
    RandomStream local = rng.Split(static_cast<std::uint64_t>(restart));
    Matrix centers(n_centers, dim);
    centers.row(0) = atoms.x.row(SampleProportional(atoms.w, local));
    Vector nearest_sq = (atoms.x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < n_centers; ++c) {
      const Vector mass = atoms.w.cwiseProduct(nearest_sq);
      const int pick = mass.sum() > 0.0 ? SampleProportional(mass, local)
                                         : SampleProportional(atoms.w, local);
      centers.row(c) = atoms.x.row(pick);
      nearest_sq = nearest_sq.cwiseMin(
          (atoms.x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> label(n, -1);
    for (int it = 0; it < std::max(iters, 1); ++it) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        (centers.rowwise() - atoms.x.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        if (arg != label[i]) {
          label[i] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      Matrix sums = Matrix::Zero(n_centers, dim);
      Vector mass = Vector::Zero(n_centers);
      for (int i = 0; i < n; ++i) {
        sums.row(label[i]) += atoms.w(i) * atoms.x.row(i);
        mass(label[i]) += atoms.w(i);
      }
      for (int c = 0; c < n_centers; ++c) {
        if (mass(c) > 0.0) centers.row(c) = sums.row(c) / mass(c);
      }
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      inertia += atoms.w(i) * (centers.row(label[i]) - atoms.x.row(i)).squaredNorm();
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_centers = centers;
    }
  }
  return best_centers;
}

Matrix UniqueRows(const Matrix& m) {
  std::vector<int> keep;
  for (int r = 0; r < m.rows(); ++r) {
    bool seen = false;
    for (int k : keep) seen = seen || m.row(k) == m.row(r);
    if (!seen) keep.push_back(r);
  }
  Matrix out(static_cast<Eigen::Index>(keep.size()), m.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(r) = m.row(keep[r]);
  return out;
}

Matrix SortedRows(const Matrix& v) {
  std::vector<int> order(v.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return RowLess(v, a, b); });
  Matrix out(v.rows(), v.cols());
  for (int r = 0; r < v.rows(); ++r) out.row(r) = v.row(order[r]);
  return out;
}

bool LexLess(const Matrix& a, const Matrix& b) {
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      if (a(r, c) != b(r, c)) return a(r, c) < b(r, c);
    }
  }
  return false;
}

// Advances a sorted K-combination of {0..n-1}; false after the last one.
bool NextCombination(std::vector<int>& idx, int n) {
  const int K = static_cast<int>(idx.size());
  int pos = K - 1;
  while (pos >= 0 && idx[pos] == n - K + pos) --pos;
  if (pos < 0) return false;
  ++idx[pos];
  for (int j = pos + 1; j < K; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

// Weighted sum of squared outside distances; stops early past `bound`.
double SubsetObjective(const Matrix& vertices, const Matrix& augmented_inverse,
                       const Atoms& atoms, double bound) {
  const int K = static_cast<int>(vertices.rows());
  double total = 0.0;
  if (K == 2) {
    const double lo = std::min(vertices(0, 0), vertices(1, 0));
    const double hi = std::max(vertices(0, 0), vertices(1, 0));
    for (int i = 0; i < atoms.x.rows(); ++i) {
      const double p = atoms.x(i, 0);
      const double d = p < lo ? lo - p : (p > hi ? p - hi : 0.0);
      total += atoms.w(i) * d * d;
      if (total > bound) return total;
    }
    return total;
  }
  Vector lifted(K);
  for (int i = 0; i < atoms.x.rows(); ++i) {
    lifted.head(K - 1) = atoms.x.row(i).transpose();
    lifted(K - 1) = 1.0;
    const Vector bary = augmented_inverse * lifted;
    if (bary.minCoeff() >= -1e-12) continue;
    const double d = ProjectOntoSimplex(atoms.x.row(i).transpose(), vertices).distance;
    total += atoms.w(i) * d * d;
    if (total > bound) return total;
  }
  return total;
}

}  // namespace

SimplexVertices SketchedVertexSearch(const Matrix& points, int K, const HuntConfig& cfg) {
  if (K < 2) throw Error(ErrorCode::kInvalidParameters, "vertex search requires K >= 2");
  if (points.cols() != K - 1) {
    throw Error(ErrorCode::kShapeMismatch, "points must have K - 1 coordinates");
  }
  const int n_points = static_cast<int>(points.rows());
  if (n_points < K) {
    std::ostringstream msg;
    msg << "vertex search needs at least K = " << K << " points, got " << n_points;
    throw Error(ErrorCode::kVertexHuntInfeasible, msg.str());
  }
  if (!points.allFinite()) {
    throw Error(ErrorCode::kInvalidParameters, "vertex search points must be finite");
  }

  if (K == 2) {
    Matrix ends(2, 1);
    ends << points.minCoeff(), points.maxCoeff();
    if (ends(0, 0) == ends(1, 0)) {
      throw Error(ErrorCode::kDegenerateGeometry, "all points coincide");
    }
    return {ends, 0.0};
  }

  const int n_centers = cfg.n_centers > 0 ? cfg.n_centers : DefaultCenterCount(K, n_points);
  if (n_centers < K) throw Error(ErrorCode::kInvalidParameters, "n_centers must be >= K");

  const Atoms atoms = MergeDuplicates(points);
  Matrix candidates;
  if (atoms.x.rows() <= n_centers) {
    candidates = atoms.x;
  } else {
    const Matrix centers =
        WeightedKMeans(atoms, n_centers, cfg.kmeans_restarts, cfg.kmeans_iters,
                       RandomStream(cfg.seed).Split("kmeans"));
    const double heavy =
        std::max(2.0, std::ceil(static_cast<double>(n_points) / (2.0 * n_centers)));
    std::vector<int> heavy_atoms;
    for (int a = 0; a < atoms.x.rows(); ++a) {
      if (atoms.w(a) >= heavy) heavy_atoms.push_back(a);
    }
    Matrix pool(centers.rows() + static_cast<Eigen::Index>(heavy_atoms.size()), K - 1);
    pool.topRows(centers.rows()) = centers;
    for (std::size_t h = 0; h < heavy_atoms.size(); ++h) {
      pool.row(centers.rows() + h) = atoms.x.row(heavy_atoms[h]);
    }
    candidates = UniqueRows(pool);
  }
  const int n_cand = static_cast<int>(candidates.rows());
  if (n_cand < K) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "fewer distinct candidate vertices than communities");
  }

  // Candidate subsets, optionally capped by pairwise spread.
  std::vector<std::vector<int>> subsets;
  {
    std::vector<int> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::pair<double, std::vector<int>>> ranked;
    do {
      double spread = 0.0;
      for (int a = 0; a < K; ++a) {
        for (int b = a + 1; b < K; ++b) {
          spread += (candidates.row(idx[a]) - candidates.row(idx[b])).squaredNorm();
        }
      }
      ranked.emplace_back(spread, idx);
    } while (NextCombination(idx, n_cand));
    if (static_cast<std::int64_t>(ranked.size()) > cfg.max_subsets && cfg.max_subsets > 0) {
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& x, const auto& y) { return x.first > y.first; });
      ranked.resize(static_cast<std::size_t>(cfg.max_subsets));
    }
    subsets.reserve(ranked.size());
    for (auto& entry : ranked) subsets.push_back(std::move(entry.second));
  }

  bool found = false;
  double best_fit = std::numeric_limits<double>::infinity();
  Matrix best_vertices;
  for (const auto& subset : subsets) {
    Matrix vertices(K, K - 1);
    for (int k = 0; k < K; ++k) vertices.row(k) = candidates.row(subset[k]);
    Matrix augmented(K, K);
    augmented.topRows(K - 1) = vertices.transpose();
    augmented.row(K - 1).setOnes();
    Eigen::JacobiSVD<Matrix> svd(augmented);
    const Vector sv = svd.singularValues();
    const double smin = sv(K - 1);
    if (!(smin > 0.0) || sv(0) / smin > cfg.max_condition) continue;

    const double tie = 1e-12 * std::max(1.0, best_fit);
    const double bound = found ? best_fit + tie : std::numeric_limits<double>::infinity();
    const double fit = SubsetObjective(vertices, augmented.inverse(), atoms, bound);
    if (fit > bound) continue;
    const Matrix sorted = SortedRows(vertices);
    const bool better = !found || fit < best_fit - tie;
    const bool tied_and_smaller = !better && LexLess(sorted, best_vertices);
    if (better || tied_and_smaller) {
      best_fit = fit;
      best_vertices = sorted;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "every candidate vertex set is affinely degenerate");
  }
  return {best_vertices, best_fit};
}

}  // namespace prime
