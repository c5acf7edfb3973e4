#pragma once

#include <cstdint>

#include "prime/dcmm_model.hpp"

namespace prime {

// Rows v_1..v_K are simplex vertices in R^{K-1}.
struct SimplexVertices {
  Matrix v;          // K x (K - 1)
  double fit = 0.0;  // sum over input points of squared distance to the simplex
  int K() const { return static_cast<int>(v.rows()); }
};

struct HuntConfig {
  // Number of k-means centers in the sketch; 0 selects
  // max(K + 10, ceil(K log2 N)) for N input points.
  int n_centers = 0;
  // Cap on the number of candidate K-subsets scored exactly. Above it, the
  // subsets with the largest total pairwise squared spread are kept.
  std::int64_t max_subsets = 20000;
  int kmeans_restarts = 10;
  int kmeans_iters = 100;
  std::uint64_t seed = 0;
  // Candidate vertex sets whose augmented matrix [v | 1] is worse
  // conditioned than this are skipped.
  double max_condition = 1e12;
};

int DefaultCenterCount(int K, int n_points);

struct SimplexProjection {
  Vector weights;  // on the probability simplex
  double distance = 0.0;
  double kkt_residual = 0.0;
};

// min_w || sum_k w_k v_k - point ||_2 over the probability simplex, by a
// primal active-set method. `vertices` holds one vertex per row.
SimplexProjection ProjectOntoSimplex(const Vector& point, const Matrix& vertices);

double DistanceToSimplex(const Vector& point, const SimplexVertices& vertices);

// Two-stage vertex search over the rows of `points` (N x (K - 1)):
//  1. sketch: exact duplicates are merged into weighted atoms; if there are at
//     most n_centers atoms they are the candidates, otherwise weighted k-means
//     (k-means++ seeding, fixed restarts) supplies the centers, and atoms
//     carrying at least half of an average cluster's mass are kept as extra
//     candidates;
//  2. search: every K-subset of candidates (or the capped, spread-ranked
//     subfamily) is scored by the weighted sum of squared distances of the
//     points to its simplex; the minimum wins, ties going to the
//     lexicographically smallest sorted vertex list.
// For K = 2 the points are scalars and the vertices are their min and max.
// Returned rows are sorted lexicographically.
//
// Throws kVertexHuntInfeasible when there are fewer than K points and
// kDegenerateGeometry when no candidate subset is affinely independent.
SimplexVertices SketchedVertexSearch(const Matrix& points, int K, const HuntConfig& cfg = {});

}  // namespace prime
