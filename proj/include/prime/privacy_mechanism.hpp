#pragma once

#include <optional>

#include "prime/dcmm_model.hpp"
#include "prime/random.hpp"

namespace prime {

// Privacy budget together with the per-entry flip probability
// p_eps = 1 / (1 + e^eps). Only constructible for eps > 0.
class PrivacyParams {
 public:
  explicit PrivacyParams(double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double p_eps() const noexcept { return p_eps_; }

 private:
  double epsilon_;
  double p_eps_;
};

// Throws kInvalidPrivacyBudget for eps <= 0 or NaN.
double FlipProbability(double epsilon);

struct PrivatizedGraph {
  BitMatrix m;  // symmetric, zero diagonal
  PrivacyParams privacy;
  int n() const { return static_cast<int>(m.rows()); }
};

// Real symmetric matrix with zero diagonal whose mean is Omega - diag(Omega)
// when the input graph is drawn from the block model. The non-private
// pipeline uses the raw adjacency matrix in this role and leaves `privacy`
// empty.
struct DebiasedMatrix {
  Matrix m;
  std::optional<PrivacyParams> privacy;
  int n() const { return static_cast<int>(m.rows()); }
};

// Randomized response on every upper-triangular bit, mirrored to the lower
// triangle. One uniform draw per pair in row-major upper-triangular order;
// the bit is flipped iff the draw is below p_eps.
PrivatizedGraph SymmetricEdgeFlip(const AdjacencyMatrix& a, const PrivacyParams& privacy,
                                  RandomStream& rng);

// (x - p_eps) / (1 - 2 p_eps) off the diagonal, 0 on it.
DebiasedMatrix Debias(const PrivatizedGraph& p);

// Uses the adjacency matrix as-is (non-private mode).
DebiasedMatrix NonPrivate(const AdjacencyMatrix& a);

// Per-entry channel of the mechanism and its worst-case likelihood ratio.
struct LdpCertificate {
  double epsilon = 0.0;
  double p_one_given_one = 0.0;
  double p_one_given_zero = 0.0;
  double p_zero_given_one = 0.0;
  double p_zero_given_zero = 0.0;
  double max_ratio = 0.0;
  double relative_error = 0.0;  // |max_ratio - e^eps| / e^eps
  bool holds = false;           // relative_error <= 1e-12
};

LdpCertificate CertifyLdp(const PrivacyParams& privacy);

}  // namespace prime
