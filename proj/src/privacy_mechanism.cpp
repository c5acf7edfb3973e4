#include "prime/privacy_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

double FlipProbability(double epsilon) {
  if (!(epsilon > 0.0)) {
    std::ostringstream msg;
    msg << "epsilon must be strictly positive, got " << epsilon;
    throw Error(ErrorCode::kInvalidPrivacyBudget, msg.str());
  }
  return 1.0 / (1.0 + std::exp(epsilon));
}

PrivacyParams::PrivacyParams(double epsilon)
    : epsilon_(epsilon), p_eps_(FlipProbability(epsilon)) {}

PrivatizedGraph SymmetricEdgeFlip(const AdjacencyMatrix& a, const PrivacyParams& privacy,
                                  RandomStream& rng) {
  const int n = a.n();
  const double p = privacy.p_eps();
  PrivatizedGraph out{BitMatrix::Zero(n, n), privacy};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::uint8_t bit = a.a(i, j);
      if (rng.Uniform() < p) bit ^= 1;
      out.m(i, j) = bit;
      out.m(j, i) = bit;
    }
  }
  return out;
}

DebiasedMatrix Debias(const PrivatizedGraph& p) {
  const int n = p.n();
  const double flip = p.privacy.p_eps();
  const double scale = 1.0 - 2.0 * flip;
  const double one = (1.0 - flip) / scale;
  const double zero = (0.0 - flip) / scale;
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = p.m(i, j) ? one : zero;
    m(j, j) = 0.0;
  }
  return {std::move(m), p.privacy};
}

DebiasedMatrix NonPrivate(const AdjacencyMatrix& a) {
  Matrix m = a.ToDense();
  m.diagonal().setZero();
  return {std::move(m), std::nullopt};
}

LdpCertificate CertifyLdp(const PrivacyParams& privacy) {
  LdpCertificate c;
  c.epsilon = privacy.epsilon();
  const double p = privacy.p_eps();
  const double keep = 1.0 / (1.0 + std::exp(-privacy.epsilon()));
  c.p_one_given_one = keep;
  c.p_zero_given_one = p;
  c.p_one_given_zero = p;
  c.p_zero_given_zero = keep;
  // Worst case over both outputs and both orderings of the neighbouring inputs.
  c.max_ratio = std::max({c.p_one_given_one / c.p_one_given_zero,
                          c.p_one_given_zero / c.p_one_given_one,
                          c.p_zero_given_zero / c.p_zero_given_one,
                          c.p_zero_given_one / c.p_zero_given_zero});
  const double target = std::exp(privacy.epsilon());
  c.relative_error = std::abs(c.max_ratio - target) / target;
  c.holds = c.relative_error <= 1e-12;
  return c;
}

}  // namespace prime
