#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "prime/dcmm_model.hpp"
#include "prime/error.hpp"
#include "prime/evaluation.hpp"
#include "prime/experiments.hpp"
#include "prime/membership_estimator.hpp"
#include "prime/privacy_mechanism.hpp"
#include "prime/random.hpp"
#include "prime/vertex_hunting.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace {

prime::EstimatorConfig MakeConfig(int K, double tau, double c, double gamma,
                                  std::uint64_t seed, int n_centers) {
  prime::EstimatorConfig cfg;
  cfg.K = K;
  cfg.tau = tau;
  cfg.c = c;
  cfg.gamma = gamma;
  cfg.hunt.seed = seed;
  cfg.hunt.n_centers = n_centers;
  return cfg;
}

py::dict EstimateToDict(const prime::MembershipEstimate& est) {
  return py::dict("pi_hat"_a = est.pi_hat, "default_row"_a = est.default_row,
                  "degenerate_row"_a = est.degenerate_row, "vertices"_a = est.vertices.v,
                  "v1"_a = est.v1, "eigenvalues"_a = est.spectral.lambdas,
                  "delta_hat_sq"_a = est.spectral.delta_hat_sq,
                  "selected"_a = est.spectral.s_hat, "hunt_nodes"_a = est.spectral.s_gamma,
                  "vertex_hunt_failed"_a = est.vertex_hunt_failed,
                  "warnings"_a = est.warnings);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-private mixed-membership estimation (compiled core)";

  py::register_exception<prime::Error>(m, "PrimeError", PyExc_RuntimeError);

  m.def("flip_probability", &prime::FlipProbability, "epsilon"_a,
        "Per-entry flip probability 1 / (1 + e^eps).");

  m.def(
      "certify_ldp",
      [](double epsilon) {
        const auto c = prime::CertifyLdp(prime::PrivacyParams(epsilon));
        return py::dict("epsilon"_a = c.epsilon, "max_ratio"_a = c.max_ratio,
                        "relative_error"_a = c.relative_error, "holds"_a = c.holds);
      },
      "epsilon"_a);

  m.def(
      "symmetric_edge_flip",
      [](prime::BitMatrix adjacency, double epsilon, std::uint64_t seed) {
        const auto a = prime::CheckedAdjacency(std::move(adjacency));
        prime::RandomStream rng = prime::RandomStream(seed).Split("mechanism");
        return prime::SymmetricEdgeFlip(a, prime::PrivacyParams(epsilon), rng).m;
      },
      "adjacency"_a, "epsilon"_a, "seed"_a = 0,
      "Randomized response on every pair of an adjacency matrix.");

  m.def(
      "debias",
      [](prime::BitMatrix released, double epsilon) {
        const auto a = prime::CheckedAdjacency(std::move(released));
        return prime::Debias(prime::PrivatizedGraph{a.a, prime::PrivacyParams(epsilon)}).m;
      },
      "released"_a, "epsilon"_a);

  m.def(
      "build_omega",
      [](const prime::Vector& theta, const prime::Matrix& pi, const prime::Matrix& b) {
        return prime::BuildOmega(prime::DcmmParams{theta, pi, b}).omega;
      },
      "theta"_a, "pi"_a, "b"_a);

  m.def(
      "sample_graph",
      [](const prime::Matrix& omega, std::uint64_t seed) {
        prime::RandomStream rng(seed);
        return prime::SampleGraph(prime::EdgeProbabilityMatrix{omega}, rng).a;
      },
      "omega"_a, "seed"_a = 0);

  m.def("planted_b", &prime::MakePlantedB, "K"_a, "beta"_a);

  m.def(
      "estimate_memberships",
      [](prime::BitMatrix adjacency, int K, std::optional<double> epsilon, double tau, double c,
         double gamma, std::uint64_t seed, int n_centers) {
        prime::EstimatorConfig cfg = MakeConfig(K, tau, c, gamma, seed, n_centers);
        cfg.epsilon = epsilon;
        return EstimateToDict(
            prime::EstimateFromGraph(prime::CheckedAdjacency(std::move(adjacency)), cfg));
      },
      "adjacency"_a, "K"_a, "epsilon"_a = py::none(), "tau"_a = 1.0, "c"_a = 0.01,
      "gamma"_a = 0.5, "seed"_a = 0, "n_centers"_a = 0,
      "Estimate memberships from a raw graph, or from a release when epsilon is given.");

  m.def(
      "oracle_estimate",
      [](const prime::Matrix& omega, int K, double tau, double c, double gamma,
         std::uint64_t seed) {
        return EstimateToDict(prime::OracleEstimate(prime::EdgeProbabilityMatrix{omega},
                                                    MakeConfig(K, tau, c, gamma, seed, 0)));
      },
      "omega"_a, "K"_a, "tau"_a = 1.0, "c"_a = 0.01, "gamma"_a = 0.5, "seed"_a = 0);

  m.def(
      "sketched_vertex_search",
      [](const prime::Matrix& points, int K, std::uint64_t seed, int n_centers) {
        prime::HuntConfig cfg;
        cfg.seed = seed;
        cfg.n_centers = n_centers;
        const auto v = prime::SketchedVertexSearch(points, K, cfg);
        return py::make_tuple(v.v, v.fit);
      },
      "points"_a, "K"_a, "seed"_a = 0, "n_centers"_a = 0);

  m.def(
      "permutation_loss",
      [](const prime::Matrix& pi_hat, const prime::Matrix& pi) {
        const auto r = prime::PermutationLoss(pi_hat, pi);
        return py::make_tuple(r.loss, r.best_permutation);
      },
      "pi_hat"_a, "pi"_a, "Returns (loss, permutation).");

  m.def("compute_err_n", &prime::ComputeErrN, "K"_a, "delta_n"_a, "n"_a, "theta_bar"_a,
        "epsilon"_a);
  m.def("compute_delta_n", &prime::ComputeDeltaN, "alpha_n"_a, "beta_n"_a, "K"_a);
  m.def("risk_bound_integral", &prime::RiskBoundIntegral, "err_n"_a, "relative_degrees"_a);
  m.def("lower_bound_integral", &prime::LowerBoundIntegral, "err_n"_a, "relative_degrees"_a);

  m.def(
      "run_sweep",
      [](int n, int K, std::vector<double> b_n, std::vector<double> epsilon, int reps,
         std::uint64_t seed, double beta, double pure_fraction, int threads) {
        prime::SweepSpec spec;
        spec.n = n;
        spec.K = K;
        spec.b_n_grid = std::move(b_n);
        spec.epsilon_grid = std::move(epsilon);
        spec.reps = reps;
        spec.seed = seed;
        spec.beta_n = beta;
        spec.pure_fraction = pure_fraction;
        spec.threads = threads;
        py::list rows;
        for (const auto& r : prime::RunSweep(spec)) {
          rows.append(py::dict("b_n"_a = r.b_n, "epsilon"_a = r.epsilon,
                               "mean_loss"_a = r.mean_loss, "std_loss"_a = r.std_loss,
                               "reps"_a = r.reps, "warnings"_a = r.warnings,
                               "losses"_a = r.losses));
        }
        return rows;
      },
      "n"_a, "K"_a, "b_n"_a, "epsilon"_a, "reps"_a, "seed"_a, "beta"_a = 0.9,
      "pure_fraction"_a = 0.5, "threads"_a = 0,
      "Monte Carlo sweep; use math.inf in epsilon for the non-private run.");

  m.attr("NON_PRIVATE") = std::numeric_limits<double>::infinity();
}
