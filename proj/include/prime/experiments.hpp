#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "prime/dcmm_model.hpp"
#include "prime/membership_estimator.hpp"

namespace prime {

inline constexpr double kNonPrivate = std::numeric_limits<double>::infinity();

// The first round(pure_fraction * n) rows are pure, assigned to communities
// in round-robin order; the remaining rows are Dirichlet(1, ..., 1) draws.
Matrix MakeMembership(int n, int K, double pure_fraction, RandomStream& rng);

struct SweepSpec {
  int n = 2000;
  int K = 2;
  std::vector<double> b_n_grid{5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> epsilon_grid{5, 6, 7, 8, kNonPrivate};  // kNonPrivate: raw graph
  double beta_n = 0.9;
  double theta_lo = 0.3;
  double theta_hi = 5.0;
  double pure_fraction = 0.5;
  int reps = 100;
  std::uint64_t seed = 0;
  EstimatorConfig estimator;
  int threads = 0;  // 0: hardware concurrency
};

// Throws kInvalidParameters.
void ValidateSweepSpec(const SweepSpec& spec);

struct SweepRow {
  double b_n = 0.0;
  double epsilon = 0.0;
  double mean_loss = 0.0;  // NaN when every replication failed
  double std_loss = 0.0;   // sample standard deviation; 0 for a single replication
  int reps = 0;            // successful replications
  double runtime_ms = 0.0;  // mean wall time per replication
  int warnings = 0;         // replications that warned or failed
  std::vector<double> losses;  // indexed by replication; NaN where it failed
};

// Random streams, all derived from spec.seed:
//   model (theta, Pi, graph)   keyed by replication only, shared by every cell;
//   mechanism                  keyed by (b_n, epsilon, replication);
//   vertex-search sketch       keyed by replication.
// Cells are keyed by their grid values, so reordering or subsetting the
// grids leaves every remaining replication unchanged. Rows come out b_n-major
// in grid order.
std::vector<SweepRow> RunSweep(const SweepSpec& spec);

// Model parameters of replication `rep` at average-degree level b_n; the same
// draw RunSweep scores against.
DcmmParams SweepReplicate(const SweepSpec& spec, double b_n, std::uint64_t rep);

// Comment lines describing the sweep, for the CSV header.
std::vector<std::string> DescribeSweep(const SweepSpec& spec);

struct CurvePoint {
  double epsilon = 0.0;
  double mean_distance = 0.0;
  double std_distance = 0.0;
  std::vector<double> distances;  // one per seed; NaN on failure
  int failures = 0;
};

// Loss between the non-private estimate and private estimates at each
// epsilon, over `seeds` independent releases.
std::vector<CurvePoint> PrivateVsNonprivateCurve(const AdjacencyMatrix& graph,
                                                 const std::vector<double>& epsilon_grid,
                                                 const EstimatorConfig& cfg, std::uint64_t seed,
                                                 int seeds = 1);

enum class AlignmentScheme { kTwoBin, kFiveBin };

struct AlignmentConfig {
  // two_bin: weak when max_j pi_ij <= strong_cut, strong above.
  double strong_cut = 5.0 / 8.0;
  // five_bin: column holding the liberal likelihood and the bin edges.
  int liberal_column = 0;
  double cuts[4] = {0.2, 0.4, 0.6, 0.8};
};

std::vector<std::string> AlignmentBins(const Matrix& pi_hat, AlignmentScheme scheme,
                                       const AlignmentConfig& cfg = {});

enum class OutputFormat { kCsv, kSvg };

// Writes sweep.csv (always) and, when kSvg is requested, loss_vs_bn.svg and
// loss_vs_eps.svg. Returns the written paths.
std::vector<std::filesystem::path> EmitResults(const std::vector<SweepRow>& rows,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<OutputFormat>& formats = {},
                                               const std::vector<std::string>& comments = {},
                                               bool include_runtime = false);

std::string FormatSweepCsv(const std::vector<SweepRow>& rows,
                           const std::vector<std::string>& comments = {},
                           bool include_runtime = false);

// Loss against b_n, one polyline per epsilon.
std::string RenderLossVsBn(const std::vector<SweepRow>& rows);
// Loss against finite epsilon, one polyline per b_n; non-private rows are
// drawn as horizontal reference lines.
std::string RenderLossVsEpsilon(const std::vector<SweepRow>& rows);

}  // namespace prime
