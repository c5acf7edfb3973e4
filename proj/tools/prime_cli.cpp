#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "prime/dcmm_model.hpp"
#include "prime/edge_list.hpp"
#include "prime/error.hpp"
#include "prime/evaluation.hpp"
#include "prime/experiments.hpp"
#include "prime/membership_estimator.hpp"
#include "prime/privacy_mechanism.hpp"
#include "prime/random.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

int ExitCodeFor(prime::ErrorCode code) {
  using prime::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidParameters:
    case ErrorCode::kInvalidPrivacyBudget:
      return kExitUsage;
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kIoError:
      return kExitData;
    case ErrorCode::kRegularizationFailure:
    case ErrorCode::kNumericalFailure:
    case ErrorCode::kVertexHuntInfeasible:
    case ErrorCode::kDegenerateGeometry:
      return kExitNumerical;
  }
  return kExitNumerical;
}

// "inf" (any case) marks the non-private run.
double ParseEpsilon(const std::string& text) {
  std::string lower;
  for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "inf" || lower == "infinity") return prime::kNonPrivate;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw prime::Error(prime::ErrorCode::kInvalidParameters,
                       "cannot read epsilon value '" + text + "'");
  }
  return value;
}

std::vector<double> ParseEpsilons(const std::vector<std::string>& items) {
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(ParseEpsilon(item));
  return out;
}

json Finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json ToJson(const prime::Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(Finite(v(i)));
  return arr;
}

struct EstimatorFlags {
  double tau = 1.0;
  double c = 0.01;
  double gamma = 0.5;
  int n_centers = 0;

  void Attach(CLI::App* app) {
    app->add_option("--tau", tau, "Laplacian regularization")->capture_default_str();
    app->add_option("--c", c, "node-selection constant")->capture_default_str();
    app->add_option("--gamma", gamma, "degree cut for vertex search")->capture_default_str();
    app->add_option("--centers", n_centers, "sketch size (0: automatic)")->capture_default_str();
  }

  prime::EstimatorConfig Config(int K) const {
    prime::EstimatorConfig cfg;
    cfg.K = K;
    cfg.tau = tau;
    cfg.c = c;
    cfg.gamma = gamma;
    cfg.hunt.n_centers = n_centers;
    return cfg;
  }
};

struct ModelFlags {
  int n = 2000;
  int K = 2;
  double beta = 0.9;
  double theta_lo = 0.3;
  double theta_hi = 5.0;
  double pure_fraction = 0.5;

  void Attach(CLI::App* app) {
    app->add_option("-n,--nodes-count", n, "number of nodes")->capture_default_str();
    app->add_option("-K,--communities", K, "number of communities")->capture_default_str();
    app->add_option("--beta", beta, "diagonal of the planted B")->capture_default_str();
    app->add_option("--theta-lo", theta_lo)->capture_default_str();
    app->add_option("--theta-hi", theta_hi)->capture_default_str();
    app->add_option("--pure-fraction", pure_fraction, "share of pure nodes")
        ->capture_default_str();
  }

  void Fill(prime::SweepSpec& spec) const {
    spec.n = n;
    spec.K = K;
    spec.beta_n = beta;
    spec.theta_lo = theta_lo;
    spec.theta_hi = theta_hi;
    spec.pure_fraction = pure_fraction;
  }
};

prime::EdgeListGraph ReadGraph(const std::string& path, const std::string& nodes_path) {
  std::vector<std::string> known;
  if (!nodes_path.empty()) known = prime::LoadLabels(nodes_path);
  prime::EdgeListGraph g = prime::LoadEdgeList(path, known);
  if (g.self_loops_dropped > 0) {
    std::cerr << "dropped " << g.self_loops_dropped << " self-loop(s)\n";
  }
  return g;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  ModelFlags model;
  EstimatorFlags estimator;
  std::vector<double> b_n{5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<std::string> epsilons{"5", "6", "7", "8", "inf"};
  int reps = 100;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir = ".";
  bool svg = false;
  bool timing = false;
};

int RunSimulate(const SimulateArgs& args) {
  prime::SweepSpec spec;
  args.model.Fill(spec);
  spec.b_n_grid = args.b_n;
  spec.epsilon_grid = ParseEpsilons(args.epsilons);
  spec.reps = args.reps;
  spec.seed = args.seed;
  spec.threads = args.threads;
  spec.estimator = args.estimator.Config(spec.K);

  const auto rows = prime::RunSweep(spec);
  std::vector<prime::OutputFormat> formats{prime::OutputFormat::kCsv};
  if (args.svg) formats.push_back(prime::OutputFormat::kSvg);
  const auto written =
      prime::EmitResults(rows, args.out_dir, formats, prime::DescribeSweep(spec), args.timing);
  int failed_cells = 0;
  for (const auto& row : rows) {
    if (row.warnings > 0) {
      std::cerr << "cell b_n=" << row.b_n << " eps=" << row.epsilon << ": " << row.warnings
                << " replication(s) warned or failed\n";
    }
    if (row.reps == 0) ++failed_cells;
  }
  for (const auto& path : written) std::cout << path.string() << "\n";
  return failed_cells > 0 ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------- privatize

struct PrivatizeArgs {
  std::string input;
  std::string output;
  std::string nodes;
  std::string nodes_out;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

int RunPrivatize(const PrivatizeArgs& args) {
  const prime::EdgeListGraph g = ReadGraph(args.input, args.nodes);
  const prime::PrivacyParams privacy(args.epsilon);
  prime::RandomStream rng = prime::RandomStream(args.seed).Split("mechanism");
  const prime::PrivatizedGraph released = prime::SymmetricEdgeFlip(g.adjacency, privacy, rng);
  prime::SaveEdgeList(args.output, g.labels, released.m);
  if (!args.nodes_out.empty()) prime::SaveLabels(args.nodes_out, g.labels);
  std::cerr << "released " << g.n() << " nodes, "
            << prime::AdjacencyMatrix{released.m}.EdgeCount() << " edges at eps=" << args.epsilon
            << " (flip probability " << privacy.p_eps() << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string input;
  std::string nodes;
  std::string output;
  std::string labels_out;
  std::string scheme = "two_bin";
  int K = 2;
  std::optional<double> epsilon;
  bool apply_mechanism = false;
  std::uint64_t seed = 0;
  int liberal_column = 1;
  double strong_cut = 5.0 / 8.0;
  EstimatorFlags estimator;
};

int RunEstimate(const EstimateArgs& args) {
  if (args.apply_mechanism && !args.epsilon) {
    throw prime::Error(prime::ErrorCode::kInvalidParameters,
                       "--apply-mechanism needs --epsilon");
  }
  const prime::EdgeListGraph g = ReadGraph(args.input, args.nodes);
  prime::EstimatorConfig cfg = args.estimator.Config(args.K);
  const prime::RandomStream root(args.seed);
  cfg.hunt.seed = root.Split("hunt").key();

  prime::MembershipEstimate est;
  if (args.apply_mechanism) {
    prime::RandomStream rng = root.Split("mechanism");
    const auto released =
        prime::SymmetricEdgeFlip(g.adjacency, prime::PrivacyParams(*args.epsilon), rng);
    est = prime::EstimateMemberships(prime::Debias(released), cfg);
  } else {
    cfg.epsilon = args.epsilon;
    est = prime::EstimateFromGraph(g.adjacency, cfg);
  }
  for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";

  if (args.output.empty() || args.output == "-") {
    prime::WriteMembershipCsv(std::cout, g.labels, est.pi_hat);
  } else {
    prime::SaveMembershipCsv(args.output, g.labels, est.pi_hat);
  }

  if (!args.labels_out.empty()) {
    prime::AlignmentConfig acfg;
    acfg.strong_cut = args.strong_cut;
    acfg.liberal_column = args.liberal_column - 1;
    const auto scheme = args.scheme == "five_bin" ? prime::AlignmentScheme::kFiveBin
                                                  : prime::AlignmentScheme::kTwoBin;
    const auto bins = prime::AlignmentBins(est.pi_hat, scheme, acfg);
    std::ofstream out(args.labels_out);
    if (!out) {
      throw prime::Error(prime::ErrorCode::kIoError, "cannot write " + args.labels_out);
    }
    out << "node,label\n";
    for (std::size_t i = 0; i < bins.size(); ++i) out << g.labels[i] << "," << bins[i] << "\n";
    if (!out) throw prime::Error(prime::ErrorCode::kIoError, "write failed: " + args.labels_out);
  }
  return est.vertex_hunt_failed ? kExitNumerical : kExitOk;
}

// ---------------------------------------------------------------- evaluate

int RunEvaluate(const std::string& estimate_path, const std::string& reference_path) {
  const prime::MembershipTable estimate = prime::LoadMembershipCsv(estimate_path);
  const prime::MembershipTable reference = prime::LoadMembershipCsv(reference_path);
  const prime::Matrix aligned = prime::AlignMembership(estimate, reference.labels);
  const prime::LossReport report = prime::PermutationLoss(aligned, reference.pi);
  std::cout.precision(17);
  std::cout << "loss " << report.loss << "\npermutation";
  for (int col : report.best_permutation) std::cout << " " << col + 1;
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  ModelFlags model;
  double b_n = 8.0;
  std::string epsilon = "inf";
  std::uint64_t seed = 0;
  std::string centering = "literal";
  std::optional<double> alpha;
  std::optional<double> beta_n;
  double c1 = 10.0, c2 = 0.05, c3 = 0.05, c4 = 0.1;
};

int RunDiagnose(const DiagnoseArgs& args) {
  prime::SweepSpec spec;
  args.model.Fill(spec);
  spec.b_n_grid = {args.b_n};
  spec.epsilon_grid = {prime::kNonPrivate};
  spec.reps = 1;
  spec.seed = args.seed;
  prime::ValidateSweepSpec(spec);
  const double epsilon = ParseEpsilon(args.epsilon);
  const prime::DcmmParams params = prime::SweepReplicate(spec, args.b_n, 0);

  prime::AuditConfig audit_cfg;
  audit_cfg.c1 = args.c1;
  audit_cfg.c2 = args.c2;
  audit_cfg.c3 = args.c3;
  audit_cfg.c4 = args.c4;
  audit_cfg.centering = args.centering == "conventional" ? prime::DegreeCentering::kConventional
                                                         : prime::DegreeCentering::kLiteral;
  const prime::AssumptionReport audit = prime::AuditAssumptions(params, audit_cfg);

  json out;
  out["model"] = {{"n", spec.n},          {"K", spec.K},
                  {"b_n", args.b_n},      {"beta", spec.beta_n},
                  {"theta_lo", spec.theta_lo}, {"theta_hi", spec.theta_hi},
                  {"pure_fraction", spec.pure_fraction}, {"seed", args.seed},
                  {"theta_bar", params.theta_bar()}};
  out["epsilon"] = Finite(epsilon);
  out["audit"] = {
      {"centering", args.centering},
      {"community_mass_ok", audit.community_mass_ok},
      {"min_community_mass", audit.min_community_mass},
      {"theta_l1", audit.theta_l1},
      {"g_computable", audit.g_computable},
      {"min_d_theta", audit.min_d_theta},
      {"g_norm", Finite(audit.g_norm)},
      {"g_inv_norm", Finite(audit.g_inv_norm)},
      {"g_norm_ok", audit.g_norm_ok},
      {"g_inv_norm_ok", audit.g_inv_norm_ok},
      {"bg_eigenvalues", ToJson(audit.bg_eigenvalues)},
      {"alpha_n", Finite(audit.alpha_n)},
      {"beta_n", Finite(audit.beta_n)},
      {"alpha_ok", audit.alpha_ok},
      {"beta_ok", audit.beta_ok},
      {"gap_ok", audit.gap_ok},
      {"perron_positive", audit.perron_positive},
      {"perron_ratio", Finite(audit.perron_ratio)},
      {"perron_ratio_ok", audit.perron_ratio_ok},
      {"pure_nodes_ok", audit.pure_nodes_ok},
  };

  const double alpha = args.alpha ? *args.alpha : audit.alpha_n;
  const double beta = args.beta_n ? *args.beta_n : audit.beta_n;
  const bool have_snr = (args.alpha || audit.g_computable) && (args.beta_n || audit.g_computable);
  if (have_snr && alpha > 0.0 && beta > 0.0) {
    const prime::TheoryDiagnostics d = prime::MakeTheoryDiagnostics(params, epsilon, alpha, beta);
    out["theory"] = {{"alpha_n", d.alpha_n},
                     {"beta_n", d.beta_n},
                     {"delta_n", d.delta_n},
                     {"coth_factor", d.coth_factor},
                     {"err_n", d.err_n},
                     {"risk_integral", d.risk_integral},
                     {"lower_integral", d.lower_integral},
                     {"optimality_ratio", d.optimality_ratio},
                     {"log_n_err_sq", d.log_n_err_sq}};
  } else {
    out["theory"] = nullptr;
    out["theory_note"] =
        "alpha_n/beta_n unavailable: G is not computable under this centering and no "
        "--alpha/--beta-n override was given";
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- curve

struct CurveArgs {
  std::string input;
  std::string nodes;
  int K = 2;
  std::vector<std::string> epsilons{"2", "4", "6"};
  int seeds = 10;
  std::uint64_t seed = 0;
  EstimatorFlags estimator;
};

int RunCurve(const CurveArgs& args) {
  const prime::EdgeListGraph g = ReadGraph(args.input, args.nodes);
  const auto points = prime::PrivateVsNonprivateCurve(
      g.adjacency, ParseEpsilons(args.epsilons), args.estimator.Config(args.K), args.seed,
      args.seeds);
  std::printf("epsilon,mean_distance,std_distance,failures\n");
  for (const auto& p : points) {
    std::printf("%.17g,%.17g,%.17g,%d\n", p.epsilon, p.mean_distance, p.std_distance,
                p.failures);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-private mixed-membership estimation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep over b_n and epsilon");
  sim.model.Attach(simulate);
  sim.estimator.Attach(simulate);
  simulate->add_option("--bn", sim.b_n, "average-degree grid")->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--eps", sim.epsilons, "privacy grid; 'inf' is non-private")
      ->delimiter(',')->capture_default_str();
  simulate->add_option("--reps", sim.reps)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "base seed")->required();
  simulate->add_option("--threads", sim.threads, "worker threads (0: all cores)")
      ->capture_default_str();
  simulate->add_option("-o,--out", sim.out_dir, "output directory")->capture_default_str();
  simulate->add_flag("--svg", sim.svg, "also write SVG charts");
  simulate->add_flag("--timing", sim.timing, "record wall time in runtime_ms");

  PrivatizeArgs priv;
  auto* privatize = app.add_subcommand("privatize", "Release an edge list under edge LDP");
  privatize->add_option("-i,--input", priv.input, "edge list")->required();
  privatize->add_option("-o,--output", priv.output, "released edge list")->required();
  privatize->add_option("--epsilon", priv.epsilon, "privacy budget")->required();
  privatize->add_option("--seed", priv.seed)->capture_default_str();
  privatize->add_option("--nodes", priv.nodes, "node label file (one per line)");
  privatize->add_option("--nodes-out", priv.nodes_out, "write the node labels used");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate memberships from an edge list");
  estimate->add_option("-i,--input", est.input, "edge list")->required();
  estimate->add_option("-K,--communities", est.K)->capture_default_str();
  estimate->add_option("--epsilon", est.epsilon,
                       "budget the input was released under (omit for raw graphs)");
  estimate->add_flag("--apply-mechanism", est.apply_mechanism,
                     "privatize the input at --epsilon before estimating");
  estimate->add_option("--seed", est.seed)->capture_default_str();
  estimate->add_option("--nodes", est.nodes, "node label file (one per line)");
  estimate->add_option("-o,--output", est.output, "membership CSV (default stdout)");
  estimate->add_option("--labels-out", est.labels_out, "write alignment labels");
  estimate->add_option("--scheme", est.scheme)
      ->check(CLI::IsMember({"two_bin", "five_bin"}))
      ->capture_default_str();
  estimate->add_option("--liberal-column", est.liberal_column, "1-based column for five_bin")
      ->capture_default_str();
  estimate->add_option("--strong-cut", est.strong_cut, "two_bin threshold")
      ->capture_default_str();
  est.estimator.Attach(estimate);

  std::string eval_estimate, eval_reference;
  auto* evaluate = app.add_subcommand("evaluate", "Permutation loss between two membership CSVs");
  evaluate->add_option("estimate", eval_estimate)->required();
  evaluate->add_option("reference", eval_reference)->required();

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "Assumption audit and theoretical rates");
  diag.model.Attach(diagnose);
  diagnose->add_option("--bn", diag.b_n)->capture_default_str();
  diagnose->add_option("--epsilon", diag.epsilon)->capture_default_str();
  diagnose->add_option("--seed", diag.seed)->capture_default_str();
  diagnose->add_option("--centering", diag.centering)
      ->check(CLI::IsMember({"literal", "conventional"}))
      ->capture_default_str();
  diagnose->add_option("--alpha", diag.alpha, "override alpha_n");
  diagnose->add_option("--beta-n", diag.beta_n, "override beta_n");
  diagnose->add_option("--c1", diag.c1)->capture_default_str();
  diagnose->add_option("--c2", diag.c2)->capture_default_str();
  diagnose->add_option("--c3", diag.c3)->capture_default_str();
  diagnose->add_option("--c4", diag.c4)->capture_default_str();

  CurveArgs cur;
  auto* curve = app.add_subcommand("curve", "Distance between private and non-private estimates");
  curve->add_option("-i,--input", cur.input, "edge list")->required();
  curve->add_option("-K,--communities", cur.K)->capture_default_str();
  curve->add_option("--eps", cur.epsilons)->delimiter(',')->capture_default_str();
  curve->add_option("--seeds", cur.seeds, "releases per epsilon")->capture_default_str();
  curve->add_option("--seed", cur.seed)->capture_default_str();
  curve->add_option("--nodes", cur.nodes, "node label file (one per line)");
  cur.estimator.Attach(curve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return RunSimulate(sim);
    if (*privatize) return RunPrivatize(priv);
    if (*estimate) return RunEstimate(est);
    if (*evaluate) return RunEvaluate(eval_estimate, eval_reference);
    if (*diagnose) return RunDiagnose(diag);
    if (*curve) return RunCurve(cur);
  } catch (const prime::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
