#include "prime/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "prime/error.hpp"
#include "prime/evaluation.hpp"
#include "prime/privacy_mechanism.hpp"

namespace prime {
namespace {

std::string FormatReal(double x, const char* fmt = "%.17g") {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

struct MeanStd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = 0.0;
  int count = 0;
};

MeanStd Summarize(const std::vector<double>& values) {
  MeanStd s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

// Runs fn(0..count-1) on a pool of worker threads. The first exception
// thrown by any task is rethrown after all workers join.
template <typename Fn>
void ParallelFor(std::size_t count, int threads, Fn&& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t t = 0; t < count; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < count; t = next++) {
        try {
          fn(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct RepOutcome {
  double loss = std::numeric_limits<double>::quiet_NaN();
  double runtime_ms = 0.0;
  bool warned = false;
};

}  // namespace

Matrix MakeMembership(int n, int K, double pure_fraction, RandomStream& rng) {
  if (n < 1 || K < 1) throw Error(ErrorCode::kInvalidParameters, "n and K must be positive");
  if (!(pure_fraction >= 0.0 && pure_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidParameters, "pure fraction must lie in [0, 1]");
  }
  const int pure = static_cast<int>(std::lround(pure_fraction * n));
  Matrix pi = Matrix::Zero(n, K);
  for (int i = 0; i < pure; ++i) pi(i, i % K) = 1.0;
  for (int i = pure; i < n; ++i) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      pi(i, k) = rng.Exponential();
      total += pi(i, k);
    }
    pi.row(i) /= total;
  }
  return pi;
}

void ValidateSweepSpec(const SweepSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidParameters, what); };
  if (spec.n < 2) fail("n must be at least 2");
  if (spec.K < 2 || spec.K > spec.n) fail("K must lie in [2, n]");
  if (spec.reps < 1) fail("reps must be at least 1");
  if (spec.b_n_grid.empty()) fail("b_n grid is empty");
  if (spec.epsilon_grid.empty()) fail("epsilon grid is empty");
  for (double b : spec.b_n_grid) {
    if (!(b > 0.0) || !std::isfinite(b)) fail("b_n values must be positive and finite");
  }
  for (double e : spec.epsilon_grid) {
    if (!(e > 0.0)) fail("epsilon values must be positive (inf for non-private)");
  }
  if (!(spec.beta_n > 0.0 && spec.beta_n < 1.0)) fail("beta_n must lie in (0, 1)");
  if (!(spec.theta_lo > 0.0 && spec.theta_lo <= spec.theta_hi)) {
    fail("theta range needs 0 < lo <= hi");
  }
  if (!(spec.pure_fraction >= 0.0 && spec.pure_fraction <= 1.0)) {
    fail("pure fraction must lie in [0, 1]");
  }
  if (!(spec.estimator.tau > 0.0)) fail("tau must be positive");
  if (!(spec.estimator.c > 0.0)) fail("c must be positive");
  if (!(spec.estimator.gamma >= 0.0)) fail("gamma must be nonnegative");
}

DcmmParams SweepReplicate(const SweepSpec& spec, double b_n, std::uint64_t rep) {
  const RandomStream model = RandomStream(spec.seed).Split("model").Split(rep);
  RandomStream theta_rng = model.Split("theta");
  RandomStream pi_rng = model.Split("pi");
  DcmmParams params;
  params.theta = GenTheta(spec.n, b_n, spec.theta_lo, spec.theta_hi, theta_rng);
  params.pi = MakeMembership(spec.n, spec.K, spec.pure_fraction, pi_rng);
  params.b = MakePlantedB(spec.K, spec.beta_n);
  return params;
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec) {
  ValidateSweepSpec(spec);
  const RandomStream root(spec.seed);

  struct Cell {
    double b_n;
    double epsilon;
  };
  std::vector<Cell> cells;
  for (double b_n : spec.b_n_grid) {
    for (double eps : spec.epsilon_grid) cells.push_back({b_n, eps});
  }
  const std::size_t reps = static_cast<std::size_t>(spec.reps);
  std::vector<RepOutcome> outcomes(cells.size() * reps);

  ParallelFor(outcomes.size(), spec.threads, [&](std::size_t task) {
    const Cell& cell = cells[task / reps];
    const std::uint64_t rep = task % reps;
    RepOutcome& out = outcomes[task];
    const auto start = std::chrono::steady_clock::now();
    try {
      const DcmmParams params = SweepReplicate(spec, cell.b_n, rep);
      RandomStream graph_rng = root.Split("model").Split(rep).Split("graph");
      const AdjacencyMatrix graph = SampleGraph(params, graph_rng);

      EstimatorConfig cfg = spec.estimator;
      cfg.K = spec.K;
      cfg.hunt.seed = root.Split("hunt").Split(rep).key();
      MembershipEstimate est;
      if (std::isinf(cell.epsilon)) {
        est = EstimateMemberships(NonPrivate(graph), cfg);
      } else {
        RandomStream mech = root.Split("mechanism")
                                .Split(DoubleKey(cell.b_n))
                                .Split(DoubleKey(cell.epsilon))
                                .Split(rep);
        const PrivatizedGraph released =
            SymmetricEdgeFlip(graph, PrivacyParams(cell.epsilon), mech);
        est = EstimateMemberships(Debias(released), cfg);
      }
      out.loss = PermutationLoss(est.pi_hat, params.pi).loss;
      out.warned = !est.warnings.empty();
    } catch (const Error&) {
      out.loss = std::numeric_limits<double>::quiet_NaN();
      out.warned = true;
    }
    out.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  });

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.b_n = cells[c].b_n;
    row.epsilon = cells[c].epsilon;
    double runtime = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const RepOutcome& o = outcomes[c * reps + r];
      row.losses.push_back(o.loss);
      runtime += o.runtime_ms;
      if (o.warned) ++row.warnings;
    }
    const MeanStd s = Summarize(row.losses);
    row.mean_loss = s.mean;
    row.std_loss = s.std;
    row.reps = s.count;
    row.runtime_ms = runtime / static_cast<double>(reps);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> DescribeSweep(const SweepSpec& spec) {
  std::vector<std::string> lines;
  auto grid = [](const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ' ';
      s += FormatReal(values[i]);
    }
    return s;
  };
  lines.push_back("n=" + std::to_string(spec.n) + " K=" + std::to_string(spec.K) +
                  " reps=" + std::to_string(spec.reps) + " seed=" + std::to_string(spec.seed));
  lines.push_back("b_n grid: " + grid(spec.b_n_grid));
  lines.push_back("epsilon grid: " + grid(spec.epsilon_grid));
  lines.push_back("B = beta I + (1 - beta) 11^T, beta=" + FormatReal(spec.beta_n));
  lines.push_back("theta: U[" + FormatReal(spec.theta_lo) + ", " + FormatReal(spec.theta_hi) +
                  "] rescaled to b_n");
  lines.push_back("Pi: " + FormatReal(spec.pure_fraction) +
                  " pure (round-robin), rest Dirichlet(1,...,1)");
  lines.push_back("estimator: tau=" + FormatReal(spec.estimator.tau) +
                  " c=" + FormatReal(spec.estimator.c) +
                  " gamma=" + FormatReal(spec.estimator.gamma));
  return lines;
}

std::vector<CurvePoint> PrivateVsNonprivateCurve(const AdjacencyMatrix& graph,
                                                 const std::vector<double>& epsilon_grid,
                                                 const EstimatorConfig& cfg, std::uint64_t seed,
                                                 int seeds) {
  if (epsilon_grid.empty()) throw Error(ErrorCode::kInvalidParameters, "epsilon grid is empty");
  if (seeds < 1) throw Error(ErrorCode::kInvalidParameters, "need at least one seed");
  for (double e : epsilon_grid) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::kInvalidPrivacyBudget, "curve epsilons must be positive and finite");
    }
  }
  const RandomStream root(seed);
  EstimatorConfig base = cfg;
  base.hunt.seed = root.Split("hunt").key();
  const MembershipEstimate reference = EstimateMemberships(NonPrivate(graph), base);

  std::vector<CurvePoint> curve;
  for (double eps : epsilon_grid) {
    CurvePoint point;
    point.epsilon = eps;
    for (int s = 0; s < seeds; ++s) {
      RandomStream mech =
          root.Split("mechanism").Split(DoubleKey(eps)).Split(static_cast<std::uint64_t>(s));
      double distance = std::numeric_limits<double>::quiet_NaN();
      try {
        const PrivatizedGraph released = SymmetricEdgeFlip(graph, PrivacyParams(eps), mech);
        const MembershipEstimate est = EstimateMemberships(Debias(released), base);
        distance = PermutationLoss(est.pi_hat, reference.pi_hat).loss;
      } catch (const Error&) {
        ++point.failures;
      }
      point.distances.push_back(distance);
    }
    const MeanStd summary = Summarize(point.distances);
    point.mean_distance = summary.mean;
    point.std_distance = summary.std;
    curve.push_back(std::move(point));
  }
  return curve;
}

std::vector<std::string> AlignmentBins(const Matrix& pi_hat, AlignmentScheme scheme,
                                       const AlignmentConfig& cfg) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(pi_hat.rows()));
  if (scheme == AlignmentScheme::kTwoBin) {
    for (Eigen::Index i = 0; i < pi_hat.rows(); ++i) {
      labels.emplace_back(pi_hat.row(i).maxCoeff() <= cfg.strong_cut ? "weak" : "strong");
    }
    return labels;
  }
  if (pi_hat.cols() != 2) {
    throw Error(ErrorCode::kInvalidParameters, "the five-bin scheme needs K = 2");
  }
  if (cfg.liberal_column < 0 || cfg.liberal_column > 1) {
    throw Error(ErrorCode::kInvalidParameters, "liberal column must be 0 or 1");
  }
  static const char* const kNames[5] = {"highly_conservative", "moderately_conservative",
                                        "neutral", "moderately_liberal", "highly_liberal"};
  for (Eigen::Index i = 0; i < pi_hat.rows(); ++i) {
    const double p = pi_hat(i, cfg.liberal_column);
    int bin = 0;
    while (bin < 4 && p > cfg.cuts[bin]) ++bin;
    labels.emplace_back(kNames[bin]);
  }
  return labels;
}

std::string FormatSweepCsv(const std::vector<SweepRow>& rows,
                           const std::vector<std::string>& comments, bool include_runtime) {
  std::ostringstream out;
  for (const std::string& line : comments) out << "# " << line << '\n';
  out << "b_n,epsilon,mean_loss,std_loss,reps,runtime_ms,warnings\n";
  for (const SweepRow& row : rows) {
    out << FormatReal(row.b_n) << ',' << FormatReal(row.epsilon) << ','
        << FormatReal(row.mean_loss) << ',' << FormatReal(row.std_loss) << ',' << row.reps
        << ',' << (include_runtime ? FormatReal(row.runtime_ms, "%.3f") : std::string("0"))
        << ',' << row.warnings << '\n';
  }
  return out.str();
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Minimal static line chart.
std::string RenderChart(const std::string& title, const std::string& x_label,
                        const std::vector<Series>& curves,
                        const std::vector<Series>& references) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  auto extend = [&](const Series& s, bool use_x) {
    for (const auto& [x, y] : s.points) {
      if (use_x) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
      }
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  };
  for (const Series& s : curves) extend(s, true);
  for (const Series& s : references) extend(s, false);
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1;
  if (!std::isfinite(y_lo)) y_lo = 0, y_hi = 1;
  if (x_hi <= x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi <= y_lo) y_lo -= 0.05, y_hi += 0.05;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };
  auto f = [](double v) { return FormatReal(v, "%.2f"); };
  static const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << f(kLeft) << "\" y=\"20\" font-size=\"13\">" << title << "</text>\n";
  svg << "<rect x=\"" << f(kLeft) << "\" y=\"" << f(kTop) << "\" width=\"" << f(plot_w)
      << "\" height=\"" << f(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    svg << "<text x=\"" << f(px(xv)) << "\" y=\"" << f(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\">" << FormatReal(xv, "%.3g") << "</text>\n";
    svg << "<text x=\"" << f(kLeft - 6) << "\" y=\"" << f(py(yv) + 4)
        << "\" text-anchor=\"end\">" << FormatReal(yv, "%.3g") << "</text>\n";
  }
  svg << "<text x=\"" << f(kLeft + plot_w / 2) << "\" y=\"" << f(kHeight - 10)
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << f(kTop + plot_h / 2) << "\" transform=\"rotate(-90 16 "
      << f(kTop + plot_h / 2) << ")\" text-anchor=\"middle\">mean loss</text>\n";

  int slot = 0;
  auto legend = [&](const std::string& label, const char* color, bool dashed) {
    const double y = kTop + 14.0 * slot++;
    svg << "<line x1=\"" << f(kLeft + plot_w + 10) << "\" y1=\"" << f(y) << "\" x2=\""
        << f(kLeft + plot_w + 30) << "\" y2=\"" << f(y) << "\" stroke=\"" << color << "\""
        << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
    svg << "<text x=\"" << f(kLeft + plot_w + 34) << "\" y=\"" << f(y + 4) << "\">" << label
        << "</text>\n";
  };
  int color = 0;
  for (const Series& s : curves) {
    const char* c = kColors[color++ % 10];
    svg << "<polyline class=\"curve\" data-label=\"" << s.label
        << "\" fill=\"none\" stroke=\"" << c << "\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      svg << (k ? " " : "") << f(px(s.points[k].first)) << "," << f(py(s.points[k].second));
    }
    svg << "\"/>\n";
    legend(s.label, c, false);
  }
  for (const Series& s : references) {
    const char* c = kColors[color++ % 10];
    for (const auto& pt : s.points) {
      svg << "<line class=\"reference\" data-label=\"" << s.label << "\" x1=\"" << f(kLeft)
          << "\" y1=\"" << f(py(pt.second)) << "\" x2=\"" << f(kLeft + plot_w) << "\" y2=\""
          << f(py(pt.second)) << "\" stroke=\"" << c << "\" stroke-dasharray=\"4 3\"/>\n";
    }
    legend(s.label, c, true);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string RenderLossVsBn(const std::vector<SweepRow>& rows) {
  std::map<double, Series> by_eps;
  for (const SweepRow& row : rows) {
    Series& s = by_eps[row.epsilon];
    s.label = "eps=" + FormatReal(row.epsilon, "%g");
    if (std::isfinite(row.mean_loss)) s.points.emplace_back(row.b_n, row.mean_loss);
  }
  std::vector<Series> curves;
  for (auto& [eps, s] : by_eps) {
    std::sort(s.points.begin(), s.points.end());
    curves.push_back(std::move(s));
  }
  return RenderChart("Mean loss against b_n", "b_n", curves, {});
}

std::string RenderLossVsEpsilon(const std::vector<SweepRow>& rows) {
  std::map<double, Series> by_bn;
  std::map<double, Series> reference;
  for (const SweepRow& row : rows) {
    const bool finite = std::isfinite(row.epsilon);
    Series& s = finite ? by_bn[row.b_n] : reference[row.b_n];
    s.label = "b_n=" + FormatReal(row.b_n, "%g") + (finite ? "" : " (non-private)");
    if (std::isfinite(row.mean_loss)) s.points.emplace_back(row.epsilon, row.mean_loss);
  }
  std::vector<Series> curves, refs;
  for (auto& [b, s] : by_bn) {
    std::sort(s.points.begin(), s.points.end());
    curves.push_back(std::move(s));
  }
  for (auto& [b, s] : reference) refs.push_back(std::move(s));
  return RenderChart("Mean loss against epsilon", "epsilon", curves, refs);
}

std::vector<std::filesystem::path> EmitResults(const std::vector<SweepRow>& rows,
                                               const std::filesystem::path& out_dir,
                                               const std::vector<OutputFormat>& formats,
                                               const std::vector<std::string>& comments,
                                               bool include_runtime) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidParameters, "nothing to emit");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&written](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
    written.push_back(path);
  };
  write(out_dir / "sweep.csv", FormatSweepCsv(rows, comments, include_runtime));
  if (std::find(formats.begin(), formats.end(), OutputFormat::kSvg) != formats.end()) {
    write(out_dir / "loss_vs_bn.svg", RenderLossVsBn(rows));
    write(out_dir / "loss_vs_eps.svg", RenderLossVsEpsilon(rows));
  }
  return written;
}

}  // namespace prime
