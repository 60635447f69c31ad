#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "smmr/coupling.hpp"
#include "smmr/harness/problem_setup.hpp"
#include "smmr/rk.hpp"
#include "smmr/steppers.hpp"
#include "smmr/vec.hpp"

namespace smmr::harness {

// Convergence and work-precision sweeps: for each (method, step count) the
// problem is integrated and compared against a Ralston-3 reference computed
// with a step 64x smaller than the finest sweep step.  Errors are relative
// l2 norms at the final time.  All numeric outputs are deterministic; wall
// times are the only run-to-run variation.

struct StepSequence {
  int first = 8;
  double ratio = 2.0;
  int count = 8;

  std::vector<int> expand() const {
    if (count < 4) throw std::invalid_argument("step sequence needs at least 4 points");
    if (first < 1 || ratio <= 1.0)
      throw std::invalid_argument("step sequence must be strictly increasing");
    std::vector<int> out;
    double v = first;
    for (int i = 0; i < count; ++i) {
      const int n = static_cast<int>(std::llround(v));
      if (!out.empty() && n <= out.back())
        throw std::invalid_argument("step sequence must be strictly increasing");
      out.push_back(n);
      v *= ratio;
    }
    return out;
  }
};

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m = {"euler",        "mri-ralston2", "spc-ralston2",
                                             "mri-ralston3", "spc-ralston3", "rk-full",
                                             "rk-surrogate", "file"};
  return m;
}

struct SweepConfig {
  ProblemConfig problem;
  std::vector<std::string> methods = {"euler", "mri-ralston2", "spc-ralston2", "mri-ralston3",
                                      "spc-ralston3"};
  StepSequence steps;
  int innerOrder = 0;  // 0 = one order above each scheme
  int microSteps = 1;
  int rkOrder = 1;     // base order for rk-full / rk-surrogate
  int jobs = 1;
  bool checkReference = false;
  std::optional<CouplingScheme> fileScheme;  // enables the "file" method token
};

struct RunRow {
  std::string method;
  int nSteps = 0;
  double stepSize = 0.0;
  double error = 0.0;
  std::uint64_t fullEvals = 0;
  std::uint64_t surrogateEvals = 0;
  double wallSeconds = 0.0;
  bool failed = false;
  std::string failureReason;
};

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  int pointsUsed = 0;
};

struct MethodSlope {
  std::string method;
  SlopeFit fit;
};

struct SweepReport {
  std::vector<RunRow> rows;
  std::vector<MethodSlope> slopes;
  Vec reference;
  double referenceSelfError = std::numeric_limits<double>::quiet_NaN();
  bool referenceGatePassed = true;

  bool any_failed() const {
    for (const RunRow& r : rows)
      if (r.failed) return true;
    return false;
  }
};

// Least-squares slope of log(error) vs log(H) above the error floor.
// Trailing (finest) points are dropped while the error improves by less
// than 10% per halving of H, which is where chaos, spatial error, or
// roundoff has taken over.
inline SlopeFit fit_order_slope(const std::vector<double>& stepSizes,
                                const std::vector<double>& errors) {
  std::size_t n = std::min(stepSizes.size(), errors.size());
  SlopeFit fit;
  while (n >= 2) {
    const double eCoarse = errors[n - 2];
    const double eFine = errors[n - 1];
    if (eFine <= 0.0) {
      --n;  // exactly zero error: below any measurable floor
      continue;
    }
    const double halvings = std::log2(stepSizes[n - 2] / stepSizes[n - 1]);
    const double gainPerHalving = std::pow(eCoarse / eFine, 1.0 / halvings);
    if (gainPerHalving < 1.0 / 0.9)
      --n;
    else
      break;
  }
  if (n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(stepSizes[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n);
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.pointsUsed = static_cast<int>(n);
  return fit;
}

// Full-model Ralston-3 integration with a step 64x below the finest sweep
// step.  Deterministic: same inputs give bitwise-identical output.
inline Vec reference_solve(const ProblemInstance& inst, int finestSweepSteps) {
  if (finestSweepSteps < 1) throw std::invalid_argument("reference_solve: bad step count");
  if (inst.tEnd == inst.t0) return inst.y0;
  ModelPair models = inst.models;
  models.reset_counters();
  auto rhs = [&models](double t, const Vec& y, Vec& dy) { models.eval_full(t, y, dy); };
  return rk_integrate(ralston3(), rhs, inst.t0, inst.tEnd, inst.y0, 64 * finestSweepSteps);
}

namespace detail {

inline const CouplingScheme& scheme_for_token(const SweepConfig& cfg, const std::string& token) {
  if (token == "file") {
    if (!cfg.fileScheme)
      throw std::invalid_argument("method 'file' requires a scheme file");
    return *cfg.fileScheme;
  }
  return builtin_scheme(token);
}

inline bool is_sm_token(const std::string& token) {
  return token == "euler" || token == "mri-ralston2" || token == "spc-ralston2" ||
         token == "mri-ralston3" || token == "spc-ralston3" || token == "file";
}

inline void validate_config(const SweepConfig& cfg) {
  if (cfg.microSteps < 1) throw std::invalid_argument("micro-steps must be >= 1");
  if (cfg.rkOrder < 1 || cfg.rkOrder > 4) throw std::invalid_argument("rk-order must be 1..4");
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("no methods selected");
  (void)cfg.steps.expand();
  for (const std::string& token : cfg.methods) {
    bool known = false;
    for (const std::string& k : known_methods()) known = known || k == token;
    if (!known) throw std::invalid_argument("unknown method '" + token + "'");
    if (is_sm_token(token)) {
      const CouplingScheme& scheme = scheme_for_token(cfg, token);
      if (cfg.innerOrder != 0 && cfg.innerOrder < scheme.order())
        throw std::invalid_argument("inner order " + std::to_string(cfg.innerOrder) +
                                    " is below the order of scheme '" + scheme.name + "'");
      if (cfg.innerOrder != 0) (void)tableau_of_order(cfg.innerOrder);
    }
  }
}

// One (method, nSteps) run on a fresh copy of the prototype models.
inline RunRow execute_run(const SweepConfig& cfg, const ProblemInstance& inst,
                          const Vec& reference, const std::string& token, int nSteps) {
  RunRow row;
  row.method = token;
  row.nSteps = nSteps;
  row.stepSize = (inst.tEnd - inst.t0) / nSteps;
  try {
    ModelPair models = inst.models;
    models.reset_counters();
    Trajectory traj;
    if (token == "rk-full") {
      traj = integrate(plain_rk_stepper(tableau_of_order(cfg.rkOrder)), models, inst.t0, inst.tEnd,
                       inst.y0, nSteps);
      row.error = rel_l2_error(traj.y, reference);
    } else if (token == "rk-surrogate") {
      const auto start = std::chrono::steady_clock::now();
      Vec z0 = models.projection().restrict(inst.y0);
      auto rhs = [&models](double t, const Vec& z, Vec& dz) { models.eval_surrogate(t, z, dz); };
      Vec zEnd = rk_integrate(tableau_of_order(cfg.rkOrder), rhs, inst.t0, inst.tEnd, z0, nSteps);
      traj.y = models.projection().lift(zEnd);
      traj.evals = models.counters();
      traj.wallSeconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.error = rel_l2_error(traj.y, reference);
    } else {
      const CouplingScheme& scheme = scheme_for_token(cfg, token);
      InnerSolverConfig inner = cfg.innerOrder == 0
                                    ? default_inner_config(scheme.order(), cfg.microSteps)
                                    : InnerSolverConfig{tableau_of_order(cfg.innerOrder),
                                                        cfg.microSteps};
      traj = integrate(sm_stepper(scheme, inner), models, inst.t0, inst.tEnd, inst.y0, nSteps);
      row.error = rel_l2_error(traj.y, reference);
    }
    row.fullEvals = traj.evals.full;
    row.surrogateEvals = traj.evals.surrogate;
    row.wallSeconds = traj.wallSeconds;
  } catch (const std::exception& e) {
    row.failed = true;
    row.failureReason = e.what();
  }
  return row;
}

}  // namespace detail

// Runs every (method, step count) combination, fits per-method slopes, and
// returns the rows in deterministic order: methods as listed, steps
// ascending (step size descending).
inline SweepReport run_sweep(const SweepConfig& cfg) {
  detail::validate_config(cfg);
  const ProblemInstance inst = build_problem(cfg.problem);
  const std::vector<int> stepCounts = cfg.steps.expand();
  const int finest = stepCounts.back();

  SweepReport report;
  report.reference = reference_solve(inst, finest);
  if (cfg.checkReference) {
    const Vec refCheck = reference_solve(inst, 2 * finest);
    report.referenceSelfError = rel_l2_error(report.reference, refCheck);
  }

  struct Task {
    std::string token;
    int nSteps;
  };
  std::vector<Task> tasks;
  for (const std::string& token : cfg.methods)
    for (int n : stepCounts) tasks.push_back({token, n});
  report.rows.resize(tasks.size());

  // Warm-up: run the cheapest task once and discard it, so code and data
  // are resident before anything is timed.
  if (!tasks.empty())
    (void)detail::execute_run(cfg, inst, report.reference, tasks[0].token, tasks[0].nSteps);

  if (cfg.jobs <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      report.rows[i] =
          detail::execute_run(cfg, inst, report.reference, tasks[i].token, tasks[i].nSteps);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        report.rows[i] =
            detail::execute_run(cfg, inst, report.reference, tasks[i].token, tasks[i].nSteps);
      }
    };
    std::vector<std::thread> pool;
    const int nThreads = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
    pool.reserve(nThreads);
    for (int w = 0; w < nThreads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Per-method slopes over the successful rows.
  for (const std::string& token : cfg.methods) {
    std::vector<double> hs, errs;
    for (const RunRow& row : report.rows)
      if (row.method == token && !row.failed) {
        hs.push_back(row.stepSize);
        errs.push_back(row.error);
      }
    report.slopes.push_back({token, fit_order_slope(hs, errs)});
  }

  if (cfg.checkReference) {
    double minError = std::numeric_limits<double>::infinity();
    for (const RunRow& row : report.rows)
      if (!row.failed) minError = std::min(minError, row.error);
    report.referenceGatePassed = report.referenceSelfError < minError / 10.0;
  }
  return report;
}

inline SweepReport convergence_study(const SweepConfig& cfg) { return run_sweep(cfg); }

// CSV schema: method,H,error,full_evals,surrogate_evals,wall_s with >= 15
// significant digits; failed runs are omitted (missing rows).
inline void emit_csv(const SweepReport& report, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  std::fputs("method,H,error,full_evals,surrogate_evals,wall_s\n", f);
  for (const RunRow& row : report.rows) {
    if (row.failed) continue;
    std::fprintf(f, "%s,%.17g,%.17g,%llu,%llu,%.17g\n", row.method.c_str(), row.stepSize,
                 row.error, static_cast<unsigned long long>(row.fullEvals),
                 static_cast<unsigned long long>(row.surrogateEvals), row.wallSeconds);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("emit_csv: failed writing '" + path + "'");
}

inline SweepReport work_precision(const SweepConfig& cfg, const std::string& csvPath) {
  SweepReport report = run_sweep(cfg);
  emit_csv(report, csvPath);
  return report;
}

}  // namespace smmr::harness
