#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "smmr/harness/sweep.hpp"
#include "smmr/problems/linear.hpp"
#include "smmr/scheme_io.hpp"

using namespace smmr;
using namespace smmr::harness;

TEST_CASE("step sequences") {
  CHECK(StepSequence{8, 2.0, 4}.expand() == std::vector<int>{8, 16, 32, 64});
  CHECK_THROWS_AS((StepSequence{8, 1.0, 4}.expand()), std::invalid_argument);
  CHECK_THROWS_AS((StepSequence{8, 2.0, 3}.expand()), std::invalid_argument);
  CHECK_THROWS_AS((StepSequence{0, 2.0, 4}.expand()), std::invalid_argument);
}

TEST_CASE("slope fitting with floor detection") {
  SECTION("clean power law") {
    std::vector<double> hs, errs;
    for (int k = 0; k < 6; ++k) {
      const double h = 0.1 / std::pow(2.0, k);
      hs.push_back(h);
      errs.push_back(3.0 * h * h);
    }
    const SlopeFit fit = fit_order_slope(hs, errs);
    CHECK(fit.pointsUsed == 6);
    CHECK(fit.slope == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("error floor drops trailing points") {
    std::vector<double> hs, errs;
    for (int k = 0; k < 8; ++k) {
      const double h = 0.1 / std::pow(2.0, k);
      hs.push_back(h);
      errs.push_back(std::max(2.0 * h * h * h, 1e-7));
    }
    const SlopeFit fit = fit_order_slope(hs, errs);
    // the flat tail goes; the transition point stays (it still gained > 10%)
    CHECK(fit.pointsUsed == 6);
    CHECK(fit.slope == Catch::Approx(3.0).margin(0.15));
  }
  SECTION("all-floor data gives no slope") {
    const SlopeFit fit = fit_order_slope({0.1, 0.05, 0.025, 0.0125}, {1e-3, 1e-3, 1e-3, 1e-3});
    CHECK(fit.pointsUsed == 0);
    CHECK(std::isnan(fit.slope));
  }
}

TEST_CASE("reference solver") {
  SECTION("matches the matrix exponential on the rotation fixture") {
    ProblemConfig cfg;
    cfg.name = "linear";
    const ProblemInstance inst = build_problem(cfg);
    const Vec ref = reference_solve(inst, 64);
    const Vec exact = problems::expm_apply(problems::rotation_fixture().m, 1.0, inst.y0);
    CHECK(rel_l2_error(ref, exact) <= 1e-10);
  }
  SECTION("degenerate span returns the initial state") {
    ProblemConfig cfg;
    cfg.name = "linear";
    ProblemInstance inst = build_problem(cfg);
    inst.tEnd = inst.t0;
    CHECK(reference_solve(inst, 8) == inst.y0);
  }
}

TEST_CASE("linear fixture sweep: slopes sit at the nominal orders") {
  SweepConfig cfg;
  cfg.problem.name = "linear";
  cfg.steps = {8, 2.0, 5};
  cfg.microSteps = 4;
  cfg.methods = {"euler", "mri-ralston2", "spc-ralston2", "mri-ralston3", "spc-ralston3",
                 "rk-full", "rk-surrogate"};
  cfg.rkOrder = 2;
  cfg.checkReference = true;
  const SweepReport report = run_sweep(cfg);
  REQUIRE_FALSE(report.any_failed());
  CHECK(report.referenceGatePassed);

  const int nominal[] = {1, 2, 2, 3, 3, 2};
  for (int i = 0; i < 6; ++i) {
    CAPTURE(report.slopes[i].method);
    REQUIRE(report.slopes[i].fit.pointsUsed >= 2);
    CHECK(std::fabs(report.slopes[i].fit.slope - nominal[i]) <= 0.25);
  }

  SECTION("counters match the closed forms") {
    for (const RunRow& row : report.rows) {
      CAPTURE(row.method, row.nSteps);
      const auto n = static_cast<std::uint64_t>(row.nSteps);
      if (row.method == "euler") {
        CHECK(row.fullEvals == n);
        CHECK(row.surrogateEvals == 4 * 2 * n);  // m * s_inner(order 2)
      } else if (row.method == "mri-ralston2") {
        CHECK(row.fullEvals == 2 * n);
        CHECK(row.surrogateEvals == 2 * 4 * 3 * n);  // s * m * s_inner(order 3)
      } else if (row.method == "spc-ralston2") {
        CHECK(row.fullEvals == 2 * n);
        CHECK(row.surrogateEvals == (4 * 3 + 2) * n);
      } else if (row.method == "mri-ralston3") {
        CHECK(row.fullEvals == 3 * n);
        CHECK(row.surrogateEvals == 3 * 4 * 4 * n);  // s * m * s_inner(order 4)
      } else if (row.method == "spc-ralston3") {
        CHECK(row.fullEvals == 3 * n);
        CHECK(row.surrogateEvals == (4 * 4 + 3) * n);
      } else if (row.method == "rk-full") {
        CHECK(row.fullEvals == 2 * n);  // rkOrder 2
        CHECK(row.surrogateEvals == 0);
      } else if (row.method == "rk-surrogate") {
        CHECK(row.fullEvals == 0);
        CHECK(row.surrogateEvals == 2 * n);
      }
    }
  }
}

TEST_CASE("sweeps are deterministic, also under a worker pool") {
  SweepConfig cfg;
  cfg.problem.name = "lorenz96";
  cfg.problem.tEnd = 0.2;
  cfg.steps = {8, 2.0, 4};
  cfg.methods = {"euler", "mri-ralston2", "rk-full"};
  const SweepReport a = run_sweep(cfg);
  const SweepReport b = run_sweep(cfg);
  cfg.jobs = 3;
  const SweepReport c = run_sweep(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  REQUIRE(a.rows.size() == c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].error == b.rows[i].error);  // bitwise
    CHECK(a.rows[i].error == c.rows[i].error);
    CHECK(a.rows[i].fullEvals == b.rows[i].fullEvals);
    CHECK(a.rows[i].surrogateEvals == c.rows[i].surrogateEvals);
    CHECK(a.rows[i].method == c.rows[i].method);
    CHECK(a.rows[i].nSteps == c.rows[i].nSteps);
  }
}

TEST_CASE("csv emission") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "smmr_test_csv";
  fs::create_directories(dir);
  const std::string path = (dir / "out.csv").string();

  SECTION("empty report gives a header-only file") {
    emit_csv(SweepReport{}, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "method,H,error,full_evals,surrogate_evals,wall_s");
    CHECK_FALSE(std::getline(in, line));
  }
  SECTION("one row gives two lines, failures are omitted") {
    SweepReport report;
    RunRow ok;
    ok.method = "euler";
    ok.nSteps = 10;
    ok.stepSize = 0.1;
    ok.error = 1.25e-3;
    ok.fullEvals = 10;
    ok.surrogateEvals = 20;
    RunRow bad;
    bad.failed = true;
    report.rows = {ok, bad};
    emit_csv(report, path);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);
  }
  SECTION("unwritable path is surfaced") {
    CHECK_THROWS_AS(emit_csv(SweepReport{}, (dir / "no/such/dir/x.csv").string()),
                    std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("surrogate-only integration plateaus at the model error floor") {
  SweepConfig cfg;
  cfg.problem.name = "brusselator";
  cfg.problem.fineP = 17;
  cfg.problem.coarseP = 9;
  cfg.problem.tEnd = 0.25;
  cfg.steps = {16, 2.0, 4};
  cfg.methods = {"rk-surrogate"};
  cfg.rkOrder = 2;
  const SweepReport report = run_sweep(cfg);
  REQUIRE_FALSE(report.any_failed());
  // the error is dominated by the coarse-grid model gap: refining the step
  // buys nothing, so the floor detector discards the tail
  double lo = 1e300, hi = 0.0;
  for (const RunRow& row : report.rows) {
    lo = std::min(lo, row.error);
    hi = std::max(hi, row.error);
  }
  CHECK(hi / lo < 1.05);
  CHECK(report.slopes[0].fit.pointsUsed <= 2);
}

TEST_CASE("unstable runs are recorded as failures, not aborts") {
  SweepConfig cfg;
  cfg.problem.name = "brusselator";
  cfg.problem.fineP = 17;
  cfg.problem.coarseP = 9;
  cfg.problem.tEnd = 50.0;
  cfg.steps = {4, 2.0, 4};
  cfg.methods = {"rk-full"};
  cfg.rkOrder = 1;
  const SweepReport report = run_sweep(cfg);
  CHECK(report.any_failed());
  bool sawReason = false;
  for (const RunRow& row : report.rows)
    if (row.failed && !row.failureReason.empty()) sawReason = true;
  CHECK(sawReason);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "smmr_test_fail_csv";
  fs::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  emit_csv(report, path);
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines < 1 + 4);  // failed rows are missing
  fs::remove_all(dir);
}

TEST_CASE("configuration validation") {
  SweepConfig cfg;
  cfg.problem.name = "linear";
  cfg.steps = {8, 2.0, 4};
  SECTION("unknown method") {
    cfg.methods = {"rk5"};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  }
  SECTION("inner order below a scheme order") {
    cfg.methods = {"mri-ralston3"};
    cfg.innerOrder = 2;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  }
  SECTION("file method without a scheme file") {
    cfg.methods = {"file"};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  }
  SECTION("unknown problem") {
    cfg.problem.name = "heat";
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  }
  SECTION("bad projection for the problem") {
    cfg.problem.name = "linear";
    cfg.problem.projection = "mesh2d";
    cfg.methods = {"euler"};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  }
}

TEST_CASE("a loaded scheme file runs as the 'file' method") {
  SweepConfig cfg;
  cfg.problem.name = "linear";
  cfg.steps = {8, 2.0, 4};
  cfg.methods = {"file"};
  std::istringstream in(R"(
name from-file
stages 2
order 2
kind mri
A
0 0
2/3 0
b
1/4 3/4
c
0 2/3
coupling 0
2/3 0
-5/12 3/4
)");
  cfg.fileScheme = parse_scheme(in, "from-file");
  const SweepReport report = run_sweep(cfg);
  REQUIRE_FALSE(report.any_failed());
  REQUIRE(report.slopes[0].fit.pointsUsed >= 2);
  CHECK(std::fabs(report.slopes[0].fit.slope - 2.0) <= 0.25);
}
