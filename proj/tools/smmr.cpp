// smmr: benchmark driver for the surrogate-model multirate integrators.
//
//   smmr run               convergence / work-precision sweep, CSV output
//   smmr validate-schemes  check coupling scheme identities
//   smmr reference         write a high-accuracy reference solution
//
// Exit codes: 0 success, 1 run failure, 2 configuration error.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smmr/smmr.hpp"

namespace {

// key=value run configuration ('#' comments); keys are the long option
// names without dashes.  Explicit command-line flags override the file.
std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("config file '" + path + "' line " + std::to_string(lineNo) +
                                  ": expected key=value");
    args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
  }
  return args;
}

// Expands `run --config <file>` by splicing the file's options in right
// after the subcommand name, before any explicit flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t drop = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      drop = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      drop = 1;
    }
    if (drop == 0) continue;
    std::vector<std::string> fileArgs = read_config_file(path);
    args.erase(args.begin() + i, args.begin() + i + drop);
    args.insert(args.begin() + 1, fileArgs.begin(), fileArgs.end());
    break;
  }
  return args;
}

struct CliOptions {
  smmr::harness::SweepConfig sweep;
  std::string methodsSpec;
  std::string stepsSpec;
  std::string schemeFile;
  std::string outPath = "sweep.csv";
};

std::vector<std::string> split_list(const std::string& spec) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(spec);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

smmr::harness::StepSequence parse_steps(const std::string& spec) {
  smmr::harness::StepSequence seq;
  if (std::sscanf(spec.c_str(), "%d,%lf,%d", &seq.first, &seq.ratio, &seq.count) != 3)
    throw std::invalid_argument("--steps expects n0,ratio,count (e.g. 32,2,8)");
  return seq;
}

smmr::harness::StepSequence default_steps(const std::string& problem) {
  if (problem == "brusselator") return {32, 2.0, 8};
  if (problem == "advection") return {512, 2.0, 4};
  if (problem == "linear") return {8, 2.0, 8};
  return {16, 2.0, 8};  // lorenz96
}

void add_problem_flags(CLI::App* cmd, smmr::harness::ProblemConfig& p) {
  cmd->add_option("--problem", p.name, "Problem: lorenz96|brusselator|advection|linear")
      ->default_val("lorenz96");
  cmd->add_option("--fine-p", p.fineP, "Fine grid points per side (PDE problems)");
  cmd->add_option("--coarse-p", p.coarseP, "Coarse grid points per side (PDE problems)");
  cmd->add_option("--lorenz-k", p.lorenzK, "Lorenz '96 state dimension");
  cmd->add_option("--surrogate-forcing", p.surrogateForcing,
                  "Perturbed forcing of the Lorenz '96 surrogate");
  cmd->add_option("--tend", p.tEnd, "Final time (0 = problem default)");
  cmd->add_option("--mu", p.mu, "Linear fixture surrogate multiplier");
  cmd->add_option("--projection", p.projection,
                  "Projection: identity|mesh1d|mesh2d|file:<path> (default per problem)");
}

void print_report(const smmr::harness::SweepReport& report) {
  std::printf("%-14s %10s %12s %12s %14s %10s\n", "method", "steps", "H", "error", "evals(f/fs)",
              "wall[s]");
  for (const auto& row : report.rows) {
    if (row.failed) {
      std::printf("%-14s %10d %12.4e  FAILED: %s\n", row.method.c_str(), row.nSteps, row.stepSize,
                  row.failureReason.c_str());
      continue;
    }
    const std::string evals =
        std::to_string(row.fullEvals) + "/" + std::to_string(row.surrogateEvals);
    std::printf("%-14s %10d %12.4e %12.4e %14s %10.4f\n", row.method.c_str(), row.nSteps,
                row.stepSize, row.error, evals.c_str(), row.wallSeconds);
  }
  std::printf("\nfitted convergence slopes (above the error floor):\n");
  for (const auto& s : report.slopes) {
    if (s.fit.pointsUsed >= 2)
      std::printf("  %-14s %.3f  (%d points)\n", s.method.c_str(), s.fit.slope, s.fit.pointsUsed);
    else
      std::printf("  %-14s n/a (too few points above floor)\n", s.method.c_str());
  }
  if (!std::isnan(report.referenceSelfError)) {
    std::printf("reference self-check: halving the reference step moves it by %.3e (%s)\n",
                report.referenceSelfError,
                report.referenceGatePassed ? "passes the 1/10 gate" : "FAILS the 1/10 gate");
  }
}

int run_command(CliOptions& opt) {
  if (!opt.schemeFile.empty()) opt.sweep.fileScheme = smmr::load_scheme_file(opt.schemeFile);
  if (!opt.methodsSpec.empty()) opt.sweep.methods = split_list(opt.methodsSpec);
  opt.sweep.steps =
      opt.stepsSpec.empty() ? default_steps(opt.sweep.problem.name) : parse_steps(opt.stepsSpec);

  const smmr::harness::SweepReport report = smmr::harness::work_precision(opt.sweep, opt.outPath);
  print_report(report);
  std::printf("wrote %s\n", opt.outPath.c_str());
  if (report.any_failed() || !report.referenceGatePassed) return 1;
  return 0;
}

int validate_command(const std::string& schemeFile) {
  std::vector<smmr::CouplingScheme> schemes = smmr::builtin_schemes();
  if (!schemeFile.empty()) schemes.push_back(smmr::load_scheme_file(schemeFile));
  bool allOk = true;
  for (const auto& scheme : schemes) {
    const auto diags = smmr::validate_scheme(scheme);
    if (diags.empty()) {
      std::printf("%-16s ok (%s, %zu stages, order %d)\n", scheme.name.c_str(),
                  smmr::to_string(scheme.kind), scheme.stages(), scheme.order());
    } else {
      allOk = false;
      std::printf("%-16s FAILED %zu identities:\n", scheme.name.c_str(), diags.size());
      for (const auto& d : diags)
        std::printf("    %s [%s]: residual %.3e\n", d.identity.c_str(), d.where.c_str(),
                    d.residual);
    }
  }
  return allOk ? 0 : 1;
}

int reference_command(const smmr::harness::ProblemConfig& problem, const std::string& stepsSpec,
                      const std::string& outPath) {
  const smmr::harness::StepSequence seq =
      stepsSpec.empty() ? default_steps(problem.name) : parse_steps(stepsSpec);
  const smmr::harness::ProblemInstance inst = smmr::harness::build_problem(problem);
  const smmr::Vec ref = smmr::harness::reference_solve(inst, seq.expand().back());
  std::FILE* f = std::fopen(outPath.c_str(), "w");
  if (!f) {
    std::fprintf(stderr, "error: cannot open '%s' for writing\n", outPath.c_str());
    return 1;
  }
  std::fprintf(f, "%zu\n", ref.size());
  for (double v : ref) std::fprintf(f, "%.17g\n", v);
  std::fclose(f);
  std::printf("wrote %s (%s, dimension %zu)\n", outPath.c_str(), inst.label.c_str(), ref.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-model multirate time integration benchmarks"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* run = app.add_subcommand("run", "run a sweep and write CSV");
  add_problem_flags(run, opt.sweep.problem);
  run->add_option("--methods", opt.methodsSpec,
                  "Comma list: euler,mri-ralston2,spc-ralston2,mri-ralston3,spc-ralston3,"
                  "rk-full,rk-surrogate,file");
  run->add_option("--steps", opt.stepsSpec, "Step counts n0,ratio,count (default per problem)");
  run->add_option("--inner-order", opt.sweep.innerOrder,
                  "Inner RK order (0 = one above each scheme)");
  run->add_option("--micro-steps", opt.sweep.microSteps, "Micro-steps per inner solve");
  run->add_option("--rk-order", opt.sweep.rkOrder, "Base order for rk-full/rk-surrogate");
  run->add_option("--jobs", opt.sweep.jobs, "Concurrent runs (1 = timing fidelity)");
  run->add_flag("--check-reference", opt.sweep.checkReference,
                "Richardson self-check of the reference solution");
  run->add_option("--scheme-file", opt.schemeFile, "Coupling scheme file (method token 'file')");
  run->add_option("--out", opt.outPath, "Output CSV path");
  std::string configPath;  // consumed by expand_config; declared so --help lists it
  run->add_option("--config", configPath, "Read any run option from a key=value file");
  // a value from --config may be restated on the command line; last one wins
  for (CLI::Option* o : run->get_options()) o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string validateSchemeFile;
  CLI::App* validate = app.add_subcommand("validate-schemes", "check scheme identities");
  validate->add_option("--scheme-file", validateSchemeFile, "Also validate a scheme file");

  smmr::harness::ProblemConfig refProblem;
  std::string refSteps;
  std::string refOut = "reference.txt";
  CLI::App* reference = app.add_subcommand("reference", "write a reference solution");
  add_problem_flags(reference, refProblem);
  reference->add_option("--steps", refSteps, "Sweep steps the reference must resolve (n0,ratio,count)");
  reference->add_option("--out", refOut, "Output path");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }

  try {
    if (run->parsed()) return run_command(opt);
    if (validate->parsed()) return validate_command(validateSchemeFile);
    if (reference->parsed()) return reference_command(refProblem, refSteps, refOut);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
