#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "smmr/model.hpp"
#include "smmr/problems/advection.hpp"
#include "smmr/problems/brusselator.hpp"
#include "smmr/problems/linear.hpp"
#include "smmr/problems/lorenz96.hpp"
#include "smmr/projection.hpp"
#include "smmr/vec.hpp"

namespace smmr::harness {

// Benchmark problem selection.  Zero-valued fields take the per-problem
// defaults listed in default_config().
struct ProblemConfig {
  std::string name = "lorenz96";  // lorenz96 | brusselator | advection | linear
  int fineP = 0;
  int coarseP = 0;
  int lorenzK = 40;
  double surrogateForcing = 7.5;
  double tEnd = 0.0;
  double mu = 0.5;             // linear fixture surrogate multiplier
  std::string projection;      // identity | mesh1d | mesh2d | file:<path>; "" = problem default
};

struct ProblemInstance {
  std::string label;
  double t0 = 0.0;
  double tEnd = 0.0;
  Vec y0;
  ModelPair models;  // prototype: copy and reset counters for each run
};

inline ProblemConfig apply_problem_defaults(ProblemConfig cfg) {
  if (cfg.name == "lorenz96") {
    if (cfg.tEnd == 0.0) cfg.tEnd = 0.5;  // short window keeps chaos off the error floor
    if (cfg.projection.empty()) cfg.projection = "identity";
  } else if (cfg.name == "brusselator") {
    if (cfg.fineP == 0) cfg.fineP = 65;
    if (cfg.coarseP == 0) cfg.coarseP = (cfg.fineP + 1) / 2;
    if (cfg.tEnd == 0.0) cfg.tEnd = 0.5;
    if (cfg.projection.empty()) cfg.projection = "mesh2d";
  } else if (cfg.name == "advection") {
    if (cfg.fineP == 0) cfg.fineP = 101;
    if (cfg.coarseP == 0) cfg.coarseP = (cfg.fineP + 1) / 2;
    if (cfg.tEnd == 0.0) cfg.tEnd = 0.5;
    if (cfg.projection.empty()) cfg.projection = "mesh2d";
  } else if (cfg.name == "linear") {
    if (cfg.tEnd == 0.0) cfg.tEnd = 1.0;
    if (cfg.projection.empty()) cfg.projection = "identity";
  } else {
    throw std::invalid_argument("unknown problem '" + cfg.name + "'");
  }
  return cfg;
}

namespace detail {

// Surrogate used when a non-native projection is requested: restrict the
// full tendency of the lifted state.  One surrogate evaluation is one
// callback invocation regardless of what it costs inside.
inline RhsFn galerkin_surrogate(RhsFn fullRhs, ProjectionPair proj) {
  return [fullRhs = std::move(fullRhs), proj = std::move(proj)](double t, const Vec& z, Vec& out) {
    Vec lifted, tendency;
    proj.lift(z, lifted);
    fullRhs(t, lifted, tendency);
    proj.restrict(tendency, out);
  };
}

inline ProjectionPair projection_from_spec(const std::string& spec, std::size_t dimFull) {
  if (spec == "identity") return identity_projection(dimFull);
  if (spec == "mesh1d") return nested_mesh_projection_1d(dimFull);
  if (spec.rfind("file:", 0) == 0) {
    ProjectionPair p = dense_basis_projection(spec.substr(5));
    if (p.dim_full() != dimFull)
      throw std::invalid_argument("projection file dimension " + std::to_string(p.dim_full()) +
                                  " does not match the problem dimension " +
                                  std::to_string(dimFull));
    return p;
  }
  throw std::invalid_argument("projection '" + spec + "' is not usable with this problem");
}

// Native pairing builds the problem's own surrogate; anything else falls
// back to the Galerkin surrogate behind the requested projection.
inline ModelPair with_projection(const std::string& spec, RhsFn fullRhs, RhsFn nativeSurrogate,
                                 ProjectionPair nativeProj, const std::string& nativeSpec,
                                 std::size_t dimFull) {
  if (spec == nativeSpec) return ModelPair(std::move(fullRhs), std::move(nativeSurrogate),
                                           std::move(nativeProj));
  ProjectionPair proj = projection_from_spec(spec, dimFull);
  RhsFn surrogate = galerkin_surrogate(fullRhs, proj);
  return ModelPair(std::move(fullRhs), std::move(surrogate), std::move(proj));
}

}  // namespace detail

inline ProblemInstance build_problem(const ProblemConfig& raw) {
  const ProblemConfig cfg = apply_problem_defaults(raw);
  ProblemInstance inst;
  inst.t0 = 0.0;
  inst.tEnd = cfg.tEnd;

  if (cfg.name == "lorenz96") {
    problems::Lorenz96Spec spec;
    spec.k = cfg.lorenzK;
    spec.surrogateForcing = cfg.surrogateForcing;
    inst.label = "lorenz96-k" + std::to_string(spec.k);
    inst.y0 = problems::lorenz96_initial_state(spec);
    auto full = [spec](double t, const Vec& x, Vec& out) {
      problems::lorenz96_rhs(spec, t, x, out);
    };
    auto native = [spec](double t, const Vec& x, Vec& out) {
      problems::lorenz96_surrogate_rhs(spec, t, x, out);
    };
    inst.models = detail::with_projection(cfg.projection, full, native,
                                          identity_projection(spec.k), "identity", spec.k);
  } else if (cfg.name == "brusselator") {
    problems::BrusselatorSpec fine;
    fine.p = cfg.fineP;
    inst.label = "brusselator-" + std::to_string(fine.p) + "-" + std::to_string(cfg.coarseP);
    inst.y0 = problems::brusselator_initial_state(fine);
    auto full = [fine](double t, const Vec& y, Vec& out) {
      problems::brusselator_rhs(fine, t, y, out);
    };
    if (cfg.projection == "mesh2d") {
      inst.models = problems::brusselator_multimesh_models(fine, cfg.coarseP);
    } else {
      ProjectionPair proj = detail::projection_from_spec(cfg.projection, inst.y0.size());
      inst.models = ModelPair(full, detail::galerkin_surrogate(full, proj), std::move(proj));
    }
  } else if (cfg.name == "advection") {
    problems::AdvectionSpec fine;
    fine.p = cfg.fineP;
    inst.label = "advection-" + std::to_string(fine.p) + "-" + std::to_string(cfg.coarseP);
    inst.y0 = problems::advection_initial_state(fine);
    auto full = [fine](double t, const Vec& u, Vec& out) {
      problems::advection_rhs(fine, t, u, out);
    };
    if (cfg.projection == "mesh2d") {
      inst.models = problems::advection_multimesh_models(fine, cfg.coarseP);
    } else {
      ProjectionPair proj = detail::projection_from_spec(cfg.projection, inst.y0.size());
      inst.models = ModelPair(full, detail::galerkin_surrogate(full, proj), std::move(proj));
    }
  } else {
    problems::LinearProblemSpec spec = problems::rotation_fixture(cfg.mu);
    inst.label = "linear-rotation";
    inst.y0 = {1.0, 0.3};
    auto full = [m = spec.m](double, const Vec& y, Vec& out) { m.apply(y, out); };
    auto native = [mu = spec.mu](double, const Vec& z, Vec& out) {
      out.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = mu * z[i];
    };
    inst.models = detail::with_projection(cfg.projection, full, native,
                                          identity_projection(2), "identity", 2);
  }
  return inst;
}

}  // namespace smmr::harness
