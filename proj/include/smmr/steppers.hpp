#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smmr/coupling.hpp"
#include "smmr/errors.hpp"
#include "smmr/inner.hpp"
#include "smmr/model.hpp"
#include "smmr/rk.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Surrogate-model multirate steppers.
//
// Decoupled form: one modified surrogate ODE per slow stage.  For stage i
// with stage time T_i = t_n + c_i H and abscissa gap deltaC_i:
//
//     k_i = f(T_i, y),   kHat_i = W* k_i,   lHat_i = kHat_i - f_s(T_i, yHat),
//     w    = yHat + H sum_{j<=i} GammaBar(i,j) kHat_j,
//     y   <- y    + H sum_{j<=i} GammaBar(i,j) k_j,
//     yHat <- solve  z' = deltaC_i f_s(T_i + deltaC_i theta, z)
//                       + sum_{j<=i} gamma_{i,j}(theta/H) lHat_j   on [0, H],
//     y   <- y + V (yHat - w).
//
// Step predictor-corrector form: all s predictor stages are classic explicit
// RK stages of the full model (mirrored in the surrogate space through the
// restricted stage tendencies), followed by a single corrector ODE over
// [0, H] with unit time scale and all s forcing terms.
//
// In both forms yHat stays equal to W* y after every completed update
// because W*V = I; the bookkeeping exploits that instead of re-restricting.

struct StepState {
  double t = 0.0;
  Vec y;     // full state
  Vec yHat;  // cached restriction W* y
};

inline StepState make_step_state(const ModelPair& models, double t0, Vec y0) {
  StepState s;
  s.t = t0;
  s.yHat = models.projection().restrict(y0);
  s.y = std::move(y0);
  return s;
}

// Stage values and derivatives of the most recent macro step.
struct StepTrace {
  std::vector<Vec> stageValues;  // Y_i at which k_i was evaluated
  std::vector<Vec> stageDerivs;  // k_i = f(T_i, Y_i)
};

namespace detail {

inline void check_sm_args(const CouplingScheme& scheme, const InnerSolverConfig& inner,
                          CouplingKind wantKind, const char* who) {
  if (scheme.kind != wantKind)
    throw std::invalid_argument(std::string(who) + ": scheme '" + scheme.name +
                                "' has the wrong coupling kind");
  if (inner.method.order < scheme.order())
    throw std::invalid_argument(std::string(who) + ": inner method order " +
                                std::to_string(inner.method.order) +
                                " is below the scheme order " + std::to_string(scheme.order()));
}

}  // namespace detail

class SmStepWorkspace {
 public:
  void prepare(const CouplingScheme& scheme) {
    if (&scheme == scheme_) return;
    scheme_ = &scheme;
    gammaBar_ = gamma_bar(scheme);
    const std::size_t s = scheme.stages();
    ks_.resize(s);
    kHats_.resize(s);
    ellHats_.resize(s);
    terms_.resize(s);
  }

  void mri_step(const CouplingScheme& scheme, const InnerSolverConfig& inner, ModelPair& models,
                StepState& state, double H, StepTrace* trace = nullptr) {
    detail::check_sm_args(scheme, inner, CouplingKind::DecoupledMri, "sm_mri_gark_step");
    if (!(H > 0.0)) throw std::invalid_argument("sm_mri_gark_step: H must be positive");
    prepare(scheme);
    const std::size_t s = scheme.stages();
    const ProjectionPair& proj = models.projection();
    const int degp1 = scheme.coupling.degree() + 1;
    if (trace) {
      trace->stageValues.assign(s, Vec());
      trace->stageDerivs.assign(s, Vec());
    }

    auto fs = [&models](double t, const Vec& z, Vec& out) { models.eval_surrogate(t, z, out); };

    for (std::size_t i = 0; i < s; ++i) {
      const double ti = state.t + scheme.tableau.c[i] * H;
      models.eval_full(ti, state.y, ks_[i]);
      if (!all_finite(ks_[i]))
        throw IntegrationError("non-finite full-model derivative", ti, -1, static_cast<int>(i));
      proj.restrict(ks_[i], kHats_[i]);
      models.eval_surrogate(ti, state.yHat, fs0_);
      ellHats_[i] = kHats_[i];
      for (std::size_t r = 0; r < ellHats_[i].size(); ++r) ellHats_[i][r] -= fs0_[r];
      if (trace) {
        trace->stageValues[i] = state.y;
        trace->stageDerivs[i] = ks_[i];
      }

      w_ = state.yHat;
      for (std::size_t j = 0; j <= i; ++j)
        if (gammaBar_(i, j) != 0.0) axpy(H * gammaBar_(i, j), kHats_[j], w_);
      for (std::size_t j = 0; j <= i; ++j)
        if (gammaBar_(i, j) != 0.0) axpy(H * gammaBar_(i, j), ks_[j], state.y);

      for (std::size_t j = 0; j <= i; ++j) {
        terms_[j].gamma.resize(degp1);
        for (int k = 0; k < degp1; ++k) terms_[j].gamma[k] = scheme.coupling.coeff[k](i, j);
        terms_[j].load = ellHats_[j];
      }
      inner_.solve(inner, fs, std::span<const ForcingTerm>(terms_.data(), i + 1),
                   scheme.deltaC[i], ti, H, state.yHat, zNew_, &fs0_);
      state.yHat.swap(zNew_);

      diff_ = state.yHat;
      for (std::size_t r = 0; r < diff_.size(); ++r) diff_[r] -= w_[r];
      proj.lift(diff_, corr_);
      axpy(1.0, corr_, state.y);
    }
    state.t += H;
  }

  void spc_step(const CouplingScheme& scheme, const InnerSolverConfig& inner, ModelPair& models,
                StepState& state, double H, StepTrace* trace = nullptr) {
    detail::check_sm_args(scheme, inner, CouplingKind::StepPredictorCorrector,
                          "sm_spc_mri_gark_step");
    if (!(H > 0.0)) throw std::invalid_argument("sm_spc_mri_gark_step: H must be positive");
    prepare(scheme);
    const std::size_t s = scheme.stages();
    const ProjectionPair& proj = models.projection();
    const RkTableau& tab = scheme.tableau;
    const int degp1 = scheme.coupling.degree() + 1;
    if (trace) {
      trace->stageValues.assign(s, Vec());
      trace->stageDerivs.assign(s, Vec());
    }

    auto fs = [&models](double t, const Vec& z, Vec& out) { models.eval_surrogate(t, z, out); };

    for (std::size_t i = 0; i < s; ++i) {
      const double ti = state.t + tab.c[i] * H;
      stageY_ = state.y;
      stageYHat_ = state.yHat;
      for (std::size_t j = 0; j < i; ++j) {
        if (tab.a(i, j) == 0.0) continue;
        axpy(H * tab.a(i, j), ks_[j], stageY_);
        axpy(H * tab.a(i, j), kHats_[j], stageYHat_);
      }
      models.eval_full(ti, stageY_, ks_[i]);
      if (!all_finite(ks_[i]))
        throw IntegrationError("non-finite full-model derivative", ti, -1, static_cast<int>(i));
      proj.restrict(ks_[i], kHats_[i]);
      models.eval_surrogate(ti, stageYHat_, fs0_);
      ellHats_[i] = kHats_[i];
      for (std::size_t r = 0; r < ellHats_[i].size(); ++r) ellHats_[i][r] -= fs0_[r];
      if (trace) {
        trace->stageValues[i] = stageY_;
        trace->stageDerivs[i] = ks_[i];
      }
    }

    w_ = state.yHat;
    for (std::size_t j = 0; j < s; ++j)
      if (tab.b[j] != 0.0) axpy(H * tab.b[j], kHats_[j], w_);
    for (std::size_t j = 0; j < s; ++j)
      if (tab.b[j] != 0.0) axpy(H * tab.b[j], ks_[j], state.y);

    for (std::size_t j = 0; j < s; ++j) {
      terms_[j].gamma.resize(degp1);
      for (int k = 0; k < degp1; ++k) terms_[j].gamma[k] = scheme.coupling.coeff[k](0, j);
      terms_[j].load = ellHats_[j];
    }
    inner_.solve(inner, fs, std::span<const ForcingTerm>(terms_.data(), s), 1.0, state.t, H,
                 state.yHat, zNew_);
    state.yHat.swap(zNew_);

    diff_ = state.yHat;
    for (std::size_t r = 0; r < diff_.size(); ++r) diff_[r] -= w_[r];
    proj.lift(diff_, corr_);
    axpy(1.0, corr_, state.y);
    state.t += H;
  }

 private:
  const CouplingScheme* scheme_ = nullptr;
  Matrix gammaBar_;
  std::vector<Vec> ks_, kHats_, ellHats_;
  std::vector<ForcingTerm> terms_;
  InnerWorkspace inner_;
  Vec w_, fs0_, zNew_, diff_, corr_, stageY_, stageYHat_;
};

// Single-step entry points.
inline StepState sm_mri_gark_step(const CouplingScheme& scheme, const InnerSolverConfig& inner,
                                  ModelPair& models, StepState state, double H,
                                  StepTrace* trace = nullptr) {
  SmStepWorkspace ws;
  ws.mri_step(scheme, inner, models, state, H, trace);
  return state;
}

inline StepState sm_spc_mri_gark_step(const CouplingScheme& scheme, const InnerSolverConfig& inner,
                                      ModelPair& models, StepState state, double H,
                                      StepTrace* trace = nullptr) {
  SmStepWorkspace ws;
  ws.spc_step(scheme, inner, models, state, H, trace);
  return state;
}

// A time stepper: either a classic explicit RK method on the full model, or
// one of the two surrogate-model multirate forms.
struct Stepper {
  enum class Kind { PlainRk, SmMriGark, SmSpcMriGark };
  Kind kind = Kind::PlainRk;
  RkTableau rk;
  std::optional<CouplingScheme> scheme;
  InnerSolverConfig inner{forward_euler(), 1};
};

inline Stepper plain_rk_stepper(RkTableau tableau) {
  Stepper s;
  s.kind = Stepper::Kind::PlainRk;
  s.rk = std::move(tableau);
  return s;
}

inline Stepper sm_stepper(CouplingScheme scheme, InnerSolverConfig inner) {
  Stepper s;
  s.kind = scheme.kind == CouplingKind::DecoupledMri ? Stepper::Kind::SmMriGark
                                                     : Stepper::Kind::SmSpcMriGark;
  if (inner.method.order < scheme.order())
    throw std::invalid_argument("sm_stepper: inner method order below scheme order");
  s.scheme = std::move(scheme);
  s.inner = std::move(inner);
  return s;
}

inline Stepper sm_stepper(CouplingScheme scheme, int microSteps = 1) {
  InnerSolverConfig inner = default_inner_config(scheme.order(), microSteps);
  return sm_stepper(std::move(scheme), std::move(inner));
}

struct IntegrateOptions {
  int sampleStride = 0;             // record (t, y) every k-th step when > 0
  bool checkCacheCoherence = false; // recompute W*y each step and compare with yHat
  StepTrace* trace = nullptr;       // filled with the final step's stages
};

struct Trajectory {
  double t = 0.0;
  Vec y;
  EvalCounters evals;  // counts accumulated by this integration only
  double wallSeconds = 0.0;
  std::vector<std::pair<double, Vec>> samples;
};

// Fixed-step driver: nSteps equal macro steps of H = (tEnd - t0)/nSteps.
inline Trajectory integrate(const Stepper& stepper, ModelPair& models, double t0, double tEnd,
                            const Vec& y0, int nSteps, const IntegrateOptions& options = {}) {
  if (nSteps < 1) throw std::invalid_argument("integrate: nSteps must be >= 1");
  if (!(tEnd > t0)) throw std::invalid_argument("integrate: tEnd must exceed t0");
  const double H = (tEnd - t0) / nSteps;
  const EvalCounters before = models.counters();
  const auto clockStart = std::chrono::steady_clock::now();

  Trajectory out;
  if (stepper.kind == Stepper::Kind::PlainRk) {
    RkWorkspace ws;
    Vec y = y0, next;
    auto rhs = [&models](double t, const Vec& y_, Vec& dy) { models.eval_full(t, y_, dy); };
    for (int n = 0; n < nSteps; ++n) {
      try {
        ws.step(stepper.rk, rhs, t0 + n * H, y, H, next);
      } catch (const IntegrationError& e) {
        throw e.with_macro_step(n);
      }
      y.swap(next);
      if (options.sampleStride > 0 && (n + 1) % options.sampleStride == 0)
        out.samples.emplace_back(t0 + (n + 1) * H, y);
    }
    out.y = std::move(y);
  } else {
    const CouplingScheme& scheme = *stepper.scheme;
    SmStepWorkspace ws;
    StepState state = make_step_state(models, t0, y0);
    for (int n = 0; n < nSteps; ++n) {
      state.t = t0 + n * H;
      try {
        if (stepper.kind == Stepper::Kind::SmMriGark)
          ws.mri_step(scheme, stepper.inner, models, state, H, options.trace);
        else
          ws.spc_step(scheme, stepper.inner, models, state, H, options.trace);
      } catch (const IntegrationError& e) {
        throw e.with_macro_step(n);
      }
      if (options.checkCacheCoherence) {
        const Vec recomputed = models.projection().restrict(state.y);
        double worst = 0.0;
        for (std::size_t r = 0; r < recomputed.size(); ++r)
          worst = std::max(worst, std::fabs(recomputed[r] - state.yHat[r]));
        const double scale = std::max(1.0, norm_inf(state.yHat));
        if (worst > 1e-12 * scale)
          throw std::logic_error("integrate: yHat cache diverged from W*y (|diff| = " +
                                 std::to_string(worst) + ") at macro step " + std::to_string(n));
      }
      if (options.sampleStride > 0 && (n + 1) % options.sampleStride == 0)
        out.samples.emplace_back(t0 + (n + 1) * H, state.y);
    }
    out.y = std::move(state.y);
  }

  const auto clockEnd = std::chrono::steady_clock::now();
  out.t = tEnd;
  const EvalCounters after = models.counters();
  out.evals.full = after.full - before.full;
  out.evals.surrogate = after.surrogate - before.surrogate;
  out.wallSeconds = std::chrono::duration<double>(clockEnd - clockStart).count();
  return out;
}

}  // namespace smmr
