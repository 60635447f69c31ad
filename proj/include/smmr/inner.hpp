#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "smmr/errors.hpp"
#include "smmr/tableau.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Solver configuration for the modified surrogate ("fast") ODEs: an explicit
// Runge-Kutta method applied over m equal micro-steps of the macro interval.
// The method order must be at least the coupling scheme's order so the macro
// convergence order is not polluted; the default choice is one order higher.
struct InnerSolverConfig {
  RkTableau method;
  int microSteps = 1;
};

inline InnerSolverConfig default_inner_config(int schemeOrder, int microSteps = 1) {
  return InnerSolverConfig{tableau_of_order(schemeOrder + 1), microSteps};
}

// One polynomially-weighted constant forcing term gamma(theta/H) * load,
// with gamma(tau) = sum_k gamma[k] tau^k.
struct ForcingTerm {
  std::vector<double> gamma;
  Vec load;
};

// Integrates
//     z'(theta) = scale * f_s(tOffset + scale*theta, z)
//               + sum_j gamma_j(theta/H) * load_j,      theta in [0, H],
// with m equal micro-steps of the configured explicit method.  The surrogate
// RHS is invoked exactly m*s times per call; when `fsAtStart` is supplied it
// is used as the already-known value of f_s(tOffset, z0) for the very first
// stage, dropping the count to m*s - 1 (the first stage of an explicit
// tableau evaluates at exactly that point).
class InnerWorkspace {
 public:
  template <class Fs>
  void solve(const InnerSolverConfig& config, Fs&& fs, std::span<const ForcingTerm> forcing,
             double scale, double tOffset, double H, const Vec& z0, Vec& zOut,
             const Vec* fsAtStart = nullptr) {
    if (!(H > 0.0)) throw std::invalid_argument("inner_solve: H must be positive");
    if (config.microSteps < 1)
      throw std::invalid_argument("inner_solve: microSteps must be >= 1");
    const RkTableau& tab = config.method;
    const std::size_t s = tab.stages();
    const std::size_t dim = z0.size();

    collapse_forcing(forcing, dim);

    const int m = config.microSteps;
    const double h = H / m;
    zOut = z0;
    k_.resize(s);
    for (int micro = 0; micro < m; ++micro) {
      const double theta0 = micro * h;
      for (std::size_t i = 0; i < s; ++i) {
        const double theta = theta0 + tab.c[i] * h;
        stage_ = zOut;
        for (std::size_t j = 0; j < i; ++j)
          if (tab.a(i, j) != 0.0) axpy(h * tab.a(i, j), k_[j], stage_);
        if (micro == 0 && i == 0 && fsAtStart != nullptr) {
          fsBuf_ = *fsAtStart;
        } else {
          fs(tOffset + scale * theta, stage_, fsBuf_);
        }
        eval_forcing(theta / H, dim, k_[i]);
        for (std::size_t r = 0; r < dim; ++r) k_[i][r] += scale * fsBuf_[r];
      }
      for (std::size_t i = 0; i < s; ++i) axpy(h * tab.b[i], k_[i], zOut);
      if (!all_finite(zOut))
        throw IntegrationError("non-finite inner state", tOffset + scale * (theta0 + h), -1, -1,
                               micro);
    }
  }

 private:
  void collapse_forcing(std::span<const ForcingTerm> forcing, std::size_t dim) {
    std::size_t degp1 = 0;
    for (const ForcingTerm& t : forcing) degp1 = std::max(degp1, t.gamma.size());
    poly_.assign(degp1, Vec(dim, 0.0));
    for (const ForcingTerm& t : forcing) {
      if (t.load.size() != dim)
        throw std::invalid_argument("inner_solve: forcing load dimension mismatch");
      if (!all_finite(t.load)) throw std::invalid_argument("inner_solve: non-finite forcing load");
      for (std::size_t k = 0; k < t.gamma.size(); ++k)
        if (t.gamma[k] != 0.0) axpy(t.gamma[k], t.load, poly_[k]);
    }
  }

  // out = sum_k poly_[k] tau^k by Horner
  void eval_forcing(double tau, std::size_t dim, Vec& out) {
    if (poly_.empty()) {
      out.assign(dim, 0.0);
      return;
    }
    out = poly_.back();
    for (std::size_t k = poly_.size() - 1; k-- > 0;)
      for (std::size_t r = 0; r < dim; ++r) out[r] = out[r] * tau + poly_[k][r];
  }

  std::vector<Vec> poly_;  // collapsed per-degree loads
  std::vector<Vec> k_;
  Vec stage_;
  Vec fsBuf_;
};

template <class Fs>
Vec inner_solve(const InnerSolverConfig& config, Fs&& fs, std::span<const ForcingTerm> forcing,
                double scale, double tOffset, double H, const Vec& z0) {
  InnerWorkspace ws;
  Vec out;
  ws.solve(config, fs, forcing, scale, tOffset, H, z0, out);
  return out;
}

}  // namespace smmr
