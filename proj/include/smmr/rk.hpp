#pragma once

#include <cstddef>
#include <vector>

#include "smmr/errors.hpp"
#include "smmr/model.hpp"
#include "smmr/tableau.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Explicit Runge-Kutta stage recursion with reusable stage storage.
class RkWorkspace {
 public:
  // One step y -> y + h * sum_j b_j k_j; exactly s RHS evaluations.
  // `rhs` may be any callable (t, y, dydt).
  template <class Rhs>
  void step(const RkTableau& tab, Rhs&& rhs, double t, const Vec& y, double h, Vec& out) {
    const std::size_t s = tab.stages();
    k_.resize(s);
    out = y;
    for (std::size_t i = 0; i < s; ++i) {
      stage_ = y;
      for (std::size_t j = 0; j < i; ++j)
        if (tab.a(i, j) != 0.0) axpy(h * tab.a(i, j), k_[j], stage_);
      rhs(t + tab.c[i] * h, stage_, k_[i]);
      if (!all_finite(k_[i]))
        throw IntegrationError("non-finite stage derivative", t, -1, static_cast<int>(i));
      axpy(h * tab.b[i], k_[i], out);
    }
  }

 private:
  std::vector<Vec> k_;
  Vec stage_;
};

template <class Rhs>
Vec rk_step(const RkTableau& tab, Rhs&& rhs, double t, const Vec& y, double h) {
  RkWorkspace ws;
  Vec out;
  ws.step(tab, rhs, t, y, h, out);
  return out;
}

// Fixed-step driver on a plain callable RHS.
template <class Rhs>
Vec rk_integrate(const RkTableau& tab, Rhs&& rhs, double t0, double tEnd, const Vec& y0,
                 int nSteps) {
  if (nSteps < 1) throw std::invalid_argument("rk_integrate: nSteps must be >= 1");
  const double h = (tEnd - t0) / nSteps;
  RkWorkspace ws;
  Vec y = y0, next;
  for (int n = 0; n < nSteps; ++n) {
    try {
      ws.step(tab, rhs, t0 + n * h, y, h, next);
    } catch (const IntegrationError& e) {
      throw e.with_macro_step(n);
    }
    y.swap(next);
  }
  return y;
}

}  // namespace smmr
