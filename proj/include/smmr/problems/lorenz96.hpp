#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "smmr/model.hpp"
#include "smmr/projection.hpp"
#include "smmr/rk.hpp"
#include "smmr/tableau.hpp"
#include "smmr/vec.hpp"

namespace smmr::problems {

// Cyclic quadratic system
//     dX_k/dt = -X_{k-2} X_{k-1} + X_{k-1} X_{k+1} - X_k + F,
// indices mod K.  The surrogate shares the state space (identity projection)
// and the same form with a perturbed forcing term.
struct Lorenz96Spec {
  int k = 40;
  double forcing = 8.0;
  double surrogateForcing = 7.5;
};

inline void lorenz96_rhs_with_forcing(int k, double forcing, const Vec& x, Vec& out) {
  out.resize(k);
  for (int i = 0; i < k; ++i) {
    const int im2 = (i - 2 + k) % k;
    const int im1 = (i - 1 + k) % k;
    const int ip1 = (i + 1) % k;
    out[i] = -x[im2] * x[im1] + x[im1] * x[ip1] - x[i] + forcing;
  }
}

inline void lorenz96_rhs(const Lorenz96Spec& spec, double /*t*/, const Vec& x, Vec& out) {
  if (static_cast<int>(x.size()) != spec.k)
    throw std::invalid_argument("lorenz96_rhs: state dimension mismatch");
  lorenz96_rhs_with_forcing(spec.k, spec.forcing, x, out);
}

inline void lorenz96_surrogate_rhs(const Lorenz96Spec& spec, double /*t*/, const Vec& x, Vec& out) {
  if (static_cast<int>(x.size()) != spec.k)
    throw std::invalid_argument("lorenz96_surrogate_rhs: state dimension mismatch");
  lorenz96_rhs_with_forcing(spec.k, spec.surrogateForcing, x, out);
}

// Rest state at the forcing value with component 20 (1-based) nudged.
inline Vec lorenz96_perturbed_rest_state(const Lorenz96Spec& spec) {
  Vec x(spec.k, spec.forcing);
  if (spec.k >= 20) x[19] += 0.008;
  return x;
}

// The benchmark initial condition: the perturbed rest state propagated for
// 2 time units to expel transients.  Computed once per (K, F) and cached.
inline Vec lorenz96_initial_state(const Lorenz96Spec& spec) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, Vec> cache;
  const std::pair<int, double> key{spec.k, spec.forcing};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto rhs = [&spec](double, const Vec& x, Vec& out) {
    lorenz96_rhs_with_forcing(spec.k, spec.forcing, x, out);
  };
  Vec spun = rk_integrate(ralston3(), rhs, 0.0, 2.0, lorenz96_perturbed_rest_state(spec), 2048);
  cache.emplace(key, spun);
  return spun;
}

inline ModelPair lorenz96_models(const Lorenz96Spec& spec) {
  auto full = [spec](double t, const Vec& x, Vec& out) { lorenz96_rhs(spec, t, x, out); };
  auto surrogate = [spec](double t, const Vec& x, Vec& out) {
    lorenz96_surrogate_rhs(spec, t, x, out);
  };
  return ModelPair(full, surrogate, identity_projection(spec.k));
}

}  // namespace smmr::problems
