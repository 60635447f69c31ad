#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "smmr/model.hpp"
#include "smmr/projection.hpp"
#include "smmr/vec.hpp"

namespace smmr::problems {

// Solid-body rotation (Molenkamp-Crowley) transport on the unit square,
//     u_t + a . grad(u) = 0,    a(x, y) = 2 pi (y - 1/2, -(x - 1/2)),
// zero Dirichlet boundary (boundary rows produce zero tendency), first-order
// upwind differences on a vertex-centered P x P grid, node index ix + iy*P.
// The initial bump rotates clockwise about the center once per time unit.
struct AdvectionSpec {
  int p = 101;
  double tEnd = 2.0;
};

inline void advection_rhs(const AdvectionSpec& spec, double /*t*/, const Vec& u, Vec& out) {
  const int p = spec.p;
  if (static_cast<int>(u.size()) != p * p)
    throw std::invalid_argument("advection_rhs: state dimension mismatch");
  out.assign(p * p, 0.0);
  const double h = 1.0 / (p - 1);
  const double twoPi = 2.0 * std::numbers::pi;
  for (int iy = 1; iy < p - 1; ++iy) {
    const double y = iy * h;
    const double ax = twoPi * (y - 0.5);
    for (int ix = 1; ix < p - 1; ++ix) {
      const double x = ix * h;
      const double ay = -twoPi * (x - 0.5);
      const int c = iy * p + ix;
      const double dudx = ax > 0.0 ? (u[c] - u[c - 1]) / h : (u[c + 1] - u[c]) / h;
      const double dudy = ay > 0.0 ? (u[c] - u[c - p]) / h : (u[c + p] - u[c]) / h;
      out[c] = -(ax * dudx + ay * dudy);
    }
  }
}

// u(0,x,y) = exp(-100 ((x - 0.35)^2 + (y - 0.35)^2))
inline Vec advection_initial_state(const AdvectionSpec& spec) {
  const int p = spec.p;
  const double h = 1.0 / (p - 1);
  Vec u(p * p);
  for (int iy = 0; iy < p; ++iy)
    for (int ix = 0; ix < p; ++ix) {
      const double x = ix * h;
      const double y = iy * h;
      u[iy * p + ix] =
          std::exp(-100.0 * ((x - 0.35) * (x - 0.35) + (y - 0.35) * (y - 0.35)));
    }
  return u;
}

inline ModelPair advection_multimesh_models(const AdvectionSpec& fine, int coarseP) {
  if (2 * coarseP - 1 != fine.p)
    throw std::invalid_argument("advection: coarse grid " + std::to_string(coarseP) +
                                " does not nest in fine grid " + std::to_string(fine.p));
  AdvectionSpec coarse = fine;
  coarse.p = coarseP;
  auto full = [fine](double t, const Vec& u, Vec& out) { advection_rhs(fine, t, u, out); };
  auto surrogate = [coarse](double t, const Vec& z, Vec& out) { advection_rhs(coarse, t, z, out); };
  return ModelPair(full, surrogate, nested_mesh_projection_2d(fine.p, 1));
}

}  // namespace smmr::problems
