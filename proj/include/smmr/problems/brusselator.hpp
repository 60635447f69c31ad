#pragma once

#include <stdexcept>
#include <string>

#include "smmr/model.hpp"
#include "smmr/projection.hpp"
#include "smmr/vec.hpp"

namespace smmr::problems {

// Reaction-diffusion system on the unit square,
//     u_t = alpha lap(u) + 1 + u^2 v - 4.4 u,
//     v_t = alpha lap(v) + 3.4 u - u^2 v,
// with zero Neumann boundaries, discretized by the 5-point Laplacian on a
// vertex-centered P x P grid (boundary nodes included, spacing 1/(P-1))
// with mirrored ghost values.  State layout: u block then v block, node
// index ix + iy*P, x = ix*h, y = iy*h.  The multimesh surrogate is the same
// discretization on a nested coarser grid (coarseP = (P+1)/2 etc.).
struct BrusselatorSpec {
  int p = 65;
  double alpha = 0.002;
  double reactA = 4.4;
  double reactB = 3.4;
  double tEnd = 7.5;
};

inline void brusselator_rhs(const BrusselatorSpec& spec, double /*t*/, const Vec& y, Vec& out) {
  const int p = spec.p;
  const int nn = p * p;
  if (static_cast<int>(y.size()) != 2 * nn)
    throw std::invalid_argument("brusselator_rhs: state dimension mismatch");
  out.resize(2 * nn);
  const double h = 1.0 / (p - 1);
  const double diff = spec.alpha / (h * h);
  const double* u = y.data();
  const double* v = y.data() + nn;
  double* du = out.data();
  double* dv = out.data() + nn;
  for (int iy = 0; iy < p; ++iy) {
    const int ym = (iy > 0 ? iy - 1 : 1) * p;
    const int yp = (iy < p - 1 ? iy + 1 : p - 2) * p;
    const int row = iy * p;
    for (int ix = 0; ix < p; ++ix) {
      const int xm = ix > 0 ? ix - 1 : 1;
      const int xp = ix < p - 1 ? ix + 1 : p - 2;
      const int c = row + ix;
      const double uc = u[c];
      const double vc = v[c];
      const double lapU = u[ym + ix] + u[yp + ix] + u[row + xm] + u[row + xp] - 4.0 * uc;
      const double lapV = v[ym + ix] + v[yp + ix] + v[row + xm] + v[row + xp] - 4.0 * vc;
      const double uuv = uc * uc * vc;
      du[c] = diff * lapU + 1.0 + uuv - spec.reactA * uc;
      dv[c] = diff * lapV + spec.reactB * uc - uuv;
    }
  }
}

// u(0,x,y) = 0.5 + y,  v(0,x,y) = 1 + 5x
inline Vec brusselator_initial_state(const BrusselatorSpec& spec) {
  const int p = spec.p;
  const double h = 1.0 / (p - 1);
  Vec y(2 * p * p);
  for (int iy = 0; iy < p; ++iy)
    for (int ix = 0; ix < p; ++ix) {
      y[iy * p + ix] = 0.5 + iy * h;
      y[p * p + iy * p + ix] = 1.0 + 5.0 * ix * h;
    }
  return y;
}

inline BrusselatorSpec coarsened(const BrusselatorSpec& fine, int coarseP) {
  if (2 * coarseP - 1 != fine.p)
    throw std::invalid_argument("brusselator: coarse grid " + std::to_string(coarseP) +
                                " does not nest in fine grid " + std::to_string(fine.p));
  BrusselatorSpec coarse = fine;
  coarse.p = coarseP;
  return coarse;
}

// Full model on the fine grid, surrogate on the nested coarse grid.
inline ModelPair brusselator_multimesh_models(const BrusselatorSpec& fine, int coarseP) {
  const BrusselatorSpec coarse = coarsened(fine, coarseP);
  auto full = [fine](double t, const Vec& y, Vec& out) { brusselator_rhs(fine, t, y, out); };
  auto surrogate = [coarse](double t, const Vec& z, Vec& out) {
    brusselator_rhs(coarse, t, z, out);
  };
  return ModelPair(full, surrogate, nested_mesh_projection_2d(fine.p, 2));
}

}  // namespace smmr::problems
