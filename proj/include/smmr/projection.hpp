#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "smmr/matrix.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Lift/restrict operator pair (V, W*) between the full space (dimension N)
// and the surrogate space (dimension S <= N), with W*V = I on the surrogate
// space.  Mesh transfer operators are matrix-free; dense bases store V.

enum class ProjectionKind { Identity, NestedMesh1D, NestedMesh2D, DenseBasis };

class ProjectionPair {
 public:
  using Apply = std::function<void(const Vec&, Vec&)>;

  ProjectionPair() = default;
  ProjectionPair(ProjectionKind kind, std::size_t dimFull, std::size_t dimSurrogate, Apply lift,
                 Apply restrict)
      : kind_(kind),
        dimFull_(dimFull),
        dimSurrogate_(dimSurrogate),
        lift_(std::move(lift)),
        restrict_(std::move(restrict)) {}

  ProjectionKind kind() const { return kind_; }
  std::size_t dim_full() const { return dimFull_; }
  std::size_t dim_surrogate() const { return dimSurrogate_; }

  // y = V z
  void lift(const Vec& z, Vec& y) const {
    if (z.size() != dimSurrogate_) throw std::invalid_argument("ProjectionPair::lift: bad size");
    lift_(z, y);
  }
  // z = W* y
  void restrict(const Vec& y, Vec& z) const {
    if (y.size() != dimFull_) throw std::invalid_argument("ProjectionPair::restrict: bad size");
    restrict_(y, z);
  }

  Vec lift(const Vec& z) const {
    Vec y;
    lift(z, y);
    return y;
  }
  Vec restrict(const Vec& y) const {
    Vec z;
    restrict(y, z);
    return z;
  }

 private:
  ProjectionKind kind_ = ProjectionKind::Identity;
  std::size_t dimFull_ = 0;
  std::size_t dimSurrogate_ = 0;
  Apply lift_;
  Apply restrict_;
};

inline ProjectionPair identity_projection(std::size_t n) {
  if (n < 1) throw std::invalid_argument("identity_projection: dimension must be positive");
  auto copy = [](const Vec& in, Vec& out) { out = in; };
  return ProjectionPair(ProjectionKind::Identity, n, n, copy, copy);
}

namespace detail {

inline std::size_t coarse_size_of(std::size_t fineCount, const char* who) {
  if (fineCount < 3 || fineCount % 2 == 0)
    throw std::invalid_argument(std::string(who) + ": fine size " + std::to_string(fineCount) +
                                " does not nest (need odd size 2*Pc-1 with Pc >= 2)");
  return (fineCount + 1) / 2;
}

}  // namespace detail

// Vertex-centered 1D grids including both boundary nodes; the coarse grid is
// every second fine node.  Restriction is injection ([0 1 0]); prolongation
// copies coincident values and averages neighbors ([1/2 1 1/2]), so the
// round trip is exact.
inline ProjectionPair nested_mesh_projection_1d(std::size_t fineCount) {
  const std::size_t pc = detail::coarse_size_of(fineCount, "nested_mesh_projection_1d");
  auto lift = [fineCount, pc](const Vec& z, Vec& y) {
    y.resize(fineCount);
    for (std::size_t i = 0; i < pc; ++i) y[2 * i] = z[i];
    for (std::size_t i = 0; i + 1 < pc; ++i) y[2 * i + 1] = 0.5 * (z[i] + z[i + 1]);
  };
  auto restrict = [fineCount, pc](const Vec& y, Vec& z) {
    z.resize(pc);
    for (std::size_t i = 0; i < pc; ++i) z[i] = y[2 * i];
  };
  return ProjectionPair(ProjectionKind::NestedMesh1D, fineCount, pc, lift, restrict);
}

// Tensor product of the 1D stencils on a fineP x fineP vertex-centered grid,
// applied independently to each of `fields` equally-sized state blocks
// (node index ix + iy*P per block).  Boundary nodes have full coarse
// support, so no extrapolation is involved.
inline ProjectionPair nested_mesh_projection_2d(std::size_t fineP, std::size_t fields) {
  const std::size_t pc = detail::coarse_size_of(fineP, "nested_mesh_projection_2d");
  if (fields < 1) throw std::invalid_argument("nested_mesh_projection_2d: fields must be >= 1");
  const std::size_t nf = fineP * fineP;
  const std::size_t ns = pc * pc;
  auto lift = [fineP, pc, fields, nf, ns](const Vec& z, Vec& y) {
    y.resize(fields * nf);
    for (std::size_t q = 0; q < fields; ++q) {
      const double* zq = z.data() + q * ns;
      double* yq = y.data() + q * nf;
      for (std::size_t iy = 0; iy < pc; ++iy)
        for (std::size_t ix = 0; ix < pc; ++ix) yq[2 * iy * fineP + 2 * ix] = zq[iy * pc + ix];
      for (std::size_t iy = 0; iy < pc; ++iy)
        for (std::size_t ix = 0; ix + 1 < pc; ++ix)
          yq[2 * iy * fineP + 2 * ix + 1] = 0.5 * (zq[iy * pc + ix] + zq[iy * pc + ix + 1]);
      for (std::size_t iy = 0; iy + 1 < pc; ++iy)
        for (std::size_t ix = 0; ix < pc; ++ix)
          yq[(2 * iy + 1) * fineP + 2 * ix] = 0.5 * (zq[iy * pc + ix] + zq[(iy + 1) * pc + ix]);
      for (std::size_t iy = 0; iy + 1 < pc; ++iy)
        for (std::size_t ix = 0; ix + 1 < pc; ++ix)
          yq[(2 * iy + 1) * fineP + 2 * ix + 1] =
              0.25 * (zq[iy * pc + ix] + zq[iy * pc + ix + 1] + zq[(iy + 1) * pc + ix] +
                      zq[(iy + 1) * pc + ix + 1]);
    }
  };
  auto restrict = [fineP, pc, fields, nf, ns](const Vec& y, Vec& z) {
    z.resize(fields * ns);
    for (std::size_t q = 0; q < fields; ++q) {
      const double* yq = y.data() + q * nf;
      double* zq = z.data() + q * ns;
      for (std::size_t iy = 0; iy < pc; ++iy)
        for (std::size_t ix = 0; ix < pc; ++ix) zq[iy * pc + ix] = yq[2 * iy * fineP + 2 * ix];
    }
  };
  return ProjectionPair(ProjectionKind::NestedMesh2D, fields * nf, fields * ns, lift, restrict);
}

// Orthonormal dense basis: lift multiplies by V, restrict by V^T.
// Construction verifies max |V^T V - I| <= 1e-10.
inline ProjectionPair dense_basis_projection(Matrix v) {
  const std::size_t n = v.rows();
  const std::size_t s = v.cols();
  if (s < 1 || s > n)
    throw std::invalid_argument("dense_basis_projection: need 1 <= S <= N");
  double worst = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += v(r, i) * v(r, j);
      worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  if (worst > 1e-10)
    throw std::invalid_argument(
        "dense_basis_projection: columns not orthonormal (max |V^T V - I| = " +
        std::to_string(worst) + ")");
  auto shared = std::make_shared<Matrix>(std::move(v));
  auto lift = [shared](const Vec& z, Vec& y) { shared->apply(z, y); };
  auto restrict = [shared](const Vec& y, Vec& z) { shared->apply_transpose(y, z); };
  return ProjectionPair(ProjectionKind::DenseBasis, n, s, lift, restrict);
}

// Basis file: header "N S", then N rows of S whitespace-separated numbers;
// column j holds basis vector j.
inline Matrix load_basis_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_basis_matrix: cannot open '" + path + "'");
  std::size_t n = 0, s = 0;
  if (!(in >> n >> s) || n == 0 || s == 0)
    throw std::runtime_error("load_basis_matrix: malformed header in '" + path + "'");
  Matrix v(n, s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (!(in >> v(i, j)))
        throw std::runtime_error("load_basis_matrix: truncated data in '" + path + "' at row " +
                                 std::to_string(i + 1));
  return v;
}

inline ProjectionPair dense_basis_projection(const std::string& path) {
  return dense_basis_projection(load_basis_matrix(path));
}

}  // namespace smmr
