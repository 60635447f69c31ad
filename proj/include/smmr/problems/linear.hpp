#pragma once

#include <cmath>
#include <stdexcept>

#include "smmr/matrix.hpp"
#include "smmr/model.hpp"
#include "smmr/projection.hpp"
#include "smmr/vec.hpp"

namespace smmr::problems {

// Linear fixture y' = M y with the scalar-multiple surrogate f_s(z) = mu z
// on the identity projection.  A closed-form reference through the matrix
// exponential backs convergence and one-step error tests.
struct LinearProblemSpec {
  Matrix m;
  double mu = 0.0;
};

inline LinearProblemSpec rotation_fixture(double mu = 0.5) {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = -1.0;
  return LinearProblemSpec{m, mu};
}

inline ModelPair linear_models(const LinearProblemSpec& spec) {
  const Matrix m = spec.m;
  const double mu = spec.mu;
  auto full = [m](double, const Vec& y, Vec& out) { m.apply(y, out); };
  auto surrogate = [mu](double, const Vec& z, Vec& out) {
    out.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = mu * z[i];
  };
  return ModelPair(full, surrogate, identity_projection(spec.m.rows()));
}

// exp(M t) y0 by scaled Taylor series: the argument is halved until
// ||M t|| is small, the series summed to convergence, and the result
// squared back up.  Adequate for the small dense fixtures used in tests.
inline Vec expm_apply(const Matrix& m, double t, const Vec& y0) {
  const std::size_t n = m.rows();
  if (m.cols() != n || y0.size() != n) throw std::invalid_argument("expm_apply: size mismatch");
  double normScale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) rowsum += std::fabs(m(i, j) * t);
    normScale = std::max(normScale, rowsum);
  }
  int squarings = 0;
  double scale = 1.0;
  while (normScale * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }

  // E = exp(M t scale) via Taylor series
  Matrix e = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 40; ++k) {
    Matrix next(n, n);
    double maxTerm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += term(i, r) * m(r, j);
        s *= t * scale / k;
        next(i, j) = s;
        maxTerm = std::max(maxTerm, std::fabs(s));
      }
    term = next;
    e += term;
    if (maxTerm < 1e-18) break;
  }
  for (int q = 0; q < squarings; ++q) {
    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += e(i, r) * e(r, j);
        sq(i, j) = s;
      }
    e = sq;
  }
  Vec out;
  e.apply(y0, out);
  return out;
}

}  // namespace smmr::problems
