#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smmr/matrix.hpp"
#include "smmr/rational.hpp"
#include "smmr/tableau.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Multirate coupling coefficients on top of a base Runge-Kutta tableau.
//
// The coupling is a matrix-valued polynomial
//     Gamma(t)     = sum_k Gamma^k t^k,
//     GammaTilde(t)= sum_k Gamma^k t^(k+1)/(k+1),
//     GammaBar     = GammaTilde(1),
// with s x s coefficient matrices for decoupled multirate-infinitesimal
// schemes and length-s row vectors gamma(t) for step predictor-corrector
// schemes.  Internal consistency ties the polynomials to the abscissa gaps:
//     decoupled:            Gamma(tau) * 1 = deltaC   for all tau in [0,1],
//     predictor-corrector:  sum_j gamma_j(tau) = 1    for all tau in [0,1],
// and the integrated weights reproduce the base quadrature:
//     column sums of GammaBar = b   (decoupled),
//     gammaBar = b                  (predictor-corrector).

enum class CouplingKind { DecoupledMri, StepPredictorCorrector };

inline const char* to_string(CouplingKind k) {
  return k == CouplingKind::DecoupledMri ? "decoupled-mri" : "step-predictor-corrector";
}

// Polynomial with matrix coefficients; evaluation and integration use the
// same coefficient list so no truncation can sneak in between them.
struct PolynomialMatrix {
  std::vector<Matrix> coeff;  // coeff[k] multiplies t^k

  int degree() const { return static_cast<int>(coeff.size()) - 1; }

  Matrix eval(double t) const {
    Matrix out = coeff.back();
    for (std::size_t k = coeff.size() - 1; k-- > 0;) {
      for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
          out(i, j) = out(i, j) * t + coeff[k](i, j);
    }
    return out;
  }

  // GammaTilde(t) = integral of Gamma over [0, t]
  Matrix antiderivative(double t) const {
    Matrix out(coeff[0].rows(), coeff[0].cols());
    double tk = t;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      const double w = tk / static_cast<double>(k + 1);
      for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += coeff[k](i, j) * w;
      tk *= t;
    }
    return out;
  }

  // GammaBar = GammaTilde(1)
  Matrix integral() const {
    Matrix out(coeff[0].rows(), coeff[0].cols());
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      const double w = 1.0 / static_cast<double>(k + 1);
      for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += coeff[k](i, j) * w;
    }
    return out;
  }
};

inline Matrix gamma_bar(const PolynomialMatrix& p) { return p.integral(); }

// Rational form of a scheme's coefficients, kept alongside the floating
// point data when available so identities can be checked exactly.
struct ExactSchemeData {
  RationalTableau tableau;
  // coupling[k][i][j]: degree-k coefficient; one row for predictor-corrector
  std::vector<std::vector<std::vector<Rational>>> coupling;
};

struct CouplingScheme {
  std::string name;
  RkTableau tableau;
  CouplingKind kind = CouplingKind::DecoupledMri;
  PolynomialMatrix coupling;
  Vec deltaC;  // gaps between consecutive abscissae, last entry 1 - c_s
  std::optional<ExactSchemeData> exact;

  std::size_t stages() const { return tableau.stages(); }
  int order() const { return tableau.order; }
};

inline Vec abscissa_gaps(const Vec& c) {
  const std::size_t s = c.size();
  Vec d(s);
  for (std::size_t i = 0; i + 1 < s; ++i) d[i] = c[i + 1] - c[i];
  d[s - 1] = 1.0 - c[s - 1];
  return d;
}

// Structural problems (shape mismatches, implicit coupling blocks) are
// construction errors; quantitative identities are the job of
// validate_scheme so file-loaded schemes can be diagnosed instead of thrown.
inline CouplingScheme make_coupling_scheme(std::string name, RkTableau tableau, CouplingKind kind,
                                           PolynomialMatrix coupling,
                                           std::optional<ExactSchemeData> exact = std::nullopt) {
  const std::size_t s = tableau.stages();
  if (coupling.coeff.empty())
    throw std::invalid_argument("make_coupling_scheme: empty coupling polynomial");
  const std::size_t wantRows = kind == CouplingKind::DecoupledMri ? s : 1;
  for (const Matrix& m : coupling.coeff) {
    if (m.rows() != wantRows || m.cols() != s)
      throw std::invalid_argument("make_coupling_scheme: coupling coefficient shape mismatch in '" +
                                  name + "'");
  }
  if (kind == CouplingKind::DecoupledMri) {
    for (const Matrix& m : coupling.coeff)
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < s; ++j)
          if (m(i, j) != 0.0)
            throw std::invalid_argument(
                "make_coupling_scheme: implicit (upper triangular) coupling entry in '" + name +
                "'; only explicit schemes are supported");
  }
  CouplingScheme scheme;
  scheme.name = std::move(name);
  scheme.tableau = std::move(tableau);
  scheme.kind = kind;
  scheme.coupling = std::move(coupling);
  scheme.deltaC = abscissa_gaps(scheme.tableau.c);
  scheme.exact = std::move(exact);
  return scheme;
}

// Gamma(tau) for tau in [0,1]; callers map theta/H into the unit interval.
inline Matrix eval_coupling(const CouplingScheme& scheme, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::domain_error("eval_coupling: tau outside [0,1]");
  return scheme.coupling.eval(tau);
}

inline Matrix gamma_bar(const CouplingScheme& scheme) { return scheme.coupling.integral(); }

struct SchemeDiagnostic {
  std::string identity;  // which invariant is violated
  std::string where;     // stage/entry description
  double residual = 0.0;
};

namespace detail {

inline void check_residual(std::vector<SchemeDiagnostic>& out, double residual, double tol,
                           std::string identity, std::string where) {
  if (!(std::fabs(residual) <= tol))
    out.push_back({std::move(identity), std::move(where), residual});
}

}  // namespace detail

// Checks every scheme invariant: tableau consistency, abscissa gaps,
// lower-triangular structure, internal consistency at sampled tau, and the
// integrated-weight identities.  When exact rational coefficients are
// present the polynomial identities are additionally checked symbolically
// (coefficient-level, degree by degree).  Returns one entry per violation.
inline std::vector<SchemeDiagnostic> validate_scheme(const CouplingScheme& scheme) {
  constexpr double kTol = 1e-13;
  static constexpr double kTaus[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<SchemeDiagnostic> diags;
  const std::size_t s = scheme.stages();
  const RkTableau& tab = scheme.tableau;

  double bsum = 0.0;
  for (double bi : tab.b) bsum += bi;
  detail::check_residual(diags, bsum - 1.0, kTol, "sum(b) = 1", "weights");

  for (std::size_t i = 0; i < s; ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      rowsum += tab.a(i, j);
      if (j >= i && tab.a(i, j) != 0.0)
        detail::check_residual(diags, tab.a(i, j), 0.0, "A strictly lower triangular",
                               "A(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
    detail::check_residual(diags, rowsum - tab.c[i], kTol, "c_i = sum_j A(i,j)",
                           "stage " + std::to_string(i + 1));
  }

  const Vec gaps = abscissa_gaps(tab.c);
  for (std::size_t i = 0; i < s; ++i)
    detail::check_residual(diags, scheme.deltaC[i] - gaps[i], 0.0, "deltaC matches abscissa gaps",
                           "stage " + std::to_string(i + 1));

  const Matrix bar = gamma_bar(scheme);
  if (scheme.kind == CouplingKind::DecoupledMri) {
    for (double tau : kTaus) {
      const Matrix g = scheme.coupling.eval(tau);
      for (std::size_t i = 0; i < s; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < s; ++j) rowsum += g(i, j);
        detail::check_residual(diags, rowsum - scheme.deltaC[i], kTol,
                               "Gamma(tau)*1 = deltaC",
                               "stage " + std::to_string(i + 1) + ", tau=" + std::to_string(tau));
      }
    }
    for (std::size_t j = 0; j < s; ++j) {
      double colsum = 0.0;
      for (std::size_t i = 0; i < s; ++i) colsum += bar(i, j);
      detail::check_residual(diags, colsum - tab.b[j], kTol, "column sums of GammaBar = b",
                             "column " + std::to_string(j + 1));
    }
  } else {
    for (double tau : kTaus) {
      const Matrix g = scheme.coupling.eval(tau);
      double sum = 0.0;
      for (std::size_t j = 0; j < s; ++j) sum += g(0, j);
      detail::check_residual(diags, sum - 1.0, kTol, "sum_j gamma_j(tau) = 1",
                             "tau=" + std::to_string(tau));
    }
    for (std::size_t j = 0; j < s; ++j)
      detail::check_residual(diags, bar(0, j) - tab.b[j], kTol, "gammaBar = b",
                             "entry " + std::to_string(j + 1));
  }

  if (scheme.exact) {
    const ExactSchemeData& ex = *scheme.exact;
    const std::size_t rows = scheme.kind == CouplingKind::DecoupledMri ? s : 1;
    std::vector<Rational> exGaps(s);
    for (std::size_t i = 0; i + 1 < s; ++i) exGaps[i] = ex.tableau.c[i + 1] - ex.tableau.c[i];
    exGaps[s - 1] = Rational(1) - ex.tableau.c[s - 1];

    // Row sums degree by degree: degree 0 must give deltaC (or 1), higher
    // degrees must cancel exactly for the tau-dependence to vanish.
    for (std::size_t k = 0; k < ex.coupling.size(); ++k) {
      for (std::size_t i = 0; i < rows; ++i) {
        Rational rowsum(0);
        for (std::size_t j = 0; j < s; ++j) rowsum += ex.coupling[k][i][j];
        const Rational want =
            k > 0 ? Rational(0)
                  : (scheme.kind == CouplingKind::DecoupledMri ? exGaps[i] : Rational(1));
        if (rowsum != want)
          diags.push_back({"exact internal consistency (degree " + std::to_string(k) + ")",
                           "stage " + std::to_string(i + 1), (rowsum - want).to_double()});
      }
    }
    // Exact integrated weights against b.
    for (std::size_t j = 0; j < s; ++j) {
      Rational colsum(0);
      for (std::size_t k = 0; k < ex.coupling.size(); ++k)
        for (std::size_t i = 0; i < rows; ++i)
          colsum += ex.coupling[k][i][j] / Rational(static_cast<std::int64_t>(k + 1));
      if (colsum != ex.tableau.b[j])
        diags.push_back({"exact GammaBar column sums = b", "column " + std::to_string(j + 1),
                         (colsum - ex.tableau.b[j]).to_double()});
    }
  }

  return diags;
}

namespace detail {

inline PolynomialMatrix to_polynomial(const std::vector<std::vector<std::vector<Rational>>>& c) {
  PolynomialMatrix p;
  for (const auto& mk : c) {
    Matrix m(mk.size(), mk[0].size());
    for (std::size_t i = 0; i < mk.size(); ++i)
      for (std::size_t j = 0; j < mk[i].size(); ++j) m(i, j) = mk[i][j].to_double();
    p.coeff.push_back(std::move(m));
  }
  return p;
}

inline CouplingScheme make_exact_scheme(std::string name, const RationalTableau& tab, int order,
                                        CouplingKind kind,
                                        std::vector<std::vector<std::vector<Rational>>> coupling) {
  ExactSchemeData exact{tab, coupling};
  return make_coupling_scheme(std::move(name), make_tableau("base", tab, order), kind,
                              to_polynomial(coupling), std::move(exact));
}

}  // namespace detail

// The shipped schemes: first order Euler (where the decoupled and
// predictor-corrector forms coincide, registered as decoupled), plus
// second and third order pairs built on Ralston's tableaus.
inline const std::vector<CouplingScheme>& builtin_schemes() {
  static const std::vector<CouplingScheme> schemes = [] {
    using R = Rational;
    std::vector<CouplingScheme> out;

    out.push_back(detail::make_exact_scheme("euler", forward_euler_rational(), 1,
                                            CouplingKind::DecoupledMri, {{{R(1)}}}));

    out.push_back(detail::make_exact_scheme(
        "mri-ralston2", ralston2_rational(), 2, CouplingKind::DecoupledMri,
        {{{R(2, 3), R(0)}, {R(-5, 12), R(3, 4)}}}));

    out.push_back(detail::make_exact_scheme(
        "spc-ralston2", ralston2_rational(), 2, CouplingKind::StepPredictorCorrector,
        {{{R(-1, 2), R(3, 2)}}, {{R(3, 2), R(-3, 2)}}}));

    out.push_back(detail::make_exact_scheme(
        "mri-ralston3", ralston3_rational(), 3, CouplingKind::DecoupledMri,
        {{{R(1, 2), R(0), R(0)}, {R(-11, 4), R(3), R(0)}, {R(47, 36), R(-1, 6), R(-8, 9)}},
         {{R(0), R(0), R(0)}, {R(9, 2), R(-9, 2), R(0)}, {R(-13, 6), R(-1, 2), R(8, 3)}}}));

    out.push_back(detail::make_exact_scheme(
        "spc-ralston3", ralston3_rational(), 3, CouplingKind::StepPredictorCorrector,
        {{{R(1), R(0), R(0)}}, {{R(-2, 3), R(-2), R(8, 3)}}, {{R(-4, 3), R(4), R(-8, 3)}}}));

    return out;
  }();
  return schemes;
}

inline const CouplingScheme& builtin_scheme(std::string_view name) {
  for (const CouplingScheme& s : builtin_schemes())
    if (s.name == name) return s;
  throw std::invalid_argument("builtin_scheme: unknown scheme '" + std::string(name) + "'");
}

}  // namespace smmr
