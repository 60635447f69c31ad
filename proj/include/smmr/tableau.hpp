#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "smmr/matrix.hpp"
#include "smmr/rational.hpp"
#include "smmr/vec.hpp"

namespace smmr {

// Explicit Butcher tableau (A, b, c).  A must be strictly lower triangular;
// only explicit methods are constructible.
struct RkTableau {
  std::string name;
  Matrix a;   // s x s stage coefficients
  Vec b;      // weights
  Vec c;      // abscissae
  int order = 0;

  std::size_t stages() const { return b.size(); }
};

struct RationalTableau {
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

inline RkTableau make_tableau(std::string name, const RationalTableau& r, int order) {
  const std::size_t s = r.b.size();
  if (r.a.size() != s || r.c.size() != s)
    throw std::invalid_argument("make_tableau: inconsistent tableau sizes");
  RkTableau t;
  t.name = std::move(name);
  t.order = order;
  t.a = Matrix(s, s);
  t.b.resize(s);
  t.c.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    if (r.a[i].size() != s) throw std::invalid_argument("make_tableau: ragged A");
    for (std::size_t j = 0; j < s; ++j) {
      if (j >= i && !r.a[i][j].is_zero())
        throw std::invalid_argument("make_tableau: A not strictly lower triangular in '" +
                                    t.name + "'");
      t.a(i, j) = r.a[i][j].to_double();
    }
    t.b[i] = r.b[i].to_double();
    t.c[i] = r.c[i].to_double();
  }
  return t;
}

inline const RationalTableau& forward_euler_rational() {
  static const RationalTableau r{{{Rational(0)}}, {Rational(1)}, {Rational(0)}};
  return r;
}

// Ralston's optimal two-stage second order method.
inline const RationalTableau& ralston2_rational() {
  static const RationalTableau r{
      {{Rational(0), Rational(0)}, {Rational(2, 3), Rational(0)}},
      {Rational(1, 4), Rational(3, 4)},
      {Rational(0), Rational(2, 3)}};
  return r;
}

// Ralston's optimal three-stage third order method.
inline const RationalTableau& ralston3_rational() {
  static const RationalTableau r{
      {{Rational(0), Rational(0), Rational(0)},
       {Rational(1, 2), Rational(0), Rational(0)},
       {Rational(0), Rational(3, 4), Rational(0)}},
      {Rational(2, 9), Rational(1, 3), Rational(4, 9)},
      {Rational(0), Rational(1, 2), Rational(3, 4)}};
  return r;
}

inline const RationalTableau& classic_rk4_rational() {
  static const RationalTableau r{
      {{Rational(0), Rational(0), Rational(0), Rational(0)},
       {Rational(1, 2), Rational(0), Rational(0), Rational(0)},
       {Rational(0), Rational(1, 2), Rational(0), Rational(0)},
       {Rational(0), Rational(0), Rational(1), Rational(0)}},
      {Rational(1, 6), Rational(1, 3), Rational(1, 3), Rational(1, 6)},
      {Rational(0), Rational(1, 2), Rational(1, 2), Rational(1)}};
  return r;
}

inline const RkTableau& forward_euler() {
  static const RkTableau t = make_tableau("euler", forward_euler_rational(), 1);
  return t;
}

inline const RkTableau& ralston2() {
  static const RkTableau t = make_tableau("ralston2", ralston2_rational(), 2);
  return t;
}

inline const RkTableau& ralston3() {
  static const RkTableau t = make_tableau("ralston3", ralston3_rational(), 3);
  return t;
}

inline const RkTableau& classic_rk4() {
  static const RkTableau t = make_tableau("rk4", classic_rk4_rational(), 4);
  return t;
}

inline const RkTableau& tableau_of_order(int order) {
  switch (order) {
    case 1: return forward_euler();
    case 2: return ralston2();
    case 3: return ralston3();
    case 4: return classic_rk4();
    default: throw std::invalid_argument("tableau_of_order: no tableau of order " +
                                         std::to_string(order));
  }
}

}  // namespace smmr
