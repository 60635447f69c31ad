#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "smmr/vec.hpp"

namespace smmr {

// Minimal dense row-major matrix.  Method coefficient blocks are tiny
// (s <= 4); projection bases can be large (N x S), applied as plain
// matrix-vector loops.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  // out = M x
  void apply(const Vec& x, Vec& out) const {
    if (x.size() != cols_) throw std::invalid_argument("Matrix::apply: size mismatch");
    out.assign(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      const double* row = &a_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
      out[i] = s;
    }
  }

  // out = M^T x
  void apply_transpose(const Vec& x, Vec& out) const {
    if (x.size() != rows_) throw std::invalid_argument("Matrix::apply_transpose: size mismatch");
    out.assign(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double xi = x[i];
      const double* row = &a_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) out[j] += row[j] * xi;
    }
  }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

}  // namespace smmr
