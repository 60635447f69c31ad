#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace smmr {

// Exact rational arithmetic used to carry method coefficients without
// transcription drift.  Magnitudes stay tiny (table entries like -11/4 or
// 47/36), far from 64-bit limits.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}
  constexpr Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  constexpr double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  constexpr Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(Rational o) { return *this = *this + o; }

  friend constexpr bool operator==(Rational a, Rational b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr bool operator!=(Rational a, Rational b) { return !(a == b); }

  constexpr bool is_zero() const { return num_ == 0; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "p/q" or a plain integer.  Decimal strings are not rationals;
  // callers fall back to floating point for those.
  static Rational parse(const std::string& text) {
    std::size_t pos = 0;
    const std::int64_t num = std::stoll(text, &pos);
    if (pos == text.size()) return Rational(num);
    if (text[pos] != '/') throw std::invalid_argument("Rational: bad literal '" + text + "'");
    std::size_t qpos = 0;
    const std::string denPart = text.substr(pos + 1);
    const std::int64_t den = std::stoll(denPart, &qpos);
    if (qpos != denPart.size()) throw std::invalid_argument("Rational: bad literal '" + text + "'");
    return Rational(num, den);
  }

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace smmr
