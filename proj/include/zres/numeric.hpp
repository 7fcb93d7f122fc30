#pragma once

// Working-precision scalar types, a minimal complex type usable with
// Boost.Multiprecision, and compensated accumulators.

#include <cmath>
#include <complex>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "zres/errors.hpp"

namespace zres {

using quad_float = boost::multiprecision::cpp_bin_float_quad;

/// Largest precision (mantissa bits) any evaluator in the library supports.
inline constexpr int kMaxPrecisionBits = 113;

template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(T r, T i = T(0)) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const T& s) {
    re *= s;
    im *= s;
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator*(Complex a, const T& s) { return a *= s; }
  friend Complex operator*(const T& s, Complex a) { return a *= s; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
  friend Complex operator/(const Complex& a, const Complex& b) {
    T d = b.re * b.re + b.im * b.im;
    return Complex((a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d);
  }

  T norm() const { return re * re + im * im; }
  T abs() const {
    using std::sqrt;
    return sqrt(norm());
  }
  Complex conj() const { return Complex(re, -im); }

  std::complex<double> to_std() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

/// e^{i theta}
template <class T>
Complex<T> unit_phase(const T& theta) {
  using std::cos;
  using std::sin;
  return Complex<T>(cos(theta), sin(theta));
}

/// Neumaier-compensated running sum.
template <class T>
class CompensatedSum {
 public:
  void add(const T& x) {
    using std::abs;
    T t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

template <class T>
class CompensatedComplexSum {
 public:
  void add(const Complex<T>& z) {
    re_.add(z.re);
    im_.add(z.im);
  }
  void add(const std::complex<T>& z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex<T> value() const { return Complex<T>(re_.value(), im_.value()); }

 private:
  CompensatedSum<T> re_;
  CompensatedSum<T> im_;
};

/// Invokes fn with a value-initialized scalar of the narrowest built-in or
/// Boost type carrying at least `bits` mantissa bits.
template <class Fn>
decltype(auto) with_precision(int bits, Fn&& fn) {
  if (bits < 53) throw DomainError("precision_bits must be >= 53");
  if (bits <= 53) return fn(double{});
  if (bits <= 64) return fn(static_cast<long double>(0));
  if (bits <= kMaxPrecisionBits) return fn(quad_float{});
  throw PrecisionUnattainable("precision_bits above " + std::to_string(kMaxPrecisionBits) +
                              " is not supported");
}

}  // namespace zres
