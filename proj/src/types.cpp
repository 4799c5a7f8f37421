#include "mpsweep/types.hpp"

#include <algorithm>
#include <cmath>

namespace mpsweep {

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  require_size(y.size(), x.size(), "dot");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // conj(x) * y
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm2(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

double norm_inf(std::span<const Complex> x) {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, std::abs(v));
  return m;
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  require_size(y.size(), x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(Complex a, std::span<Complex> x) {
  for (auto& v : x) v *= a;
}

}  // namespace mpsweep
