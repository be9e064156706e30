#pragma once

#include <cmath>
#include <vector>

#include "dcl/core_math.hpp"
#include "dcl/rng.hpp"

namespace dcl::testing {

inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

inline DenseState random_state(const DihedralParams& params, Rng& rng, Frame frame = Frame::standard) {
  DenseState s = DenseState::zero(params, frame);
  double total = 0.0;
  for (auto& a : s.amps) {
    a = Complex(gaussian(rng), gaussian(rng));
    total += std::norm(a);
  }
  for (auto& a : s.amps) a /= std::sqrt(total);
  return s;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Textbook exp(2 pi i e / n) without any reduction or special cases.
inline Complex direct_omega(double n, double e) {
  return {std::cos(2.0 * kPi * e / n), std::sin(2.0 * kPi * e / n)};
}

}  // namespace dcl::testing
