#pragma once

#include <random>
#include <vector>

#include "qgram/io.hpp"

namespace testutil {

inline qgram::TernaryForm fermat() {
  qgram::TernaryForm f = qgram::TernaryForm::zero(4);
  f.at(4, 0, 0) = 1.0;
  f.at(0, 4, 0) = 1.0;
  f.at(0, 0, 4) = 1.0;
  return f;
}

// The 28 bitangents of x^4 + y^4 + z^4 in closed form:
//   z - a x - b y        with a^4 = b^4 = 1   (16 lines)
//   x - e y, y - e z, x - e z   with e^4 = -1  (12 hyperflex lines)
inline std::vector<Eigen::Vector3cd> fermat_lines() {
  using qgram::Complex;
  std::vector<Eigen::Vector3cd> out;
  const Complex i(0.0, 1.0);
  const Complex fourth[4] = {1.0, i, -1.0, -i};
  for (const Complex& a : fourth)
    for (const Complex& b : fourth) out.emplace_back(-a, -b, Complex(1.0));
  for (int k = 0; k < 4; ++k) {
    Complex e = std::exp(Complex(0.0, (2.0 * k + 1.0) * M_PI / 4.0));
    out.emplace_back(Complex(1.0), -e, Complex(0.0));
    out.emplace_back(Complex(0.0), Complex(1.0), -e);
    out.emplace_back(Complex(1.0), Complex(0.0), -e);
  }
  for (auto& l : out) l = qgram::detail::normalize_line(l);
  return out;
}

// Strictly sos smooth quartic: sum of six squares of random real quadratics,
// unit coefficient norm, redrawn until the smoothness guard passes.
inline qgram::TernaryForm random_sos_quartic(uint64_t seed) {
  std::mt19937_64 rng(seed * 1000003ull + 17ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 50; ++attempt) {
    qgram::TernaryForm f = qgram::TernaryForm::zero(4);
    for (int k = 0; k < 6; ++k) {
      qgram::Vec q(6);
      for (int j = 0; j < 6; ++j) q[j] = gauss(rng);
      qgram::TernaryForm qf(2, q);
      f = f + qgram::multiply(qf, qf);
    }
    f = qgram::Complex(1.0 / f.norm()) * f;
    if (qgram::smoothness_guard(f)) return f;
  }
  throw std::runtime_error("could not draw a smooth sos quartic");
}

inline double closest_line_distance(const Eigen::Vector3cd& line,
                                    const std::vector<qgram::Bitangent>& bits) {
  double best = 1.0;
  for (const auto& b : bits) best = std::min(best, qgram::chordal_distance(line, b.line));
  return best;
}

}  // namespace testutil
