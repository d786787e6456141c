#pragma once

// All 28 bitangents of a smooth plane quartic, found by random-restart
// Newton iteration on the square-certificate system, chart by chart.

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qgram/forms.hpp"

namespace qgram {

struct BitangentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bitangent {
  Eigen::Vector3cd line;  // unit norm, first significant coefficient real positive
  ProjPoint contacts[2];
  bool hyperflex = false;  // coincident contact points
  bool real = false;
  int index = -1;
};

namespace detail {

// Chart k expresses variable k in terms of the other two:
//   k=0: x = a*y + b*z, line (1, -a, -b)
//   k=1: y = a*x + b*z, line (-a, 1, -b)
//   k=2: z = a*x + b*y, line (-a, -b, 1)
inline Eigen::Vector3cd chart_line(int chart, Complex a, Complex b) {
  switch (chart) {
    case 0: return {1.0, -a, -b};
    case 1: return {-a, 1.0, -b};
    default: return {-a, -b, 1.0};
  }
}

inline void chart_points(int chart, Complex a, Complex b, Eigen::Vector3cd& p,
                         Eigen::Vector3cd& q) {
  switch (chart) {
    case 0: p = {a, 1.0, 0.0}; q = {b, 0.0, 1.0}; break;
    case 1: p = {1.0, a, 0.0}; q = {0.0, b, 1.0}; break;
    default: p = {1.0, 0.0, a}; q = {0.0, 1.0, b}; break;
  }
}

inline Eigen::Vector3cd normalize_line(Eigen::Vector3cd l) {
  l /= l.norm();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(l[i]) > 1e-7) {
      l /= l[i] / std::abs(l[i]);
      break;
    }
  }
  return l;
}

// binary form times s (degree up by one)
inline BinaryForm times_s(const BinaryForm& g) {
  BinaryForm h = BinaryForm::zero(g.degree + 1);
  h.c.tail(g.degree + 1) = g.c;
  return h;
}

// binary form times t
inline BinaryForm times_t(const BinaryForm& g) {
  BinaryForm h = BinaryForm::zero(g.degree + 1);
  h.c.head(g.degree + 1) = g.c;
  return h;
}

}  // namespace detail

// The two contact points of a certified bitangent (double roots of the
// square root of the restriction, mapped back to P^2).
inline std::pair<std::array<ProjPoint, 2>, bool> contact_points(const TernaryForm& f,
                                                                const Eigen::Vector3cd& line,
                                                                double cert_tol = 1e-8) {
  // two independent points spanning the line V(l): nullspace of l^T
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 1, 3>> svd(line.transpose(), Eigen::ComputeFullV);
  Eigen::Vector3cd p = svd.matrixV().col(1);
  Eigen::Vector3cd q = svd.matrixV().col(2);
  BinaryForm g = restrict_to_line(f, p, q);
  auto sq = perfect_square_binary_quartic(g, cert_tol);
  if (!sq) throw BitangentError("line fails the bitangent square certificate");
  auto roots = binary_roots(sq->first, 1e-6);
  std::array<ProjPoint, 2> contacts;
  bool hyperflex = false;
  if (roots.size() == 1 && roots[0].multiplicity == 2) {
    contacts[0] = ProjPoint(Eigen::Vector3cd(roots[0].s * p + roots[0].t * q));
    contacts[1] = contacts[0];
    hyperflex = true;
  } else if (roots.size() == 2) {
    contacts[0] = ProjPoint(Eigen::Vector3cd(roots[0].s * p + roots[0].t * q));
    contacts[1] = ProjPoint(Eigen::Vector3cd(roots[1].s * p + roots[1].t * q));
  } else {
    throw BitangentError("contact structure is not two double points");
  }
  return {contacts, hyperflex};
}

// Cheap smoothness guard: min over a projective grid of |f| + |grad f|.
inline bool smoothness_guard(const TernaryForm& f, int grid = 60, double tol = 1e-10) {
  double scale = f.norm();
  if (scale == 0.0) return false;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double th = M_PI * (i + 0.5) / grid;
      double ph = 2.0 * M_PI * j / grid;
      Eigen::Vector3cd v(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
      double val = std::abs(f.eval(v)) + f.gradient(v).norm();
      best = std::min(best, val / scale);
    }
  return best >= tol;
}

// Exactly 28 distinct verified bitangents, deterministic given the seed.
inline std::vector<Bitangent> compute_bitangents(const TernaryForm& f, uint64_t seed = 1,
                                                 double cert_tol = 1e-8,
                                                 int restart_budget = 20000) {
  if (f.degree != 4) throw BitangentError("compute_bitangents needs a quartic");
  if (!smoothness_guard(f)) throw BitangentError("not-smooth: quartic fails the smoothness guard");
  double fnorm = f.norm();

  const TernaryForm fpart[3] = {partial_derivative(f, 0), partial_derivative(f, 1),
                                partial_derivative(f, 2)};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Bitangent> found;
  auto already_have = [&](const Eigen::Vector3cd& l) {
    for (const auto& b : found)
      if (chordal_distance(b.line, l) < 1e-6) return true;
    return false;
  };

  for (int attempt = 0; attempt < restart_budget && static_cast<int>(found.size()) < 28;
       ++attempt) {
    int chart = attempt % 3;
    Complex a(gauss(rng), gauss(rng)), b(gauss(rng), gauss(rng));
    Eigen::Vector3cd qv(Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng)),
                        Complex(gauss(rng), gauss(rng)));

    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      Eigen::Vector3cd p0, q0;
      detail::chart_points(chart, a, b, p0, q0);
      BinaryForm g = restrict_to_line(f, p0, q0);
      BinaryForm qq(2, qv);
      Vec r = g.c - multiply(qq, qq).c;  // 5 residuals

      if (r.norm() < 1e-12 * fnorm && it > 0) {
        converged = true;
        break;
      }

      // The chart's dependent coordinate of s*p0 + t*q0 is s*a + t*b, so
      // dg/da = s * f_var|_line and dg/db = t * f_var|_line with f_var the
      // partial derivative along the dependent variable.
      BinaryForm dvar = restrict_to_line(fpart[chart], p0, q0);
      Eigen::Matrix<Complex, 5, 5> J;
      J.col(0) = detail::times_s(dvar).c;
      J.col(1) = detail::times_t(dvar).c;
      for (int k = 0; k < 3; ++k) {
        BinaryForm ek = BinaryForm::zero(2);
        ek.c[k] = 1.0;
        J.col(2 + k) = -2.0 * multiply(qq, ek).c;
      }
      Eigen::Matrix<Complex, 5, 1> step = J.fullPivLu().solve(-r);
      if (!step.allFinite()) break;
      a += step[0];
      b += step[1];
      qv += step.tail<3>();
      if (std::abs(a) > 1e4 || std::abs(b) > 1e4) break;
    }
    if (!converged) continue;

    Eigen::Vector3cd line = detail::normalize_line(detail::chart_line(chart, a, b));
    if (already_have(line)) continue;

    // independent certificate on the normalized line
    try {
      auto [contacts, hyperflex] = contact_points(f, line, cert_tol);
      Bitangent bt;
      bt.line = line;
      bt.contacts[0] = contacts[0];
      bt.contacts[1] = contacts[1];
      bt.hyperflex = hyperflex;
      bt.real = line.imag().cwiseAbs().maxCoeff() <= 1e-9;
      found.push_back(bt);
    } catch (const BitangentError&) {
      continue;
    } catch (const FormError&) {
      continue;
    }
  }

  if (found.size() != 28)
    throw BitangentError("count-mismatch: found " + std::to_string(found.size()) +
                         " verified bitangents instead of 28");

  // deterministic order: lexicographic by normalized coefficients
  std::sort(found.begin(), found.end(), [](const Bitangent& u, const Bitangent& v) {
    for (int i = 0; i < 3; ++i) {
      if (u.line[i].real() != v.line[i].real()) return u.line[i].real() < v.line[i].real();
      if (u.line[i].imag() != v.line[i].imag()) return u.line[i].imag() < v.line[i].imag();
    }
    return false;
  });
  for (int i = 0; i < 28; ++i) found[i].index = i;
  return found;
}

// All 4-subsets of lines meeting in a common point: third singular value of
// the stacked coefficient matrix below tol * sigma_1. Raises if any 5 lines
// are concurrent.
inline std::vector<std::array<int, 4>> concurrent_quadruples(const std::vector<Bitangent>& bits,
                                                             double tol = 1e-8) {
  int n = static_cast<int>(bits.size());
  std::vector<std::array<int, 4>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          Eigen::Matrix<Complex, 4, 3> m;
          m.row(0) = bits[i].line.transpose();
          m.row(1) = bits[j].line.transpose();
          m.row(2) = bits[k].line.transpose();
          m.row(3) = bits[l].line.transpose();
          Eigen::JacobiSVD<Eigen::Matrix<Complex, 4, 3>> svd(m);
          if (svd.singularValues()(2) <= tol * svd.singularValues()(0))
            out.push_back({i, j, k, l});
        }

  // guard against five concurrent lines
  for (const auto& quad : out) {
    Eigen::Matrix<Complex, 4, 3> m;
    for (int r = 0; r < 4; ++r) m.row(r) = bits[quad[r]].line.transpose();
    Eigen::JacobiSVD<Eigen::Matrix<Complex, 4, 3>> svd(m, Eigen::ComputeFullV);
    Eigen::Vector3cd pt = svd.matrixV().col(2);
    int count = 0;
    for (const auto& b : bits)
      if (std::abs((b.line.transpose() * pt)(0, 0)) <= 10 * tol * pt.norm()) ++count;
    if (count >= 5)
      throw BitangentError("five-concurrent: five or more bitangents share a point");
  }
  return out;
}

}  // namespace qgram
