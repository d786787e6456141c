#pragma once

// Trivariate and binary forms over C with a fixed monomial order.
//
// Degree 2 basis:  x^2, y^2, z^2, xy, xz, yz
// Degree 4 basis:  graded-lex with x > y > z (15 monomials)
// Degree 1 basis:  x, y, z

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qgram {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;

struct FormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Exponent = std::array<int, 3>;

inline const std::vector<Exponent>& exponents(int degree) {
  static const std::vector<Exponent> deg1 = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  static const std::vector<Exponent> deg2 = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2},
                                             {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
  static const std::vector<Exponent> deg3 = {{3, 0, 0}, {2, 1, 0}, {2, 0, 1}, {1, 2, 0},
                                             {1, 1, 1}, {1, 0, 2}, {0, 3, 0}, {0, 2, 1},
                                             {0, 1, 2}, {0, 0, 3}};
  static const std::vector<Exponent> deg4 = {
      {4, 0, 0}, {3, 1, 0}, {3, 0, 1}, {2, 2, 0}, {2, 1, 1},
      {2, 0, 2}, {1, 3, 0}, {1, 2, 1}, {1, 1, 2}, {1, 0, 3},
      {0, 4, 0}, {0, 3, 1}, {0, 2, 2}, {0, 1, 3}, {0, 0, 4}};
  switch (degree) {
    case 1: return deg1;
    case 2: return deg2;
    case 3: return deg3;
    case 4: return deg4;
    default: throw FormError("unsupported degree " + std::to_string(degree));
  }
}

inline int monomial_count(int degree) { return static_cast<int>(exponents(degree).size()); }

inline int monomial_index(int degree, int a, int b, int c) {
  const auto& exps = exponents(degree);
  for (int i = 0; i < static_cast<int>(exps.size()); ++i)
    if (exps[i][0] == a && exps[i][1] == b && exps[i][2] == c) return i;
  throw FormError("exponent not in basis");
}

// Point in P^2, normalized to unit norm with the first coordinate of
// significant magnitude made real positive.
struct ProjPoint {
  Eigen::Vector3cd v;

  ProjPoint() : v(Eigen::Vector3cd::Zero()) {}
  explicit ProjPoint(const Eigen::Vector3cd& raw) : v(raw) { normalize(); }
  ProjPoint(Complex a, Complex b, Complex c) : v(a, b, c) { normalize(); }

  void normalize() {
    double n = v.norm();
    if (n == 0.0) throw FormError("zero point in P^2");
    v /= n;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        Complex phase = v[i] / std::abs(v[i]);
        v /= phase;
        break;
      }
    }
  }
};

// Chordal distance between projective points/lines given as C^k vectors,
// sin of the principal angle, computed from the 2x2 minors so that nearby
// representatives resolve below sqrt(machine eps).
template <typename DerivedA, typename DerivedB>
double chordal_distance(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw FormError("chordal distance of zero vector");
  double wedge2 = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j)
      wedge2 += std::norm(a[i] * b[j] - a[j] * b[i]);
  return std::min(1.0, std::sqrt(wedge2) / (na * nb));
}

struct TernaryForm {
  int degree = 4;
  Vec c;

  TernaryForm() : c(Vec::Zero(15)) {}
  TernaryForm(int deg, Vec coeffs) : degree(deg), c(std::move(coeffs)) {
    if (c.size() != monomial_count(degree)) throw FormError("coefficient length mismatch");
  }
  static TernaryForm zero(int deg) { return TernaryForm(deg, Vec::Zero(monomial_count(deg))); }

  double norm() const { return c.norm(); }
  bool is_zero(double tol = 1e-14) const { return c.norm() <= tol; }
  bool is_real(double tol = 1e-12) const { return c.imag().cwiseAbs().maxCoeff() <= tol; }

  TernaryForm conj() const { return TernaryForm(degree, c.conjugate()); }

  Complex& at(int a, int b, int cc) { return c[monomial_index(degree, a, b, cc)]; }
  Complex at(int a, int b, int cc) const { return c[monomial_index(degree, a, b, cc)]; }

  Complex eval(const Eigen::Vector3cd& p) const {
    Complex s = 0;
    const auto& exps = exponents(degree);
    for (int i = 0; i < c.size(); ++i) {
      Complex m = 1;
      for (int k = 0; k < exps[i][0]; ++k) m *= p[0];
      for (int k = 0; k < exps[i][1]; ++k) m *= p[1];
      for (int k = 0; k < exps[i][2]; ++k) m *= p[2];
      s += c[i] * m;
    }
    return s;
  }
  Complex eval(const ProjPoint& p) const { return eval(p.v); }

  // Partial derivative; only needed for degree-4 forms (gives degree 3,
  // which we keep as a plain callable rather than a basis-indexed form).
  Eigen::Vector3cd gradient(const Eigen::Vector3cd& p) const {
    Eigen::Vector3cd g = Eigen::Vector3cd::Zero();
    const auto& exps = exponents(degree);
    for (int i = 0; i < c.size(); ++i) {
      for (int var = 0; var < 3; ++var) {
        if (exps[i][var] == 0) continue;
        Complex m = static_cast<double>(exps[i][var]);
        for (int v2 = 0; v2 < 3; ++v2) {
          int e = exps[i][v2] - (v2 == var ? 1 : 0);
          for (int k = 0; k < e; ++k) m *= p[v2];
        }
        g[var] += c[i] * m;
      }
    }
    return g;
  }
};

inline TernaryForm operator+(const TernaryForm& f, const TernaryForm& g) {
  if (f.degree != g.degree) throw FormError("degree mismatch in addition");
  return TernaryForm(f.degree, f.c + g.c);
}
inline TernaryForm operator-(const TernaryForm& f, const TernaryForm& g) {
  if (f.degree != g.degree) throw FormError("degree mismatch in subtraction");
  return TernaryForm(f.degree, f.c - g.c);
}
inline TernaryForm operator*(Complex s, const TernaryForm& f) {
  return TernaryForm(f.degree, s * f.c);
}

inline TernaryForm partial_derivative(const TernaryForm& f, int var) {
  TernaryForm d = TernaryForm::zero(f.degree - 1);
  const auto& ef = exponents(f.degree);
  for (int i = 0; i < f.c.size(); ++i) {
    if (ef[i][var] == 0) continue;
    Exponent e = ef[i];
    e[var] -= 1;
    d.c[monomial_index(d.degree, e[0], e[1], e[2])] += double(ef[i][var]) * f.c[i];
  }
  return d;
}

inline TernaryForm multiply(const TernaryForm& f, const TernaryForm& g) {
  int d = f.degree + g.degree;
  if (d != 2 && d != 4) throw FormError("unsupported degree in multiply");
  TernaryForm h = TernaryForm::zero(d);
  const auto& ef = exponents(f.degree);
  const auto& eg = exponents(g.degree);
  for (int i = 0; i < f.c.size(); ++i)
    for (int j = 0; j < g.c.size(); ++j)
      h.c[monomial_index(d, ef[i][0] + eg[j][0], ef[i][1] + eg[j][1], ef[i][2] + eg[j][2])] +=
          f.c[i] * g.c[j];
  return h;
}

// Binary form in (s, t); index k holds the coefficient of s^k t^(degree-k).
struct BinaryForm {
  int degree = 0;
  Vec c;

  BinaryForm() : c(Vec::Zero(1)) {}
  BinaryForm(int deg, Vec coeffs) : degree(deg), c(std::move(coeffs)) {
    if (c.size() != degree + 1) throw FormError("binary coefficient length mismatch");
  }
  static BinaryForm zero(int deg) { return BinaryForm(deg, Vec::Zero(deg + 1)); }

  double norm() const { return c.norm(); }
  bool is_zero(double tol = 1e-14) const { return c.norm() <= tol; }

  Complex eval(Complex s, Complex t) const {
    Complex acc = 0;
    for (int k = 0; k <= degree; ++k) {
      Complex m = c[k];
      for (int i = 0; i < k; ++i) m *= s;
      for (int i = 0; i < degree - k; ++i) m *= t;
      acc += m;
    }
    return acc;
  }
};

inline BinaryForm multiply(const BinaryForm& f, const BinaryForm& g) {
  BinaryForm h = BinaryForm::zero(f.degree + g.degree);
  for (int i = 0; i <= f.degree; ++i)
    for (int j = 0; j <= g.degree; ++j) h.c[i + j] += f.c[i] * g.c[j];
  return h;
}

inline BinaryForm operator-(const BinaryForm& f, const BinaryForm& g) {
  if (f.degree != g.degree) throw FormError("degree mismatch");
  return BinaryForm(f.degree, f.c - g.c);
}

namespace detail {
// Coefficients of (a s + b t)^m as a binary form of degree m.
inline BinaryForm linear_power(Complex a, Complex b, int m) {
  BinaryForm r = BinaryForm::zero(m);
  double binom = 1.0;
  for (int k = 0; k <= m; ++k) {
    Complex v = binom;
    for (int i = 0; i < k; ++i) v *= a;
    for (int i = 0; i < m - k; ++i) v *= b;
    r.c[k] = v;
    binom = binom * (m - k) / (k + 1);
  }
  return r;
}
}  // namespace detail

// g(s,t) = f(s*p + t*q), exact coefficient expansion.
inline BinaryForm restrict_to_line(const TernaryForm& f, const Eigen::Vector3cd& p,
                                   const Eigen::Vector3cd& q) {
  Eigen::Matrix<Complex, 3, 2> m;
  m.col(0) = p;
  m.col(1) = q;
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 3, 2>> svd(m);
  if (svd.singularValues()(1) <= 1e-12 * svd.singularValues()(0))
    throw FormError("dependent points define no line");
  BinaryForm g = BinaryForm::zero(f.degree);
  const auto& exps = exponents(f.degree);
  for (int i = 0; i < f.c.size(); ++i) {
    if (f.c[i] == Complex(0)) continue;
    BinaryForm term(0, Vec::Ones(1));
    for (int var = 0; var < 3; ++var)
      if (exps[i][var] > 0)
        term = multiply(term, detail::linear_power(p[var], q[var], exps[i][var]));
    g.c += f.c[i] * term.c;
  }
  return g;
}

inline BinaryForm restrict_to_line(const TernaryForm& f, const ProjPoint& p, const ProjPoint& q) {
  return restrict_to_line(f, p.v, q.v);
}

// Root of a binary form as a point (s : t) in P^1 with multiplicity.
struct BinaryRoot {
  Complex s, t;  // unit-norm representative
  int multiplicity;
};

inline double chordal_p1(Complex a, Complex b, Complex c, Complex d) {
  double na = std::sqrt(std::norm(a) + std::norm(b));
  double nb = std::sqrt(std::norm(c) + std::norm(d));
  return std::abs(a * d - b * c) / (na * nb);
}

// Companion-matrix roots of the dehomogenization plus the root at infinity,
// clustered by chordal distance on P^1.
inline std::vector<BinaryRoot> binary_roots(const BinaryForm& g, double cluster_tol = 1e-6) {
  if (g.is_zero()) throw FormError("binary_roots of the zero form");
  int n = g.degree;
  double scale = g.c.cwiseAbs().maxCoeff();
  int lead = n;
  while (lead >= 0 && std::abs(g.c[lead]) <= 1e-13 * scale) --lead;
  int inf_mult = n - lead;  // root (1:0)

  std::vector<std::pair<Complex, Complex>> raw;  // (s, t) representatives
  for (int k = 0; k < inf_mult; ++k) raw.emplace_back(1.0, 0.0);

  int trail = 0;
  while (trail < lead && std::abs(g.c[trail]) <= 1e-13 * scale) ++trail;
  for (int k = 0; k < trail; ++k) raw.emplace_back(0.0, 1.0);  // root (0:1)

  int deg = lead - trail;  // remaining polynomial in s of degree deg, t = 1
  if (deg > 0) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -g.c[trail + i] / g.c[lead];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (int i = 0; i < deg; ++i) raw.emplace_back(es.eigenvalues()[i], 1.0);
  }

  // cluster by chordal distance
  int m = static_cast<int>(raw.size());
  std::vector<int> owner(m);
  for (int i = 0; i < m; ++i) owner[i] = i;
  std::function<int(int)> find = [&](int i) { return owner[i] == i ? i : owner[i] = find(owner[i]); };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (chordal_p1(raw[i].first, raw[i].second, raw[j].first, raw[j].second) < cluster_tol)
        owner[find(i)] = find(j);

  std::vector<BinaryRoot> out;
  for (int i = 0; i < m; ++i) {
    if (find(i) != i) continue;
    int mult = 0;
    Complex s = 0, t = 0;
    for (int j = 0; j < m; ++j)
      if (find(j) == i) {
        ++mult;
        double nj = std::sqrt(std::norm(raw[j].first) + std::norm(raw[j].second));
        // align phases before averaging
        Complex ip = std::conj(raw[j].first) * s + std::conj(raw[j].second) * t;
        Complex phase = (std::abs(ip) > 1e-14) ? ip / std::abs(ip) : Complex(1.0);
        s += std::conj(phase) * raw[j].first / nj;
        t += std::conj(phase) * raw[j].second / nj;
      }
    double nn = std::sqrt(std::norm(s) + std::norm(t));
    out.push_back({s / nn, t / nn, mult});
  }
  return out;
}

// Detects g = c * q^2 for a binary quartic. Multiple roots split as eps^(1/m)
// under rounding, so the raw root multiset is unreliable; instead every
// pairing of the four roots into two candidate double roots seeds a
// Gauss-Newton polish of q, and the residual decides.
inline std::optional<std::pair<BinaryForm, Complex>> perfect_square_binary_quartic(
    const BinaryForm& g, double tol = 1e-10, double cluster_tol = 1e-6) {
  if (g.degree != 4) throw FormError("perfect_square_binary_quartic needs degree 4");
  if (g.is_zero()) throw FormError("perfect_square_binary_quartic of zero form");
  (void)cluster_tol;

  std::vector<std::pair<Complex, Complex>> roots4;
  for (const auto& r : binary_roots(g, 1e-13))
    for (int k = 0; k < r.multiplicity; ++k) roots4.emplace_back(r.s, r.t);
  if (roots4.size() != 4) return std::nullopt;

  // chordal mean of two P^1 points, phases aligned before averaging
  auto mean = [](std::pair<Complex, Complex> u, std::pair<Complex, Complex> v) {
    Complex ip = std::conj(u.first) * v.first + std::conj(u.second) * v.second;
    Complex phase = (std::abs(ip) > 1e-14) ? ip / std::abs(ip) : Complex(1.0);
    Complex s = u.first + std::conj(phase) * v.first;
    Complex t = u.second + std::conj(phase) * v.second;
    double n = std::sqrt(std::norm(s) + std::norm(t));
    if (n < 1e-14) return u;
    return std::make_pair(s / n, t / n);
  };

  static const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  for (const auto& pr : pairings) {
    auto d1 = mean(roots4[pr[0]], roots4[pr[1]]);
    auto d2 = mean(roots4[pr[2]], roots4[pr[3]]);

    BinaryForm l1 = BinaryForm::zero(1);
    l1.c[1] = d1.second;
    l1.c[0] = -d1.first;
    BinaryForm l2 = BinaryForm::zero(1);
    l2.c[1] = d2.second;
    l2.c[0] = -d2.first;
    BinaryForm q = multiply(l1, l2);
    BinaryForm q2 = multiply(q, q);
    Complex c = (q2.c.adjoint() * g.c)(0) / (q2.c.adjoint() * q2.c)(0).real();
    if ((g.c - c * q2.c).norm() > 0.3 * g.c.norm()) continue;

    // Always polish: the seed roots of a multiple root are only eps^(1/m)
    // accurate. Gauss-Newton on the coefficients of u^2 - g with u = sqrt(c) q
    Vec u(3);
    Complex sc = std::sqrt(c);
    u << sc * q.c[0], sc * q.c[1], sc * q.c[2];
    for (int it = 0; it < 50; ++it) {
      BinaryForm qq(2, u);
      Vec r = multiply(qq, qq).c - g.c;
      Eigen::MatrixXcd J(5, 3);
      for (int k = 0; k < 3; ++k) {
        BinaryForm ek = BinaryForm::zero(2);
        ek.c[k] = 1.0;
        J.col(k) = 2.0 * multiply(qq, ek).c;
      }
      Vec step = J.colPivHouseholderQr().solve(-r);
      if (!step.allFinite()) break;
      u += step;
      if (step.norm() < 1e-14 * u.norm()) break;
    }
    BinaryForm qq(2, u);
    if ((multiply(qq, qq).c - g.c).norm() <= tol * g.c.norm())
      return std::make_pair(qq, Complex(1.0));
  }
  return std::nullopt;
}

// Detects h = c * q^2 for a ternary quartic. The candidate square root is
// reconstructed from binary restrictions through a fixed base point, which
// glues the per-line sign choices, then verified globally.
inline std::optional<std::pair<TernaryForm, Complex>> perfect_square_quartic(
    const TernaryForm& h, double tol = 1e-8) {
  if (h.degree != 4) throw FormError("perfect_square_quartic needs degree 4");
  if (h.is_zero()) return std::nullopt;

  static const std::vector<Eigen::Vector3cd> samples = [] {
    std::vector<Eigen::Vector3cd> pts;
    pts.emplace_back(1.0, 0.0, 0.0);
    pts.emplace_back(0.0, 1.0, 0.0);
    pts.emplace_back(0.0, 0.0, 1.0);
    pts.emplace_back(1.0, 1.0, 0.0);
    pts.emplace_back(1.0, 0.0, 1.0);
    pts.emplace_back(0.0, 1.0, 1.0);
    pts.emplace_back(1.0, 1.0, 1.0);
    pts.emplace_back(1.0, Complex(0.3, 0.1), -0.7);
    pts.emplace_back(Complex(0.2, 0.5), 1.0, 0.4);
    pts.emplace_back(-0.6, 0.9, Complex(1.0, 0.2));
    return pts;
  }();

  // base point with h(p0) significantly nonzero
  int base = -1;
  double best = 0;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    double v = std::abs(h.eval(samples[i]));
    if (v > best) {
      best = v;
      base = i;
    }
  }
  if (base < 0 || best < 1e-13 * h.norm()) return std::nullopt;
  const Eigen::Vector3cd p0 = samples[base];
  Complex s0 = std::sqrt(h.eval(p0));

  // values q(p) at sample points via restrictions through p0
  std::vector<Eigen::Vector3cd> pts;
  std::vector<Complex> vals;
  pts.push_back(p0);
  vals.push_back(s0);
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    if (i == base) continue;
    BinaryForm g = restrict_to_line(h, p0, samples[i]);
    if (g.is_zero(1e-13 * h.norm())) {
      pts.push_back(samples[i]);
      vals.push_back(0.0);
      continue;
    }
    auto sq = perfect_square_binary_quartic(g, 1e-8);
    if (!sq) return std::nullopt;
    auto [r, cc] = *sq;
    Complex rs = std::sqrt(cc);
    Complex at_p0 = rs * r.eval(1.0, 0.0);
    if (std::abs(at_p0) < 1e-13) return std::nullopt;  // inconsistent with h(p0) != 0
    Complex fix = s0 / at_p0;
    pts.push_back(samples[i]);
    vals.push_back(fix * rs * r.eval(0.0, 1.0));
  }

  // linear solve for the 6 coefficients of q from point evaluations
  Eigen::MatrixXcd M(pts.size(), 6);
  Eigen::VectorXcd b(pts.size());
  const auto& e2 = exponents(2);
  for (size_t i = 0; i < pts.size(); ++i) {
    for (int j = 0; j < 6; ++j) {
      Complex m = 1;
      for (int k = 0; k < e2[j][0]; ++k) m *= pts[i][0];
      for (int k = 0; k < e2[j][1]; ++k) m *= pts[i][1];
      for (int k = 0; k < e2[j][2]; ++k) m *= pts[i][2];
      M(i, j) = m;
    }
    b[i] = vals[i];
  }
  Vec qc = M.colPivHouseholderQr().solve(b);
  TernaryForm q(2, qc);
  TernaryForm q2 = multiply(q, q);
  if ((q2.c - h.c).norm() > tol * h.norm()) return std::nullopt;
  return std::make_pair(q, Complex(1.0));
}

}  // namespace qgram
