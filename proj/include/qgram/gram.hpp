#pragma once

// Gram tensors of ternary quartics in the basis X = (x^2, y^2, z^2, xy, xz, yz),
// the Gram map, the affine pencil of Gram matrices, face dimensions, and
// triangular sos representations.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qgram/forms.hpp"

namespace qgram {

using Mat6c = Eigen::Matrix<Complex, 6, 6>;
using Mat6d = Eigen::Matrix<double, 6, 6>;

struct GramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GramTensor {
  Mat6c m = Mat6c::Zero();

  GramTensor() = default;
  explicit GramTensor(const Mat6c& a) : m(0.5 * (a + a.transpose())) {}
  explicit GramTensor(const Mat6d& a) : m((0.5 * (a + a.transpose())).cast<Complex>()) {}

  bool is_real(double tol = 1e-10) const {
    double scale = m.cwiseAbs().maxCoeff();
    return m.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, scale);
  }
  Mat6d real_part() const { return m.real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat6d> es(real_part(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  double spectral_norm() const {
    Eigen::SelfAdjointEigenSolver<Mat6d> es(real_part(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // psd predicate for real tensors
  bool is_psd(double tol = 1e-9) const {
    double s = spectral_norm();
    return min_eigenvalue() >= -tol * std::max(1.0, s);
  }
};

// Orthonormal basis of a subspace of quadratics (rows = 6) or quartics (rows = 15).
struct Subspace {
  Eigen::MatrixXcd basis;  // columns orthonormal

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient() const { return static_cast<int>(basis.rows()); }

  static Subspace from_columns(const Eigen::MatrixXcd& cols, double rel_tol = 1e-9) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cols, Eigen::ComputeThinU);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > rel_tol * smax) ++r;
    Subspace u;
    u.basis = svd.matrixU().leftCols(r);
    return u;
  }

  // Is span(conj(basis)) == span(basis)?
  bool conjugation_stable(double rel_tol = 1e-7) const {
    Eigen::MatrixXcd both(basis.rows(), 2 * basis.cols());
    both << basis, basis.conjugate();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(both);
    double smax = svd.singularValues()(0);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > rel_tol * smax) ++r;
    return r == dim();
  }

  // Real orthonormal basis of a conjugation-stable subspace.
  Subspace real_form(double rel_tol = 1e-9) const {
    Eigen::MatrixXcd parts(basis.rows(), 2 * basis.cols());
    parts << basis.real().cast<Complex>(), basis.imag().cast<Complex>();
    Subspace u = from_columns(parts, rel_tol);
    if (u.dim() != dim()) throw GramError("subspace is not conjugation-stable");
    u.basis = u.basis.real().cast<Complex>();
    return u;
  }
};

struct GramPencil {
  TernaryForm f;            // the quartic, degree 4
  Mat6d base;               // G(0)
  std::array<Mat6d, 6> dirs;  // kernel directions B1..B6
};

struct FaceDescriptor {
  int rank = 0;
  int face_dim = 0;
  Subspace image;
};

// mu(theta) = X theta X^T expanded in the degree-4 basis.
inline TernaryForm gram_map(const GramTensor& theta) {
  TernaryForm f = TernaryForm::zero(4);
  const auto& e2 = exponents(2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (theta.m(i, j) == Complex(0)) continue;
      f.c[monomial_index(4, e2[i][0] + e2[j][0], e2[i][1] + e2[j][1], e2[i][2] + e2[j][2])] +=
          theta.m(i, j);
    }
  return f;
}

inline TernaryForm gram_map(const Mat6d& g) { return gram_map(GramTensor(g)); }

// The affine parametrization of all Gram matrices of f: G(lambda) = base +
// sum lambda_i * dirs[i], lambda in R^6.
inline GramPencil gram_pencil(const TernaryForm& f) {
  if (f.degree != 4) throw GramError("gram_pencil needs a quartic");
  if (!f.is_real()) throw GramError("gram_pencil needs a real quartic");
  auto c = [&](int a, int b, int g) { return f.at(a, b, g).real(); };

  Mat6d G = Mat6d::Zero();
  G(0, 0) = c(4, 0, 0);
  G(1, 1) = c(0, 4, 0);
  G(2, 2) = c(0, 0, 4);
  G(3, 3) = c(2, 2, 0);
  G(4, 4) = c(2, 0, 2);
  G(5, 5) = c(0, 2, 2);
  G(0, 3) = G(3, 0) = 0.5 * c(3, 1, 0);
  G(0, 4) = G(4, 0) = 0.5 * c(3, 0, 1);
  G(1, 3) = G(3, 1) = 0.5 * c(1, 3, 0);
  G(1, 5) = G(5, 1) = 0.5 * c(0, 3, 1);
  G(2, 4) = G(4, 2) = 0.5 * c(1, 0, 3);
  G(2, 5) = G(5, 2) = 0.5 * c(0, 1, 3);
  G(3, 4) = G(4, 3) = 0.5 * c(2, 1, 1);
  G(3, 5) = G(5, 3) = 0.5 * c(1, 2, 1);
  G(4, 5) = G(5, 4) = 0.5 * c(1, 1, 2);

  GramPencil p;
  p.f = f;
  p.base = G;
  for (auto& d : p.dirs) d = Mat6d::Zero();
  p.dirs[0](0, 1) = p.dirs[0](1, 0) = 1.0;
  p.dirs[0](3, 3) = -2.0;
  p.dirs[1](0, 2) = p.dirs[1](2, 0) = 1.0;
  p.dirs[1](4, 4) = -2.0;
  p.dirs[2](1, 2) = p.dirs[2](2, 1) = 1.0;
  p.dirs[2](5, 5) = -2.0;
  p.dirs[3](0, 5) = p.dirs[3](5, 0) = 1.0;
  p.dirs[3](3, 4) = p.dirs[3](4, 3) = -1.0;
  p.dirs[4](1, 4) = p.dirs[4](4, 1) = 1.0;
  p.dirs[4](3, 5) = p.dirs[4](5, 3) = -1.0;
  p.dirs[5](2, 3) = p.dirs[5](3, 2) = 1.0;
  p.dirs[5](4, 5) = p.dirs[5](5, 4) = -1.0;
  return p;
}

inline Mat6d pencil_at(const GramPencil& p, const Eigen::Matrix<double, 6, 1>& lambda) {
  Mat6d g = p.base;
  for (int i = 0; i < 6; ++i) g += lambda[i] * p.dirs[i];
  return g;
}

// Span of the dominant singular vectors, returned as quadratic forms.
inline Subspace image(const GramTensor& theta, double rank_tol = 1e-7) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(theta.m, Eigen::ComputeThinU);
  double smax = svd.singularValues()(0);
  if (smax == 0.0) {
    Subspace u;
    u.basis.resize(6, 0);
    return u;
  }
  int r = 0;
  for (int i = 0; i < 6; ++i)
    if (svd.singularValues()(i) > rank_tol * smax) ++r;
  Subspace u;
  u.basis = svd.matrixU().leftCols(r);
  return u;
}

inline int rank(const GramTensor& theta, double rank_tol = 1e-7) {
  return image(theta, rank_tol).dim();
}

// Orthonormal basis of span{u*v : u, v in U} inside the quartics.
inline Subspace square_space(const Subspace& u, double rel_tol = 1e-9) {
  if (u.ambient() != 6) throw GramError("square_space expects quadratics");
  int r = u.dim();
  Eigen::MatrixXcd prods(15, r * (r + 1) / 2);
  int col = 0;
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      TernaryForm a(2, u.basis.col(i));
      TernaryForm b(2, u.basis.col(j));
      prods.col(col++) = multiply(a, b).c;
    }
  return Subspace::from_columns(prods, rel_tol);
}

// dim F = C(dim U + 1, 2) - dim U^2
inline int face_dimension(const Subspace& u, double rel_tol = 1e-9) {
  int r = u.dim();
  return r * (r + 1) / 2 - square_space(u, rel_tol).dim();
}

struct GramFromImage {
  GramTensor tensor;
  double residual = 0.0;
  double condition = 0.0;
};

// The unique Gram tensor of f with image inside the 3-dim subspace U.
inline GramFromImage gram_from_image(const TernaryForm& f, const Subspace& u,
                                     double residual_tol = 1e-9) {
  if (u.dim() != 3) throw GramError("gram_from_image needs dim(U) = 3");
  // unknowns: symmetric 3x3 A; equations: mu(B A B^T) = f over the 15 quartic coeffs
  Eigen::MatrixXcd M(15, 6);
  int col = 0;
  std::array<std::pair<int, int>, 6> idx;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      TernaryForm a(2, u.basis.col(i));
      TernaryForm b(2, u.basis.col(j));
      TernaryForm prod = multiply(a, b);
      M.col(col) = (i == j ? 1.0 : 2.0) * prod.c;
      idx[col] = {i, j};
      ++col;
    }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
  if (qr.rank() < 6) throw GramError("gram_from_image: singular system, image not unique");
  Eigen::VectorXcd a = qr.solve(f.c);
  double res = (M * a - f.c).norm() / std::max(1.0, f.norm());
  if (res > residual_tol) throw GramError("gram_from_image: f not representable over U");

  Eigen::Matrix3cd A;
  for (int k = 0; k < 6; ++k) {
    A(idx[k].first, idx[k].second) = a[k];
    A(idx[k].second, idx[k].first) = a[k];
  }
  GramFromImage out;
  out.tensor = GramTensor(Mat6c(u.basis * A * u.basis.transpose()));
  out.residual = res;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  out.condition = svd.singularValues()(0) / svd.singularValues()(5);
  return out;
}

// Lower-triangular coefficients a_ij with f = sum_i (sum_{j<=i} a_ij p_j)^2,
// for a real psd tensor theta of rank r and a basis p_1..p_r of im(theta).
inline Eigen::MatrixXd triangular_sos(const GramTensor& theta,
                                      const Eigen::MatrixXd& basis,  // 6 x r
                                      double residual_tol = 1e-9) {
  int r = static_cast<int>(basis.cols());
  if (!theta.is_real()) throw GramError("triangular_sos needs a real tensor");
  Mat6d G = theta.real_part();
  // A = P^+ G (P^+)^T so that G = P A P^T
  Eigen::MatrixXd pinv = basis.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd A = pinv * G * pinv.transpose();
  if ((basis * A * basis.transpose() - G).norm() > residual_tol * std::max(1.0, G.norm()))
    throw GramError("triangular_sos: basis does not span im(theta)");
  A = 0.5 * (A + A.transpose());

  // want lower-triangular L with L^T L = A; flip, Cholesky, flip back
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) J(i, r - 1 - i) = 1.0;
  Eigen::MatrixXd Af = J * A * J;
  Eigen::LLT<Eigen::MatrixXd> llt(Af + 1e-14 * Af.norm() * Eigen::MatrixXd::Identity(r, r));
  if (llt.info() != Eigen::Success) throw GramError("triangular_sos: tensor not psd on basis");
  Eigen::MatrixXd U = llt.matrixU();
  Eigen::MatrixXd L = J * U * J;

  // verify reconstruction
  TernaryForm rec = TernaryForm::zero(4);
  for (int i = 0; i < r; ++i) {
    Vec row = Vec::Zero(6);
    for (int j = 0; j <= i; ++j) row += Complex(L(i, j)) * basis.col(j).cast<Complex>();
    TernaryForm s(2, row);
    rec = rec + multiply(s, s);
  }
  TernaryForm f = gram_map(theta);
  if ((rec.c - f.c).norm() > residual_tol * std::max(1.0, f.norm()))
    throw GramError("triangular_sos: reconstruction residual too large");
  return L;
}

}  // namespace qgram
