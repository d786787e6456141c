#pragma once

// Primal-dual path-following solver with Nesterov-Todd scaling for small
// dense SDPs in pencil form:
//
//   minimize   c^T y   subject to   G(y) = F0 + sum_i y_i F_i  psd
//
// given a strictly feasible start y0. The multiplier X satisfies
// <F_i, X> = c_i at optimality; the duality gap is <X, G(y)>.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qgram {

struct SdpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SdpPencilProblem {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;
  Eigen::VectorXd c;

  Eigen::MatrixXd at(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd g = F0;
    for (size_t i = 0; i < F.size(); ++i) g += y[i] * F[i];
    return g;
  }
};

struct SdpOptions {
  double tol = 1e-9;
  int max_iterations = 200;
  double step_fraction = 0.98;
};

struct SdpSolution {
  Eigen::VectorXd y;
  Eigen::MatrixXd G;  // G(y), psd up to tolerance
  Eigen::MatrixXd X;  // multiplier
  double gap = 0.0;
  double multiplier_residual = 0.0;  // ||<F_i,X> - c_i||_inf
  int iterations = 0;
  bool converged = false;
};

namespace sdp_detail {

inline Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& a, bool inverse = false) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    double v = std::max(d[i], 0.0);
    d[i] = inverse ? 1.0 / std::sqrt(std::max(v, 1e-300)) : std::sqrt(v);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// largest alpha with m + alpha*dm psd (m positive definite)
inline double max_step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& dm) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd w = L.triangularView<Eigen::Lower>().solve(dm);
  w = L.triangularView<Eigen::Lower>().solve(w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace sdp_detail

inline SdpSolution sdp_solve(const SdpPencilProblem& prob, const Eigen::VectorXd& y0,
                             const SdpOptions& opt = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = static_cast<int>(prob.F0.rows());
  const int m = static_cast<int>(prob.F.size());

  VectorXd y = y0;
  MatrixXd S = prob.at(y);
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw SdpError("sdp_solve: start point is not strictly feasible");
  }
  double s_scale = S.norm() / std::sqrt(double(n));
  MatrixXd X = MatrixXd::Identity(n, n) * std::max(s_scale, 1.0);

  const double c_scale = 1.0 + prob.c.norm();
  SdpSolution sol;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    double mu = (X * S).trace() / n;
    VectorXd rp(m);
    for (int i = 0; i < m; ++i) rp[i] = prob.c[i] - (prob.F[i].cwiseProduct(X)).sum();

    double gap_rel = mu * n / (1.0 + std::abs(prob.c.dot(y)));
    double rp_rel = rp.lpNorm<Eigen::Infinity>() / c_scale;
    if (gap_rel <= opt.tol && rp_rel <= opt.tol) {
      sol.converged = true;
      sol.iterations = iter;
      break;
    }

    // NT scaling W with W S W = X
    MatrixXd Sh = sdp_detail::sym_sqrt(S);
    MatrixXd Shi = sdp_detail::sym_sqrt(S, true);
    MatrixXd T = sdp_detail::sym_sqrt(Sh * X * Sh);
    MatrixXd W = Shi * T * Shi;

    MatrixXd Sinv = Shi * Shi;
    Eigen::LDLT<MatrixXd> schur_fact;
    MatrixXd M(m, m);
    std::vector<MatrixXd> WFW(m);
    for (int j = 0; j < m; ++j) WFW[j] = W * prob.F[j] * W;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        M(i, j) = (prob.F[i].cwiseProduct(WFW[j])).sum();
        M(j, i) = M(i, j);
      }
    schur_fact.compute(M);
    if (schur_fact.info() != Eigen::Success)
      throw SdpError("sdp_solve: singular Schur complement (dependent pencil directions)");

    auto direction = [&](double sigma, VectorXd& dy, MatrixXd& dS, MatrixXd& dX) {
      VectorXd rhs(m);
      for (int i = 0; i < m; ++i)
        rhs[i] = sigma * mu * (prob.F[i].cwiseProduct(Sinv)).sum() - prob.c[i];
      dy = schur_fact.solve(rhs);
      dS = MatrixXd::Zero(n, n);
      for (int i = 0; i < m; ++i) dS += dy[i] * prob.F[i];
      dX = sigma * mu * Sinv - X - W * dS * W;
      dX = 0.5 * (dX + dX.transpose()).eval();
    };

    // predictor to pick the centering parameter
    VectorXd dy;
    MatrixXd dS, dX;
    direction(0.0, dy, dS, dX);
    double a_s = std::min(1.0, opt.step_fraction * sdp_detail::max_step(S, dS));
    double a_x = std::min(1.0, opt.step_fraction * sdp_detail::max_step(X, dX));
    double a_aff = std::min(a_s, a_x);
    double mu_aff = ((X + a_aff * dX) * (S + a_aff * dS)).trace() / n;
    double sigma = std::pow(std::max(mu_aff / mu, 0.0), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 0.99);

    direction(sigma, dy, dS, dX);
    a_s = std::min(1.0, opt.step_fraction * sdp_detail::max_step(S, dS));
    a_x = std::min(1.0, opt.step_fraction * sdp_detail::max_step(X, dX));
    double alpha = std::min(a_s, a_x);
    if (alpha <= 1e-14) {
      sol.iterations = iter;
      break;  // stalled; report best iterate
    }

    y += alpha * dy;
    S = prob.at(y);  // exact pencil feasibility
    X += alpha * dX;
    sol.iterations = iter + 1;
  }

  sol.y = y;
  sol.G = S;
  sol.X = X;
  sol.gap = (X * S).trace();
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    worst = std::max(worst, std::abs(prob.c[i] - (prob.F[i].cwiseProduct(X)).sum()));
  sol.multiplier_residual = worst;
  if (!sol.converged)
    if (sol.gap / (1.0 + std::abs(prob.c.dot(y))) > 100 * opt.tol)
      throw SdpError("sdp_solve: numerical-failure, no convergence within iteration cap");
  return sol;
}

// Strictly feasible point of the pencil, via max t s.t. G(y) - t I psd.
// Returns the maximizing y; throws if the best t is not positive.
struct InteriorPoint {
  Eigen::VectorXd y;
  double margin;  // optimal t (max over y of lambda_min directionally)
};

inline InteriorPoint sdp_interior_point(const SdpPencilProblem& prob, double tol = 1e-9) {
  const int n = static_cast<int>(prob.F0.rows());
  const int m = static_cast<int>(prob.F.size());
  SdpPencilProblem ext;
  ext.F0 = prob.F0;
  ext.F = prob.F;
  ext.F.push_back(-Eigen::MatrixXd::Identity(n, n));
  ext.c = Eigen::VectorXd::Zero(m + 1);
  ext.c[m] = -1.0;  // minimize -t

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(m + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.F0, Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, prob.F0.norm());
  y0[m] = es.eigenvalues().minCoeff() - 0.1 * scale;

  SdpOptions opt;
  opt.tol = tol;
  SdpSolution sol = sdp_solve(ext, y0, opt);
  InteriorPoint ip;
  ip.y = sol.y.head(m);
  ip.margin = sol.y[m];
  return ip;
}

}  // namespace qgram
