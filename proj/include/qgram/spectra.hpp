#pragma once

// Optimization over the Gram spectrahedron: interior points, linear-functional
// minimization, extreme-point sampling, face classification, one-dimensional
// face detection, and determinant-slice data.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qgram/bitangent.hpp"
#include "qgram/gram.hpp"
#include "qgram/sdp.hpp"
#include "qgram/steiner.hpp"

namespace qgram {

struct SpectraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SdpProblem {
  GramPencil pencil;
  Mat6d objective;  // cost matrix C; minimized as <C, G(lambda)>
};

struct ExtremeSample {
  Eigen::Matrix<double, 6, 1> lambda;
  GramTensor tensor;
  FaceDescriptor face;
  double objective_value = 0.0;
  double gap = 0.0;
  bool converged = false;
};

inline SdpPencilProblem to_pencil_problem(const GramPencil& p, const Mat6d& objective) {
  SdpPencilProblem prob;
  prob.F0 = p.base;
  prob.F.assign(p.dirs.begin(), p.dirs.end());
  prob.c.resize(6);
  for (int i = 0; i < 6; ++i) prob.c[i] = (objective.cwiseProduct(p.dirs[i])).sum();
  return prob;
}

// lambda0 with G(lambda0) strictly positive definite; throws if f is not
// strictly sos.
inline Eigen::Matrix<double, 6, 1> interior_point(const GramPencil& p, double tol = 1e-9) {
  SdpPencilProblem prob = to_pencil_problem(p, Mat6d::Zero());
  InteriorPoint ip = sdp_interior_point(prob, tol);
  Eigen::Matrix<double, 6, 1> lambda = ip.y;
  Mat6d g = pencil_at(p, lambda);
  Eigen::SelfAdjointEigenSolver<Mat6d> es(g, Eigen::EigenvaluesOnly);
  double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < 1e-6 * std::max(norm, 1e-12))
    throw SpectraError("infeasible: no strictly positive Gram matrix found (f not sos)");
  return lambda;
}

// Rank and face dimension of the supporting face of a feasible tensor.
inline FaceDescriptor supporting_face(const GramTensor& theta, const TernaryForm& f,
                                      double rank_tol = 1e-7, double feas_tol = 1e-8) {
  TernaryForm mu = gram_map(theta);
  if ((mu.c - f.c).norm() > feas_tol * std::max(1.0, f.norm()))
    throw SpectraError("not-feasible: tensor does not map to f");
  FaceDescriptor fd;
  fd.image = image(theta, rank_tol);
  fd.rank = fd.image.dim();
  fd.face_dim = face_dimension(fd.image);
  return fd;
}

inline ExtremeSample sdp_minimize(const SdpProblem& problem,
                                  const Eigen::Matrix<double, 6, 1>& start, double tol = 1e-9,
                                  double solver_rank_tol = 1e-6) {
  SdpPencilProblem prob = to_pencil_problem(problem.pencil, problem.objective);
  SdpOptions opt;
  opt.tol = tol;
  SdpSolution sol = sdp_solve(prob, start, opt);

  ExtremeSample s;
  s.lambda = sol.y;
  s.tensor = GramTensor(Mat6d(sol.G));
  s.objective_value = (problem.objective.cwiseProduct(sol.G)).sum();
  s.gap = sol.gap;
  s.converged = sol.converged;
  s.face = supporting_face(s.tensor, problem.pencil.f, solver_rank_tol);
  return s;
}

struct SampleSummary {
  std::vector<ExtremeSample> samples;
  std::map<std::pair<int, int>, int> histogram;  // (rank, face_dim) -> count
  int failures = 0;
};

// N minimizations of seeded Gaussian-orthogonal-ensemble objectives.
inline SampleSummary sample_extreme_points(const TernaryForm& f, int n_samples, uint64_t seed,
                                           double tol = 1e-9, double solver_rank_tol = 1e-6) {
  GramPencil pencil = gram_pencil(f);
  Eigen::Matrix<double, 6, 1> start = interior_point(pencil);
  SampleSummary out;
  for (int k = 0; k < n_samples; ++k) {
    std::mt19937_64 rng(seed + static_cast<uint64_t>(k));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat6d a;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) a(i, j) = gauss(rng);
    SdpProblem prob{pencil, Mat6d(0.5 * (a + a.transpose()))};
    try {
      ExtremeSample s = sdp_minimize(prob, start, tol, solver_rank_tol);
      out.histogram[{s.face.rank, s.face.face_dim}]++;
      out.samples.push_back(std::move(s));
    } catch (const SdpError&) {
      ++out.failures;
    }
  }
  return out;
}

// Minimize a linear functional over the 2-dim face spanned around a rank-5
// edge of the Steiner graph. The face is the psd locus of an affine plane in
// Sym^2 of the 5-dim image of theta_i + theta_j.
inline ExtremeSample face_extreme(const TernaryForm& f, const GramTensor& ti,
                                  const GramTensor& tj, const Mat6d& direction,
                                  double tol = 1e-9, double rank_tol = 1e-7,
                                  double solver_rank_tol = 1e-6) {
  Mat6d sum = (ti.m + tj.m).real();
  if ((ti.m + tj.m).imag().cwiseAbs().maxCoeff() > 1e-9)
    throw SpectraError("face_extreme needs real tensors");
  Eigen::SelfAdjointEigenSolver<Mat6d> es(sum);
  double smax = es.eigenvalues().cwiseAbs().maxCoeff();
  int r = 0;
  for (int k = 0; k < 6; ++k)
    if (es.eigenvalues()[k] > rank_tol * smax) ++r;
  if (r != 5) throw SpectraError("face_extreme needs a rank-5 edge");
  Eigen::MatrixXd B = es.eigenvectors().rightCols(5);

  // Coefficient matrix of A |-> mu(B A B^T) over svec(A), 15 equations.
  Eigen::MatrixXd M(15, 15);
  std::array<std::pair<int, int>, 15> idx;
  int col = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) {
      TernaryForm a(2, Vec(B.col(i).cast<Complex>()));
      TernaryForm b(2, Vec(B.col(j).cast<Complex>()));
      M.col(col) = ((i == j ? 1.0 : 2.0) * multiply(a, b).c).real();
      idx[col] = {i, j};
      ++col;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  double sv_max = svd.singularValues()(0);
  int null_dim = 0;
  for (int i = 0; i < 15; ++i)
    if (svd.singularValues()(i) <= 1e-9 * sv_max) ++null_dim;
  if (null_dim != 2)
    throw SpectraError("face_extreme: face dimension " + std::to_string(null_dim) +
                       " instead of 2");

  auto unsvec = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
    for (int k = 0; k < 15; ++k) {
      a(idx[k].first, idx[k].second) = v[k];
      a(idx[k].second, idx[k].first) = v[k];
    }
    return a;
  };

  // relative-interior point of the face: the midpoint of the edge
  Eigen::MatrixXd A_mid = B.transpose() * (0.5 * (ti.m + tj.m)).real() * B;

  SdpPencilProblem prob;
  prob.F0 = A_mid;
  prob.F = {unsvec(svd.matrixV().col(13)), unsvec(svd.matrixV().col(14))};
  prob.c.resize(2);
  Eigen::MatrixXd C5 = B.transpose() * direction * B;
  for (int i = 0; i < 2; ++i) prob.c[i] = (C5.cwiseProduct(prob.F[i])).sum();

  SdpOptions opt;
  opt.tol = tol;
  SdpSolution sol = sdp_solve(prob, Eigen::Vector2d::Zero(), opt);

  ExtremeSample s;
  s.tensor = GramTensor(Mat6d(B * sol.G * B.transpose()));
  s.lambda.setZero();  // face coordinates, not pencil coordinates
  s.objective_value = (direction.cwiseProduct(s.tensor.real_part())).sum();
  s.gap = sol.gap;
  s.converged = sol.converged;
  s.face = supporting_face(s.tensor, f, solver_rank_tol);
  return s;
}

struct OneDimFace {
  int edge_u, edge_v;            // psd-tensor indices in the Steiner graph
  std::array<int, 4> quadruple;  // concurrent bitangents shared by the two complexes
};

// Match rank-4 Steiner-graph edges against concurrent bitangent quadruples;
// the two detectors must agree.
inline std::vector<OneDimFace> one_dim_face_report(
    const TernaryForm& f, const std::vector<Bitangent>& bits,
    const std::vector<SteinerComplex>& complexes, const SteinerGraph& graph,
    double concurrency_tol = 1e-8) {
  auto quadruples = concurrent_quadruples(bits, concurrency_tol);
  std::set<std::array<int, 4>> quad_set(quadruples.begin(), quadruples.end());

  std::vector<OneDimFace> out;
  std::set<std::array<int, 4>> matched;
  for (const auto& e : graph.edges) {
    if (e.rank != 4) continue;
    const auto& s1 = complexes[graph.complex_index[e.u]];
    const auto& s2 = complexes[graph.complex_index[e.v]];
    auto b1 = s1.bitangent_set();
    auto b2 = s2.bitangent_set();
    std::vector<int> shared;
    std::set_intersection(b1.begin(), b1.end(), b2.begin(), b2.end(),
                          std::back_inserter(shared));
    if (shared.size() != 4)
      throw SpectraError("detector-disagreement: rank-4 edge without a shared quadruple");
    std::array<int, 4> q{shared[0], shared[1], shared[2], shared[3]};
    if (!quad_set.count(q))
      throw SpectraError("detector-disagreement: shared bitangents of a rank-4 edge "
                         "are not concurrent");
    matched.insert(q);
    out.push_back({e.u, e.v, q});
  }
  if (out.size() > 6)
    throw SpectraError("more than six 1-dimensional faces detected");

  // Converse direction: a concurrent quadruple yields a 1-dim face exactly
  // when at least two of its three associated rank-3 tensors are psd; every
  // such psd pair must appear as a rank-4 edge.
  for (const auto& q : quadruples) {
    std::set<int> qs(q.begin(), q.end());
    std::vector<int> owners;  // complexes containing two pairs within q
    for (int ci = 0; ci < static_cast<int>(complexes.size()); ++ci) {
      int inside = 0;
      for (const auto& p : complexes[ci].pairs)
        if (qs.count(p.i) && qs.count(p.j)) ++inside;
      if (inside == 2) owners.push_back(ci);
    }
    if (owners.size() != 3)
      throw SpectraError("concurrent quadruple not covered by three complexes");
    std::vector<int> psd_owner_vertices;
    for (int ci : owners) {
      for (int vi = 0; vi < static_cast<int>(graph.complex_index.size()); ++vi)
        if (graph.complex_index[vi] == ci) psd_owner_vertices.push_back(vi);
    }
    for (size_t a = 0; a < psd_owner_vertices.size(); ++a)
      for (size_t b = a + 1; b < psd_owner_vertices.size(); ++b) {
        bool found = false;
        for (const auto& e : graph.edges)
          if (e.rank == 4 &&
              ((e.u == psd_owner_vertices[a] && e.v == psd_owner_vertices[b]) ||
               (e.v == psd_owner_vertices[a] && e.u == psd_owner_vertices[b])))
            found = true;
        if (!found)
          throw SpectraError("detector-disagreement: concurrent quadruple with two psd "
                             "tensors but no rank-4 edge");
      }
  }
  return out;
}

struct SliceRow {
  double l1, l2, l3;
  double det, lambda_min;
};

struct SliceData {
  std::vector<SliceRow> rows;
  Eigen::VectorXd poly;  // 84 coefficients of the interpolated degree-6 polynomial
  double holdout_residual = 0.0;
  std::array<double, 2> box{0.0, 1.0};  // per-axis bounds
};

namespace slice_detail {

inline std::vector<std::array<int, 3>> degree6_exponents() {
  std::vector<std::array<int, 3>> e;
  for (int a = 6; a >= 0; --a)
    for (int b = 6 - a; b >= 0; --b)
      for (int c = 6 - a - b; c >= 0; --c) e.push_back({a, b, c});
  return e;
}

inline double eval_poly(const Eigen::VectorXd& coef,
                        const std::vector<std::array<int, 3>>& exps, double x, double y,
                        double z) {
  double s = 0;
  for (size_t i = 0; i < exps.size(); ++i)
    s += coef[i] * std::pow(x, exps[i][0]) * std::pow(y, exps[i][1]) * std::pow(z, exps[i][2]);
  return s;
}

}  // namespace slice_detail

// det G and lambda_min(G) over the grid for the affine 3-space
// G(l) = t0 + l1 (t1 - t0) + l2 (t2 - t0) + l3 (t3 - t0), plus the
// interpolated degree-6 determinant polynomial.
inline SliceData pencil_determinant_slice(const std::array<GramTensor, 4>& thetas, int grid,
                                          std::array<double, 2> box = {0.0, 1.0},
                                          uint64_t holdout_seed = 7) {
  Mat6d t0 = thetas[0].real_part();
  Mat6d d1 = thetas[1].real_part() - t0;
  Mat6d d2 = thetas[2].real_part() - t0;
  Mat6d d3 = thetas[3].real_part() - t0;
  if (d1.norm() < 1e-12 || d2.norm() < 1e-12 || d3.norm() < 1e-12)
    throw SpectraError("affinely-dependent-inputs to pencil_determinant_slice");
  {
    Eigen::MatrixXd dirs(36, 3);
    dirs.col(0) = Eigen::Map<Eigen::VectorXd>(d1.data(), 36);
    dirs.col(1) = Eigen::Map<Eigen::VectorXd>(d2.data(), 36);
    dirs.col(2) = Eigen::Map<Eigen::VectorXd>(d3.data(), 36);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs);
    if (svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0))
      throw SpectraError("affinely-dependent-inputs to pencil_determinant_slice");
  }

  auto G = [&](double a, double b, double c) { return Mat6d(t0 + a * d1 + b * d2 + c * d3); };
  auto sample = [&](double a, double b, double c) {
    Mat6d g = G(a, b, c);
    Eigen::SelfAdjointEigenSolver<Mat6d> es(g, Eigen::EigenvaluesOnly);
    return SliceRow{a, b, c, g.determinant(), es.eigenvalues().minCoeff()};
  };

  SliceData out;
  out.box = box;
  if (grid <= 1) {
    double mid = 0.5 * (box[0] + box[1]);
    out.rows.push_back(sample(mid, mid, mid));
  } else {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j)
        for (int k = 0; k < grid; ++k) {
          double a = box[0] + (box[1] - box[0]) * i / (grid - 1);
          double b = box[0] + (box[1] - box[0]) * j / (grid - 1);
          double c = box[0] + (box[1] - box[0]) * k / (grid - 1);
          out.rows.push_back(sample(a, b, c));
        }
  }

  // interpolate det as a degree-6 polynomial on a fixed node set
  auto exps = slice_detail::degree6_exponents();
  const int n_nodes = 7;
  Eigen::MatrixXd A(n_nodes * n_nodes * n_nodes, exps.size());
  Eigen::VectorXd rhs(n_nodes * n_nodes * n_nodes);
  int row = 0;
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j < n_nodes; ++j)
      for (int k = 0; k < n_nodes; ++k) {
        double a = box[0] + (box[1] - box[0]) * i / (n_nodes - 1);
        double b = box[0] + (box[1] - box[0]) * j / (n_nodes - 1);
        double c = box[0] + (box[1] - box[0]) * k / (n_nodes - 1);
        for (size_t t = 0; t < exps.size(); ++t)
          A(row, t) = std::pow(a, exps[t][0]) * std::pow(b, exps[t][1]) * std::pow(c, exps[t][2]);
        rhs[row] = G(a, b, c).determinant();
        ++row;
      }
  out.poly = A.colPivHouseholderQr().solve(rhs);

  std::mt19937_64 rng(holdout_seed);
  std::uniform_real_distribution<double> uni(box[0], box[1]);
  double worst = 0.0, scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (int t = 0; t < 50; ++t) {
    double a = uni(rng), b = uni(rng), c = uni(rng);
    double exact = G(a, b, c).determinant();
    double interp = slice_detail::eval_poly(out.poly, exps, a, b, c);
    worst = std::max(worst, std::abs(exact - interp) / scale);
  }
  out.holdout_residual = worst;
  return out;
}

}  // namespace qgram
