#pragma once

// Steiner complexes assembled from conic certificates, the associated rank-3
// Gram tensors, their real/psd classification, and the Steiner graph.

#include <array>
#include <map>
#include <tuple>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "qgram/bitangent.hpp"
#include "qgram/gram.hpp"

namespace qgram {

struct SteinerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BitPair {
  int i, j;  // 0 <= i < j <= 27
  BitPair(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {
    if (i == j) throw SteinerError("degenerate bitangent pair");
  }
  bool operator<(const BitPair& o) const { return std::tie(i, j) < std::tie(o.i, o.j); }
  bool operator==(const BitPair& o) const { return i == o.i && j == o.j; }
  bool disjoint(const BitPair& o) const {
    return i != o.i && i != o.j && j != o.i && j != o.j;
  }
};

struct SteinerComplex {
  std::array<BitPair, 6> pairs{BitPair(0, 1), BitPair(0, 1), BitPair(0, 1),
                               BitPair(0, 1), BitPair(0, 1), BitPair(0, 1)};
  GramTensor tensor;     // the associated rank-3 Gram tensor (complex)
  bool real = false;
  bool psd = false;
  double certificate = 0.0;  // worst conic-certificate ratio over its pair pairs

  std::set<int> bitangent_set() const {
    std::set<int> s;
    for (const auto& p : pairs) {
      s.insert(p.i);
      s.insert(p.j);
    }
    return s;
  }
};

enum class ComplexRelation { syzygetic, azygetic };

struct SteinerEdge {
  int u, v;        // indices into the psd-tensor list
  int rank;        // rank(theta_u + theta_v), 4 or 5
  int face_dim;    // from the face dimension formula, 1 or 2
};

struct SteinerGraph {
  std::vector<GramTensor> vertices;  // the 8 real psd rank-3 tensors
  std::vector<int> complex_index;    // complex index per vertex
  std::vector<SteinerEdge> edges;
  std::array<std::vector<int>, 2> components;
};

namespace detail {

// Rows of the 8x6 conic-incidence matrix for one bitangent: one row per
// contact point; a hyperflex contributes its point row plus the derivative
// row along the line (double contact counts with multiplicity two).
inline void contact_rows(const Bitangent& b, Eigen::MatrixXcd& m, int& row) {
  const auto& e2 = exponents(2);
  auto monomials = [&](const Eigen::Vector3cd& p) {
    Eigen::Matrix<Complex, 1, 6> r;
    for (int j = 0; j < 6; ++j) {
      Complex v = 1;
      for (int k = 0; k < e2[j][0]; ++k) v *= p[0];
      for (int k = 0; k < e2[j][1]; ++k) v *= p[1];
      for (int k = 0; k < e2[j][2]; ++k) v *= p[2];
      r(0, j) = v;
    }
    return r;
  };
  if (!b.hyperflex) {
    m.row(row++) = monomials(b.contacts[0].v);
    m.row(row++) = monomials(b.contacts[1].v);
    return;
  }
  // tangent direction: any vector on the line independent of the contact point
  Eigen::JacobiSVD<Eigen::Matrix<Complex, 1, 3>> svd(b.line.transpose(), Eigen::ComputeFullV);
  Eigen::Vector3cd dir = svd.matrixV().col(1);
  if (chordal_distance(dir, b.contacts[0].v) < 1e-6) dir = svd.matrixV().col(2);
  const Eigen::Vector3cd& p = b.contacts[0].v;
  m.row(row++) = monomials(p);
  // derivative of the monomial row along dir
  Eigen::Matrix<Complex, 1, 6> d = Eigen::Matrix<Complex, 1, 6>::Zero();
  for (int j = 0; j < 6; ++j) {
    TernaryForm mono = TernaryForm::zero(2);
    mono.c[j] = 1.0;
    d(0, j) = (mono.gradient(p).transpose() * dir)(0, 0);
  }
  m.row(row++) = d;
}

}  // namespace detail

// Do the 8 contact points of two disjoint bitangent pairs lie on a conic?
inline bool syzygetic_pair_test(const std::vector<Bitangent>& bits, const BitPair& p1,
                                const BitPair& p2, double tol = 1e-8,
                                double* ratio_out = nullptr) {
  if (!p1.disjoint(p2)) throw SteinerError("overlapping-pairs in syzygetic test");
  Eigen::MatrixXcd m(8, 6);
  int row = 0;
  for (int idx : {p1.i, p1.j, p2.i, p2.j}) detail::contact_rows(bits[idx], m, row);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double ratio = svd.singularValues()(5) / svd.singularValues()(0);
  if (ratio_out) *ratio_out = ratio;
  return ratio <= tol;
}

// Conic test for 8 explicit points (used in tests).
inline bool points_on_conic(const std::vector<Eigen::Vector3cd>& pts, double tol = 1e-8) {
  Eigen::MatrixXcd m(pts.size(), 6);
  const auto& e2 = exponents(2);
  for (size_t i = 0; i < pts.size(); ++i) {
    Eigen::Vector3cd p = pts[i] / pts[i].norm();
    for (int j = 0; j < 6; ++j) {
      Complex v = 1;
      for (int k = 0; k < e2[j][0]; ++k) v *= p[0];
      for (int k = 0; k < e2[j][1]; ++k) v *= p[1];
      for (int k = 0; k < e2[j][2]; ++k) v *= p[2];
      m(i, j) = v;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(5) <= tol * svd.singularValues()(0);
}

// The unique rank-3 Gram tensor of the complex: image is the 3-dim span of
// the six pair products.
inline GramTensor rank3_tensor(const TernaryForm& f, const std::vector<Bitangent>& bits,
                               const std::array<BitPair, 6>& pairs, double cert_tol = 1e-8) {
  Eigen::MatrixXcd prods(6, 6);
  for (int k = 0; k < 6; ++k) {
    TernaryForm li(1, Vec(bits[pairs[k].i].line));
    TernaryForm lj(1, Vec(bits[pairs[k].j].line));
    prods.col(k) = multiply(li, lj).c;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prods, Eigen::ComputeThinU);
  if (svd.singularValues()(3) > 1e-6 * svd.singularValues()(0))
    throw SteinerError("span-not-3: pair products do not span a 3-dim space");
  Subspace u;
  u.basis = svd.matrixU().leftCols(3);
  auto res = gram_from_image(f, u, cert_tol);
  return res.tensor;
}

// Partition the 378 bitangent pairs into 63 Steiner complexes via union-find
// over the conic-certificate relation.
inline std::vector<SteinerComplex> assemble_complexes(const TernaryForm& f,
                                                      const std::vector<Bitangent>& bits,
                                                      double cert_tol = 1e-8) {
  if (bits.size() != 28) throw SteinerError("assemble_complexes needs 28 bitangents");
  std::vector<BitPair> pairs;
  pairs.reserve(378);
  for (int i = 0; i < 28; ++i)
    for (int j = i + 1; j < 28; ++j) pairs.emplace_back(i, j);
  const int n = static_cast<int>(pairs.size());

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };

  std::vector<std::vector<bool>> positive(n, std::vector<bool>(n, false));
  std::vector<std::vector<double>> ratios(n, std::vector<double>(n, 1.0));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (!pairs[a].disjoint(pairs[b])) continue;
      double ratio;
      if (syzygetic_pair_test(bits, pairs[a], pairs[b], cert_tol, &ratio)) {
        positive[a][b] = positive[b][a] = true;
        parent[find(a)] = find(b);
      }
      ratios[a][b] = ratios[b][a] = ratio;
    }

  std::map<int, std::vector<int>> classes;
  for (int a = 0; a < n; ++a) classes[find(a)].push_back(a);
  if (classes.size() != 63)
    throw SteinerError("partition-failure: " + std::to_string(classes.size()) +
                       " classes instead of 63");

  std::vector<SteinerComplex> out;
  for (const auto& [root, members] : classes) {
    if (members.size() != 6)
      throw SteinerError("partition-failure: class of size " + std::to_string(members.size()));
    SteinerComplex sc;
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) {
      sc.pairs[k] = pairs[members[k]];
      for (int l = k + 1; l < 6; ++l) {
        if (!positive[members[k]][members[l]])
          throw SteinerError("partition-failure: class not internally consistent");
        worst = std::max(worst, ratios[members[k]][members[l]]);
      }
    }
    // the 12 bitangents must be distinct
    if (sc.bitangent_set().size() != 12)
      throw SteinerError("partition-failure: complex with repeated bitangents");
    sc.certificate = worst;
    sc.tensor = rank3_tensor(f, bits, sc.pairs, 1e-8);
    out.push_back(std::move(sc));
  }
  return out;
}

inline ComplexRelation complex_relation(const SteinerComplex& s1, const SteinerComplex& s2) {
  auto b1 = s1.bitangent_set();
  auto b2 = s2.bitangent_set();
  std::vector<int> common;
  std::set_intersection(b1.begin(), b1.end(), b2.begin(), b2.end(), std::back_inserter(common));
  if (common.size() == 4) {
    // crosswise: the four shared bitangents form two pairs in each complex
    std::set<int> cs(common.begin(), common.end());
    auto pairs_within = [&](const SteinerComplex& s) {
      int cnt = 0;
      for (const auto& p : s.pairs)
        if (cs.count(p.i) && cs.count(p.j)) ++cnt;
      return cnt;
    };
    if (pairs_within(s1) == 2 && pairs_within(s2) == 2) return ComplexRelation::syzygetic;
    throw SteinerError("inconsistent-intersection: 4 shared bitangents but not crosswise");
  }
  if (common.size() == 6) {
    // each shared bitangent sits in a different pair of each complex
    for (const auto& s : {s1, s2}) {
      std::set<int> cs(common.begin(), common.end());
      for (const auto& p : s.pairs)
        if (cs.count(p.i) && cs.count(p.j))
          throw SteinerError("inconsistent-intersection: shared bitangents paired together");
    }
    return ComplexRelation::azygetic;
  }
  throw SteinerError("inconsistent-intersection: |intersection| = " +
                     std::to_string(common.size()));
}

struct Rank3Classification {
  std::vector<int> real_indices;
  std::vector<int> psd_indices;
};

// Realness is decided on the subspace level (conjugation-stable image);
// real tensors are rebuilt over a real basis before the psd test.
inline Rank3Classification classify_rank3(const TernaryForm& f,
                                          std::vector<SteinerComplex>& complexes,
                                          double rank_tol = 1e-7) {
  Rank3Classification out;
  for (int i = 0; i < static_cast<int>(complexes.size()); ++i) {
    auto& sc = complexes[i];
    Subspace u = image(sc.tensor, rank_tol);
    if (u.dim() != 3) throw SteinerError("rank-3 tensor with image dim != 3");
    if (!u.conjugation_stable()) continue;
    Subspace ur = u.real_form();
    auto res = gram_from_image(f, ur, 1e-8);
    GramTensor real_tensor(Mat6d(res.tensor.m.real()));
    if (!res.tensor.is_real(1e-8))
      throw SteinerError("conjugation-stable image produced a non-real tensor");
    sc.tensor = real_tensor;
    sc.real = true;
    out.real_indices.push_back(i);
    if (real_tensor.is_psd(1e-9)) {
      sc.psd = true;
      out.psd_indices.push_back(i);
    }
  }
  return out;
}

// Graph on the psd rank-3 tensors: edge iff rank(theta_i + theta_j) <= 5.
inline SteinerGraph steiner_graph(const TernaryForm& f,
                                  const std::vector<SteinerComplex>& complexes,
                                  const std::vector<int>& psd_indices, double rank_tol = 1e-7) {
  SteinerGraph g;
  for (int idx : psd_indices) {
    g.vertices.push_back(complexes[idx].tensor);
    g.complex_index.push_back(idx);
  }
  const int n = static_cast<int>(g.vertices.size());
  if (n != 8) throw SteinerError("graph-shape-violation: expected 8 psd tensors");

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      GramTensor sum(Mat6c(g.vertices[i].m + g.vertices[j].m));
      Subspace u = image(sum, rank_tol);
      int r = u.dim();
      if (r <= 5) {
        SteinerEdge e;
        e.u = i;
        e.v = j;
        e.rank = r;
        e.face_dim = face_dimension(u);
        g.edges.push_back(e);
      }
    }

  // connected components
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (const auto& e : g.edges) parent[find(e.u)] = find(e.v);
  std::map<int, std::vector<int>> comps;
  for (int i = 0; i < n; ++i) comps[find(i)].push_back(i);
  if (comps.size() != 2)
    throw SteinerError("graph-shape-violation: " + std::to_string(comps.size()) +
                       " components instead of 2");
  int ci = 0;
  for (auto& [root, members] : comps) {
    if (members.size() != 4)
      throw SteinerError("graph-shape-violation: component of size " +
                         std::to_string(members.size()));
    g.components[ci++] = members;
  }
  if (g.edges.size() != 12)
    throw SteinerError("graph-shape-violation: " + std::to_string(g.edges.size()) +
                       " edges instead of 12");
  return g;
}

}  // namespace qgram
