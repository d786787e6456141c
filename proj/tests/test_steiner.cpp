#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "qgram/spectra.hpp"
#include "qgram/steiner.hpp"

using namespace qgram;

namespace {

struct Pipeline {
  TernaryForm f;
  std::vector<Bitangent> bits;
  std::vector<SteinerComplex> complexes;
  Rank3Classification cls;
  SteinerGraph graph;
};

const Pipeline& fermat_pipeline() {
  static const Pipeline p = [] {
    Pipeline r;
    r.f = testutil::fermat();
    r.bits = compute_bitangents(r.f, 1);
    r.complexes = assemble_complexes(r.f, r.bits);
    r.cls = classify_rank3(r.f, r.complexes);
    r.graph = steiner_graph(r.f, r.complexes, r.cls.psd_indices);
    return r;
  }();
  return p;
}

}  // namespace

TEST_CASE("conic membership test") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;

  // 8 points on the conic x^2 + y^2 - z^2
  std::vector<Eigen::Vector3cd> on_conic;
  for (int k = 0; k < 8; ++k) {
    Complex t(gauss(rng), gauss(rng));
    on_conic.emplace_back(std::cos(t), std::sin(t), 1.0);
  }
  CHECK(points_on_conic(on_conic, 1e-8));

  std::vector<Eigen::Vector3cd> generic;
  for (int k = 0; k < 8; ++k)
    generic.emplace_back(Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng)),
                         Complex(gauss(rng), gauss(rng)));
  CHECK_FALSE(points_on_conic(generic, 1e-8));
}

TEST_CASE("fermat steiner complexes partition the 378 pairs") {
  const auto& p = fermat_pipeline();
  REQUIRE(p.complexes.size() == 63);

  std::set<std::pair<int, int>> seen;
  for (const auto& sc : p.complexes) {
    CHECK(sc.certificate <= 1e-8);
    CHECK(sc.bitangent_set().size() == 12);
    for (const auto& pr : sc.pairs) {
      bool inserted = seen.insert({pr.i, pr.j}).second;
      CHECK(inserted);
    }
  }
  CHECK(seen.size() == 378);

  // positive case of the pair test from a known complex
  const auto& sc = p.complexes.front();
  CHECK(syzygetic_pair_test(p.bits, sc.pairs[0], sc.pairs[1], 1e-8));
}

TEST_CASE("rank-3 tensors and their classification") {
  const auto& p = fermat_pipeline();
  CHECK(p.cls.real_indices.size() == 15);
  CHECK(p.cls.psd_indices.size() == 8);

  for (const auto& sc : p.complexes) {
    CHECK(rank(sc.tensor, 1e-7) == 3);
    CHECK((gram_map(sc.tensor).c - p.f.c).norm() <= 1e-8 * p.f.norm());
  }

  // theta0 = diag(1,1,1,0,0,0) appears among the psd tensors
  Mat6c theta0 = Mat6c::Zero();
  theta0(0, 0) = theta0(1, 1) = theta0(2, 2) = 1.0;
  double best = 1e9;
  for (int idx : p.cls.psd_indices)
    best = std::min(best, (p.complexes[idx].tensor.m - theta0).norm());
  CHECK(best < 1e-8);

  // the 48 non-real tensors pair off under conjugation
  std::vector<int> non_real;
  for (int i = 0; i < 63; ++i)
    if (!p.complexes[i].real) non_real.push_back(i);
  CHECK(non_real.size() == 48);
  for (int i : non_real) {
    Mat6c conj = p.complexes[i].tensor.m.conjugate();
    int matches = 0;
    for (int j : non_real)
      if ((p.complexes[j].tensor.m - conj).norm() < 1e-6) ++matches;
    CHECK(matches == 1);
  }
}

TEST_CASE("complex relation dichotomy") {
  const auto& p = fermat_pipeline();
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> pick(0, 62);
  int syz = 0, azy = 0;
  for (int t = 0; t < 200; ++t) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    ComplexRelation rel = complex_relation(p.complexes[a], p.complexes[b]);
    (rel == ComplexRelation::syzygetic ? syz : azy)++;
  }
  CHECK(syz > 0);
  CHECK(azy > 0);
}

TEST_CASE("fermat steiner graph is two K4 components") {
  const auto& p = fermat_pipeline();
  CHECK(p.graph.vertices.size() == 8);
  CHECK(p.graph.edges.size() == 12);
  CHECK(p.graph.components[0].size() == 4);
  CHECK(p.graph.components[1].size() == 4);

  // edge iff syzygetic
  auto has_edge = [&](int u, int v) {
    for (const auto& e : p.graph.edges)
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) return true;
    return false;
  };
  for (int u = 0; u < 8; ++u)
    for (int v = u + 1; v < 8; ++v) {
      ComplexRelation rel = complex_relation(p.complexes[p.graph.complex_index[u]],
                                             p.complexes[p.graph.complex_index[v]]);
      CHECK(has_edge(u, v) == (rel == ComplexRelation::syzygetic));
    }

  // exactly 3 rank-4 edges, all inside one component, each of face dim 1
  std::vector<const SteinerEdge*> rank4;
  for (const auto& e : p.graph.edges) {
    CHECK((e.rank == 4 || e.rank == 5));
    if (e.rank == 4) rank4.push_back(&e);
    if (e.rank == 4) CHECK(e.face_dim == 1);
    if (e.rank == 5) CHECK(e.face_dim == 2);
  }
  REQUIRE(rank4.size() == 3);
  std::set<int> comp0(p.graph.components[0].begin(), p.graph.components[0].end());
  bool all_in_0 = true, all_in_1 = true;
  for (const auto* e : rank4) {
    if (!comp0.count(e->u) || !comp0.count(e->v)) all_in_0 = false;
    if (comp0.count(e->u) || comp0.count(e->v)) all_in_1 = false;
  }
  CHECK((all_in_0 || all_in_1));
}

TEST_CASE("fermat one-dimensional faces") {
  const auto& p = fermat_pipeline();
  auto faces = one_dim_face_report(p.f, p.bits, p.complexes, p.graph);
  CHECK(faces.size() == 3);
  for (const auto& fc : faces) {
    // the matched quadruple is one of the hyperflex families: a common
    // vanishing coordinate slot
    int zero_slot = -1;
    for (int slot = 0; slot < 3; ++slot) {
      bool all = true;
      for (int idx : fc.quadruple)
        if (std::abs(p.bits[idx].line[slot]) > 1e-8) all = false;
      if (all) zero_slot = slot;
    }
    CHECK(zero_slot >= 0);
  }
}
