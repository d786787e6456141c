#pragma once

// Input parsing, pipeline orchestration, and canonical report emission.
//
// Reports are JSON-syntax documents with insertion-ordered keys and floats
// printed at 17 significant digits, so identical inputs give byte-identical
// output (golden-file friendly).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qgram/spectra.hpp"

namespace qgram {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal ordered document tree for canonical serialization.
struct Node {
  enum class Kind { object, array, number, integer, boolean, string } kind = Kind::object;
  std::vector<std::pair<std::string, Node>> fields;  // object
  std::vector<Node> items;                           // array
  double num = 0.0;
  long long i = 0;
  bool b = false;
  std::string s;

  static Node object() { return Node{}; }
  static Node array() {
    Node n;
    n.kind = Kind::array;
    return n;
  }
  static Node number(double v) {
    Node n;
    n.kind = Kind::number;
    n.num = v;
    return n;
  }
  static Node integer(long long v) {
    Node n;
    n.kind = Kind::integer;
    n.i = v;
    return n;
  }
  static Node boolean(bool v) {
    Node n;
    n.kind = Kind::boolean;
    n.b = v;
    return n;
  }
  static Node string(std::string v) {
    Node n;
    n.kind = Kind::string;
    n.s = std::move(v);
    return n;
  }
  static Node complex(const Complex& v) {
    Node n = array();
    n.items.push_back(number(v.real()));
    n.items.push_back(number(v.imag()));
    return n;
  }

  Node& set(const std::string& key, Node v) {
    fields.emplace_back(key, std::move(v));
    return fields.back().second;
  }
  Node& push(Node v) {
    items.push_back(std::move(v));
    return items.back();
  }
};

namespace io_detail {

inline void emit_node(const Node& n, std::string& out, int depth) {
  std::string pad(2 * depth, ' ');
  std::string pad_in(2 * (depth + 1), ' ');
  switch (n.kind) {
    case Node::Kind::number: out += format_double(n.num); break;
    case Node::Kind::integer: out += std::to_string(n.i); break;
    case Node::Kind::boolean: out += n.b ? "true" : "false"; break;
    case Node::Kind::string:
      out += '"';
      for (char c : n.s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      break;
    case Node::Kind::array:
      if (n.items.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (size_t k = 0; k < n.items.size(); ++k) {
        out += pad_in;
        emit_node(n.items[k], out, depth + 1);
        if (k + 1 < n.items.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      break;
    case Node::Kind::object:
      if (n.fields.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (size_t k = 0; k < n.fields.size(); ++k) {
        out += pad_in + '"' + n.fields[k].first + "\": ";
        emit_node(n.fields[k].second, out, depth + 1);
        if (k + 1 < n.fields.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      break;
  }
}

}  // namespace io_detail

inline std::string serialize(const Node& n) {
  std::string out;
  io_detail::emit_node(n, out, 0);
  out += '\n';
  return out;
}

struct QuarticInput {
  TernaryForm f;  // unit coefficient norm
  std::map<std::string, double> raw;
  uint64_t seed = 1;
  double tol_rank = 1e-7;
  double tol_cert = 1e-8;
};

inline std::string exponent_key(const Exponent& e) {
  return std::to_string(e[0]) + std::to_string(e[1]) + std::to_string(e[2]);
}

// 15 exponent-keyed real coefficients plus optional seed and tolerance
// overrides; the form is normalized to unit coefficient norm.
inline QuarticInput parse_quartic(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw IoError("parse error: top-level value must be an object");

  QuarticInput in;
  in.f = TernaryForm::zero(4);
  for (const auto& e : exponents(4)) {
    std::string key = exponent_key(e);
    if (!j.contains(key)) throw IoError("parse error: missing coefficient key \"" + key + "\"");
    if (!j[key].is_number())
      throw IoError("parse error: coefficient \"" + key + "\" is not a number");
    double v = j[key].get<double>();
    if (!std::isfinite(v)) throw IoError("parse error: coefficient \"" + key + "\" not finite");
    in.raw[key] = v;
    in.f.at(e[0], e[1], e[2]) = v;
  }
  if (j.contains("seed")) in.seed = j["seed"].get<uint64_t>();
  if (j.contains("tol_rank")) in.tol_rank = j["tol_rank"].get<double>();
  if (j.contains("tol_cert")) in.tol_cert = j["tol_cert"].get<double>();

  double n = in.f.norm();
  if (n <= 0.0) throw IoError("not-smooth: zero form");
  in.f = Complex(1.0 / n) * in.f;
  return in;
}

inline QuarticInput parse_quartic_file(const std::string& path) {
  std::ifstream fs(path);
  if (!fs) throw IoError("parse error: cannot open input file " + path);
  std::ostringstream ss;
  ss << fs.rdbuf();
  return parse_quartic(ss.str());
}

struct AnalysisOptions {
  uint64_t seed = 1;
  double tol_rank = 1e-7;
  double tol_cert = 1e-8;
  int sample_count = 50;
};

struct AnalysisResult {
  TernaryForm f;
  std::vector<Bitangent> bitangents;
  std::vector<SteinerComplex> complexes;
  Rank3Classification classification;
  SteinerGraph graph;
  std::vector<OneDimFace> one_dim_faces;
  SampleSummary samples;
  double interior_margin = 0.0;
  double max_mu_residual = 0.0;
};

inline AnalysisResult run_analysis(const TernaryForm& f, const AnalysisOptions& opt) {
  AnalysisResult r;
  r.f = f;

  GramPencil pencil = gram_pencil(f);
  {
    SdpPencilProblem prob = to_pencil_problem(pencil, Mat6d::Zero());
    InteriorPoint ip = sdp_interior_point(prob);
    r.interior_margin = ip.margin;
    if (ip.margin <= 1e-10)
      throw SpectraError("infeasible: no strictly positive Gram matrix found (f not sos)");
  }

  r.bitangents = compute_bitangents(f, opt.seed, opt.tol_cert);
  r.complexes = assemble_complexes(f, r.bitangents, opt.tol_cert);
  r.classification = classify_rank3(f, r.complexes, opt.tol_rank);
  r.graph = steiner_graph(f, r.complexes, r.classification.psd_indices, opt.tol_rank);
  r.one_dim_faces = one_dim_face_report(f, r.bitangents, r.complexes, r.graph);
  r.samples = sample_extreme_points(f, opt.sample_count, opt.seed);

  for (int idx : r.classification.psd_indices) {
    TernaryForm mu = gram_map(r.complexes[idx].tensor);
    r.max_mu_residual = std::max(r.max_mu_residual, (mu.c - f.c).norm() / f.norm());
  }
  return r;
}

inline Node bitangents_node(const std::vector<Bitangent>& bits) {
  Node n = Node::object();
  n.set("count", Node::integer(static_cast<long long>(bits.size())));
  long long real_count = 0;
  for (const auto& b : bits)
    if (b.real) ++real_count;
  n.set("real_count", Node::integer(real_count));
  Node& lines = n.set("lines", Node::array());
  for (const auto& b : bits) {
    Node e = Node::object();
    e.set("index", Node::integer(b.index));
    Node l = Node::array();
    for (int k = 0; k < 3; ++k) l.push(Node::complex(b.line[k]));
    e.set("line", std::move(l));
    Node cts = Node::array();
    for (int k = 0; k < 2; ++k) {
      Node p = Node::array();
      for (int t = 0; t < 3; ++t) p.push(Node::complex(b.contacts[k].v[t]));
      cts.push(std::move(p));
    }
    e.set("contacts", std::move(cts));
    e.set("real", Node::boolean(b.real));
    e.set("hyperflex", Node::boolean(b.hyperflex));
    lines.push(std::move(e));
  }
  return n;
}

inline Node tensor_node(const Mat6d& m) {
  Node rows = Node::array();
  for (int i = 0; i < 6; ++i) {
    Node row = Node::array();
    for (int j = 0; j < 6; ++j) row.push(Node::number(m(i, j)));
    rows.push(std::move(row));
  }
  return rows;
}

inline Node steiner_node(const std::vector<SteinerComplex>& complexes,
                         const Rank3Classification& cls) {
  Node n = Node::object();
  n.set("complex_count", Node::integer(static_cast<long long>(complexes.size())));
  long long pair_count = 0;
  double worst = 0.0;
  for (const auto& sc : complexes) {
    pair_count += static_cast<long long>(sc.pairs.size());
    worst = std::max(worst, sc.certificate);
  }
  n.set("pair_count", Node::integer(pair_count));
  n.set("worst_certificate", Node::number(worst));
  n.set("real_count", Node::integer(static_cast<long long>(cls.real_indices.size())));
  n.set("psd_count", Node::integer(static_cast<long long>(cls.psd_indices.size())));
  Node& tensors = n.set("psd_tensors", Node::array());
  for (int idx : cls.psd_indices) {
    Node t = Node::object();
    t.set("complex", Node::integer(idx));
    Node prs = Node::array();
    for (const auto& p : complexes[idx].pairs) {
      Node pr = Node::array();
      pr.push(Node::integer(p.i));
      pr.push(Node::integer(p.j));
      prs.push(std::move(pr));
    }
    t.set("pairs", std::move(prs));
    t.set("matrix", tensor_node(complexes[idx].tensor.real_part()));
    tensors.push(std::move(t));
  }
  return n;
}

inline Node graph_node(const SteinerGraph& g) {
  Node n = Node::object();
  n.set("vertex_count", Node::integer(static_cast<long long>(g.vertices.size())));
  n.set("edge_count", Node::integer(static_cast<long long>(g.edges.size())));
  Node& edges = n.set("edges", Node::array());
  for (const auto& e : g.edges) {
    Node en = Node::object();
    en.set("u", Node::integer(e.u));
    en.set("v", Node::integer(e.v));
    en.set("rank", Node::integer(e.rank));
    en.set("face_dim", Node::integer(e.face_dim));
    edges.push(std::move(en));
  }
  Node& comps = n.set("components", Node::array());
  for (const auto& c : g.components) {
    Node cn = Node::array();
    for (int v : c) cn.push(Node::integer(v));
    comps.push(std::move(cn));
  }
  return n;
}

inline Node faces_node(const std::vector<OneDimFace>& faces) {
  Node n = Node::object();
  n.set("count", Node::integer(static_cast<long long>(faces.size())));
  Node& arr = n.set("faces", Node::array());
  for (const auto& fc : faces) {
    Node e = Node::object();
    e.set("u", Node::integer(fc.edge_u));
    e.set("v", Node::integer(fc.edge_v));
    Node q = Node::array();
    for (int b : fc.quadruple) q.push(Node::integer(b));
    e.set("quadruple", std::move(q));
    arr.push(std::move(e));
  }
  return n;
}

inline Node sampling_node(const SampleSummary& s, int n_samples, uint64_t seed) {
  Node n = Node::object();
  n.set("n", Node::integer(n_samples));
  n.set("seed", Node::integer(static_cast<long long>(seed)));
  n.set("failures", Node::integer(s.failures));
  Node& hist = n.set("histogram", Node::array());
  for (const auto& [key, count] : s.histogram) {
    Node h = Node::object();
    h.set("rank", Node::integer(key.first));
    h.set("face_dim", Node::integer(key.second));
    h.set("count", Node::integer(count));
    hist.push(std::move(h));
  }
  return n;
}

inline Node input_node(const QuarticInput& in) {
  Node n = Node::object();
  Node& coeffs = n.set("coefficients", Node::object());
  for (const auto& e : exponents(4)) {
    std::string key = exponent_key(e);
    coeffs.set(key, Node::number(in.raw.at(key)));
  }
  n.set("seed", Node::integer(static_cast<long long>(in.seed)));
  n.set("tol_rank", Node::number(in.tol_rank));
  n.set("tol_cert", Node::number(in.tol_cert));
  return n;
}

inline Node analysis_report(const QuarticInput& in, const AnalysisResult& r,
                            const AnalysisOptions& opt) {
  Node doc = Node::object();
  doc.set("input", input_node(in));
  doc.set("bitangents", bitangents_node(r.bitangents));
  doc.set("steiner", steiner_node(r.complexes, r.classification));
  doc.set("graph", graph_node(r.graph));
  doc.set("one_dim_faces", faces_node(r.one_dim_faces));
  doc.set("sampling", sampling_node(r.samples, opt.sample_count, opt.seed));
  Node diag = Node::object();
  diag.set("interior_margin", Node::number(r.interior_margin));
  diag.set("max_mu_residual", Node::number(r.max_mu_residual));
  doc.set("diagnostics", std::move(diag));
  return doc;
}

// Delimited slice table: lambda1 lambda2 lambda3 det lambda_min, row-major.
inline std::string slice_table(const SliceData& data) {
  std::string out = "lambda1\tlambda2\tlambda3\tdet\tlambda_min\n";
  for (const auto& row : data.rows) {
    out += format_double(row.l1) + "\t" + format_double(row.l2) + "\t" + format_double(row.l3) +
           "\t" + format_double(row.det) + "\t" + format_double(row.lambda_min) + "\n";
  }
  return out;
}

// Four affinely independent psd rank-3 tensors for the slice: the component
// of the Steiner graph whose average tensor is most positive definite,
// vertices in index order.
inline std::array<GramTensor, 4> slice_tensors(const AnalysisResult& r) {
  std::array<GramTensor, 4> best{};
  double best_margin = -std::numeric_limits<double>::infinity();
  for (const auto& comp : r.graph.components) {
    if (comp.size() != 4) continue;
    Mat6d avg = Mat6d::Zero();
    for (int v : comp) avg += 0.25 * r.graph.vertices[v].real_part();
    Eigen::SelfAdjointEigenSolver<Mat6d> es(avg, Eigen::EigenvaluesOnly);
    double margin = es.eigenvalues().minCoeff();
    if (margin > best_margin) {
      best_margin = margin;
      for (int k = 0; k < 4; ++k) best[k] = r.graph.vertices[comp[k]];
    }
  }
  if (best_margin == -std::numeric_limits<double>::infinity())
    throw IoError("slice: no 4-vertex component available");
  return best;
}

}  // namespace qgram
