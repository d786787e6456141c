// Command-line front end: analyze a psd ternary quartic's Gram spectrahedron
// and emit canonical machine-readable reports.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgram/io.hpp"

namespace {

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream fs(out_path, std::ios::binary);
  if (!fs) throw qgram::IoError("cannot open output file " + out_path);
  fs << text;
}

struct CommonArgs {
  std::string input_path;
  std::string out_path;
  uint64_t seed = 0;
  double tol_rank = 0.0;
  double tol_cert = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("input", args.input_path, "quartic coefficient file")->required();
  cmd->add_option("--out", args.out_path, "output path (default: stdout)");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--tol-rank", args.tol_rank, "relative rank cutoff");
  cmd->add_option("--tol-cert", args.tol_cert, "certificate tolerance");
}

std::pair<qgram::QuarticInput, qgram::AnalysisOptions> load(const CLI::App* cmd,
                                                            const CommonArgs& args) {
  qgram::QuarticInput in = qgram::parse_quartic_file(args.input_path);
  if (cmd->count("--seed")) in.seed = args.seed;
  if (cmd->count("--tol-rank")) in.tol_rank = args.tol_rank;
  if (cmd->count("--tol-cert")) in.tol_cert = args.tol_cert;
  qgram::AnalysisOptions opt;
  opt.seed = in.seed;
  opt.tol_rank = in.tol_rank;
  opt.tol_cert = in.tol_cert;
  return {std::move(in), opt};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gram spectrahedron analysis for positive-semidefinite ternary quartics"};
  app.require_subcommand(1);

  CommonArgs analyze_args, bit_args, steiner_args, graph_args, faces_args, sample_args,
      slice_args;
  int sample_n = 50;
  int slice_grid = 9;

  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline report");
  add_common(analyze, analyze_args);
  CLI::App* bitangents = app.add_subcommand("bitangents", "the 28 bitangents");
  add_common(bitangents, bit_args);
  CLI::App* steiner = app.add_subcommand("steiner", "Steiner complexes and rank-3 tensors");
  add_common(steiner, steiner_args);
  CLI::App* graph = app.add_subcommand("graph", "the Steiner graph");
  add_common(graph, graph_args);
  CLI::App* faces = app.add_subcommand("faces", "one-dimensional faces");
  add_common(faces, faces_args);
  CLI::App* sample = app.add_subcommand("sample", "extreme-point sampling");
  add_common(sample, sample_args);
  sample->add_option("--n", sample_n, "number of samples");
  CLI::App* slice = app.add_subcommand("slice", "determinant slice table");
  add_common(slice, slice_args);
  slice->add_option("--grid", slice_grid, "grid resolution per axis");

  CLI11_PARSE(app, argc, argv);

  const CLI::App* cmd = app.get_subcommands().front();
  CommonArgs* args = nullptr;
  if (cmd == analyze) args = &analyze_args;
  else if (cmd == bitangents) args = &bit_args;
  else if (cmd == steiner) args = &steiner_args;
  else if (cmd == graph) args = &graph_args;
  else if (cmd == faces) args = &faces_args;
  else if (cmd == sample) args = &sample_args;
  else args = &slice_args;

  try {
    auto [in, opt] = load(cmd, *args);
    const qgram::TernaryForm& f = in.f;

    if (cmd == bitangents) {
      auto bits = qgram::compute_bitangents(f, opt.seed, opt.tol_cert);
      qgram::Node doc = qgram::Node::object();
      doc.set("input", qgram::input_node(in));
      doc.set("bitangents", qgram::bitangents_node(bits));
      write_output(qgram::serialize(doc), args->out_path);
      return 0;
    }

    if (cmd == sample) {
      auto summary = qgram::sample_extreme_points(f, sample_n, opt.seed);
      qgram::Node doc = qgram::Node::object();
      doc.set("input", qgram::input_node(in));
      doc.set("sampling", qgram::sampling_node(summary, sample_n, opt.seed));
      write_output(qgram::serialize(doc), args->out_path);
      return 0;
    }

    if (cmd == analyze) {
      opt.sample_count = 50;
      qgram::AnalysisResult r = qgram::run_analysis(f, opt);
      write_output(qgram::serialize(qgram::analysis_report(in, r, opt)), args->out_path);
      return 0;
    }

    // steiner / graph / faces / slice share the combinatorial pipeline
    auto bits = qgram::compute_bitangents(f, opt.seed, opt.tol_cert);
    auto complexes = qgram::assemble_complexes(f, bits, opt.tol_cert);
    auto cls = qgram::classify_rank3(f, complexes, opt.tol_rank);

    if (cmd == steiner) {
      qgram::Node doc = qgram::Node::object();
      doc.set("input", qgram::input_node(in));
      doc.set("steiner", qgram::steiner_node(complexes, cls));
      write_output(qgram::serialize(doc), args->out_path);
      return 0;
    }

    auto g = qgram::steiner_graph(f, complexes, cls.psd_indices, opt.tol_rank);

    if (cmd == graph) {
      qgram::Node doc = qgram::Node::object();
      doc.set("input", qgram::input_node(in));
      doc.set("graph", qgram::graph_node(g));
      write_output(qgram::serialize(doc), args->out_path);
      return 0;
    }

    if (cmd == faces) {
      auto one_dim = qgram::one_dim_face_report(f, bits, complexes, g);
      qgram::Node doc = qgram::Node::object();
      doc.set("input", qgram::input_node(in));
      doc.set("graph", qgram::graph_node(g));
      doc.set("one_dim_faces", qgram::faces_node(one_dim));
      write_output(qgram::serialize(doc), args->out_path);
      return 0;
    }

    // slice
    qgram::AnalysisResult r;
    r.graph = g;
    auto thetas = qgram::slice_tensors(r);
    auto data = qgram::pencil_determinant_slice(thetas, slice_grid, {0.0, 0.5});
    write_output(qgram::slice_table(data), args->out_path);
    return 0;
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    if (msg.find("not-smooth") != std::string::npos ||
        msg.find("infeasible") != std::string::npos)
      return 2;
    if (msg.find("parse error") != std::string::npos ||
        msg.find("cannot open") != std::string::npos)
      return 1;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
