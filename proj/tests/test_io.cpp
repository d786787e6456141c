#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "qgram/io.hpp"

using namespace qgram;

namespace {

std::string fermat_json(const std::string& extra = "") {
  std::string s = "{";
  bool first = true;
  for (const auto& e : exponents(4)) {
    if (!first) s += ",";
    first = false;
    std::string key = exponent_key(e);
    double v = (key == "400" || key == "040" || key == "004") ? 1.0 : 0.0;
    s += "\"" + key + "\": " + format_double(v);
  }
  s += extra;
  s += "}";
  return s;
}

}  // namespace

TEST_CASE("quartic input parsing") {
  QuarticInput in = parse_quartic(fermat_json());
  CHECK(in.f.is_real());
  CHECK(in.f.norm() == Catch::Approx(1.0));
  CHECK(std::abs(in.f.at(4, 0, 0) - Complex(1.0 / std::sqrt(3.0))) < 1e-14);
  CHECK(in.seed == 1);
  CHECK(in.tol_rank == 1e-7);
  CHECK(in.tol_cert == 1e-8);

  QuarticInput with_opts = parse_quartic(fermat_json(", \"seed\": 9, \"tol_rank\": 1e-6"));
  CHECK(with_opts.seed == 9);
  CHECK(with_opts.tol_rank == 1e-6);
}

TEST_CASE("parse errors name the offending key") {
  std::string broken = fermat_json();
  size_t pos = broken.find("\"211\"");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 5, "\"999\"");
  try {
    parse_quartic(broken);
    FAIL("expected a parse error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("211") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_quartic("not json"), IoError);
  CHECK_THROWS_AS(parse_quartic("[1,2,3]"), IoError);
}

TEST_CASE("zero input is rejected as not smooth") {
  std::string zeros = "{";
  bool first = true;
  for (const auto& e : exponents(4)) {
    if (!first) zeros += ",";
    first = false;
    zeros += "\"" + exponent_key(e) + "\": 0";
  }
  zeros += "}";
  try {
    parse_quartic(zeros);
    FAIL("expected rejection");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("not-smooth") != std::string::npos);
  }
}

TEST_CASE("serialization is canonical and stable") {
  QuarticInput in = parse_quartic(fermat_json(", \"seed\": 3"));
  std::string once = serialize(input_node(in));
  std::string twice = serialize(input_node(in));
  CHECK(once == twice);

  // round-trip: re-parsing the echoed coefficients reproduces the form
  std::string again = "{";
  bool first = true;
  for (const auto& [key, v] : in.raw) {
    if (!first) again += ",";
    first = false;
    again += "\"" + key + "\": " + format_double(v);
  }
  again += ", \"seed\": 3}";
  QuarticInput back = parse_quartic(again);
  CHECK((back.f.c - in.f.c).norm() < 1e-15);
  CHECK(serialize(input_node(back)) == once);
}

TEST_CASE("document emitter formatting") {
  Node doc = Node::object();
  doc.set("a", Node::number(0.1));
  doc.set("b", Node::integer(-3));
  doc.set("c", Node::boolean(true));
  doc.set("d", Node::string("x\"y"));
  Node arr = Node::array();
  arr.push(Node::complex(Complex(1.0, -2.0)));
  doc.set("e", std::move(arr));
  std::string s = serialize(doc);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"d\": \"x\\\"y\"") != std::string::npos);
  CHECK(s == serialize(doc));
  CHECK(format_double(-0.0) == "0");
}

TEST_CASE("slice tables are deterministic") {
  Mat6d t0 = Mat6d::Zero();
  t0(0, 0) = t0(1, 1) = t0(2, 2) = 1.0;
  Mat6d t1 = t0, t2 = t0, t3 = t0;
  t1(0, 1) = t1(1, 0) = -1.0;
  t1(3, 3) = 2.0;
  t2(0, 2) = t2(2, 0) = -1.0;
  t2(4, 4) = 2.0;
  t3(1, 2) = t3(2, 1) = -1.0;
  t3(5, 5) = 2.0;
  std::array<GramTensor, 4> thetas{GramTensor(t0), GramTensor(t1), GramTensor(t2),
                                   GramTensor(t3)};

  SliceData a = pencil_determinant_slice(thetas, 2, {0.0, 0.5});
  SliceData b = pencil_determinant_slice(thetas, 2, {0.0, 0.5});
  CHECK(a.rows.size() == 8);
  std::string ta = slice_table(a), tb = slice_table(b);
  CHECK(ta == tb);
  CHECK(ta.find("lambda1\tlambda2\tlambda3\tdet\tlambda_min\n") == 0);

  SliceData single = pencil_determinant_slice(thetas, 0, {0.0, 0.5});
  CHECK(single.rows.size() == 1);
}
