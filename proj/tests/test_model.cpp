#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtq/model.hpp"

#include <set>

using namespace mtq;

namespace {
bool witnessed(const Flag& f, int i, int j) {
  for (const auto& w : f.witnesses)
    if (w.first == i && w.second == j) return true;
  return false;
}
}  // namespace

TEST_CASE("fixtures load with stochastic rows") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    CHECK(s.exact());
    for (int a = 0; a < s.dim(); ++a) {
      Rational row = 0;
      for (int b = 0; b < s.dim(); ++b) row += s.pq(a, b);
      CHECK(row == 1);
    }
    Rational csum = 0;
    for (int a = 0; a < s.dim(); ++a) csum += s.chiq(a);
    CHECK(csum == 1);
  }
}

TEST_CASE("regimes of the bundled fixtures") {
  CHECK(validate(load_fixture("eg3")).kind == CaseKind::CaseII);
  CHECK(validate(load_fixture("eg5")).kind == CaseKind::CaseII);
  CHECK(validate(load_fixture("g1-demo")).kind == CaseKind::CaseII);
  CHECK(validate(load_fixture("eg1-default")).kind == CaseKind::CaseI);
  CHECK(validate(load_fixture("case1-prop")).kind == CaseKind::CaseI);
  CHECK(validate(load_fixture("eg2-P1")).kind == CaseKind::Other);
  CHECK(validate(load_fixture("eg2-P2")).kind == CaseKind::Other);
}

TEST_CASE("eg3 flags") {
  const auto rep = validate(load_fixture("eg3"));
  CHECK(rep.A2.pass);
  CHECK(rep.A4.pass);
  CHECK(rep.A5.pass);
  CHECK(rep.g2.pass);
  CHECK_FALSE(rep.g1.pass);
  CHECK_FALSE(rep.A3.pass);
  CHECK(rep.P_irreducible);
  CHECK(rep.complete_overlaps);
}

TEST_CASE("eg2-P1 fails A3 at (1,2)") {
  const auto rep = validate(load_fixture("eg2-P1"));
  CHECK_FALSE(rep.A3.pass);
  CHECK(witnessed(rep.A3, 0, 1));
}

TEST_CASE("condensation system is block triangular") {
  const auto s = load_fixture("eg1-default");
  CHECK(s.N == 2);
  // The upper block never returns to the lower one.
  for (int i = 0; i < s.N; ++i)
    for (int j = 0; j < s.N; ++j) CHECK(s.p(i + s.N, j) == 0.0);
  const auto d = build_condensation(std::vector<double>{0.2, 0.4, 0.4}, std::vector<double>{0.5, 0.5}, {0.2, 0.3}, 2.0);
  // Row i carries the ratio of f_i.
  for (int j = 0; j < 2; ++j) {
    if (d.ratio(0, j) > 0) CHECK(d.ratio(0, j) == doctest::Approx(0.2));
    if (d.ratio(1, j) > 0) CHECK(d.ratio(1, j) == doctest::Approx(0.3));
  }
  CHECK_THROWS_AS(build_condensation(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, {0.2, 0.3}, 2.0),
                  InputError);
}

TEST_CASE("proportional family is Case I") {
  const auto s = build_proportional({Rational(1, 3), Rational(2, 3)}, Rational(1, 4), 0.2, 2.0);
  const auto rep = validate(s);
  CHECK(rep.kind == CaseKind::CaseI);
  CHECK(sums_equal(s, {{0, 0}, {0, 2}}, {{2, 2}}));
}

TEST_CASE("make_spec rejects malformed input") {
  Mat P = Mat::Constant(2, 2, 0.5);
  Vec chi = Vec::Constant(2, 0.5);
  CHECK_THROWS_AS(make_spec("bad", Mat::Constant(3, 3, 1.0 / 3), Vec::Constant(3, 1.0 / 3), Mat::Zero(1, 1), 2.0),
                  InputError);
  Mat Q = P;
  Q(0, 0) = 0.7;
  CHECK_THROWS_AS(make_spec("rows", Q, chi, Mat::Constant(1, 1, 0.2), 2.0), InputError);
  CHECK_NOTHROW(make_spec("ok", P, chi, Mat::Constant(1, 1, 0.2), 2.0));
}

TEST_CASE("JSON loader") {
  const std::string good = R"({"N":1,"P":[["1/2","1/2"],["1/2","1/2"]],"chi":["1/2","1/2"],"ratios":{"1,1":0.3}})";
  const auto s = load_json_text(good);
  CHECK(s.exact());
  CHECK(s.ratio(0, 0) == doctest::Approx(0.3));
  CHECK(s.r == 2.0);

  CHECK_THROWS_WITH_AS(load_json_text("{\"N\":1,"), doctest::Contains("byte"), InputError);
  CHECK_THROWS_WITH_AS(load_json_text(R"({"N":1,"P":[[1]],"chi":[1]})"), doctest::Contains("2N"), InputError);
  CHECK_THROWS_WITH_AS(
      load_json_text(R"({"N":1,"P":[["1/2","1/2"],["1/2","1/2"]],"chi":["1/2","1/2"],"ratios":{"1,1":0.3},"x":1})"),
      doctest::Contains("unknown field"), InputError);
  CHECK_THROWS_AS(
      load_json_text(R"({"N":1,"P":[["1/2","1/2"],["1/2","1/2"]],"chi":["1/2","1/2"],"ratios":{"2,1":0.3}})"),
      InputError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/config.json"), InputError);
}

TEST_CASE("JSON copy of eg3 matches the fixture") {
  const auto a = load_json_file(MTQ_TEST_DATA "/eg3.json");
  const auto b = load_fixture("eg3");
  CHECK(a.N == b.N);
  for (int i = 0; i < a.dim(); ++i) {
    CHECK(a.chiq(i) == b.chiq(i));
    for (int j = 0; j < a.dim(); ++j) CHECK(a.pq(i, j) == b.pq(i, j));
  }
  CHECK((a.ratio - b.ratio).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.geometry.has_value());
  CHECK(a.geometry->maps.size() == 6);
}

TEST_CASE("unknown fixture") { CHECK_THROWS_AS(load_fixture("nope"), InputError); }
