#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtq/measure.hpp"

#include <random>

using namespace mtq;

TEST_CASE("similitudes scale distances") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rot = 0; rot < 4; ++rot)
    for (bool refl : {false, true}) {
      Similitude f;
      f.ratio = 0.3;
      f.O = Similitude::orthogonal(rot, refl);
      f.t = {1.0, -2.0};
      for (int i = 0; i < 20; ++i) {
        const Point x{u(rng), u(rng)}, y{u(rng), u(rng)};
        const Point fx = f.apply(x), fy = f.apply(y);
        CHECK(std::hypot(fx[0] - fy[0], fx[1] - fy[1]) ==
              doctest::Approx(0.3 * std::hypot(x[0] - y[0], x[1] - y[1])).epsilon(1e-12));
      }
    }
}

TEST_CASE("default layouts validate with positive separation") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    if (!s.geometry) continue;
    const auto chk = validate_geometry(*s.geometry, s);
    CHECK(chk.pass);
    CHECK(chk.delta > 0.0);
  }
  const auto s = load_fixture("eg3");
  const auto g2 = default_geometry(s, 2);
  CHECK(validate_geometry(g2, s).pass);
}

TEST_CASE("hand-placed eg3 layout") {
  const auto s = load_json_file(MTQ_TEST_DATA "/eg3.json");
  const auto chk = validate_geometry(*s.geometry, s);
  CHECK(chk.pass);
  CHECK(chk.delta >= 0.25 - 1e-12);
}

TEST_CASE("overlapping images are rejected") {
  auto s = load_fixture("eg3");
  auto g = *s.geometry;
  g.maps[{0, 1}].t = g.maps[{0, 0}].t;
  g.maps[{0, 1}].t[0] -= 2.0 * 0.25;  // J_2 starts at 2, so this lands on T_{1,1}(J_1)
  const auto chk = validate_geometry(g, s);
  CHECK_FALSE(chk.pass);
  CHECK_FALSE(chk.witnesses.empty());
}

TEST_CASE("cylinder diameters, nesting, separation") {
  for (const auto& name : {"eg3", "eg5", "case1-prop"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    const int q = s.geometry->q;
    for (int i = 0; i < s.N; ++i) CHECK(cylinder_set({i}, s).diameter == doctest::Approx(1.0));
    for (int n = 2; n <= 7; ++n)
      for (const Word& w : enumerate_Sn(s.graph, n)) {
        const auto c = cylinder_set(w, s);
        CHECK(c.diameter == doctest::Approx(std::exp(log_ratio_product(w, s))).epsilon(1e-12));
        CHECK(cylinder_set(Word(w.begin(), w.end() - 1), s).box.contains(c.box, q));
      }
    const double delta = validate_geometry(*s.geometry, s).delta;
    std::vector<Word> all;
    for (int n = 1; n <= 4; ++n)
      for (const Word& w : enumerate_Sn(s.graph, n)) all.push_back(w);
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        const Word &x = all[a], &y = all[b];
        const std::size_t m = std::min(x.size(), y.size());
        if (std::equal(x.begin(), x.begin() + m, y.begin())) continue;  // comparable
        const auto cx = cylinder_set(x, s), cy = cylinder_set(y, s);
        CHECK(box_distance(cx.box, cy.box, q) >= delta * std::max(cx.diameter, cy.diameter) - 1e-12);
      }
  }
}

TEST_CASE("realized points") {
  const auto s = load_fixture("eg3");
  CHECK(realize_point({0}, s)[0] == doctest::Approx(s.geometry->seeds[0].centroid()[0]));
  // Two lifts of one projected word land on the same point.
  const Point a = realize_point({0, 1, 2, 2}, s), b = realize_point({3, 4, 2, 5}, s);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
  const Word w{0, 4, 2, 3, 0, 1, 5, 5};
  const Word proj = project(w, s.N);
  for (std::size_t h = 1; h <= w.size(); ++h) {
    const auto box = cylinder_set(Word(proj.begin(), proj.begin() + h), s).box;
    const Point p = realize_point(w, s);
    CHECK(p[0] >= box.lo[0] - 1e-12);
    CHECK(p[0] <= box.hi[0] + 1e-12);
  }
  const double sbar = constants(s).s_hi;
  for (std::size_t n = 1; n < w.size(); ++n) {
    const Point p = realize_point(Word(w.begin(), w.begin() + n), s), q = realize_point(Word(w.begin(), w.begin() + n + 1), s);
    CHECK(std::abs(p[0] - q[0]) <= std::pow(sbar, double(n) - 1) + 1e-12);
  }
}

TEST_CASE("composition ratio is multiplicative") {
  const auto s = load_fixture("eg5");
  for (const Word& w : enumerate_Sn(s.graph, 8))
    CHECK(cylinder_set(w, s).map.ratio == doctest::Approx(std::exp(log_ratio_product(w, s))).epsilon(1e-14));
}
