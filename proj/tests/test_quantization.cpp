#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtq/quantization.hpp"
#include "mtq/spectral.hpp"

#include <map>
#include <random>
#include <set>

using namespace mtq;

namespace {
std::vector<Point> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), 0.0};
  return pts;
}
}  // namespace

TEST_CASE("anti-chain members sit between two thresholds") {
  for (const std::string name : {"eg3", "eg5", "case1-prop"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    for (int k : {1, 3, 6}) {
      const auto ac = build_antichain(s, k);
      REQUIRE(ac.phi() > 0);
      for (const auto& w : ac.words) {
        CHECK(w.log_energy < ac.log_threshold);
        CHECK(w.log_energy >= (k + 1) * ac.log_c1 - 1e-12);
        if (w.sigma.size() > 1) CHECK_FALSE(below_threshold(w.log_parent_energy, ac.log_threshold));
        CHECK(w.log_energy == doctest::Approx(log_energy(w.sigma, s)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("anti-chain is incomparable and maximal") {
  const auto s = load_fixture("eg3");
  for (int k : {2, 4}) {
    const auto ac = build_antichain(s, k);
    std::set<Word> members;
    for (const auto& w : ac.words) members.insert(w.sigma);
    for (const auto& w : ac.words)
      for (std::size_t h = 1; h < w.sigma.size(); ++h) CHECK_FALSE(members.count(Word(w.sigma.begin(), w.sigma.begin() + h)));
    for (const Word& w : enumerate_Sn(s.graph, ac.l2)) {
      int hits = 0;
      for (int h = 1; h <= ac.l2; ++h) hits += static_cast<int>(members.count(Word(w.begin(), w.begin() + h)));
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("surrogate decreases in k and walks agree") {
  for (const std::string name : {"eg3", "eg5", "case1-prop", "g1-demo"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 12; ++k) {
      const auto lumped = antichain_stats(s, k, {0.5}, WalkMode::Lumped);
      CHECK(lumped.log_surrogate < prev);
      prev = lumped.log_surrogate;
      if (k <= 6) {
        const auto ac = build_antichain(s, k);
        const auto dfs = antichain_stats(s, k, {0.5}, WalkMode::Dfs);
        CHECK(std::exp(dfs.log_phi) == doctest::Approx(double(ac.phi())));
        CHECK(dfs.log_surrogate == doctest::Approx(log_surrogate_error(ac)).epsilon(1e-12));
        CHECK(lumped.log_surrogate == doctest::Approx(dfs.log_surrogate).epsilon(1e-9));
        CHECK(lumped.log_F[0] == doctest::Approx(log_F_value(ac, 0.5)).epsilon(1e-9));
        CHECK(lumped.l1 == ac.l1);
        CHECK(lumped.l2 == ac.l2);
      }
    }
  }
}

TEST_CASE("line fit") {
  const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("Lloyd with one center gives mean and variance") {
  const auto pts = uniform_points(20000, 3);
  double mean = 0.0, var = 0.0;
  for (const auto& p : pts) mean += p[0];
  mean /= pts.size();
  for (const auto& p : pts) var += (p[0] - mean) * (p[0] - mean);
  var /= pts.size();
  const auto cb = lloyd(pts, 1, 2.0, 1);
  CHECK(cb.centers[0][0] == doctest::Approx(mean).epsilon(1e-9));
  CHECK(cb.distortion == doctest::Approx(var).epsilon(1e-9));
}

TEST_CASE("uniform quantizer reaches 1/(12k^2)") {
  const auto pts = uniform_points(200000, 11);
  for (int k : {4, 8}) {
    const auto cb = lloyd(pts, k, 2.0, 7);
    CHECK(cb.monotone);
    CHECK(cb.distortion <= cb.initial_distortion);
    CHECK(std::abs(cb.distortion * 12.0 * k * k - 1.0) < 0.05);
  }
}

TEST_CASE("Lloyd in other orders stays monotone") {
  const auto pts = uniform_points(5000, 2);
  for (double r : {1.0, 3.0}) {
    const auto cb = lloyd(pts, 4, r, 9);
    CHECK(cb.monotone);
    CHECK(cb.distortion <= cb.initial_distortion);
    // Optimal 4-level quantizer of U[0,1] in order r: 2 * (1/8)^{r+1} / (r+1) * 4.
    const double opt = 8.0 * std::pow(1.0 / 8, r + 1) / (r + 1);
    CHECK(cb.distortion == doctest::Approx(opt).epsilon(0.05));
  }
  LloydOptions o;
  o.q = 2;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> sq(4000);
  for (auto& p : sq) p = {u(rng), u(rng)};
  const auto cb = lloyd(sq, 4, 2.0, 1, o);
  CHECK(cb.monotone);
  CHECK(cb.distortion == doctest::Approx(1.0 / 24).epsilon(0.05));  // 2x2 grid of squares
}

TEST_CASE("Lloyd rejects bad input") {
  CHECK_THROWS_AS(lloyd({}, 2, 2.0, 1), InputError);
  CHECK_THROWS_AS(lloyd(uniform_points(10, 1), 0, 2.0, 1), InputError);
}

TEST_CASE("sampling is deterministic and stays in the seeds") {
  const auto s = load_fixture("eg3");
  const auto a = sample_mu(s, 2000, 0, 42);
  const auto b = sample_mu(s, 2000, 0, 42);
  CHECK(a == b);
  const auto& g = *s.geometry;
  for (const auto& p : a) {
    bool inside = false;
    for (const auto& box : g.seeds) inside = inside || (p[0] >= box.lo[0] - 1e-12 && p[0] <= box.hi[0] + 1e-12);
    CHECK(inside);
  }
  auto bare = s;
  bare.geometry.reset();
  CHECK_THROWS_AS(sample_mu(bare, 10, 0, 1), InputError);
}

TEST_CASE("cylinder frequencies match mu at depth 3") {
  const auto s = load_fixture("eg3");
  const std::size_t n = 100000;
  const auto pts = sample_mu(s, n, 0, 2024);
  const auto words = enumerate_Sn(s.graph, 3);
  std::vector<std::size_t> counts(words.size(), 0);
  std::vector<Box> boxes;
  for (const Word& w : words) boxes.push_back(cylinder_set(w, s).box);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (p[0] >= boxes[i].lo[0] && p[0] <= boxes[i].hi[0]) {
        ++counts[i];
        break;
      }
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double m = mu_cylinder(words[i], s).mu;
    const double se = std::sqrt(m * (1 - m) / n);
    CHECK(std::abs(double(counts[i]) / n - m) <= 3 * se + 1e-12);
  }
}
