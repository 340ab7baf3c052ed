#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtq/spectral.hpp"

using namespace mtq;

namespace {
double brute_log_T(const SystemSpec& s, int n, double x) {
  LogSum acc;
  for (const Word& w : enumerate_Sn(s.graph, n)) acc.add(x * log_energy(w, s));
  return acc.value();
}
}  // namespace

TEST_CASE("perron basics") {
  CHECK(spectral_radius_2x2(1.0 / 6, 1.0 / 3, 1.0 / 4, 1.0 / 8) == doctest::Approx((14 + std::sqrt(772.0)) / 96));
  Mat P = Mat::Constant(3, 3, 1.0 / 3);
  CHECK(spectral_radius(P) == doctest::Approx(1.0).epsilon(1e-13));
  Mat Z = Mat::Zero(2, 2);
  CHECK(spectral_radius(Z) == 0.0);
  Mat tiny(2, 2);
  tiny << 1e-14, 3e-14, 2e-14, 1e-14;
  CHECK(spectral_radius(tiny) == doctest::Approx(spectral_radius_2x2(1e-14, 3e-14, 2e-14, 1e-14)).epsilon(1e-10));
  Mat red(2, 2);
  red << 0.5, 0.0, 0.3, 0.2;
  CHECK_FALSE(is_irreducible(red));
  CHECK(spectral_radius(red) == doctest::Approx(0.5));
  CHECK_THROWS_AS(perron_vectors(red), InputError);
}

TEST_CASE("row-stochastic block has radius one") {
  const auto s = load_fixture("eg1-default");
  // The upper block of a condensation system is a stochastic matrix.
  const Mat P2 = s.P.bottomRightCorner(s.N, s.N);
  CHECK(P2.rowwise().sum().minCoeff() == doctest::Approx(1.0));
  CHECK(spectral_radius(P2) == doctest::Approx(1.0).epsilon(1e-12));
  // At x = 0 only the support remains.
  CHECK(param_radius(s, MatrixKind::A2, 0.0) == doctest::Approx(spectral_radius((P2.array() > 0).cast<double>().matrix())));
}

TEST_CASE("eg3 block roots have a closed form") {
  // Each block row carries {1/6, 1/3} with ratio 1/4, so rho = (1/96)^x + (1/48)^x.
  const auto s = load_fixture("eg3");
  const double s1 = solve_dimension_root(s, MatrixKind::A1);
  const double x = exponent(s1, 2.0);
  CHECK(std::pow(1.0 / 96, x) + std::pow(1.0 / 48, x) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(solve_dimension_root(s, MatrixKind::A2) == doctest::Approx(s1).epsilon(1e-11));
}

TEST_CASE("radius strictly decreases in s") {
  for (const auto& name : {"eg3", "eg5", "case1-prop", "g1-demo"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 50; ++i) {
      const double rho = param_radius(s, MatrixKind::A, exponent(0.04 * i, s.r));
      CHECK(rho < prev);
      prev = rho;
    }
  }
}

TEST_CASE("roots have unit radius") {
  for (const auto& name : {"eg3", "eg5", "case1-prop", "eg1-default"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    const double root = solve_dimension_root(s, MatrixKind::A);
    CHECK(std::abs(param_radius(s, MatrixKind::A, exponent(root, s.r)) - 1.0) < 1e-10);
  }
}

TEST_CASE("Case I: s_r is the larger block root") {
  for (const auto& name : {"eg1-default", "case1-prop"}) {
    CAPTURE(name);
    const auto d = dimensions(load_fixture(name));
    CHECK(d.kind == CaseKind::CaseI);
    CHECK(std::abs(d.sr - std::max(d.s1r, d.s2r)) <= 2e-10);
  }
  const auto t = build_tuned_equal(0.25, 2.0, 0.8);
  const auto d = dimensions(t);
  CHECK(std::abs(d.s1r - d.s2r) < 1e-10);
  CHECK(std::abs(d.sr - d.s1r) <= 2e-10);
}

TEST_CASE("lumped energy table matches brute force") {
  for (const auto& name : {"eg3", "eg5", "g1-demo"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    const auto table = EnergyTable::build(s, 8);
    for (int n = 1; n <= 8; ++n)
      for (double x : {0.0, 0.2, 0.7}) CHECK(table.log_T(n, x) == doctest::Approx(brute_log_T(s, n, x)).epsilon(1e-11));
  }
}

TEST_CASE("quasi-multiplicativity of T_n on eg3") {
  const auto s = load_fixture("eg3");
  const auto c = constants(s);
  const auto table = EnergyTable::build(s, 12);
  for (double x : {0.05, 0.17, 0.3, 0.6})
    for (int n = 1; n < 12; ++n)
      for (int l = 1; n + l <= 12; ++l) {
        const double prod = table.log_T(n, x) + table.log_T(l, x);
        CHECK(table.log_T(n + l, x) >= c.log_g1(x) + prod - 1e-12);
        CHECK(table.log_T(n + l, x) <= c.log_g2(x) + prod + 1e-12);
      }
}

TEST_CASE("T_m and T_n are comparable at the pressure root") {
  const auto s = load_fixture("eg3");
  const auto table = EnergyTable::build(s, 12);
  const auto tr = solve_tr(s, table);
  const double x = exponent(tr.tr, s.r);
  const double lb = constants(s).log_b(x);
  for (int m = 1; m <= 12; ++m)
    for (int n = 1; n <= 12; ++n) CHECK(std::abs(table.log_T(m, x) - table.log_T(n, x)) <= lb);
}

TEST_CASE("pressure bracket and root") {
  const auto s = load_fixture("eg3");
  const auto p = pressure(s, 0.2, 12);
  CHECK(p.phi_lo <= p.phi_hat);
  CHECK(p.phi_hat <= p.phi_hi);
  const auto tr = solve_tr(s, 12);
  CHECK(tr.tr_lo <= tr.tr);
  CHECK(tr.tr <= tr.tr_hi);
  CHECK(tr.monotone);
  const auto d = dimensions(s);
  REQUIRE(d.ar.has_value());
  CHECK(*d.ar == doctest::Approx(0.4973244014).epsilon(1e-9));
  CHECK(tr.tr_hi < d.sr);
}

TEST_CASE("g1 regime: pressure root meets the collapsed root") {
  const auto s = load_fixture("g1-demo");
  CHECK(b_kernel(s) == Surrogate::PHatG1);
  const auto d = dimensions(s);
  REQUIRE(d.ar.has_value());
  REQUIRE(d.tr.has_value());
  CHECK(d.tr->width() <= 0.02);
  CHECK(std::abs(d.tr->tr - *d.ar) <= d.tr->width());
}

TEST_CASE("strictness certificate") {
  const auto s = load_fixture("eg3");
  const auto d = dimensions(s);
  const auto st = strictness_test(s, *d.ar);
  CHECK(st.certified);
  CHECK(st.margin > 1e-10);
  CHECK(st.rho_b == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("small-r scan") {
  const auto rep = small_r_scan(load_fixture("eg1-default"), {0.25, 0.5, 1.0, 2.0, 4.0});
  CHECK(rep.rows.size() == 5);
  for (const auto& row : rep.rows) {
    CHECK(row.s1r > 0);
    CHECK(row.s2r > 0);
  }
  CHECK(rep.positive_prefix >= 0);
  CHECK(rep.positive_prefix <= 5);
}

TEST_CASE("b_kernel refuses specs outside g1/g2") {
  CHECK_THROWS_AS(b_kernel(load_fixture("eg2-P1")), InputError);
}

TEST_CASE("uniform kernel has a closed-form root") {
  // Two letters, every lifted transition 1/4, ratio c everywhere: rho(A(x)) = 4 (c^r / 4)^x.
  const double c = 0.3, r = 2.0;
  const auto s = make_spec("uniform", Mat::Constant(4, 4, 0.25), Vec::Constant(4, 0.25), Mat::Constant(2, 2, c), r);
  const double root = solve_dimension_root(s, MatrixKind::A);
  const double x = std::log(4.0) / (std::log(4.0) - r * std::log(c));
  CHECK(exponent(root, r) == doctest::Approx(x).epsilon(1e-11));
  CHECK(4.0 * std::pow(std::pow(c, r) / 4.0, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power iteration matches the 2x2 closed form on every cell") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    for (const auto& [i, j] : s2_pairs(s.graph)) {
      const auto L = lift_transfer(s, i, j, false);
      Mat M(2, 2);
      M << L.m[0][0], L.m[0][1], L.m[1][0], L.m[1][1];
      // Run the general path on a padded copy so the closed form is not used.
      Mat big = Mat::Zero(3, 3);
      big.topLeftCorner(2, 2) = M;
      CHECK(spectral_radius(big) ==
            doctest::Approx(spectral_radius_2x2(M(0, 0), M(0, 1), M(1, 0), M(1, 1))).epsilon(1e-12));
    }
  }
}

TEST_CASE("collapsed root residual") {
  for (const auto& name : {"eg3", "g1-demo"}) {
    CAPTURE(name);
    const auto s = load_fixture(name);
    const auto d = dimensions(s);
    REQUIRE(d.ar.has_value());
    CHECK(std::abs(param_radius(s, MatrixKind::B, exponent(*d.ar, s.r)) - 1.0) <= 1e-8);
  }
}

TEST_CASE("deeper tables give nested brackets") {
  const auto s = load_fixture("eg3");
  const auto a = solve_tr(s, 6), b = solve_tr(s, 12);
  CHECK(a.tr_lo <= b.tr_lo + 1e-10);
  CHECK(b.tr_hi <= a.tr_hi + 1e-10);
  const auto c = constants(s);
  const auto p = pressure(s, 0.3, 12);
  CHECK(p.phi_hi - p.phi_lo <= c.log_b(0.3) / 12 + 1e-12);
}
