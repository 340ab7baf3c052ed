#pragma once

#include "mtq/core.hpp"
#include "mtq/geometry.hpp"
#include "mtq/symbolic.hpp"

#include <optional>
#include <string>

namespace mtq {

struct SystemSpec {
  std::string name;
  int N = 0;
  Mat P;       // 2N x 2N, row-stochastic
  Vec chi;     // 2N
  Mat ratio;   // N x N, s_{i,j} on cells of S_2, 0 elsewhere
  double r = 2.0;
  TransitionGraph graph;

  // Exact entries when the input was given as rationals.
  std::optional<std::vector<Rational>> P_exact;  // row-major 2N x 2N
  std::optional<std::vector<Rational>> chi_exact;

  std::optional<GeometrySpec> geometry;

  int dim() const { return 2 * N; }
  bool exact() const { return P_exact.has_value() && chi_exact.has_value(); }
  double p(int a, int b) const { return P(a, b); }
  const Rational& pq(int a, int b) const { return (*P_exact)[static_cast<std::size_t>(a) * dim() + b]; }
  const Rational& chiq(int a) const { return (*chi_exact)[static_cast<std::size_t>(a)]; }
  double s(int i, int j) const { return ratio(i, j); }
};

// Assembles a spec and enforces the structural invariants (stochastic rows,
// positive chi, ratios present exactly on nonempty cells). Throws InputError.
SystemSpec make_spec(std::string name, Mat P, Vec chi, Mat ratio, double r);
SystemSpec make_spec_exact(std::string name, int N, std::vector<Rational> P, std::vector<Rational> chi, Mat ratio,
                           double r);

Mat uniform_ratios(const TransitionGraph& g, double c);

enum class CaseKind { CaseI, CaseII, Other };
std::string to_string(CaseKind k);

struct Flag {
  bool pass = true;
  // Violating index pairs, 0-based; single-index flags store (i, -1).
  std::vector<std::pair<int, int>> witnesses;
  void fail(int i, int j = -1) {
    pass = false;
    witnesses.emplace_back(i, j);
  }
};

struct RegimeReport {
  Flag A1, A2, A3, A4, A5, g1, g2, b1, b2;
  bool P_irreducible = false;
  bool complete_overlaps = false;
  CaseKind kind = CaseKind::Other;
};

RegimeReport validate(const SystemSpec& spec);

// Tolerance-aware comparisons that switch to exact arithmetic on rational specs.
bool sums_equal(const SystemSpec& spec, std::initializer_list<std::pair<int, int>> lhs,
                std::initializer_list<std::pair<int, int>> rhs, double tol = 1e-12);
bool chi_equal(const SystemSpec& spec, int a, int b, double tol = 1e-12);

// Sub-block support of P: 0 = P1 (lower,lower), 1 = P2 (upper,upper),
// 2 = P3 (lower,upper), 3 = P4 (upper,lower).
std::vector<std::uint8_t> block_support(const SystemSpec& spec, int block);

struct FixtureOptions {
  std::optional<double> ratio;  // fixture default when unset
  double r = 2.0;
  std::string chi = "uniform-pair";  // eg5 only: uniform-pair | uniform | comma list
};

std::vector<std::string> fixture_names();
SystemSpec load_fixture(const std::string& name, const FixtureOptions& opt = {});

// q = (q_0, q_1..q_N), t = (t_1..t_N), c = ratio of f_i.
SystemSpec build_condensation(const std::vector<Rational>& q, const std::vector<Rational>& t,
                              const std::vector<double>& c, double r, std::string name = "condensation");
SystemSpec build_condensation(const std::vector<double>& q, const std::vector<double>& t, const std::vector<double>& c,
                              double r, std::string name = "condensation");

// Case I family with p_{a,b} = lam*gamma_b, p_{a,b+} = (1-lam)*gamma_b,
// p_{a+,b+} = gamma_b. Satisfies p_{i,j}+p_{i,j+} = p_{i+,j+}, so it is reducible.
SystemSpec build_proportional(const std::vector<Rational>& gamma, const Rational& lam, double ratio, double r);

SystemSpec load_json_file(const std::string& path);
SystemSpec load_json_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace mtq
