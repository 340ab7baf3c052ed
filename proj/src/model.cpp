#include "mtq/model.hpp"

#include <algorithm>
#include <sstream>

namespace mtq {

namespace {

void check_ratios(const TransitionGraph& g, const Mat& ratio) {
  const int N = g.n_base();
  if (ratio.rows() != N || ratio.cols() != N) throw InputError("ratio matrix must be N x N");
  for (const auto& c : overlap_cells(g)) {
    const double s = ratio(c.i, c.j);
    if (c.empty()) continue;
    if (!(s > 0.0 && s < 1.0))
      throw InputError("ratio for cell (" + std::to_string(c.i + 1) + "," + std::to_string(c.j + 1) +
                       ") must lie in (0,1)");
  }
}

Mat zero_empty_cells(const TransitionGraph& g, Mat ratio) {
  for (const auto& c : overlap_cells(g))
    if (c.empty()) ratio(c.i, c.j) = 0.0;
  return ratio;
}

}  // namespace

SystemSpec make_spec(std::string name, Mat P, Vec chi, Mat ratio, double r) {
  const int m = static_cast<int>(P.rows());
  if (m == 0 || m % 2 || P.cols() != m) throw InputError("P must be a nonempty 2N x 2N matrix");
  if (chi.size() != m) throw InputError("chi must have length 2N");
  if (!(r > 0.0)) throw InputError("quantization order r must be positive");
  for (int a = 0; a < m; ++a) {
    double row = 0.0;
    for (int b = 0; b < m; ++b) {
      if (!(P(a, b) >= 0.0)) throw InputError("P has a negative entry");
      row += P(a, b);
    }
    if (std::abs(row - 1.0) > 1e-12) throw InputError("row " + std::to_string(a + 1) + " of P does not sum to 1");
  }
  double cs = 0.0;
  for (int a = 0; a < m; ++a) {
    if (!(chi(a) > 0.0)) throw InputError("chi entries must be strictly positive");
    cs += chi(a);
  }
  if (std::abs(cs - 1.0) > 1e-12) throw InputError("chi does not sum to 1");

  SystemSpec s;
  s.name = std::move(name);
  s.N = m / 2;
  s.graph = TransitionGraph::from_support(P);
  check_ratios(s.graph, ratio);
  s.ratio = zero_empty_cells(s.graph, std::move(ratio));
  s.P = std::move(P);
  s.chi = std::move(chi);
  s.r = r;
  return s;
}

SystemSpec make_spec_exact(std::string name, int N, std::vector<Rational> P, std::vector<Rational> chi, Mat ratio,
                           double r) {
  const int m = 2 * N;
  if (N < 1 || P.size() != static_cast<std::size_t>(m) * m) throw InputError("P must be 2N x 2N");
  if (chi.size() != static_cast<std::size_t>(m)) throw InputError("chi must have length 2N");
  for (int a = 0; a < m; ++a) {
    Rational row = 0;
    for (int b = 0; b < m; ++b) {
      const Rational& x = P[static_cast<std::size_t>(a) * m + b];
      if (x < 0) throw InputError("P has a negative entry");
      row += x;
    }
    if (row != 1) throw InputError("row " + std::to_string(a + 1) + " of P does not sum to 1 exactly");
  }
  Rational cs = 0;
  for (const auto& x : chi) {
    if (x <= 0) throw InputError("chi entries must be strictly positive");
    cs += x;
  }
  if (cs != 1) throw InputError("chi does not sum to 1 exactly");

  Mat Pd(m, m);
  Vec cd(m);
  for (int a = 0; a < m; ++a) {
    cd(a) = to_double(chi[a]);
    for (int b = 0; b < m; ++b) Pd(a, b) = to_double(P[static_cast<std::size_t>(a) * m + b]);
  }
  // Rows are exact; the double copy may be off by an ulp, so rebuild the
  // checks on the rational side and skip the tolerance checks.
  SystemSpec s;
  s.name = std::move(name);
  s.N = N;
  s.graph = TransitionGraph::from_support(Pd);
  check_ratios(s.graph, ratio);
  s.ratio = zero_empty_cells(s.graph, std::move(ratio));
  s.P = std::move(Pd);
  s.chi = std::move(cd);
  s.r = r;
  if (!(r > 0.0)) throw InputError("quantization order r must be positive");
  s.P_exact = std::move(P);
  s.chi_exact = std::move(chi);
  return s;
}

Mat uniform_ratios(const TransitionGraph& g, double c) {
  const int N = g.n_base();
  Mat R = Mat::Zero(N, N);
  for (const auto& cell : overlap_cells(g))
    if (!cell.empty()) R(cell.i, cell.j) = c;
  return R;
}

std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::CaseI: return "CaseI";
    case CaseKind::CaseII: return "CaseII";
    default: return "Other";
  }
}

bool sums_equal(const SystemSpec& spec, std::initializer_list<std::pair<int, int>> lhs,
                std::initializer_list<std::pair<int, int>> rhs, double tol) {
  if (spec.exact()) {
    Rational a = 0, b = 0;
    for (auto [i, j] : lhs) a += spec.pq(i, j);
    for (auto [i, j] : rhs) b += spec.pq(i, j);
    return a == b;
  }
  double a = 0, b = 0;
  for (auto [i, j] : lhs) a += spec.p(i, j);
  for (auto [i, j] : rhs) b += spec.p(i, j);
  return std::abs(a - b) <= tol;
}

bool chi_equal(const SystemSpec& spec, int a, int b, double tol) {
  if (spec.exact()) return spec.chiq(a) == spec.chiq(b);
  return std::abs(spec.chi(a) - spec.chi(b)) <= tol;
}

std::vector<std::uint8_t> block_support(const SystemSpec& spec, int block) {
  const int N = spec.N;
  const int ro = (block == 1 || block == 3) ? N : 0;
  const int co = (block == 1 || block == 2) ? N : 0;
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) adj[static_cast<std::size_t>(i) * N + j] = spec.graph.edge(i + ro, j + co);
  return adj;
}

RegimeReport validate(const SystemSpec& spec) {
  const int N = spec.N;
  const auto& g = spec.graph;
  RegimeReport rep;

  std::vector<std::uint8_t> full(static_cast<std::size_t>(2 * N) * 2 * N);
  for (int a = 0; a < 2 * N; ++a)
    for (int b = 0; b < 2 * N; ++b) full[static_cast<std::size_t>(a) * 2 * N + b] = g.edge(a, b);
  rep.P_irreducible = strongly_connected(full, 2 * N);
  rep.complete_overlaps = has_complete_overlaps(g);

  const auto P1 = block_support(spec, 0), P2 = block_support(spec, 1), P4 = block_support(spec, 3);
  const bool p1_irr = strongly_connected(P1, N);
  if (!p1_irr) rep.A1.fail(0, -1);
  if (!strongly_connected(P2, N)) rep.A1.fail(N, -1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (P4[static_cast<std::size_t>(i) * N + j]) rep.A1.fail(i + N, j);
  if (!p1_irr) rep.A5.fail(0, -1);

  for (int i = 0; i < N; ++i) {
    int lo = 0, up = 0;
    for (int j = 0; j < N; ++j) {
      lo += P1[static_cast<std::size_t>(i) * N + j];
      up += P2[static_cast<std::size_t>(i) * N + j];
    }
    if (lo < 2) rep.A2.fail(i, -1);
    if (up < 2) rep.A2.fail(i + N, -1);
  }

  for (const auto& c : overlap_cells(g)) {
    if (!c.empty() && c.members != (kCellLL | kCellLU | kCellUU)) rep.A3.fail(c.i, c.j);
    if (!c.empty() && c.members != (kCellLL | kCellLU | kCellUL | kCellUU)) rep.A4.fail(c.i, c.j);
    if (c.empty()) continue;
    const int i = c.i, j = c.j, ip = i + N, jp = j + N;
    if (!sums_equal(spec, {{i, j}, {i, jp}}, {{ip, j}, {ip, jp}})) rep.g1.fail(i, j);
    if (!sums_equal(spec, {{i, j}, {ip, j}}, {{i, jp}, {ip, jp}})) rep.g2.fail(i, j);
  }

  for (int i = 0; i < N; ++i) {
    if (!chi_equal(spec, i, i + N)) rep.b1.fail(i, -1);
    bool found = false;
    for (int l = 0; l < N && !found; ++l)
      found = !sums_equal(spec, {{l, i}, {l + N, i}}, {{l, i + N}, {l + N, i + N}});
    if (!found) rep.b2.fail(i, -1);
  }

  if (rep.A1.pass && rep.A2.pass && rep.A3.pass)
    rep.kind = CaseKind::CaseI;
  else if (rep.A2.pass && rep.A4.pass && rep.A5.pass && rep.P_irreducible)
    rep.kind = CaseKind::CaseII;
  return rep;
}

// ---------------------------------------------------------------- fixtures

namespace {

std::vector<Rational> rat_matrix(std::initializer_list<const char*> entries) {
  std::vector<Rational> out;
  for (const char* e : entries) out.push_back(parse_rational(e));
  return out;
}

std::vector<Rational> eg2_matrix(bool second) {
  // clang-format off
  auto P = rat_matrix({
    "1/3","1/3","0","1/3","0","0",
    "0","1/3","1/3","0","0","1/3",
    "1/3","0","2/3","0","0","0",
    "0","0","0","1/3","0","2/3",
    "0","0","0","0","1/3","2/3",
    "0","0","0","1/3","1/3","1/3"});
  // clang-format on
  if (second) {
    const char* row5[] = {"1/3", "0", "0", "0", "1/3", "1/3"};
    for (int b = 0; b < 6; ++b) P[4 * 6 + b] = parse_rational(row5[b]);
  }
  return P;
}

std::vector<Rational> uniform_chi(int m) { return std::vector<Rational>(m, Rational(1, m)); }

std::vector<Rational> eg5_chi(const std::string& mode) {
  if (mode == "uniform") return uniform_chi(6);
  if (mode == "uniform-pair") return rat_matrix({"1/4", "1/6", "1/12", "1/4", "1/6", "1/12"});
  std::vector<Rational> out;
  std::stringstream ss(mode);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_rational(tok));
  if (out.size() != 6) throw InputError("eg5 chi list needs 6 entries");
  return out;
}

SystemSpec exact_uniform(std::string name, int N, std::vector<Rational> P, std::vector<Rational> chi, double ratio,
                         double r) {
  Mat Pd(2 * N, 2 * N);
  for (int a = 0; a < 2 * N; ++a)
    for (int b = 0; b < 2 * N; ++b) Pd(a, b) = to_double(P[static_cast<std::size_t>(a) * 2 * N + b]);
  Mat R = uniform_ratios(TransitionGraph::from_support(Pd), ratio);
  return make_spec_exact(std::move(name), N, std::move(P), std::move(chi), std::move(R), r);
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"eg1-default", "eg2-P1", "eg2-P2", "eg3", "eg5", "case1-prop", "g1-demo"};
}

namespace {
SystemSpec load_fixture_raw(const std::string& name, const FixtureOptions& opt) {
  const double c = opt.ratio.value_or(0.25);
  const double r = opt.r;
  if (name == "eg2-P1" || name == "eg2-P2")
    return exact_uniform(name, 3, eg2_matrix(name == "eg2-P2"), uniform_chi(6), c, r);
  if (name == "eg3") {
    // clang-format off
    auto P = rat_matrix({
      "1/6","1/3","0","1/6","1/3","0",
      "0","1/6","1/3","0","1/6","1/3",
      "1/3","0","1/6","1/3","0","1/6",
      "1/3","1/6","0","1/3","1/6","0",
      "0","1/3","1/6","0","1/3","1/6",
      "1/3","0","1/6","1/3","0","1/6"});
    // clang-format on
    return exact_uniform(name, 3, std::move(P), rat_matrix({"1/6", "1/9", "1/6", "1/6", "2/9", "1/6"}), c, r);
  }
  if (name == "eg5") {
    // clang-format off
    auto P = rat_matrix({
      "1/6","1/6","0","1/3","1/3","0",
      "0","1/6","1/6","0","1/3","1/3",
      "1/6","0","1/6","1/3","0","1/3",
      "1/4","1/4","0","1/8","3/8","0",
      "0","1/4","1/4","0","1/4","1/4",
      "1/4","0","1/4","1/4","0","1/4"});
    // clang-format on
    return exact_uniform(name, 3, std::move(P), eg5_chi(opt.chi), c, r);
  }
  if (name == "eg1-default") {
    return build_condensation(rat_matrix({"1/4", "3/8", "3/8"}), rat_matrix({"2/3", "1/3"}), {c, c}, r, name);
  }
  if (name == "case1-prop") {
    auto s = build_proportional(rat_matrix({"3/5", "2/5"}), Rational(1, 2), c, r);
    s.name = name;
    return s;
  }
  if (name == "g1-demo") {
    // clang-format off
    auto P = rat_matrix({
      "1/10","3/10","1/5","2/5",
      "1/5","1/5","3/10","3/10",
      "1/4","7/20","1/20","7/20",
      "1/10","1/4","2/5","1/4"});
    // clang-format on
    return exact_uniform(name, 2, std::move(P), rat_matrix({"1/5", "3/10", "3/10", "1/5"}), opt.ratio.value_or(1e-6),
                         r);
  }
  throw InputError("unknown fixture '" + name + "'");
}
}  // namespace

SystemSpec load_fixture(const std::string& name, const FixtureOptions& opt) {
  SystemSpec s = load_fixture_raw(name, opt);
  try {
    s.geometry = default_geometry(s, 1);
  } catch (const InputError&) {
    // ratios too large for the slot layout: the fixture stays symbolic only
  }
  return s;
}

SystemSpec build_condensation(const std::vector<Rational>& q, const std::vector<Rational>& t,
                              const std::vector<double>& c, double r, std::string name) {
  const int N = static_cast<int>(t.size());
  if (N < 1 || q.size() != static_cast<std::size_t>(N) + 1 || c.size() != static_cast<std::size_t>(N))
    throw InputError("condensation needs q of length N+1, t and c of length N");
  Rational qs = 0, ts = 0;
  for (const auto& x : q) {
    if (x <= 0) throw InputError("q entries must be positive");
    qs += x;
  }
  for (const auto& x : t) {
    if (x <= 0) throw InputError("t entries must be positive");
    ts += x;
  }
  if (qs != 1 || ts != 1) throw InputError("q and t must each sum to 1");
  const int m = 2 * N;
  std::vector<Rational> P(static_cast<std::size_t>(m) * m, Rational(0));
  std::vector<Rational> chi(m);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      P[static_cast<std::size_t>(i) * m + j] = q[j + 1];
      P[static_cast<std::size_t>(i) * m + j + N] = q[0] * t[j];
      P[static_cast<std::size_t>(i + N) * m + j + N] = t[j];
    }
    chi[i] = q[i + 1];
    chi[i + N] = q[0] * t[i];
  }
  Mat R(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) R(i, j) = c[i];
  return make_spec_exact(std::move(name), N, std::move(P), std::move(chi), std::move(R), r);
}

SystemSpec build_condensation(const std::vector<double>& q, const std::vector<double>& t, const std::vector<double>& c,
                              double r, std::string name) {
  const int N = static_cast<int>(t.size());
  if (N < 1 || q.size() != static_cast<std::size_t>(N) + 1 || c.size() != static_cast<std::size_t>(N))
    throw InputError("condensation needs q of length N+1, t and c of length N");
  const int m = 2 * N;
  Mat P = Mat::Zero(m, m);
  Vec chi(m);
  Mat R(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      P(i, j) = q[j + 1];
      P(i, j + N) = q[0] * t[j];
      P(i + N, j + N) = t[j];
      R(i, j) = c[i];
    }
    chi(i) = q[i + 1];
    chi(i + N) = q[0] * t[i];
  }
  return make_spec(std::move(name), std::move(P), std::move(chi), std::move(R), r);
}

SystemSpec build_proportional(const std::vector<Rational>& gamma, const Rational& lam, double ratio, double r) {
  const int N = static_cast<int>(gamma.size());
  if (N < 2) throw InputError("proportional family needs N >= 2");
  if (lam <= 0 || lam >= 1) throw InputError("lambda must lie in (0,1)");
  const int m = 2 * N;
  std::vector<Rational> P(static_cast<std::size_t>(m) * m, Rational(0));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      P[static_cast<std::size_t>(a) * m + b] = lam * gamma[b];
      P[static_cast<std::size_t>(a) * m + b + N] = (1 - lam) * gamma[b];
      P[static_cast<std::size_t>(a + N) * m + b + N] = gamma[b];
    }
  return exact_uniform("proportional", N, std::move(P), uniform_chi(m), ratio, r);
}

}  // namespace mtq
