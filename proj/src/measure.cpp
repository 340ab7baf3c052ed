#include "mtq/measure.hpp"

#include "mtq/perron.hpp"

#include <algorithm>
#include <set>

namespace mtq {

Lift2 lift_transfer(const SystemSpec& spec, int a, int b, bool energy_scale) {
  const int N = spec.N;
  Lift2 L;
  const double sc = energy_scale ? std::pow(spec.ratio(a, b), spec.r) : 1.0;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) L.m[u][v] = spec.p(a + u * N, b + v * N) * sc;
  return L;
}

double TransferState::log_total() const {
  const double t = v[0] + v[1];
  return t > 0.0 ? std::log(t) + log_scale : kNegInf;
}

namespace {

TransferState normalized(double a, double b, double log_scale) {
  TransferState s;
  const double t = a + b;
  if (!(t > 0.0)) {
    s.log_scale = kNegInf;
    return s;
  }
  s.v[0] = a / t;
  s.v[1] = b / t;
  s.log_scale = log_scale + std::log(t);
  return s;
}

void require_in_S(const Word& sigma, const SystemSpec& spec) {
  if (!in_S(sigma, spec.graph)) throw InputError("word " + format_word(sigma) + " is not in S_n");
}

}  // namespace

TransferState start_state(const SystemSpec& spec, int letter) {
  return normalized(spec.chi(letter), spec.chi(letter + spec.N), 0.0);
}

TransferState advance(const TransferState& s, const Lift2& L) {
  return normalized(s.v[0] * L.m[0][0] + s.v[1] * L.m[1][0], s.v[0] * L.m[0][1] + s.v[1] * L.m[1][1], s.log_scale);
}

double log_nu_cylinder(const Word& lifted, const SystemSpec& spec) {
  if (!is_admissible(lifted, spec.graph)) throw InputError("lifted word " + format_word(lifted) + " is not admissible");
  double acc = std::log(spec.chi(lifted[0]));
  for (std::size_t h = 0; h + 1 < lifted.size(); ++h) acc += std::log(spec.p(lifted[h], lifted[h + 1]));
  return acc;
}

double nu_cylinder(const Word& lifted, const SystemSpec& spec) { return std::exp(log_nu_cylinder(lifted, spec)); }

double log_ratio_product(const Word& sigma, const SystemSpec& spec) {
  double acc = 0.0;
  for (std::size_t h = 0; h + 1 < sigma.size(); ++h) acc += std::log(spec.ratio(sigma[h], sigma[h + 1]));
  return acc;
}

CylinderValue mu_cylinder(const Word& sigma, const SystemSpec& spec, MuMethod method) {
  require_in_S(sigma, spec);
  CylinderValue out;
  out.sigma = sigma;
  if (method == MuMethod::Enumerate) {
    const int N = spec.N;
    for (const Word& w : gamma(sigma, spec.graph)) {
      double x = spec.chi(w[0]);
      for (std::size_t h = 0; h + 1 < w.size(); ++h) x *= spec.p(w[h], w[h + 1]);
      (w.back() < N ? out.i1 : out.i2) += x;
    }
    out.mu = out.i1 + out.i2;
    out.log_mu = std::log(out.mu);
  } else {
    TransferState st = start_state(spec, sigma[0]);
    for (std::size_t h = 0; h + 1 < sigma.size(); ++h) st = advance(st, lift_transfer(spec, sigma[h], sigma[h + 1], false));
    out.log_mu = st.log_total();
    out.i1 = std::exp(st.log_component(0));
    out.i2 = std::exp(st.log_component(1));
    out.mu = std::exp(out.log_mu);
  }
  out.log_energy = out.log_mu + spec.r * log_ratio_product(sigma, spec);
  out.energy = std::exp(out.log_energy);
  return out;
}

double log_energy(const Word& sigma, const SystemSpec& spec) {
  require_in_S(sigma, spec);
  TransferState st = start_state(spec, sigma[0]);
  for (std::size_t h = 0; h + 1 < sigma.size(); ++h) st = advance(st, lift_transfer(spec, sigma[h], sigma[h + 1], true));
  return st.log_total();
}

double energy(const Word& sigma, const SystemSpec& spec) { return std::exp(log_energy(sigma, spec)); }

std::pair<Rational, Rational> split_exact(const Word& sigma, const SystemSpec& spec) {
  if (!spec.exact()) throw InputError("exact evaluation needs a rational spec");
  require_in_S(sigma, spec);
  const int N = spec.N;
  Rational a = spec.chiq(sigma[0]), b = spec.chiq(sigma[0] + N);
  for (std::size_t h = 0; h + 1 < sigma.size(); ++h) {
    const int x = sigma[h], y = sigma[h + 1];
    Rational na = a * spec.pq(x, y) + b * spec.pq(x + N, y);
    Rational nb = a * spec.pq(x, y + N) + b * spec.pq(x + N, y + N);
    a = std::move(na);
    b = std::move(nb);
  }
  return {a, b};
}

Rational mu_exact(const Word& sigma, const SystemSpec& spec) {
  auto [a, b] = split_exact(sigma, spec);
  return a + b;
}

// ---------------------------------------------------------------- constants

Constants constants(const SystemSpec& spec) {
  Constants c;
  const int N = spec.N, m = spec.dim();
  c.N = N;
  c.p_lo = std::numeric_limits<double>::infinity();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (spec.p(a, b) > 0.0) {
        c.p_lo = std::min(c.p_lo, spec.p(a, b));
        c.p_hi = std::max(c.p_hi, spec.p(a, b));
      }
  c.s_lo = std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : s2_pairs(spec.graph)) {
    c.s_lo = std::min(c.s_lo, spec.ratio(i, j));
    c.s_hi = std::max(c.s_hi, spec.ratio(i, j));
    c.d_bar = std::max({c.d_bar, spec.p(i, j) + spec.p(i, j + N), spec.p(i + N, j) + spec.p(i + N, j + N)});
  }
  c.chi_lo = spec.chi.minCoeff();
  c.chi_hi = spec.chi.maxCoeff();
  for (int i = 0; i < N; ++i) c.zeta_bar = std::max(c.zeta_bar, spec.chi(i) + spec.chi(i + N));
  const double r = spec.r;
  c.c1 = std::min(c.p_lo, 2.0 * c.chi_lo) * std::pow(c.s_lo, r);
  c.c2 = std::max({c.p_hi, c.zeta_bar, c.d_bar}) * std::pow(c.s_hi, r);
  c.t6_lo = c.p_lo * std::pow(c.s_lo, r) / c.chi_hi;
  c.t6_hi = c.p_hi * std::pow(c.s_hi, r) / c.chi_lo;
  return c;
}

double Constants::log_h(double x) const {
  const double n = N;
  return -n * (std::log(n) + x * std::log(c2)) - x * std::log(t6_hi) + n * x * std::log(c1) + x * std::log(t6_lo);
}

double Constants::log_g1(double x) const { return -std::log(static_cast<double>(N)) + log_h(x) + x * std::log(t6_lo); }

double Constants::log_g2(double x) const { return x * std::log(t6_hi); }

// ---------------------------------------------------------------- kernels

std::string to_string(Surrogate s) {
  switch (s) {
    case Surrogate::PTilde: return "ptilde";
    case Surrogate::PHatG1: return "phat-g1";
    default: return "phat-g2";
  }
}

Surrogate parse_surrogate(const std::string& s) {
  if (s == "ptilde") return Surrogate::PTilde;
  if (s == "phat-g1") return Surrogate::PHatG1;
  if (s == "phat-g2") return Surrogate::PHatG2;
  throw InputError("unknown surrogate '" + s + "' (ptilde | phat-g1 | phat-g2)");
}

SurrogateKernels surrogate_kernels(const SystemSpec& spec) {
  const int N = spec.N;
  SurrogateKernels k;
  k.ptilde = Mat::Zero(N, N);
  k.phat_g1 = Mat::Zero(N, N);
  k.phat_g2 = Mat::Zero(N, N);
  k.chitilde = Vec(N);
  for (int i = 0; i < N; ++i) k.chitilde(i) = spec.chi(i) + spec.chi(i + N);
  for (const auto& [i, j] : s2_pairs(spec.graph)) {
    k.ptilde(i, j) = mu_cylinder({i, j}, spec).mu / k.chitilde(i);
    k.phat_g1(i, j) = spec.p(i, j) + spec.p(i, j + N);
    k.phat_g2(i, j) = spec.p(i, j) + spec.p(i + N, j);
  }
  return k;
}

// ---------------------------------------------------------------- reducibility

std::string to_string(Reducibility r) {
  switch (r) {
    case Reducibility::Reducible: return "REDUCIBLE";
    case Reducibility::NotReducible: return "NOT_REDUCIBLE";
    default: return "UNKNOWN";
  }
}

double reducibility_delta(const SystemSpec& spec, const Word& sigma, int j) {
  const int i = sigma.back();
  Word ext = sigma;
  ext.push_back(j);
  const double mu_ij = mu_cylinder({i, j}, spec).mu;
  const double mu_i = spec.chi(i) + spec.chi(i + spec.N);
  return mu_cylinder(ext, spec).mu - mu_cylinder(sigma, spec).mu * (mu_ij / mu_i);
}

Rational reducibility_delta_exact(const SystemSpec& spec, const Word& sigma, int j) {
  const int i = sigma.back();
  Word ext = sigma;
  ext.push_back(j);
  const Rational mu_i = spec.chiq(i) + spec.chiq(i + spec.N);
  return mu_exact(ext, spec) - mu_exact(sigma, spec) * (mu_exact({i, j}, spec) / mu_i);
}

namespace {

struct Level {
  Word w;
  double a = 0, b = 0;  // I1, I2 in double mode
  Rational qa, qb;      // and in exact mode
};

// BFS over S_n, n = 1..depth, calling visit(level entry) per word.
// visit returns true to stop. Returns the depth reached.
template <class Visit>
int bfs_words(const SystemSpec& spec, int depth, bool exact, Visit&& visit, std::size_t cap = 2'000'000) {
  const int N = spec.N;
  std::vector<Level> cur;
  for (int i = 0; i < N; ++i) {
    Level l;
    l.w = {i};
    if (exact) {
      l.qa = spec.chiq(i);
      l.qb = spec.chiq(i + N);
    }
    l.a = spec.chi(i);
    l.b = spec.chi(i + N);
    cur.push_back(std::move(l));
  }
  for (int n = 1; n <= depth; ++n) {
    for (const auto& l : cur)
      if (visit(l)) return n;
    if (n == depth) return n;
    std::vector<Level> next;
    for (const auto& l : cur) {
      const int x = l.w.back();
      for (int y : children(l.w, spec.graph)) {
        Level e;
        e.w = l.w;
        e.w.push_back(y);
        if (exact) {
          e.qa = l.qa * spec.pq(x, y) + l.qb * spec.pq(x + N, y);
          e.qb = l.qa * spec.pq(x, y + N) + l.qb * spec.pq(x + N, y + N);
          e.a = to_double(e.qa);
          e.b = to_double(e.qb);
        } else {
          e.a = l.a * spec.p(x, y) + l.b * spec.p(x + N, y);
          e.b = l.a * spec.p(x, y + N) + l.b * spec.p(x + N, y + N);
        }
        next.push_back(std::move(e));
      }
    }
    if (next.size() > cap) return -n;
    cur = std::move(next);
  }
  return depth;
}

void fill_witness(ReducibilityVerdict& v, const SystemSpec& spec, const Word& sigma, int j) {
  v.sigma = sigma;
  v.j = j;
  v.delta = reducibility_delta(spec, sigma, j);
  if (spec.exact()) v.delta_exact = reducibility_delta_exact(spec, sigma, j);
}

// The Delta over the children of sigma sum to zero, so a nonzero one always
// has a positive partner; report the child where mu most exceeds the chain.
int top_delta_child(const SystemSpec& spec, const Word& sigma) {
  int best = -1;
  double top = -std::numeric_limits<double>::infinity();
  for (int j : children(sigma, spec.graph)) {
    const double d = reducibility_delta(spec, sigma, j);
    if (d > top) {
      top = d;
      best = j;
    }
  }
  return best;
}

bool delta_nonzero(const SystemSpec& spec, const Word& sigma, int j) {
  if (spec.exact()) return reducibility_delta_exact(spec, sigma, j) != 0;
  return std::abs(reducibility_delta(spec, sigma, j)) > 1e-12 * mu_cylinder(sigma, spec).mu;
}

}  // namespace

ReducibilityVerdict classify_reducibility(const SystemSpec& spec, int depth_max) {
  const int N = spec.N;
  const RegimeReport rep = validate(spec);
  const bool exact = spec.exact();
  ReducibilityVerdict v;
  const auto k = surrogate_kernels(spec);
  v.ptilde = k.ptilde;
  v.chitilde = k.chitilde;

  if (rep.kind == CaseKind::CaseI) {
    bool ok = true;
    for (const auto& [i, j] : s2_pairs(spec.graph))
      ok = ok && sums_equal(spec, {{i, j}, {i, j + N}}, {{i + N, j + N}});
    if (ok) {
      v.status = Reducibility::Reducible;
      v.certificate = "p(i,j)+p(i,j+) = p(i+,j+) on every cell of S_2";
      return v;
    }
    v.status = Reducibility::NotReducible;
    v.certificate = "p(i,j)+p(i,j+) != p(i+,j+) on some cell of S_2";
    const int reached = bfs_words(spec, depth_max, exact, [&](const Level& l) {
      for (int j : children(l.w, spec.graph))
        if (delta_nonzero(spec, l.w, j)) {
          fill_witness(v, spec, l.w, top_delta_child(spec, l.w));
          return true;
        }
      return false;
    });
    v.depth_searched = std::abs(reached);
    return v;
  }

  if (!(rep.A2.pass && rep.A5.pass))
    throw InputError("reducibility test needs (A2)+(A5) or (A1)-(A3); spec '" + spec.name + "' has neither");

  std::vector<int> failing_j(N, -1);  // first j where (a) fails, per i
  bool all_a = true;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N && failing_j[i] < 0; ++j)
      if (!sums_equal(spec, {{i, j}, {i, j + N}}, {{i + N, j}, {i + N, j + N}})) {
        failing_j[i] = j;
        all_a = false;
      }
  if (all_a) {
    v.status = Reducibility::Reducible;
    v.certificate = "(a) holds for every i: p(i,j)+p(i,j+) = p(i+,j)+p(i+,j+)";
    return v;
  }
  if (rep.A4.pass && rep.b1.pass && rep.g2.pass) {
    v.status = Reducibility::Reducible;
    v.certificate = "chi(i) = chi(i+) and p(l,i)+p(l+,i) = p(l,i+)+p(l+,i+) on S_2";
    return v;
  }

  bool found = false;
  const int reached = bfs_words(spec, depth_max, exact, [&](const Level& l) {
    const int i = l.w.back();
    if (failing_j[i] < 0) return false;
    bool violates;
    if (exact) {
      violates = spec.chiq(i + N) * l.qa != spec.chiq(i) * l.qb;
    } else {
      const double d = spec.chi(i + N) * l.a - spec.chi(i) * l.b;
      violates = std::abs(d) > 1e-12 * (l.a + l.b);
    }
    if (!violates) return false;
    fill_witness(v, spec, l.w, top_delta_child(spec, l.w));
    found = true;
    return true;
  });
  v.depth_searched = std::abs(reached);
  if (found) {
    v.status = Reducibility::NotReducible;
    v.certificate = rep.A4.pass && rep.b1.pass && rep.b2.pass
                        ? "chi(i) = chi(i+) with the column condition failing; (a) and (b) both fail"
                        : "(a) fails and chi(i+) I1 != chi(i) I2 for the witness";
    return v;
  }
  if (rep.A4.pass && rep.b1.pass && rep.b2.pass) {
    v.status = Reducibility::NotReducible;
    v.certificate = "chi(i) = chi(i+) with the column condition failing; (a) fails for some i";
    return v;
  }
  v.status = Reducibility::Unknown;
  v.certificate = reached < 0 ? "search stopped at the word cap" : "no violation of (b) up to the search depth";
  return v;
}

// ---------------------------------------------------------------- cycles

double cycle_rate(const Word& cycle, const SystemSpec& spec) {
  if (cycle.empty()) throw InputError("empty cycle");
  double M[2][2] = {{1, 0}, {0, 1}};
  const std::size_t L = cycle.size();
  for (std::size_t h = 0; h < L; ++h) {
    const int a = cycle[h], b = cycle[(h + 1) % L];
    if (a < 0 || b < 0 || a >= spec.N || b >= spec.N || spec.ratio(a, b) <= 0.0)
      throw InputError("cycle " + format_word(cycle) + " uses an edge outside S_2");
    const Lift2 T = lift_transfer(spec, a, b, false);
    double R[2][2];
    for (int u = 0; u < 2; ++u)
      for (int w = 0; w < 2; ++w) R[u][w] = M[u][0] * T.m[0][w] + M[u][1] * T.m[1][w];
    std::copy(&R[0][0], &R[0][0] + 4, &M[0][0]);
  }
  return spectral_radius_2x2(M[0][0], M[0][1], M[1][0], M[1][1]);
}

std::vector<Word> simple_cycles(const SystemSpec& spec, int max_len) {
  const int N = spec.N;
  std::vector<Word> out;
  Word path;
  std::vector<char> used(N, 0);
  auto rec = [&](auto&& self, int start) -> void {
    const int a = path.back();
    for (int b = start; b < N; ++b) {
      if (spec.ratio(a, b) <= 0.0) continue;
      if (b == start) {
        out.push_back(path);
      } else if (!used[b] && static_cast<int>(path.size()) < max_len) {
        used[b] = 1;
        path.push_back(b);
        self(self, start);
        path.pop_back();
        used[b] = 0;
      }
    }
  };
  for (int s = 0; s < N; ++s) {
    path = {s};
    used.assign(N, 0);
    used[s] = 1;
    rec(rec, s);
  }
  std::stable_sort(out.begin(), out.end(), [](const Word& x, const Word& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

EquivalenceReport equivalence_probe(const SystemSpec& spec, Surrogate surrogate, int cycle_max_len, double tol) {
  const int N = spec.N;
  EquivalenceReport rep;
  rep.surrogate = surrogate;
  const auto kern = surrogate_kernels(spec);
  auto flag = [&](const std::string& why) {
    if (!rep.non_equivalent) rep.reason = why;
    rep.non_equivalent = true;
  };
  auto close = [&](double x, double y) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); };

  // Row sums over the lower and upper lifts; ptilde mixes them with zeta_i.
  Mat A = Mat::Zero(N, N), B = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      A(i, j) = spec.p(i, j) + spec.p(i, j + N);
      B(i, j) = spec.p(i + N, j) + spec.p(i + N, j + N);
    }
  std::map<int, std::pair<double, Word>> pinned;

  for (const Word& c : simple_cycles(spec, cycle_max_len)) {
    CycleComparison row;
    row.cycle = c;
    row.rate_mu = cycle_rate(c, spec);
    const std::size_t L = c.size();
    if (surrogate != Surrogate::PTilde) {
      const Mat& K = surrogate == Surrogate::PHatG1 ? kern.phat_g1 : kern.phat_g2;
      double prod = 1.0;
      for (std::size_t h = 0; h < L; ++h) prod *= K(c[h], c[(h + 1) % L]);
      row.rate_surrogate = prod;
      row.status = close(prod, row.rate_mu) ? "match" : "mismatch";
      if (row.status == "mismatch") flag("cycle " + format_word(c) + " decays at a different rate");
      rep.rows.push_back(row);
      continue;
    }
    double fixed = 1.0;
    std::vector<std::size_t> free_pos;
    for (std::size_t h = 0; h < L; ++h) {
      const int a = c[h], b = c[(h + 1) % L];
      if (close(A(a, b), B(a, b)))
        fixed *= A(a, b);
      else
        free_pos.push_back(h);
    }
    if (free_pos.empty()) {
      row.rate_surrogate = fixed;
      row.status = close(fixed, row.rate_mu) ? "match" : "mismatch";
      if (row.status == "mismatch") flag("cycle " + format_word(c) + " decays at a different rate for every chi");
    } else if (free_pos.size() == 1) {
      const std::size_t h = free_pos[0];
      const int a = c[h], b = c[(h + 1) % L];
      const double z = (row.rate_mu / fixed - B(a, b)) / (A(a, b) - B(a, b));
      row.free_letter = a;
      row.implied_zeta = z;
      if (!(z > 0.0 && z < 1.0)) {
        row.status = "infeasible";
        flag("cycle " + format_word(c) + " needs a mixing weight outside (0,1)");
      } else if (auto it = pinned.find(a); it != pinned.end() && !close(it->second.first, z)) {
        row.status = "conflict";
        flag("cycles " + format_word(it->second.second) + " and " + format_word(c) + " pin zeta_" +
             std::to_string(a + 1) + " to different values");
      } else {
        row.status = "pins zeta_" + std::to_string(a + 1);
        pinned.emplace(a, std::make_pair(z, c));
      }
    } else {
      row.status = "several free weights (not used)";
    }
    rep.rows.push_back(row);
  }
  if (!rep.non_equivalent) rep.reason = "no cycle pair rules out a consistent mixing weight";
  return rep;
}

// ---------------------------------------------------------------- nu1

double AuxMeasureNu1::log_value(const Word& sigma) const {
  double acc = -static_cast<double>(sigma.size()) * std::log(rho);
  for (std::size_t h = 0; h + 1 < sigma.size(); ++h) acc += std::log(weights(sigma[h], sigma[h + 1]));
  return acc + std::log(xi(sigma.back()));
}

double AuxMeasureNu1::value(const Word& sigma) const { return std::exp(log_value(sigma)); }

AuxMeasureNu1 make_nu1(const SystemSpec& spec, int block, double s) {
  if (block != 0 && block != 1) throw InputError("block must be 0 (lower) or 1 (upper)");
  const int N = spec.N, off = block * N;
  const double x = s / (s + spec.r);
  AuxMeasureNu1 nu;
  nu.block = block;
  nu.s = s;
  nu.weights = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double p = spec.p(i + off, j + off);
      if (p > 0.0) nu.weights(i, j) = std::pow(p * std::pow(spec.ratio(i, j), spec.r), x);
    }
  const auto pr = perron_vectors(nu.weights);
  nu.rho = pr.radius;
  nu.xi = pr.right;
  nu.residual = (nu.weights * nu.xi - nu.rho * nu.xi).cwiseAbs().maxCoeff();
  return nu;
}

bool is_maximal_antichain(const Mat& support, const std::vector<Word>& words, int root, std::string* why) {
  const int N = static_cast<int>(support.rows());
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::set<Word> members, prefixes;
  for (const Word& w : words) {
    if (w.empty()) return fail("empty word");
    for (std::size_t h = 0; h + 1 < w.size(); ++h)
      if (!(support(w[h], w[h + 1]) > 0.0)) return fail("word " + format_word(w) + " leaves the block graph");
    if (root >= 0 && w[0] != root) return fail("word " + format_word(w) + " does not start at the root");
    if (!members.insert(w).second) return fail("duplicate word " + format_word(w));
    for (std::size_t h = 1; h < w.size(); ++h) prefixes.insert(Word(w.begin(), w.begin() + h));
  }
  for (const Word& w : members)
    if (prefixes.count(w)) return fail("comparable words below " + format_word(w));
  auto covered = [&](const Word& w) { return members.count(w) || prefixes.count(w); };
  for (int i = 0; i < N; ++i)
    if ((root < 0 || i == root) && !covered({i})) return fail("letter " + std::to_string(i + 1) + " uncovered");
  for (const Word& p : prefixes)
    for (int j = 0; j < N; ++j) {
      if (!(support(p.back(), j) > 0.0)) continue;
      Word e = p;
      e.push_back(j);
      if (!covered(e)) return fail("branch " + format_word(e) + " uncovered");
    }
  return true;
}

double nu1_antichain_sum(const AuxMeasureNu1& nu, const std::vector<Word>& antichain, int root) {
  std::string why;
  if (!is_maximal_antichain(nu.weights, antichain, root, &why)) throw InputError("not a maximal anti-chain: " + why);
  LogSum acc;
  for (const Word& w : antichain) acc.add(nu.log_value(w));
  return std::exp(acc.value());
}

// ---------------------------------------------------------------- lambda_m

std::vector<LambdaEntry> lambda_m(const SystemSpec& spec, int m, int n, double t) {
  if (!(n >= 1 && m > n)) throw InputError("lambda_m needs 1 <= n < m");
  const double s0 = t / (t + spec.r);
  std::map<Word, double> acc;  // log sums per prefix
  LogSum total;
  Word cur(m);
  std::size_t count = 0;
  auto rec = [&](auto&& self, int pos, const TransferState& st) -> void {
    if (pos == m) {
      if (++count > kDefaultWordCap) throw CapExceeded("lambda_m: S_m exceeds the word cap");
      const double le = s0 * st.log_total();
      total.add(le);
      auto [it, fresh] = acc.try_emplace(Word(cur.begin(), cur.begin() + n), le);
      if (!fresh) it->second = log_add(it->second, le);
      return;
    }
    for (int j : children(Word(cur.begin(), cur.begin() + pos), spec.graph)) {
      cur[pos] = j;
      self(self, pos + 1, advance(st, lift_transfer(spec, cur[pos - 1], j, true)));
    }
  };
  for (int i = 0; i < spec.N; ++i) {
    cur[0] = i;
    rec(rec, 1, start_state(spec, i));
  }
  std::vector<LambdaEntry> out;
  for (const auto& [w, l] : acc) out.push_back({w, std::exp(l - total.value()), std::exp(s0 * log_energy(w, spec))});
  return out;
}

}  // namespace mtq
