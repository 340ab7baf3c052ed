#include "mtq/spectral.hpp"

#include <algorithm>
#include <unordered_map>

namespace mtq {

std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::A1: return "A1";
    case MatrixKind::A2: return "A2";
    case MatrixKind::A3: return "A3";
    case MatrixKind::A4: return "A4";
    case MatrixKind::A: return "A";
    default: return "B";
  }
}

Surrogate b_kernel(const SystemSpec& spec) {
  const auto rep = validate(spec);
  if (rep.g1.pass) return Surrogate::PHatG1;
  if (rep.g2.pass) return Surrogate::PHatG2;
  throw InputError("B(s) needs (g1) or (g2); spec '" + spec.name + "' satisfies neither");
}

namespace {

double weight_pow(double w, double s, double r, double x) { return w > 0.0 ? std::pow(w * std::pow(s, r), x) : 0.0; }

Mat block(const SystemSpec& spec, int row_off, int col_off, double x) {
  const int N = spec.N;
  Mat M = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = weight_pow(spec.p(i + row_off, j + col_off), spec.ratio(i, j), spec.r, x);
  return M;
}

}  // namespace

Mat param_matrix(const SystemSpec& spec, MatrixKind kind, double x) {
  const int N = spec.N;
  switch (kind) {
    case MatrixKind::A1: return block(spec, 0, 0, x);
    case MatrixKind::A2: return block(spec, N, N, x);
    case MatrixKind::A3: return block(spec, 0, N, x);
    case MatrixKind::A4: return block(spec, N, 0, x);
    case MatrixKind::A: {
      Mat M(2 * N, 2 * N);
      M << block(spec, 0, 0, x), block(spec, 0, N, x), block(spec, N, 0, x), block(spec, N, N, x);
      return M;
    }
    case MatrixKind::B: {
      const auto k = surrogate_kernels(spec);
      const Mat& K = b_kernel(spec) == Surrogate::PHatG1 ? k.phat_g1 : k.phat_g2;
      Mat M = Mat::Zero(N, N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) M(i, j) = weight_pow(K(i, j), spec.ratio(i, j), spec.r, x);
      return M;
    }
  }
  throw InputError("unknown matrix kind");
}

double param_radius(const SystemSpec& spec, MatrixKind kind, double x) {
  return spectral_radius(param_matrix(spec, kind, x));
}

double solve_dimension_root(const SystemSpec& spec, MatrixKind kind, const RootOptions& opt) {
  if (kind == MatrixKind::A3 || kind == MatrixKind::A4) throw InputError("off-diagonal blocks have no dimension root");
  if (kind == MatrixKind::B) b_kernel(spec);  // regime check
  // Evaluate B's kernel once; it does not depend on s.
  const Mat base = param_matrix(spec, kind, 1.0);
  auto rho = [&](double s) {
    const double x = exponent(s, spec.r);
    Mat M = base;
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = M.data()[i] > 0.0 ? std::pow(M.data()[i], x) : 0.0;
    return spectral_radius(M);
  };
  double lo = opt.s_lo, hi = 1.0;
  if (!(rho(lo) > 1.0)) throw NumericError(to_string(kind) + ": rho <= 1 already at s = " + std::to_string(lo));
  while (rho(hi) >= 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > opt.s_cap) throw NumericError(to_string(kind) + ": no upper bracket below s = " + std::to_string(opt.s_cap));
  }
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (rho(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------- energy table

namespace {

struct StateKey {
  int letter;
  std::int64_t a, b;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = std::hash<std::int64_t>{}(k.a);
    h ^= std::hash<std::int64_t>{}(k.b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ (static_cast<std::size_t>(k.letter) * 0x85ebca6bULL);
  }
};

std::int64_t quantize(double log_v, double res) {
  return log_v == kNegInf ? std::numeric_limits<std::int64_t>::min() : std::llround(log_v / res);
}

}  // namespace

EnergyTable EnergyTable::build(const SystemSpec& spec, int n_max, std::size_t state_cap, double resolution) {
  if (n_max < 1) throw InputError("n_max must be positive");
  struct Node {
    int letter;
    TransferState st;
    double log_mult;
  };
  EnergyTable t;
  std::vector<Node> cur;
  for (int i = 0; i < spec.N; ++i) cur.push_back({i, start_state(spec, i), 0.0});
  std::vector<Lift2> lifts(static_cast<std::size_t>(spec.N) * spec.N);
  for (int a = 0; a < spec.N; ++a)
    for (int b = 0; b < spec.N; ++b) lifts[a * spec.N + b] = lift_transfer(spec, a, b, true);

  for (int n = 1;; ++n) {
    Level lv;
    lv.log_e.reserve(cur.size());
    lv.log_mult.reserve(cur.size());
    for (const auto& nd : cur) {
      lv.log_e.push_back(nd.st.log_total());
      lv.log_mult.push_back(nd.log_mult);
    }
    t.levels_.push_back(std::move(lv));
    if (n == n_max) break;

    std::unordered_map<StateKey, std::size_t, StateKeyHash> index;
    std::vector<Node> next;
    for (const auto& nd : cur)
      for (int b = 0; b < spec.N; ++b) {
        if (spec.ratio(nd.letter, b) <= 0.0) continue;
        TransferState st = advance(nd.st, lifts[nd.letter * spec.N + b]);
        if (st.log_scale == kNegInf) continue;  // no admissible lift continues into b
        const StateKey key{b, quantize(st.log_component(0), resolution), quantize(st.log_component(1), resolution)};
        auto [it, fresh] = index.try_emplace(key, next.size());
        if (fresh)
          next.push_back({b, st, nd.log_mult});
        else
          next[it->second].log_mult = log_add(next[it->second].log_mult, nd.log_mult);
      }
    if (next.size() > state_cap) {
      t.truncated_ = true;
      break;
    }
    cur = std::move(next);
  }
  return t;
}

double EnergyTable::log_T(int n, double x) const {
  const Level& lv = levels_.at(n - 1);
  double m = kNegInf;
  for (std::size_t k = 0; k < lv.log_e.size(); ++k) m = std::max(m, lv.log_mult[k] + x * lv.log_e[k]);
  double acc = 0.0;
  for (std::size_t k = 0; k < lv.log_e.size(); ++k) acc += std::exp(lv.log_mult[k] + x * lv.log_e[k] - m);
  return m + std::log(acc);
}

PressureEstimate pressure(const EnergyTable& table, const Constants& c, double x) {
  PressureEstimate p;
  p.x = x;
  p.n_max = table.n_max();
  const double lg1 = c.log_g1(x), lg2 = c.log_g2(x);
  p.phi_lo = kNegInf;
  p.phi_hi = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= p.n_max; ++n) {
    const double lt = table.log_T(n, x);
    p.log_T.push_back(lt);
    p.phi_lo = std::max(p.phi_lo, (lg1 + lt) / n);
    p.phi_hi = std::min(p.phi_hi, (lg2 + lt) / n);
  }
  const int n = p.n_max;
  p.phi_naive = p.log_T.back() / n;
  p.phi_hat = n >= 2 ? p.log_T[n - 1] - p.log_T[n - 2] : p.log_T[0];
  return p;
}

PressureEstimate pressure(const SystemSpec& spec, double x, int n_max) {
  return pressure(EnergyTable::build(spec, n_max), constants(spec), x);
}

namespace {

// Largest t with f(x(t)) > 0 for a decreasing f, to absolute tolerance tol.
template <class F>
double bisect_t(F&& f, double r, double tol, std::vector<std::pair<double, double>>* trace = nullptr) {
  auto g = [&](double t) {
    const double v = f(exponent(t, r));
    if (trace) trace->emplace_back(t, v);
    return v;
  };
  double lo = 1e-9, hi = 1.0;
  if (!(g(lo) > 0.0)) throw NumericError("pressure is not positive near t = 0");
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("pressure stays positive; no root below t = 1e6");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TrResult solve_tr(const SystemSpec& spec, const EnergyTable& table, double tol) {
  const Constants c = constants(spec);
  TrResult out;
  out.n_max = table.n_max();
  out.tr = bisect_t([&](double x) { return pressure(table, c, x).phi_hat; }, spec.r, tol, &out.trace);
  out.tr_lo = bisect_t([&](double x) { return pressure(table, c, x).phi_lo; }, spec.r, tol);
  out.tr_hi = bisect_t([&](double x) { return pressure(table, c, x).phi_hi; }, spec.r, tol);
  auto sorted = out.trace;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k].first > sorted[k - 1].first && sorted[k].second >= sorted[k - 1].second) out.monotone = false;
  return out;
}

TrResult solve_tr(const SystemSpec& spec, int n_max, double tol) {
  const auto rep = validate(spec);
  if (!(rep.A2.pass && rep.A4.pass && rep.A5.pass && rep.P_irreducible))
    throw InputError("t_r needs (A2), (A4), (A5) and an irreducible P");
  const EnergyTable table = EnergyTable::build(spec, n_max);
  if (table.truncated()) throw CapExceeded("energy table hit its state cap before n_max");
  return solve_tr(spec, table, tol);
}

// ---------------------------------------------------------------- strictness

StrictnessResult strictness_test(const SystemSpec& spec, double a_r) {
  StrictnessResult res;
  res.mode = b_kernel(spec);
  const double x = exponent(a_r, spec.r);
  const Mat B = param_matrix(spec, MatrixKind::B, x);
  const Mat A = param_matrix(spec, MatrixKind::A, x);
  const PerronResult pr = perron_vectors(B);
  res.rho_b = pr.radius;
  const int N = spec.N;
  const bool right = res.mode == Surrogate::PHatG1;
  const Vec& v = right ? pr.right : pr.left;
  Vec vt(2 * N);
  vt << v, v;
  const Vec Av = right ? Vec(A * vt) : Vec(A.transpose() * vt);
  res.margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2 * N; ++k) {
    const double gain = Av(k) / (res.rho_b * vt(k)) - 1.0;
    if (gain < res.margin) {
      res.margin = gain;
      res.weakest = k;
    }
  }
  // Gains below this level are indistinguishable from the Perron residual.
  const double floor = 1e-10;
  res.certified = res.margin > floor;
  res.message = res.certified ? "strict gain on every component"
                              : "component " + std::to_string(res.weakest + 1) + " is not strictly expanded";
  return res;
}

// ---------------------------------------------------------------- reports

DimensionReport dimensions(const SystemSpec& spec, int n_max) {
  DimensionReport d;
  const auto rep = validate(spec);
  d.kind = rep.kind;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto block_root = [&](int blk, MatrixKind kind) {
    return strongly_connected(block_support(spec, blk), spec.N) ? solve_dimension_root(spec, kind) : nan;
  };
  d.s1r = block_root(0, MatrixKind::A1);
  d.s2r = block_root(1, MatrixKind::A2);
  d.sr = solve_dimension_root(spec, MatrixKind::A);
  if (rep.g1.pass || rep.g2.pass) {
    d.ar_kernel = b_kernel(spec);
    d.ar = solve_dimension_root(spec, MatrixKind::B);
  }
  if (rep.A2.pass && rep.A4.pass && rep.A5.pass && rep.P_irreducible) d.tr = solve_tr(spec, n_max);
  return d;
}

ScanReport small_r_scan(const SystemSpec& spec, const std::vector<double>& r_grid) {
  ScanReport out;
  bool prefix = true;
  for (double r : r_grid) {
    SystemSpec s = spec;
    s.r = r;
    ScanRow row{r, solve_dimension_root(s, MatrixKind::A1), solve_dimension_root(s, MatrixKind::A2), 0};
    row.sign = (row.s2r > row.s1r) - (row.s2r < row.s1r);
    prefix = prefix && row.sign > 0;
    if (prefix) ++out.positive_prefix;
    out.rows.push_back(row);
  }
  return out;
}

SystemSpec build_tuned_equal(double c, double r, double beta) {
  if (!(c > 0.0 && c < 0.5)) throw InputError("ratio must lie in (0, 1/2) for the two-letter layout");
  if (!(beta > 0.0 && beta < 1.0) || beta == 0.5) throw InputError("beta must lie in (0,1) and differ from 1/2");
  auto make = [&](double lam) {
    Mat P = Mat::Zero(4, 4);
    P.topLeftCorner(2, 2).setConstant(lam / 2);
    P.topRightCorner(2, 2).setConstant((1 - lam) / 2);
    P.bottomRightCorner(2, 2) << beta, 1 - beta, 1 - beta, beta;
    return make_spec("tuned-equal", P, Vec::Constant(4, 0.25), Mat::Constant(2, 2, c), r);
  };
  // s_{2,r} does not involve lam; s_{1,r} increases with lam.
  const double s2 = solve_dimension_root(make(0.5), MatrixKind::A2);
  double lo = 1e-6, hi = 1.0 - 1e-9;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (solve_dimension_root(make(mid), MatrixKind::A1) < s2 ? lo : hi) = mid;
  }
  return make(0.5 * (lo + hi));
}

}  // namespace mtq
