#include "mtq/quantization.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

namespace mtq {

namespace {

std::vector<Lift2> energy_lifts(const SystemSpec& spec) {
  std::vector<Lift2> out(static_cast<std::size_t>(spec.N) * spec.N);
  for (int a = 0; a < spec.N; ++a)
    for (int b = 0; b < spec.N; ++b) out[a * spec.N + b] = lift_transfer(spec, a, b, true);
  return out;
}

double checked_log_c1(const SystemSpec& spec) {
  const double c1 = constants(spec).c1;
  if (!(c1 > 0.0 && c1 < 1.0)) throw InputError("c1 must lie in (0,1) to build anti-chains");
  return std::log(c1);
}

}  // namespace

AntiChain build_antichain(const SystemSpec& spec, int k, std::size_t cap) {
  if (k < 1) throw InputError("k must be at least 1");
  AntiChain ac;
  ac.k = k;
  ac.r = spec.r;
  ac.log_c1 = checked_log_c1(spec);
  ac.log_threshold = k * ac.log_c1;
  const auto lifts = energy_lifts(spec);
  Word w;
  auto rec = [&](auto&& self, const TransferState& st, double parent) -> void {
    const double le = st.log_total();
    if (below_threshold(le, ac.log_threshold)) {
      if (ac.words.size() >= cap) throw CapExceeded("anti-chain exceeds " + std::to_string(cap) + " words");
      ac.words.push_back({w, le, parent});
      return;
    }
    const int a = w.back();
    for (int b = 0; b < spec.N; ++b) {
      if (spec.ratio(a, b) <= 0.0) continue;
      const TransferState next = advance(st, lifts[a * spec.N + b]);
      if (next.log_scale == kNegInf) continue;
      w.push_back(b);
      self(self, next, le);
      w.pop_back();
    }
  };
  for (int i = 0; i < spec.N; ++i) {
    w = {i};
    rec(rec, start_state(spec, i), 0.0);
  }
  ac.l1 = std::numeric_limits<int>::max();
  for (const auto& m : ac.words) {
    ac.l1 = std::min<int>(ac.l1, m.sigma.size());
    ac.l2 = std::max<int>(ac.l2, m.sigma.size());
  }
  return ac;
}

double log_surrogate_error(const AntiChain& ac) {
  LogSum s;
  for (const auto& m : ac.words) s.add(m.log_energy);
  return s.value();
}

double log_F_value(const AntiChain& ac, double s) {
  if (!(s > 0.0)) throw InputError("F needs s > 0");
  const double x = s / (s + ac.r);
  LogSum acc;
  for (const auto& m : ac.words) acc.add(x * m.log_energy);
  return acc.value();
}

// ---------------------------------------------------------------- streaming stats

namespace {

// Members have E in [c1^{k+1}, c1^k), so sums are kept relative to the
// threshold and stay within a modest range in plain doubles.
struct Accum {
  double thr = 0.0;
  std::vector<double> xs;
  long double phi = 0, surr = 0;
  std::vector<long double> F;
  int l1 = std::numeric_limits<int>::max(), l2 = 0;

  void add(double log_e, int depth, double log_mult) {
    const double m = std::exp(log_mult);
    phi += m;
    surr += m * std::exp(log_e - thr);
    for (std::size_t q = 0; q < xs.size(); ++q) F[q] += m * std::exp(xs[q] * (log_e - thr));
    l1 = std::min(l1, depth);
    l2 = std::max(l2, depth);
  }

  void finish(AntiChainStats& out) const {
    out.log_phi = std::log(static_cast<double>(phi));
    out.log_surrogate = std::log(static_cast<double>(surr)) + thr;
    for (std::size_t q = 0; q < xs.size(); ++q) out.log_F.push_back(std::log(static_cast<double>(F[q])) + xs[q] * thr);
    out.l1 = l1;
    out.l2 = l2;
  }
};

struct LumpKey {
  int letter;
  std::int64_t a, b;
  bool operator==(const LumpKey&) const = default;
};
struct LumpHash {
  std::size_t operator()(const LumpKey& k) const {
    std::size_t h = std::hash<std::int64_t>{}(k.a) * 31u + std::hash<std::int64_t>{}(k.b);
    return h ^ (static_cast<std::size_t>(k.letter) << 1);
  }
};

std::int64_t qlog(double v) {
  return v == kNegInf ? std::numeric_limits<std::int64_t>::min() : std::llround(v / 1e-11);
}

}  // namespace

AntiChainStats antichain_stats(const SystemSpec& spec, int k, const std::vector<double>& s_values, WalkMode mode,
                               std::uint64_t node_cap) {
  if (k < 1) throw InputError("k must be at least 1");
  AntiChainStats out;
  out.k = k;
  Accum acc;
  acc.thr = k * checked_log_c1(spec);
  for (double s : s_values) {
    if (!(s > 0.0)) throw InputError("F needs s > 0");
    acc.xs.push_back(s / (s + spec.r));
  }
  acc.F.assign(acc.xs.size(), 0.0L);
  const auto lifts = energy_lifts(spec);
  const int N = spec.N;

  if (mode == WalkMode::Dfs) {
    struct Item {
      int letter, depth;
      TransferState st;
    };
    std::vector<Item> stack;
    for (int i = N; i-- > 0;) stack.push_back({i, 1, start_state(spec, i)});
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      if (++out.nodes > node_cap) throw CapExceeded("anti-chain walk exceeds the node cap");
      const double le = it.st.log_total();
      if (below_threshold(le, acc.thr)) {
        acc.add(le, it.depth, 0.0);
        continue;
      }
      for (int b = N; b-- > 0;) {
        if (spec.ratio(it.letter, b) <= 0.0) continue;
        TransferState st = advance(it.st, lifts[it.letter * N + b]);
        if (st.log_scale != kNegInf) stack.push_back({b, it.depth + 1, st});
      }
    }
  } else {
    struct Node {
      int letter;
      TransferState st;
      double log_mult;
    };
    std::vector<Node> cur;
    for (int i = 0; i < N; ++i) cur.push_back({i, start_state(spec, i), 0.0});
    for (int depth = 1; !cur.empty(); ++depth) {
      std::unordered_map<LumpKey, std::size_t, LumpHash> index;
      std::vector<Node> next;
      for (const auto& nd : cur) {
        if (++out.nodes > node_cap) throw CapExceeded("anti-chain walk exceeds the node cap");
        const double le = nd.st.log_total();
        if (below_threshold(le, acc.thr)) {
          acc.add(le, depth, nd.log_mult);
          continue;
        }
        for (int b = 0; b < N; ++b) {
          if (spec.ratio(nd.letter, b) <= 0.0) continue;
          TransferState st = advance(nd.st, lifts[nd.letter * N + b]);
          if (st.log_scale == kNegInf) continue;
          const LumpKey key{b, qlog(st.log_component(0)), qlog(st.log_component(1))};
          auto [pos, fresh] = index.try_emplace(key, next.size());
          if (fresh)
            next.push_back({b, st, nd.log_mult});
          else
            next[pos->second].log_mult = log_add(next[pos->second].log_mult, nd.log_mult);
        }
      }
      cur = std::move(next);
    }
  }
  acc.finish(out);
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit needs at least two paired points");
  LinearFit f;
  f.n = x.size();
  const double n = static_cast<double>(f.n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit needs distinct x values");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ss_res = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  f.slope_se = f.n > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  return f;
}

LinearFit antichain_dimension(const std::vector<AntiChainStats>& rows, double r) {
  std::vector<double> x, y;
  for (const auto& s : rows) {
    x.push_back(-s.log_surrogate / r);
    y.push_back(s.log_phi);
  }
  return fit_line(x, y);
}

// ---------------------------------------------------------------- sampling

int default_sample_depth(const SystemSpec& spec) {
  const double s_max = spec.ratio.maxCoeff();
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-9) / std::log(s_max))) + 1);
}

std::vector<Point> sample_mu(const SystemSpec& spec, std::size_t count, int depth, std::uint64_t seed) {
  if (!spec.geometry) throw InputError("sampling needs a geometry block");
  if (depth <= 0) depth = default_sample_depth(spec);
  const int m = spec.dim();
  auto cumulative = [](auto&& get, int n) {
    std::vector<double> c(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) c[i] = acc += get(i);
    c.back() = std::numeric_limits<double>::infinity();  // absorbs rounding in the row sum
    return c;
  };
  const auto chi_cdf = cumulative([&](int i) { return spec.chi(i); }, m);
  std::vector<std::vector<double>> row_cdf;
  for (int a = 0; a < m; ++a) row_cdf.push_back(cumulative([&](int b) { return spec.p(a, b); }, m));
  auto draw = [](const std::vector<double>& cdf, double u) {
    int i = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    return i;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  Word path(depth);
  for (std::size_t n = 0; n < count; ++n) {
    path[0] = draw(chi_cdf, unif(rng));
    for (int h = 1; h < depth; ++h) {
      int b;
      do b = draw(row_cdf[path[h - 1]], unif(rng));
      while (spec.p(path[h - 1], b) <= 0.0);  // zero-width slots can only be hit on ties
      path[h] = b;
    }
    out.push_back(realize_point(path, spec));
  }
  return out;
}

// ---------------------------------------------------------------- Lloyd

namespace {

double dist2(const Point& a, const Point& b, int q) {
  double d = (a[0] - b[0]) * (a[0] - b[0]);
  if (q > 1) d += (a[1] - b[1]) * (a[1] - b[1]);
  return d;
}

double cost(double d2, double r) { return r == 2.0 ? d2 : std::pow(d2, 0.5 * r); }

std::vector<Point> kmeanspp(const std::vector<Point>& pts, int k, int q, std::mt19937_64& rng) {
  std::vector<Point> c;
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  c.push_back(pts[pick(rng)]);
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d[i] = dist2(pts[i], c[0], q);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (static_cast<int>(c.size()) < k) {
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    std::size_t idx = 0;
    if (total > 0.0) {
      double u = unif(rng) * total;
      for (; idx + 1 < d.size() && u >= d[idx]; ++idx) u -= d[idx];
    } else {
      idx = pick(rng);
    }
    c.push_back(pts[idx]);
    for (std::size_t i = 0; i < pts.size(); ++i) d[i] = std::min(d[i], dist2(pts[i], c.back(), q));
  }
  return c;
}

// r = 2 on the line: clusters are runs of the sorted sample, so each
// iteration costs O(k log n) with prefix sums.
Codebook lloyd_line_r2(const std::vector<double>& xs, const std::vector<long double>& S1,
                       const std::vector<long double>& S2, std::vector<double> c, const LloydOptions& opt) {
  const std::size_t n = xs.size();
  const int k = static_cast<int>(c.size());
  Codebook cb;
  std::vector<std::size_t> cut(k + 1);
  auto assign = [&]() {
    std::sort(c.begin(), c.end());
    cut[0] = 0;
    cut[k] = n;
    for (int j = 1; j < k; ++j)
      cut[j] = std::lower_bound(xs.begin(), xs.end(), 0.5 * (c[j - 1] + c[j])) - xs.begin();
    long double D = 0;
    for (int j = 0; j < k; ++j) {
      const std::size_t lo = cut[j], hi = cut[j + 1];
      const long double m = hi - lo, a = S1[hi] - S1[lo], b = S2[hi] - S2[lo];
      D += b - 2.0L * c[j] * a + m * c[j] * c[j];
    }
    return static_cast<double>(std::max(0.0L, D) / n);
  };
  double D = assign();
  cb.initial_distortion = D;
  for (cb.iterations = 1; cb.iterations <= opt.max_iter; ++cb.iterations) {
    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      const std::size_t lo = cut[j], hi = cut[j + 1];
      if (hi > lo) c[j] = static_cast<double>((S1[hi] - S1[lo]) / (hi - lo));
    }
    for (int j = 0; j < k; ++j) {
      if (cut[j + 1] > cut[j]) continue;
      // farthest sample from its own center takes the empty slot
      double best = -1.0, where = xs[0];
      for (int i = 0; i < k; ++i) {
        if (cut[i + 1] == cut[i]) continue;
        for (double x : {xs[cut[i]], xs[cut[i + 1] - 1]})
          if (std::abs(x - c[i]) > best) {
            best = std::abs(x - c[i]);
            where = x;
          }
      }
      c[j] = where;
      reseeded = true;
      ++cb.reseeds;
    }
    const double Dn = assign();
    if (Dn > D * (1.0 + 1e-12) + 1e-300) cb.monotone = false;
    const bool done = !reseeded && D - Dn <= opt.rel_tol * D;
    D = std::min(D, Dn);
    if (done) break;
  }
  cb.distortion = D;
  for (double x : c) cb.centers.push_back({x, 0.0});
  return cb;
}

Codebook lloyd_general(const std::vector<Point>& pts, std::vector<Point> c, double r, const LloydOptions& opt) {
  const int q = opt.q, k = static_cast<int>(c.size());
  const std::size_t n = pts.size();
  std::vector<int> lab(n);
  std::vector<double> dd(n);
  Codebook cb;
  auto assign = [&]() {
    double D = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int j = 0; j < k; ++j) {
        const double d = dist2(pts[i], c[j], q);
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      lab[i] = arg;
      dd[i] = best;
      D += cost(best, r);
    }
    return D / n;
  };
  auto cluster_cost = [&](const std::vector<std::size_t>& mem, const Point& z) {
    double s = 0.0;
    for (std::size_t i : mem) s += cost(dist2(pts[i], z, q), r);
    return s;
  };
  double D = assign();
  cb.initial_distortion = D;
  std::vector<std::vector<std::size_t>> members(k);
  for (cb.iterations = 1; cb.iterations <= opt.max_iter; ++cb.iterations) {
    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < n; ++i) members[lab[i]].push_back(i);
    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      const auto& mem = members[j];
      if (mem.empty()) continue;
      if (r == 2.0) {
        Point z{0.0, 0.0};
        for (std::size_t i : mem)
          for (int a = 0; a < q; ++a) z[a] += pts[i][a];
        for (int a = 0; a < q; ++a) z[a] /= mem.size();
        c[j] = z;
        continue;
      }
      double f0 = cluster_cost(mem, c[j]);
      for (int step = 0; step < 25; ++step) {
        Point z{0.0, 0.0};
        if (r == 1.0) {  // Weiszfeld
          double wsum = 0.0;
          for (std::size_t i : mem) {
            const double d = std::sqrt(dist2(pts[i], c[j], q));
            if (d < 1e-15) continue;
            for (int a = 0; a < q; ++a) z[a] += pts[i][a] / d;
            wsum += 1.0 / d;
          }
          if (!(wsum > 0.0)) break;
          for (int a = 0; a < q; ++a) z[a] /= wsum;
        } else {  // damped gradient with backtracking
          Point g{0.0, 0.0};
          for (std::size_t i : mem) {
            const double d2 = dist2(pts[i], c[j], q);
            if (d2 < 1e-30) continue;
            const double w = r * std::pow(d2, 0.5 * r - 1.0);
            for (int a = 0; a < q; ++a) g[a] -= w * (pts[i][a] - c[j][a]);
          }
          double t = 1.0 / (r * mem.size());
          for (int a = 0; a < q; ++a) z[a] = c[j][a] - t * g[a];
          while (cluster_cost(mem, z) > f0 && t > 1e-20) {
            t *= 0.5;
            for (int a = 0; a < q; ++a) z[a] = c[j][a] - t * g[a];
          }
        }
        const double f1 = cluster_cost(mem, z);
        if (!(f1 < f0)) break;
        const bool small = f0 - f1 <= 1e-12 * f0;
        c[j] = z;
        f0 = f1;
        if (small) break;
      }
    }
    for (int j = 0; j < k; ++j) {
      if (!members[j].empty()) continue;
      const std::size_t far = std::max_element(dd.begin(), dd.end()) - dd.begin();
      c[j] = pts[far];
      dd[far] = 0.0;
      reseeded = true;
      ++cb.reseeds;
    }
    const double Dn = assign();
    if (Dn > D * (1.0 + 1e-12) + 1e-300) cb.monotone = false;
    const bool done = !reseeded && D - Dn <= opt.rel_tol * D;
    D = std::min(D, Dn);
    if (done) break;
  }
  cb.distortion = D;
  cb.centers = c;
  return cb;
}

}  // namespace

Codebook lloyd(const std::vector<Point>& points, int k, double r, std::uint64_t seed, const LloydOptions& opt) {
  if (k < 1) throw InputError("k must be at least 1");
  if (points.empty()) throw InputError("no points to quantize");
  if (!(r > 0.0)) throw InputError("r must be positive");
  std::mt19937_64 master(seed);
  const bool line = opt.q == 1 && r == 2.0;
  std::vector<double> xs;
  std::vector<long double> S1, S2;
  if (line) {
    for (const auto& p : points) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    S1.assign(xs.size() + 1, 0.0L);
    S2.assign(xs.size() + 1, 0.0L);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      S1[i + 1] = S1[i] + xs[i];
      S2[i + 1] = S2[i] + static_cast<long double>(xs[i]) * xs[i];
    }
  }
  Codebook best;
  best.distortion = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(1, opt.restarts); ++run) {
    std::mt19937_64 rng(master());
    auto init = kmeanspp(points, k, opt.q, rng);
    Codebook cb;
    if (line) {
      std::vector<double> c;
      for (const auto& p : init) c.push_back(p[0]);
      cb = lloyd_line_r2(xs, S1, S2, c, opt);
    } else {
      cb = lloyd_general(points, init, r, opt);
    }
    if (cb.distortion < best.distortion) {
      const bool mono = best.monotone && cb.monotone;
      best = cb;
      best.monotone = mono;
    } else {
      best.monotone = best.monotone && cb.monotone;
    }
  }
  return best;
}

EmpiricalDimension empirical_dimension(const SystemSpec& spec, const std::vector<int>& ks, std::size_t samples,
                                       std::uint64_t seed, const LloydOptions& base) {
  if (ks.size() < 2) throw InputError("need at least two codebook sizes");
  LloydOptions opt = base;
  opt.q = spec.geometry ? spec.geometry->q : 1;
  const auto pts = sample_mu(spec, samples, 0, seed);
  EmpiricalDimension ed;
  ed.ks = ks;
  std::vector<double> x, y;
  for (int k : ks) {
    const Codebook cb = lloyd(pts, k, spec.r, seed + 7919u * static_cast<std::uint64_t>(k), opt);
    const double e = std::pow(cb.distortion, 1.0 / spec.r);
    ed.errors.push_back(e);
    x.push_back(-std::log(e));
    y.push_back(std::log(static_cast<double>(k)));
  }
  ed.fit = fit_line(x, y);
  if (ed.fit.n > 2) {
    const boost::math::students_t t(static_cast<double>(ed.fit.n - 2));
    const double h = boost::math::quantile(boost::math::complement(t, 0.025)) * ed.fit.slope_se;
    ed.ci_lo = ed.fit.slope - h;
    ed.ci_hi = ed.fit.slope + h;
  } else {
    ed.ci_lo = ed.ci_hi = ed.fit.slope;
  }
  return ed;
}

}  // namespace mtq
