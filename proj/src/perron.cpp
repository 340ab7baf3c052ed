#include "mtq/perron.hpp"

#include <algorithm>
#include <functional>

namespace mtq {

double spectral_radius_2x2(double a, double b, double c, double d) {
  const double disc = (a - d) * (a - d) + 4.0 * b * c;
  return 0.5 * (a + d + std::sqrt(std::max(0.0, disc)));
}

std::vector<int> scc_ids(const Mat& M, int* count) {
  const int n = static_cast<int>(M.rows());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on(n, 0);
  int next = 0, ncomp = 0;
  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on[v] = 1;
    for (int w = 0; w < n; ++w) {
      if (!(M(v, w) > 0.0)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = 0;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  if (count) *count = ncomp;
  return comp;
}

bool is_irreducible(const Mat& M) {
  if (M.rows() == 0) return false;
  if (M.rows() == 1) return true;
  int k = 0;
  scc_ids(M, &k);
  return k == 1;
}

namespace {

struct BlockResult {
  double radius;
  Vec right;
};

// Dominant eigenpair of an irreducible nonnegative block. Works on
// B = (M + I)/scale, whose Perron root is simple and strictly dominant;
// B is squared repeatedly so the iterate converges after O(log) steps.
BlockResult irreducible_radius(const Mat& M, const RadiusOptions& opt) {
  const int n = static_cast<int>(M.rows());
  if (n == 1) return {M(0, 0), Vec::Ones(1)};
  if (n == 2) {
    const double rho = spectral_radius_2x2(M(0, 0), M(0, 1), M(1, 0), M(1, 1));
    Vec v(2);
    // (M - rho I) v = 0; pick the better-conditioned row
    if (M(0, 1) > 0.0 && std::abs(M(0, 1)) >= std::abs(M(1, 0)))
      v << M(0, 1), rho - M(0, 0);
    else if (M(1, 0) > 0.0)
      v << rho - M(1, 1), M(1, 0);
    else
      v << 1.0, 1.0;
    v = v.cwiseAbs();
    v /= v.sum();
    return {rho, v};
  }
  // Scale M to unit size before shifting, otherwise a tiny M drowns in I.
  const double scale = M.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return {0.0, Vec::Ones(n) / n};
  Mat B = M / scale + Mat::Identity(n, n);
  Vec x = Vec::Ones(n) / n;
  double lo = 0.0, hi = 0.0;
  int iters = 0;
  for (; iters < opt.max_iter; ++iters) {
    x = B * x;
    x /= x.sum();
    const Vec Mx = M * x;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double q = Mx(i) / x(i);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    if (hi - lo <= opt.tol * std::max(hi, 1e-300)) break;
    // Square B until its entries are dominated by the Perron part.
    if (iters < 60) {
      B = B * B;
      B /= B.maxCoeff();
    }
  }
  if (iters >= opt.max_iter)
    throw NumericError("power iteration did not converge (Collatz-Wielandt gap " + std::to_string(hi - lo) + ")");
  return {0.5 * (lo + hi), x};
}

}  // namespace

double spectral_radius(const Mat& M, const RadiusOptions& opt) {
  const int n = static_cast<int>(M.rows());
  if (n == 0) return 0.0;
  if ((M.array() < 0.0).any()) throw InputError("spectral_radius expects a nonnegative matrix");
  if (n == 2) return spectral_radius_2x2(M(0, 0), M(0, 1), M(1, 0), M(1, 1));
  int k = 0;
  const auto comp = scc_ids(M, &k);
  if (k == 1) return irreducible_radius(M, opt).radius;
  double best = 0.0;
  for (int c = 0; c < k; ++c) {
    std::vector<int> idx;
    for (int v = 0; v < n; ++v)
      if (comp[v] == c) idx.push_back(v);
    Mat S(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) S(a, b) = M(idx[a], idx[b]);
    if (idx.size() == 1 && !(S(0, 0) > 0.0)) continue;
    best = std::max(best, irreducible_radius(S, opt).radius);
  }
  return best;
}

PerronResult perron_vectors(const Mat& M, const RadiusOptions& opt) {
  if ((M.array() < 0.0).any()) throw InputError("perron_vectors expects a nonnegative matrix");
  if (!is_irreducible(M)) throw InputError("perron_vectors requires an irreducible matrix");
  PerronResult out;
  auto r = irreducible_radius(M, opt);
  auto l = irreducible_radius(M.transpose(), opt);
  out.radius = r.radius;
  out.right = r.right;
  out.left = l.right;
  out.residual = std::max((M * out.right - out.radius * out.right).cwiseAbs().maxCoeff(),
                          (M.transpose() * out.left - out.radius * out.left).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace mtq
