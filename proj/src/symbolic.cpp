#include "mtq/symbolic.hpp"

#include <bit>

namespace mtq {

TransitionGraph::TransitionGraph(int n_base, std::vector<std::uint8_t> adj) : n_(n_base), adj_(std::move(adj)) {
  if (n_ < 1) throw InputError("N must be positive");
  if (adj_.size() != static_cast<std::size_t>(size()) * size()) throw InputError("adjacency size mismatch");
  for (int a = 0; a < size(); ++a) {
    bool any = false;
    for (int b = 0; b < size(); ++b) any = any || edge(a, b);
    if (!any) throw InputError("vertex " + std::to_string(a + 1) + " has no outgoing edge");
  }
}

TransitionGraph TransitionGraph::from_support(const Mat& P, double eps) {
  const int m = static_cast<int>(P.rows());
  if (m % 2 != 0 || P.cols() != m) throw InputError("P must be 2N x 2N");
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) adj[static_cast<std::size_t>(a) * m + b] = P(a, b) > eps;
  return TransitionGraph(m / 2, std::move(adj));
}

Word project(const Word& lifted, int n_base) {
  Word out(lifted.size());
  for (std::size_t i = 0; i < lifted.size(); ++i) out[i] = lifted[i] % n_base;
  return out;
}

bool is_admissible(const Word& lifted, const TransitionGraph& g) {
  if (lifted.empty()) return false;
  for (int a : lifted)
    if (a < 0 || a >= g.size()) return false;
  for (std::size_t i = 0; i + 1 < lifted.size(); ++i)
    if (!g.edge(lifted[i], lifted[i + 1])) return false;
  return true;
}

unsigned step_mask(unsigned mask, int last, int next, const TransitionGraph& g) {
  const int N = g.n_base();
  unsigned out = 0;
  for (int e = 0; e < 2; ++e) {
    if (!(mask & (1u << e))) continue;
    const int from = last + e * N;
    if (g.edge(from, next)) out |= kLower;
    if (g.edge(from, next + N)) out |= kUpper;
  }
  return out;
}

unsigned endpoint_mask(const Word& sigma, const TransitionGraph& g) {
  if (sigma.empty()) return 0;
  for (int a : sigma)
    if (a < 0 || a >= g.n_base()) return 0;
  unsigned mask = kLower | kUpper;
  for (std::size_t h = 0; h + 1 < sigma.size() && mask; ++h) mask = step_mask(mask, sigma[h], sigma[h + 1], g);
  return mask;
}

std::vector<Word> gamma(const Word& sigma, const TransitionGraph& g) {
  std::vector<Word> out;
  if (sigma.empty()) return out;
  const int N = g.n_base();
  for (int a : sigma)
    if (a < 0 || a >= N) return out;
  Word cur(sigma.size());
  // Depth-first in mask order, lower before upper.
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == sigma.size()) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e < 2; ++e) {
      const int letter = sigma[pos] + e * N;
      if (pos > 0 && !g.edge(cur[pos - 1], letter)) continue;
      cur[pos] = letter;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<int> children(const Word& sigma, const TransitionGraph& g) {
  std::vector<int> out;
  const unsigned mask = endpoint_mask(sigma, g);
  if (!mask) return out;
  for (int j = 0; j < g.n_base(); ++j)
    if (step_mask(mask, sigma.back(), j, g)) out.push_back(j);
  return out;
}

std::vector<Word> enumerate_Sn(const TransitionGraph& g, int n, std::size_t cap) {
  if (n < 1) throw InputError("word length must be >= 1");
  const int N = g.n_base();
  std::vector<Word> out;
  Word cur(n);
  auto rec = [&](auto&& self, int pos, unsigned mask) -> void {
    if (pos == n) {
      if (out.size() >= cap) throw CapExceeded("S_" + std::to_string(n) + " exceeds cap " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    for (int j = 0; j < N; ++j) {
      const unsigned m = pos == 0 ? (kLower | kUpper) : step_mask(mask, cur[pos - 1], j, g);
      if (!m) continue;
      cur[pos] = j;
      self(self, pos + 1, m);
    }
  };
  rec(rec, 0, kLower | kUpper);
  return out;
}

std::vector<Word> enumerate_Gn(const TransitionGraph& g, int n, std::size_t cap) {
  if (n < 1) throw InputError("word length must be >= 1");
  std::vector<Word> out;
  Word cur(n);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      if (out.size() >= cap) throw CapExceeded("G_" + std::to_string(n) + " exceeds cap " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    for (int b = 0; b < g.size(); ++b) {
      if (pos > 0 && !g.edge(cur[pos - 1], b)) continue;
      cur[pos] = b;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

int OverlapCell::count() const { return std::popcount(members); }

std::vector<OverlapCell> overlap_cells(const TransitionGraph& g) {
  const int N = g.n_base();
  std::vector<OverlapCell> cells;
  cells.reserve(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      OverlapCell c{i, j, 0};
      if (g.edge(i, j)) c.members |= kCellLL;
      if (g.edge(i, j + N)) c.members |= kCellLU;
      if (g.edge(i + N, j)) c.members |= kCellUL;
      if (g.edge(i + N, j + N)) c.members |= kCellUU;
      cells.push_back(c);
    }
  return cells;
}

bool has_complete_overlaps(const TransitionGraph& g) {
  for (const auto& c : overlap_cells(g))
    if (c.count() >= 2) return true;
  return false;
}

std::vector<std::pair<int, int>> s2_pairs(const TransitionGraph& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& c : overlap_cells(g))
    if (!c.empty()) out.emplace_back(c.i, c.j);
  return out;
}

bool strongly_connected(const std::vector<std::uint8_t>& adj, int n) {
  if (n <= 0) return false;
  auto reach_all = [&](bool transpose) {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        const bool e = transpose ? adj[static_cast<std::size_t>(b) * n + a] : adj[static_cast<std::size_t>(a) * n + b];
        if (e && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
      }
    }
    for (auto s : seen)
      if (!s) return false;
    return true;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace mtq
