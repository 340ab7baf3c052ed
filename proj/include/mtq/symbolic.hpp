#pragma once

#include "mtq/core.hpp"

#include <cstdint>
#include <optional>

namespace mtq {

// Vertex-edge graph on Omega = {0..2N-1}: edge (a,b) iff p_{a,b} > 0.
class TransitionGraph {
 public:
  TransitionGraph() = default;
  TransitionGraph(int n_base, std::vector<std::uint8_t> adj);
  static TransitionGraph from_support(const Mat& P, double eps = 0.0);

  int n_base() const { return n_; }
  int size() const { return 2 * n_; }
  bool edge(int a, int b) const { return adj_[static_cast<std::size_t>(a) * size() + b] != 0; }

 private:
  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

// Bit 0: the lower lift i is a reachable endpoint; bit 1: the upper lift i+.
enum : unsigned { kLower = 1u, kUpper = 2u };

Word project(const Word& lifted, int n_base);
bool is_admissible(const Word& lifted, const TransitionGraph& g);

// Endpoint set of sigma, 0 when sigma is not in S_n.
unsigned endpoint_mask(const Word& sigma, const TransitionGraph& g);
unsigned step_mask(unsigned mask, int last, int next, const TransitionGraph& g);
inline bool in_S(const Word& sigma, const TransitionGraph& g) { return endpoint_mask(sigma, g) != 0; }

// Admissible lifts, ordered lexicographically in the mask bits (lower < upper).
std::vector<Word> gamma(const Word& sigma, const TransitionGraph& g);

std::vector<int> children(const Word& sigma, const TransitionGraph& g);

constexpr std::size_t kDefaultWordCap = 10'000'000;

std::vector<Word> enumerate_Sn(const TransitionGraph& g, int n, std::size_t cap = kDefaultWordCap);
std::vector<Word> enumerate_Gn(const TransitionGraph& g, int n, std::size_t cap = kDefaultWordCap);

// Members of N_{i,j} present in G_2. Bit order: (i,j), (i,j+), (i+,j), (i+,j+).
struct OverlapCell {
  int i = 0, j = 0;
  unsigned members = 0;
  int count() const;
  bool empty() const { return members == 0; }
};
enum : unsigned { kCellLL = 1u, kCellLU = 2u, kCellUL = 4u, kCellUU = 8u };

std::vector<OverlapCell> overlap_cells(const TransitionGraph& g);  // row-major N*N
bool has_complete_overlaps(const TransitionGraph& g);

// S_2 as projected pairs (cells with nonempty M_{i,j}).
std::vector<std::pair<int, int>> s2_pairs(const TransitionGraph& g);

// Reachability closure on a sub-block; used for irreducibility tests.
bool strongly_connected(const std::vector<std::uint8_t>& adj, int n);

}  // namespace mtq
