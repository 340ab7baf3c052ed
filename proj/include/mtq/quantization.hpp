#pragma once

#include "mtq/measure.hpp"

#include <cstdint>
#include <optional>

namespace mtq {

struct AntiChainWord {
  Word sigma;
  double log_energy = 0.0;
  double log_parent_energy = 0.0;  // log E_r(sigma-flat); 0 for single letters
};

// Lambda_{k,r}: words whose energy first drops below c1^k.
struct AntiChain {
  int k = 0;
  double r = 2.0;
  double log_c1 = 0.0;
  double log_threshold = 0.0;  // k log c1
  std::vector<AntiChainWord> words;
  int l1 = 0, l2 = 0;

  std::size_t phi() const { return words.size(); }
};

// Rational inputs put energies exactly on c1^k; such ties count as not yet
// below the threshold. The band absorbs rounding in the log-energies.
constexpr double kThresholdTieTol = 1e-10;
inline bool below_threshold(double log_e, double log_threshold) { return log_e < log_threshold - kThresholdTieTol; }

constexpr std::size_t kDefaultPhiCap = 1'000'000;

AntiChain build_antichain(const SystemSpec& spec, int k, std::size_t cap = kDefaultPhiCap);

double log_surrogate_error(const AntiChain& ac);     // log sum E_r
double log_F_value(const AntiChain& ac, double s);   // log sum E_r^{s/(s+r)}

// Aggregates over Lambda_{k,r} without storing it. Lumped mode merges
// subtrees whose roots share (last letter, I1, I2), which is exact up to
// the key resolution; DFS mode walks every word and is exact.
enum class WalkMode { Lumped, Dfs };

struct AntiChainStats {
  int k = 0;
  double log_phi = kNegInf;
  double log_surrogate = kNegInf;
  std::vector<double> log_F;  // one entry per requested s
  int l1 = 0, l2 = 0;
  std::uint64_t nodes = 0;    // tree nodes (or lumped states) visited
};

AntiChainStats antichain_stats(const SystemSpec& spec, int k, const std::vector<double>& s_values,
                               WalkMode mode = WalkMode::Lumped, std::uint64_t node_cap = 2'000'000'000ULL);

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, slope_se = 0.0;
  std::size_t n = 0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log phi_k against -(1/r) log(surrogate_k): the dimension read
// off the anti-chain, with the surrogate standing for e^r.
LinearFit antichain_dimension(const std::vector<AntiChainStats>& rows, double r);

// ---------------------------------------------------------------- sampling

// Depth used when none is given: the smallest n with s_max^n < 1e-9.
int default_sample_depth(const SystemSpec& spec);

std::vector<Point> sample_mu(const SystemSpec& spec, std::size_t count, int depth, std::uint64_t seed);

struct Codebook {
  std::vector<Point> centers;
  double distortion = 0.0;  // mean d(x, alpha)^r
  int iterations = 0;
  bool monotone = true;     // distortion never increased between iterations
  double initial_distortion = 0.0;
  int reseeds = 0;
};

struct LloydOptions {
  int restarts = 3;
  int max_iter = 500;
  double rel_tol = 1e-9;
  int q = 1;
};

Codebook lloyd(const std::vector<Point>& points, int k, double r, std::uint64_t seed, const LloydOptions& opt = {});

struct EmpiricalDimension {
  std::vector<int> ks;
  std::vector<double> errors;  // e_{k,r} = distortion^{1/r}
  LinearFit fit;               // log k against -log e_k
  double ci_lo = 0.0, ci_hi = 0.0;  // 95% interval on the slope
};

EmpiricalDimension empirical_dimension(const SystemSpec& spec, const std::vector<int>& ks, std::size_t samples,
                                       std::uint64_t seed, const LloydOptions& opt = {});

}  // namespace mtq
