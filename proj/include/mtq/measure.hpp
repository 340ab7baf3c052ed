#pragma once

#include "mtq/model.hpp"

#include <map>
#include <optional>

namespace mtq {

// L(a,b)[u][v] = p_{lift_u(a), lift_v(b)}, optionally scaled by s_{a,b}^r.
struct Lift2 {
  double m[2][2] = {{0, 0}, {0, 0}};
};
Lift2 lift_transfer(const SystemSpec& spec, int a, int b, bool energy_scale);

// Row vector (I1, I2) held as a normalized direction times exp(log_scale),
// so that deep words neither underflow nor lose relative precision.
struct TransferState {
  double v[2] = {0, 0};
  double log_scale = 0.0;
  double log_total() const;
  double log_component(int k) const { return v[k] > 0.0 ? std::log(v[k]) + log_scale : kNegInf; }
};
TransferState start_state(const SystemSpec& spec, int letter);
TransferState advance(const TransferState& s, const Lift2& L);

struct CylinderValue {
  Word sigma;
  double mu = 0, i1 = 0, i2 = 0, energy = 0;
  double log_mu = kNegInf, log_energy = kNegInf;
};

enum class MuMethod { Enumerate, Transfer };

double nu_cylinder(const Word& lifted, const SystemSpec& spec);
double log_nu_cylinder(const Word& lifted, const SystemSpec& spec);
CylinderValue mu_cylinder(const Word& sigma, const SystemSpec& spec, MuMethod method = MuMethod::Transfer);
double energy(const Word& sigma, const SystemSpec& spec);
double log_energy(const Word& sigma, const SystemSpec& spec);
double log_ratio_product(const Word& sigma, const SystemSpec& spec);  // log s_sigma

// Exact (I1, I2) on rational specs.
std::pair<Rational, Rational> split_exact(const Word& sigma, const SystemSpec& spec);
Rational mu_exact(const Word& sigma, const SystemSpec& spec);

// Constants from the energy sandwich and the quasi-multiplicativity bounds.
struct Constants {
  double p_lo = 0, p_hi = 0, s_lo = 0, s_hi = 0, chi_lo = 0, chi_hi = 0;
  double zeta_bar = 0, d_bar = 0;
  double c1 = 0, c2 = 0;
  double t6_lo = 0, t6_hi = 0;  // p_lo s_lo^r / chi_hi and p_hi s_hi^r / chi_lo
  int N = 0;

  double log_h(double x) const;
  double log_g1(double x) const;
  double log_g2(double x) const;
  double log_b(double x) const { return log_g2(x) - log_g1(x); }
};
Constants constants(const SystemSpec& spec);

enum class Surrogate { PTilde, PHatG1, PHatG2 };
std::string to_string(Surrogate s);
Surrogate parse_surrogate(const std::string& s);

struct SurrogateKernels {
  Mat ptilde, phat_g1, phat_g2;
  Vec chitilde;
};
SurrogateKernels surrogate_kernels(const SystemSpec& spec);

enum class Reducibility { Reducible, NotReducible, Unknown };
std::string to_string(Reducibility r);

struct ReducibilityVerdict {
  Reducibility status = Reducibility::Unknown;
  std::string certificate;
  Word sigma;   // counterexample prefix
  int j = -1;   // counterexample letter, so sigma*j is the offending cylinder
  double delta = 0.0;
  std::optional<Rational> delta_exact;
  Mat ptilde;
  Vec chitilde;
  int depth_searched = 0;
};

// Delta_{sigma,j} = mu(J_{sigma*j}) - mu(J_sigma) ptilde_{sigma_n, j}, recomputed from scratch.
double reducibility_delta(const SystemSpec& spec, const Word& sigma, int j);
Rational reducibility_delta_exact(const SystemSpec& spec, const Word& sigma, int j);

ReducibilityVerdict classify_reducibility(const SystemSpec& spec, int depth_max = 12);

double cycle_rate(const Word& cycle, const SystemSpec& spec);
std::vector<Word> simple_cycles(const SystemSpec& spec, int max_len);

struct CycleComparison {
  Word cycle;
  double rate_mu = 0.0;
  double rate_surrogate = std::numeric_limits<double>::quiet_NaN();  // fixed-kernel modes
  int free_letter = -1;                                              // ptilde: the mixing weight it pins
  double implied_zeta = std::numeric_limits<double>::quiet_NaN();
  std::string status;
};

struct EquivalenceReport {
  Surrogate surrogate = Surrogate::PTilde;
  bool non_equivalent = false;
  std::string reason;
  std::vector<CycleComparison> rows;
};

EquivalenceReport equivalence_probe(const SystemSpec& spec, Surrogate surrogate, int cycle_max_len, double tol = 1e-9);

// Auxiliary measure on H_block^* built from A_block(s/(s+r)); block 0 uses
// the lower-lower entries, block 1 the upper-upper entries.
struct AuxMeasureNu1 {
  int block = 0;
  double s = 0.0;
  double rho = 0.0;
  Vec xi;
  Mat weights;  // (p s^r)^{s/(s+r)} on the block graph
  double residual = 0.0;
  double value(const Word& sigma) const;
  double log_value(const Word& sigma) const;
};
AuxMeasureNu1 make_nu1(const SystemSpec& spec, int block, double s);

// Sum of nu1 over a finite anti-chain; throws InputError unless the set is
// a maximal anti-chain in H^* (root < 0) or in H^*(root).
double nu1_antichain_sum(const AuxMeasureNu1& nu, const std::vector<Word>& antichain, int root = -1);
bool is_maximal_antichain(const Mat& support, const std::vector<Word>& words, int root, std::string* why = nullptr);

struct LambdaEntry {
  Word sigma;
  double lambda = 0.0;
  double energy_pow = 0.0;  // E_r(sigma)^{s0}
};
// lambda_m(J_sigma) for all sigma in S_n, n < m, with s0 = t/(t+r).
std::vector<LambdaEntry> lambda_m(const SystemSpec& spec, int m, int n, double t);

}  // namespace mtq
