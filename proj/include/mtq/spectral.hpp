#pragma once

#include "mtq/measure.hpp"
#include "mtq/perron.hpp"

#include <optional>

namespace mtq {

// Entrywise (weight * s_{i,j}^r)^x. A1..A4 are the N x N blocks
// (lower-lower, upper-upper, lower-upper, upper-lower), A is the 2N x 2N
// assembly [[A1, A3], [A4, A2]], and B uses the collapsed kernel p-hat.
enum class MatrixKind { A1, A2, A3, A4, A, B };
std::string to_string(MatrixKind k);

// Which p-hat feeds B: the row-sum form when (g1) holds, the column-sum
// form when (g2) holds. Throws InputError when neither applies.
Surrogate b_kernel(const SystemSpec& spec);

Mat param_matrix(const SystemSpec& spec, MatrixKind kind, double x);
double param_radius(const SystemSpec& spec, MatrixKind kind, double x);

inline double exponent(double s, double r) { return s / (s + r); }

struct RootOptions {
  double tol = 1e-12;  // absolute, in s
  double s_lo = 1e-9;
  double s_cap = 1e6;
};

// Unique s > 0 with rho(M(s/(s+r))) = 1, by bisection. The upper end of
// the bracket starts at 1 and doubles until rho drops below 1.
double solve_dimension_root(const SystemSpec& spec, MatrixKind kind, const RootOptions& opt = {});

// Lumped level-by-level table of energies over S_n. Words with the same
// last letter and the same (I1, I2) pair evolve identically, so they are
// merged and carried with a log-multiplicity. Values are keyed on their
// logs rounded to `resolution`, so merged states agree to that relative error.
class EnergyTable {
 public:
  static EnergyTable build(const SystemSpec& spec, int n_max, std::size_t state_cap = 4'000'000,
                           double resolution = 1e-11);

  int n_max() const { return static_cast<int>(levels_.size()); }
  double log_T(int n, double x) const;  // log sum_{S_n} E_r(sigma)^x
  std::size_t states(int n) const { return levels_.at(n - 1).log_e.size(); }
  double log_count(int n) const { return log_T(n, 0.0); }
  bool truncated() const { return truncated_; }

 private:
  struct Level {
    std::vector<double> log_e, log_mult;
  };
  std::vector<Level> levels_;
  bool truncated_ = false;  // build stopped early at the state cap
};

struct PressureEstimate {
  double x = 0.0;              // exponent applied to E_r
  std::vector<double> log_T;   // n = 1..n_max
  double phi_hat = 0.0;        // log T_n - log T_{n-1} at n = n_max
  double phi_naive = 0.0;      // (1/n) log T_n at n = n_max
  double phi_lo = 0.0;         // max_n (1/n) log(g1 T_n)
  double phi_hi = 0.0;         // min_n (1/n) log(g2 T_n)
  int n_max = 0;
};

PressureEstimate pressure(const EnergyTable& table, const Constants& c, double x);
PressureEstimate pressure(const SystemSpec& spec, double x, int n_max);

struct TrResult {
  double tr = 0.0, tr_lo = 0.0, tr_hi = 0.0;
  int n_max = 0;
  bool monotone = true;  // phi_hat decreasing along the bisection trace
  std::vector<std::pair<double, double>> trace;  // (t, phi_hat)
  double width() const { return tr_hi - tr_lo; }
};

TrResult solve_tr(const SystemSpec& spec, int n_max, double tol = 1e-10);
TrResult solve_tr(const SystemSpec& spec, const EnergyTable& table, double tol = 1e-10);

struct StrictnessResult {
  bool certified = false;
  Surrogate mode = Surrogate::PHatG1;
  double rho_b = 0.0;
  double margin = 0.0;  // min_k ((A v~)_k / (rho_B v~_k) - 1)
  int weakest = -1;     // component attaining the margin
  std::string message;
};

// Doubles the Perron vector of B at a_r (right vector under g1, left under
// g2) and checks that A strictly expands it; a strict gain certifies s_r > a_r.
StrictnessResult strictness_test(const SystemSpec& spec, double a_r);

struct DimensionReport {
  double s1r = 0.0, s2r = 0.0, sr = 0.0;
  std::optional<double> ar;
  std::optional<Surrogate> ar_kernel;
  std::optional<TrResult> tr;
  CaseKind kind = CaseKind::Other;
  double root_tol = 1e-12;
};

// Roots that apply to the spec's regime; t_r needs (A2), (A4), (A5) and
// an irreducible P. Block roots are skipped (NaN) when a block is reducible.
DimensionReport dimensions(const SystemSpec& spec, int n_max = 12);

struct ScanRow {
  double r = 0.0, s1r = 0.0, s2r = 0.0;
  int sign = 0;  // sign of s2r - s1r
};
struct ScanReport {
  std::vector<ScanRow> rows;
  int positive_prefix = 0;  // leading rows with s2r > s1r
};
ScanReport small_r_scan(const SystemSpec& spec, const std::vector<double>& r_grid);

// Case I fixture on two letters whose block roots coincide: P1 = lam/2
// everywhere, P3 = (1-lam)/2, P2 = [[beta, 1-beta], [1-beta, beta]], uniform
// chi and ratio c. lam is solved so that s_{1,r} = s_{2,r}.
SystemSpec build_tuned_equal(double c, double r, double beta);

}  // namespace mtq
