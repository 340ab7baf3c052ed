// mtq: command-line front end. One CSV per command (manifest lines start
// with '#'), a short human summary, and exit codes 0 / 1 (numeric) / 2 (input).

#include "mtq/csv.hpp"
#include "mtq/quantization.hpp"
#include "mtq/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mtq;

namespace {

// phi is a count; the lumped walk carries it in logs, so round it back
// while it is exactly representable.
std::string phi_text(double log_phi) {
  const double v = std::exp(log_phi);
  return v < 9.0e15 ? std::to_string(std::llround(v)) : mtq::fmt(v);
}

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config, fixture;
  std::optional<double> r, ratio;
  std::string chi = "uniform-pair";
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config, "JSON system description");
  auto* fix = cmd->add_option("--fixture", c.fixture, "built-in fixture name");
  cfg->excludes(fix);
  cmd->add_option("--r", c.r, "quantization order (overrides the input)");
  cmd->add_option("--ratio", c.ratio, "uniform contraction ratio for fixtures");
  cmd->add_option("--chi", c.chi, "initial vector for eg5: uniform-pair | uniform | comma list");
  cmd->add_option("--out", c.out, "CSV destination (default: stdout)");
}

SystemSpec resolve(const Common& c) {
  if (c.config.empty() == c.fixture.empty()) throw InputError("give exactly one of --config or --fixture");
  if (!c.config.empty()) {
    SystemSpec s = load_json_file(c.config);
    if (c.r) s.r = *c.r;
    return s;
  }
  if (c.fixture == "tuned-equal") {
    SystemSpec s = build_tuned_equal(c.ratio.value_or(0.25), c.r.value_or(2.0), 0.8);
    s.geometry = default_geometry(s);
    return s;
  }
  FixtureOptions opt;
  opt.ratio = c.ratio;
  opt.r = c.r.value_or(2.0);
  opt.chi = c.chi;
  return load_fixture(c.fixture, opt);
}

// Collects the CSV body, then writes manifest + body once the run is timed.
class Emitter {
 public:
  Emitter(const Common& c, std::string command) : common_(c) {
    manifest_.add("command", std::move(command));
    manifest_.add(c.config.empty() ? "fixture" : "config", c.config.empty() ? c.fixture : c.config);
    manifest_.add("tool_version", kVersion);
  }
  Manifest& manifest() { return manifest_; }
  CsvWriter& begin(const std::vector<std::string>& cols) {
    writer_.emplace(body_, Manifest{}, cols);
    return *writer_;
  }
  void finish() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest_.add("wall_clock_s", fmt(secs));
    std::ostringstream head;
    for (const auto& [k, v] : manifest_.fields) head << "# " << k << ": " << v << '\n';
    if (common_.out.empty()) {
      std::cout << head.str() << body_.str();
    } else {
      std::ofstream f(common_.out, std::ios::binary);
      if (!f) throw InputError("cannot write " + common_.out);
      f << head.str() << body_.str();
    }
  }
  // Summary goes to stdout when the CSV goes to a file, else to stderr.
  std::ostream& human() const { return common_.out.empty() ? std::cerr : std::cout; }

 private:
  const Common& common_;
  Manifest manifest_;
  std::ostringstream body_;
  std::optional<CsvWriter> writer_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string witnesses(const Flag& f) {
  std::string s;
  for (const auto& [i, j] : f.witnesses) {
    if (!s.empty()) s += ' ';
    s += j < 0 ? std::to_string(i + 1) : "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
  }
  return s;
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int k = std::stoi(s);
      return {k, k};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw InputError("bad range '" + s + "' (expected A..B)");
  }
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      if constexpr (std::is_same_v<T, int>)
        out.push_back(std::stoi(tok));
      else
        out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InputError("bad list entry '" + tok + "'");
    }
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

// ---------------------------------------------------------------- commands

int cmd_validate(const Common& c) {
  const SystemSpec s = resolve(c);
  const RegimeReport rep = validate(s);
  Emitter em(c, "validate");
  auto& w = em.begin({"flag", "pass", "witnesses"});
  const std::pair<const char*, const Flag*> rows[] = {{"A1", &rep.A1}, {"A2", &rep.A2}, {"A3", &rep.A3},
                                                      {"A4", &rep.A4}, {"A5", &rep.A5}, {"g1", &rep.g1},
                                                      {"g2", &rep.g2}, {"b1", &rep.b1}, {"b2", &rep.b2}};
  for (const auto& [name, f] : rows) w.row({name, f->pass ? "pass" : "fail", witnesses(*f)});
  w.row({"P_irreducible", rep.P_irreducible ? "pass" : "fail", ""});
  w.row({"complete_overlaps", rep.complete_overlaps ? "pass" : "fail", ""});
  w.row({"case", to_string(rep.kind), ""});
  em.finish();
  em.human() << s.name << ": " << to_string(rep.kind) << '\n';
  if (rep.kind == CaseKind::Other) em.human() << "neither Case I nor Case II; see the failing flags\n";
  return 0;
}

int cmd_dims(const Common& c, int n_max, const std::string& pressure_out) {
  const SystemSpec s = resolve(c);
  Emitter em(c, "dims");
  em.manifest().add("r", fmt(s.r)).add("nmax", std::to_string(n_max));
  const DimensionReport d = dimensions(s, n_max);
  auto& w = em.begin({"case", "s1r", "s2r", "sr", "ar", "tr_lo", "tr", "tr_hi", "nmax"});
  w.row({to_string(d.kind), fmt(d.s1r), fmt(d.s2r), fmt(d.sr), opt_fmt(d.ar),
         d.tr ? fmt(d.tr->tr_lo) : "", d.tr ? fmt(d.tr->tr) : "", d.tr ? fmt(d.tr->tr_hi) : "",
         std::to_string(n_max)});
  em.finish();
  auto& h = em.human();
  h << "s_1r = " << d.s1r << ", s_2r = " << d.s2r << ", s_r = " << d.sr << '\n';
  if (d.ar) h << "a_r = " << *d.ar << " (" << to_string(*d.ar_kernel) << ")\n";
  if (d.tr) {
    h << "t_r = " << d.tr->tr << " in [" << d.tr->tr_lo << ", " << d.tr->tr_hi << "] at n = " << n_max << '\n';
    if (d.tr->tr_hi < d.sr) h << "bracket lies strictly below s_r\n";
  }
  if (!pressure_out.empty()) {
    if (!d.tr) throw InputError("pressure table needs the (A2),(A4),(A5) regime");
    const EnergyTable table = EnergyTable::build(s, n_max);
    const Constants k = constants(s);
    std::ofstream f(pressure_out, std::ios::binary);
    if (!f) throw InputError("cannot write " + pressure_out);
    Manifest m;
    m.add("command", "dims/pressure").add("nmax", std::to_string(n_max)).add("tool_version", kVersion);
    CsvWriter pw(f, m, {"s", "x", "log_T_n", "phi_hat", "phi_lo", "phi_hi"});
    const double top = 2.0 * d.tr->tr_hi;
    for (int i = 1; i <= 40; ++i) {
      const double sv = top * i / 40.0;
      const PressureEstimate p = pressure(table, k, exponent(sv, s.r));
      pw.row({fmt(sv), fmt(p.x), fmt(p.log_T.back()), fmt(p.phi_hat), fmt(p.phi_lo), fmt(p.phi_hi)});
    }
  }
  return 0;
}

int cmd_reducibility(const Common& c, int depth) {
  const SystemSpec s = resolve(c);
  const ReducibilityVerdict v = classify_reducibility(s, depth);
  Emitter em(c, "reducibility");
  em.manifest().add("depth", std::to_string(depth));
  auto& w = em.begin({"status", "certificate", "sigma", "j", "word", "delta", "delta_exact", "depth_searched"});
  Word word = v.sigma;
  if (v.j >= 0) word.push_back(v.j);
  w.row({to_string(v.status), v.certificate, v.sigma.empty() ? "" : format_word(v.sigma),
         v.j >= 0 ? std::to_string(v.j + 1) : "", word.empty() ? "" : format_word(word),
         v.j >= 0 ? fmt(v.delta) : "", v.delta_exact ? v.delta_exact->str() : "", std::to_string(v.depth_searched)});
  em.finish();
  auto& h = em.human();
  h << to_string(v.status) << ": " << v.certificate << '\n';
  if (v.j >= 0) h << "witness " << format_word(word) << ", Delta = " << v.delta << '\n';
  if (v.status == Reducibility::Reducible) {
    h << "reduced matrix p~:\n" << v.ptilde << "\nchi~ = " << v.chitilde.transpose() << '\n';
  }
  return 0;
}

double resolve_s(const SystemSpec& s, const std::string& which, int n_max) {
  if (which == "sr") return solve_dimension_root(s, MatrixKind::A);
  if (which == "tr") return solve_tr(s, n_max).tr;
  try {
    return std::stod(which);
  } catch (const std::exception&) {
    throw InputError("--s expects a number, sr or tr");
  }
}

int cmd_antichain(const Common& c, const std::string& krange, const std::string& s_arg, int n_max,
                  const std::string& mode) {
  const SystemSpec s = resolve(c);
  const auto [k0, k1] = parse_range(krange);
  if (k0 < 1 || k1 < k0) throw InputError("need 1 <= A <= B in --k A..B");
  const double sv = resolve_s(s, s_arg, n_max);
  const WalkMode wm = mode == "dfs" ? WalkMode::Dfs : WalkMode::Lumped;
  if (mode != "dfs" && mode != "lumped") throw InputError("--mode is lumped or dfs");
  Emitter em(c, "antichain");
  em.manifest().add("r", fmt(s.r)).add("k", krange).add("s", s_arg + "=" + fmt(sv)).add("mode", mode);
  auto& w = em.begin({"k", "phi", "log_phi", "surrogate", "log_surrogate", "l1", "l2", "F", "log_F"});
  std::vector<AntiChainStats> rows;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = k0; k <= k1; ++k) {
    const AntiChainStats st = antichain_stats(s, k, {sv}, wm);
    w.row({std::to_string(k), phi_text(st.log_phi), fmt(st.log_phi), fmt(std::exp(st.log_surrogate)),
           fmt(st.log_surrogate), std::to_string(st.l1), std::to_string(st.l2), fmt(std::exp(st.log_F[0])),
           fmt(st.log_F[0])});
    lo = std::min(lo, st.log_F[0]);
    hi = std::max(hi, st.log_F[0]);
    rows.push_back(st);
  }
  em.finish();
  auto& h = em.human();
  h << "s = " << sv << ", F max/min over k = " << std::exp(hi - lo) << '\n';
  if (rows.size() >= 2) {
    const LinearFit f = antichain_dimension(rows, s.r);
    h << "dimension from log phi vs -(1/r) log surrogate: " << f.slope << " (R^2 " << f.r2 << ")\n";
  }
  return 0;
}

int cmd_quantize(const Common& c, const std::string& ks, std::size_t samples, std::uint64_t seed, int restarts) {
  const SystemSpec s = resolve(c);
  if (!s.geometry) throw InputError("quantize needs a geometry; this spec has none");
  LloydOptions opt;
  opt.restarts = restarts;
  const EmpiricalDimension ed = empirical_dimension(s, parse_list<int>(ks), samples, seed, opt);
  Emitter em(c, "quantize");
  em.manifest().add("r", fmt(s.r)).add("ks", ks).add("samples", std::to_string(samples)).add("seed",
                                                                                               std::to_string(seed));
  auto& w = em.begin({"k", "distortion", "error"});
  for (std::size_t i = 0; i < ed.ks.size(); ++i)
    w.row({std::to_string(ed.ks[i]), fmt(std::pow(ed.errors[i], s.r)), fmt(ed.errors[i])});
  em.finish();
  em.human() << "seed " << seed << "; empirical D_r = " << ed.fit.slope << " (95% CI [" << ed.ci_lo << ", "
             << ed.ci_hi << "], R^2 " << ed.fit.r2 << "), constants hold only up to ≍\n";
  return 0;
}

int cmd_rates(const Common& c, int cycles, const std::string& surrogate, double tol) {
  const SystemSpec s = resolve(c);
  const EquivalenceReport rep = equivalence_probe(s, parse_surrogate(surrogate), cycles, tol);
  Emitter em(c, "rates");
  em.manifest().add("cycles", std::to_string(cycles)).add("surrogate", surrogate).add("tol", fmt(tol));
  auto& w = em.begin({"cycle", "rate_mu", "rate_surrogate", "free_letter", "implied_zeta", "status"});
  for (const auto& r : rep.rows)
    w.row({format_word(r.cycle), fmt(r.rate_mu), std::isnan(r.rate_surrogate) ? "" : fmt(r.rate_surrogate),
           r.free_letter >= 0 ? std::to_string(r.free_letter + 1) : "",
           std::isnan(r.implied_zeta) ? "" : fmt(r.implied_zeta), r.status});
  em.finish();
  em.human() << (rep.non_equivalent ? "NON-EQUIVALENT: " : "EQUIVALENT-CONSISTENT: ") << rep.reason << '\n';
  return 0;
}

int cmd_scan_r(const Common& c, const std::string& grid) {
  const SystemSpec s = resolve(c);
  const ScanReport rep = small_r_scan(s, parse_list<double>(grid));
  Emitter em(c, "scan_r");
  em.manifest().add("grid", grid);
  auto& w = em.begin({"r", "s1r", "s2r", "sign"});
  for (const auto& r : rep.rows) w.row({fmt(r.r), fmt(r.s1r), fmt(r.s2r), std::to_string(r.sign)});
  em.finish();
  if (rep.rows.size() > 1)
    em.human() << "s_2r > s_1r on the first " << rep.positive_prefix << " of " << rep.rows.size()
               << " grid points\n";
  return 0;
}

int cmd_cylinders(const Common& c, int depth) {
  const SystemSpec s = resolve(c);
  Emitter em(c, "cylinders");
  em.manifest().add("depth", std::to_string(depth)).add("r", fmt(s.r));
  auto& w = em.begin({"word", "mu", "i1", "i2", "energy", "log_energy"});
  for (const Word& sigma : enumerate_Sn(s.graph, depth)) {
    const CylinderValue v = mu_cylinder(sigma, s);
    w.row({format_word(sigma), fmt(v.mu), fmt(v.i1), fmt(v.i2), fmt(v.energy), fmt(v.log_energy)});
  }
  em.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-type measures with complete overlaps: dimensions, reducibility, quantization"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c;
  int n_max = 12, depth = 12, cycles = 3, restarts = 3;
  std::string krange = "5..25", s_arg = "tr", mode = "lumped", ks = "8,16,32,64,128", surrogate = "ptilde";
  std::string grid = "0.01,0.02,0.05,0.1,0.2,0.5,1,2", pressure_out;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  double tol = 1e-9;

  auto* v = app.add_subcommand("validate", "assumption flags and case classification");
  add_common(v, c);
  auto* d = app.add_subcommand("dims", "s_{1,r}, s_{2,r}, s_r, a_r and the t_r bracket");
  add_common(d, c);
  d->add_option("--nmax", n_max, "word length for the pressure bracket");
  d->add_option("--pressure", pressure_out, "also write a pressure table to this CSV");
  auto* red = app.add_subcommand("reducibility", "decide whether mu is a Markov measure on N letters");
  add_common(red, c);
  red->add_option("--depth", depth, "search depth for counterexamples");
  auto* ac = app.add_subcommand("antichain", "phi, surrogate error and F over Lambda_{k,r}");
  add_common(ac, c);
  ac->add_option("--k", krange, "range A..B");
  ac->add_option("--s", s_arg, "value, sr or tr");
  ac->add_option("--nmax", n_max, "pressure depth used when --s tr");
  ac->add_option("--mode", mode, "lumped | dfs");
  auto* q = app.add_subcommand("quantize", "sample mu and fit the empirical quantization dimension");
  add_common(q, c);
  q->add_option("--ks", ks, "codebook sizes, comma separated");
  q->add_option("--samples", samples, "number of sample points");
  q->add_option("--seed", seed, "RNG seed");
  q->add_option("--restarts", restarts, "Lloyd restarts per k");
  auto* rt = app.add_subcommand("rates", "cycle decay rates against a surrogate kernel");
  add_common(rt, c);
  rt->add_option("--cycles", cycles, "maximal simple-cycle length");
  rt->add_option("--surrogate", surrogate, "ptilde | phat-g1 | phat-g2");
  rt->add_option("--tol", tol, "relative tolerance for rate comparisons");
  auto* sc = app.add_subcommand("scan_r", "block roots across a grid of r");
  add_common(sc, c);
  sc->add_option("--grid", grid, "comma separated r values");
  auto* cy = app.add_subcommand("cylinders", "mu, I1, I2 and energy over S_n");
  add_common(cy, c);
  cy->add_option("--depth", depth, "word length n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*v) return cmd_validate(c);
    if (*d) return cmd_dims(c, n_max, pressure_out);
    if (*red) return cmd_reducibility(c, depth);
    if (*ac) return cmd_antichain(c, krange, s_arg, n_max, mode);
    if (*q) return cmd_quantize(c, ks, samples, seed, restarts);
    if (*rt) return cmd_rates(c, cycles, surrogate, tol);
    if (*sc) return cmd_scan_r(c, grid);
    if (*cy) return cmd_cylinders(c, depth);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 1;
  } catch (const CapExceeded& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
