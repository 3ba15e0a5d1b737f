// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are fixed here and never tuned at run time.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uncertainty/ensemble.hpp"
#include "uncertainty/fluctuations.hpp"
#include "uncertainty/observables.hpp"
#include "uncertainty/states.hpp"
#include "uncertainty/timewindow.hpp"

using namespace uncertainty;
using oracle::close_rel;

namespace {

const UnitSystem kUnits(1.0);
const Grid kDefaultGrid = make_grid(-12, 12, 2048);
// sigma = 2 packets need a wider box to decay below the boundary tolerance
const Grid kWideGrid = make_grid(-32, 32, 4096);

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) detail << what;
    ok = ok && condition;
  }
};

WaveFunction ho(int n) { return ho_eigenstate(n, 1, 1, kDefaultGrid, kUnits); }

WaveFunction cat_state() {
  const double r = 1 / std::sqrt(2.0);
  const std::vector<std::pair<Complex, WaveFunction>> terms{{r, ho(0)}, {r, ho(1)}};
  return superpose(terms);
}

WaveFunction superposition_of(const std::vector<Complex>& c) {
  std::vector<std::pair<Complex, WaveFunction>> terms;
  for (std::size_t n = 0; n < c.size(); ++n) terms.emplace_back(c[n], ho(int(n)));
  return superpose(terms);
}

std::vector<WaveFunction> gaussian_sweep() {
  std::vector<WaveFunction> out;
  for (double x0 : {-2.0, 0.0, 2.0}) {
    for (double p0 : {-1.0, 0.0, 3.0}) {
      for (double sigma : {0.5, 1.0, 2.0}) out.push_back(gaussian_packet(x0, p0, sigma, kWideGrid, kUnits));
    }
  }
  return out;
}

ComponentSpec comp(WaveFunction psi, double w) { return ComponentSpec{std::move(psi), w, 0}; }

// ---------------------------------------------------------------------------

Check bound_law() {
  Check c;
  double worst = 1e300;
  for (const auto& coeffs : oracle::random_ho_coefficients(100, 10, 0x5eed)) {
    const StateStats s = uncertainty_product(superposition_of(coeffs), kUnits);
    worst = std::min(worst, s.product);
    c.require(s.product >= 0.25 * (1 - 1e-9), "product below bound");
  }
  c.detail << "min product " << worst << " over 100 states";
  return c;
}

Check saturation_equilibrium() {
  Check c;
  double worst_rel = 0;
  for (const auto& psi : gaussian_sweep()) {
    const StateStats s = uncertainty_product(psi, kUnits);
    worst_rel = std::max(worst_rel, std::abs(s.product - 0.25) / 0.25);
    c.require(close_rel(s.product, 0.25, 1e-8), "gaussian product off 0.25; ");
    c.require(classify(s.product, kUnits).classification == Classification::Equilibrium, "gaussian not equilibrium; ");
  }
  for (int n = 1; n <= 5; ++n) {
    std::vector<Complex> e(n + 1);
    e[n] = 1.0;
    const double expect = oracle::ladder_moments(e).product();
    const StateStats s = uncertainty_product(ho(n), kUnits);
    c.require(close_rel(expect, (n + 0.5) * (n + 0.5), 1e-12), "ladder oracle disagrees with closed form; ");
    c.require(close_rel(s.product, expect, 1e-6), "HO product off oracle; ");
    c.require(classify(s.product, kUnits).classification == Classification::NonEquilibrium, "HO not non-equilibrium; ");
  }
  const StateStats cat = uncertainty_product(cat_state(), kUnits);
  c.require(close_rel(cat.product, oracle::ladder_moments({1, 1}).product(), 1e-6) && close_rel(cat.product, 0.5, 1e-6),
            "cat product off 0.5; ");
  c.require(classify(cat.product, kUnits).classification == Classification::NonEquilibrium, "cat not non-equilibrium; ");
  c.detail << "27 packets, worst relative deviation " << worst_rel;
  return c;
}

Check ensemble_algebra() {
  Check c;
  const Ensemble two = build_ensemble({GroupSpec{{comp(ho(0), 0.5), comp(ho(1), 0.5)}, 0.4, 0},
                                       GroupSpec{{comp(ho(2), 1.0)}, 0.6, 0}},
                                      kUnits);
  c.require(std::abs(trace_density(two) - 1) <= 1e-10, "trace != 1; ");

  const Ensemble counted = build_ensemble({GroupSpec{{comp(ho(0), 0.5), comp(ho(1), 0.5)}, {}, 0},
                                           GroupSpec{{ComponentSpec{ho(2), std::nullopt, 0}}, {}, 0}},
                                          kUnits, EnsembleCounts{10, {4, 6}, {{2, 2}, {6}}});
  const std::vector<std::vector<std::uint64_t>> nij{{2, 2}, {6}};
  for (std::size_t g = 0; g < 2; ++g) {
    for (std::size_t k = 0; k < nij[g].size(); ++k) {
      const Rational product = *counted.groups()[g].exact_weight * *counted.groups()[g].components[k].exact_weight;
      c.require(*counted.exact_flat_weight(g, k) == Rational(nij[g][k], 10) && product == Rational(nij[g][k], 10),
                "flat weight != N_ij/N; ");
    }
  }

  const Ensemble ladder = build_ensemble({GroupSpec{{comp(ho(0), 0.3), comp(ho(1), 0.7)}, 1.0, 0}}, kUnits);
  const double oracle_value = 0.3 * 0.25 + 0.7 * 2.25;
  const double value = ensemble_product(ladder).product;
  c.require(std::abs(value - oracle_value) <= 1e-6, "group product off 1.65; ");

  const Ensemble a = build_ensemble({GroupSpec{{comp(gaussian_packet(-1, 1, 1, kDefaultGrid, kUnits), 0.5), comp(ho(2), 0.5)}, 0.4, 0},
                                     GroupSpec{{comp(ho(1), 1.0)}, 0.6, 0}},
                                    kUnits);
  const Ensemble b = build_ensemble({GroupSpec{{comp(gaussian_packet(-1, 1, 1, kDefaultGrid, kUnits), 1.0)}, 0.2, 0},
                                     GroupSpec{{comp(ho(2), 0.25), comp(ho(1), 0.75)}, 0.8, 0}},
                                    kUnits);
  c.require(std::abs(ensemble_product(a).product - ensemble_product(b).product) <= 1e-12, "regrouping changed product; ");
  c.require(std::abs(ensemble_means(a).mean_x - ensemble_means(b).mean_x) <= 1e-12, "regrouping changed <x>; ");
  c.require(std::abs(ensemble_means(a).mean_p - ensemble_means(b).mean_p) <= 1e-12, "regrouping changed <p>; ");

  const Ensemble minimal = build_ensemble(
      {GroupSpec{{comp(gaussian_packet(-1, 0, 1, kDefaultGrid, kUnits), 0.5), comp(gaussian_packet(2, 3, 0.5, kDefaultGrid, kUnits), 0.5)}, 0.7, 0},
       GroupSpec{{comp(ho(0), 1.0)}, 0.3, 0}},
      kUnits);
  c.require(ensemble_product(minimal).classification == Classification::Equilibrium, "minimum ensemble not equilibrium; ");
  c.detail << "group product " << value << " (oracle " << oracle_value << ")";
  return c;
}

Check diagnostic_divergence() {
  Check c;
  const Ensemble e = build_ensemble({GroupSpec{{comp(gaussian_packet(-1, 0, 1, kDefaultGrid, kUnits), 0.5),
                                                comp(gaussian_packet(1, 0, 1, kDefaultGrid, kUnits), 0.5)},
                                               1.0, 0}},
                                    kUnits);
  // law of total variance with component values var_x = 1, var_p = 1/4, means -1, +1
  const double oracle_var_x = 0.5 * 1 + 0.5 * 1 + 0.5 * 1 + 0.5 * 1;
  const double oracle_var_p = 0.25;
  const double weighted = ensemble_product(e).product;
  const double mixed = mixed_state_moments(e).product;
  c.require(std::abs(weighted - 0.25) <= 1e-6, "weighted product off 0.25; ");
  c.require(std::abs(mixed - oracle_var_x * oracle_var_p) <= 1e-6 && std::abs(mixed - 0.5) <= 1e-6,
            "mixture product off 0.5; ");
  c.detail << "weighted " << weighted << ", mixture " << mixed;
  return c;
}

Check density() {
  Check c;
  const PhaseSpaceGaussian g(0.3, -1, 0.8, 0.4);
  const double integral = oracle::simpson_2d([&](double x, double p) { return density_eval(g, x, p); }, 0.3 - 8 * 0.8,
                                             0.3 + 8 * 0.8, -1 - 8 * 0.4, -1 + 8 * 0.4, 400);
  c.require(std::abs(integral - 1) <= 1e-6, "integral != 1; ");
  const PhaseSpaceGaussian unit(0, 0, 1, 1);
  c.require(std::abs(density_eval(unit, 0, 0) - 1 / (2 * std::numbers::pi)) <= 1e-12, "f(0,0); ");
  c.require(std::abs(density_eval(unit, 1, 0) - std::exp(-0.5) / (2 * std::numbers::pi)) <= 1e-12, "f(1,0); ");
  c.require(std::abs(density_eval(PhaseSpaceGaussian(0, 0, 1, 0.5), 0, 0) - 1 / std::numbers::pi) <= 1e-12, "f half; ");
  c.detail << "quadrature " << integral;
  return c;
}

Check sampler() {
  Check c;
  const PhaseSpaceGaussian g(0, 0, 1, 0.5);
  const SampleBatch a = sample(g, 1'000'000, 20261014);
  const SampleBatch b = sample(g, 1'000'000, 20261014);
  const MomentReport r = estimate_moments(a);
  c.require(std::abs(r.mean_x) <= 0.005, "mean_x; ");
  c.require(std::abs(r.var_x - 1) <= 0.01, "var_x; ");
  c.require(std::abs(r.var_p - 0.25) <= 0.005, "var_p; ");
  c.require(r.corr_xp && std::abs(*r.corr_xp) <= 0.005, "corr; ");
  c.require(a.points.size() == b.points.size() &&
                std::memcmp(a.points.data(), b.points.data(), a.points.size() * sizeof(PhasePoint)) == 0,
            "streams differ; ");
  c.detail << "mean_x " << r.mean_x << ", var_x " << r.var_x << ", var_p " << r.var_p << ", corr " << *r.corr_xp;
  return c;
}

Check clt() {
  Check c;
  const MomentReport big = clt_aggregate(UniformMicro{-1, 1}, 1200, 100'000, 1729);
  c.require(std::abs(*big.skew_x) <= 0.05 && std::abs(*big.excess_kurt_x) <= 0.1, "m=1200 not Gaussian; ");
  const MomentReport one = clt_aggregate(UniformMicro{-1, 1}, 1, 100'000, 1729);
  c.require(std::abs(*one.excess_kurt_x + 1.2) <= 0.05, "m=1 kurtosis off -1.2; ");
  double previous = 1e300;
  c.detail << "|kurt| over m=1..256:";
  for (int m : {1, 4, 16, 64, 256}) {
    const double k = std::abs(*clt_aggregate(UniformMicro{-1, 1}, m, 100'000, 1729).excess_kurt_x);
    c.detail << ' ' << k;
    c.require(k <= previous + 0.05, " not monotone; ");
    previous = k;
  }
  c.detail << "; m=1200 skew " << *big.skew_x << " kurt " << *big.excess_kurt_x;
  return c;
}

Check time_window_pipeline() {
  Check c;
  const Potential v = HarmonicPotential{1, 1};
  const EnergyMoments em = energy_moments(cat_state(), v, kUnits);
  const TimeWindow w = time_window(std::sqrt(em.variance), kUnits);
  c.require(std::abs(w.delta_e - 0.5) <= 1e-6, "delta_E off 0.5; ");
  c.require(w.delta_t && std::abs(*w.delta_t - 1.0) <= 1e-6, "delta_t off 1; ");
  double worst = 0;
  for (int n = 0; n <= 10; ++n) {
    const EnergyMoments e = energy_moments(ho(n), v, kUnits);
    worst = std::max(worst, e.variance);
    c.require(e.variance <= 1e-10, "eigenstate variance; ");
    c.require(time_window(std::sqrt(e.variance), kUnits).unbounded(), "eigenstate window bounded; ");
  }
  for (double k : {0.5, 2.0, 10.0}) {
    const double lhs = *time_window(k * w.delta_e, kUnits).delta_t;
    const double rhs = *w.delta_t / k;
    c.require(std::abs(lhs - rhs) <= 1e-12, "reciprocity; ");
  }
  c.detail << "delta_E " << w.delta_e << ", delta_t " << *w.delta_t << ", max eigen var_E " << worst;
  return c;
}

Check numerics_cross_oracle() {
  Check c;
  std::vector<WaveFunction> states = gaussian_sweep();
  for (int n = 0; n <= 10; ++n) states.push_back(ho(n));
  states.push_back(cat_state());
  double worst = 0;
  double worst_parseval = 0;
  for (const auto& psi : states) {
    const Moments spectral = momentum_moments(psi, kUnits);
    const oracle::FiniteDifferenceMomentum fd = oracle::fd_momentum(psi, kUnits.hbar());
    const double scale = std::max(std::abs(fd.mean_p), std::sqrt(fd.var_p));
    const double mean_dev = std::abs(spectral.mean - fd.mean_p) / scale;
    const double var_dev = std::abs(spectral.variance - fd.var_p) / fd.var_p;
    worst = std::max({worst, mean_dev, var_dev});
    c.require(mean_dev <= 1e-6 && var_dev <= 1e-6, "spectral vs FD; ");

    const MomentumDensity md = momentum_density(psi, kUnits);
    double p_norm = 0;
    for (double d : md.density) p_norm += d * md.dp;
    const double dev = std::abs(p_norm - squared_norm(psi.amplitudes(), psi.grid()));
    worst_parseval = std::max(worst_parseval, dev);
    c.require(dev <= 1e-10, "Parseval; ");
  }
  c.detail << states.size() << " states, worst relative FD gap " << worst << ", worst Parseval gap " << worst_parseval;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + UNCERT_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Check cli_determinism() {
  Check c;
  const std::string data = UNCERT_TEST_DATA;
  const std::string scratch = UNCERT_SCRATCH;
  const std::string first = scratch + "/acceptance_run1.csv";
  const std::string second = scratch + "/acceptance_run2.csv";
  std::remove(first.c_str());
  std::remove(second.c_str());
  const std::string scenario = "\"" + data + "/reference.scn\"";
  c.require(run_cli("run " + scenario + " --out \"" + first + "\"") == 0, "first run failed; ");
  c.require(run_cli("run " + scenario + " --out \"" + second + "\"") == 0, "second run failed; ");
  const std::string a = slurp(first);
  const std::string b = slurp(second);
  c.require(!a.empty() && a == b, "outputs differ; ");
  c.require(run_cli("validate " + scenario) == 0, "reference does not validate; ");
  for (const char* bad : {"malformed_key_line.scn", "malformed_unknown_reference.scn", "malformed_section.scn"}) {
    const int code = run_cli("validate \"" + data + "/" + bad + "\"");
    c.require(code == 2, std::string(bad) + " exit " + std::to_string(code) + "; ");
  }
  c.detail << a.size() << " identical bytes; malformed fixtures exit 2";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"1 bound law", bound_law},
      {"2 saturation <-> equilibrium", saturation_equilibrium},
      {"3 ensemble algebra", ensemble_algebra},
      {"4 diagnostic divergence", diagnostic_divergence},
      {"5 phase-space density", density},
      {"6 sampler", sampler},
      {"7 CLT condition", clt},
      {"8 time-window pipeline", time_window_pipeline},
      {"9 numerics cross-oracle", numerics_cross_oracle},
      {"10 CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "exception: " << e.what();
    }
    std::cout << (result.ok ? "[PASS] " : "[FAIL] ") << name << ": " << result.detail.str() << std::endl;
    failures += result.ok ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
