#include <doctest.h>

#include "oracles.hpp"
#include "uncertainty/ensemble.hpp"
#include "uncertainty/states.hpp"

using namespace uncertainty;
using oracle::close_rel;
using oracle::code_of;

namespace {

const Grid kGrid = make_grid(-12, 12, 2048);
const UnitSystem kUnits(1.0);

WaveFunction gauss(double x0, double p0 = 0, double sigma = 1) { return gaussian_packet(x0, p0, sigma, kGrid, kUnits); }
WaveFunction ho(int n) { return ho_eigenstate(n, 1, 1, kGrid, kUnits); }

ComponentSpec comp(WaveFunction psi, std::optional<double> w) { return ComponentSpec{std::move(psi), w, 0}; }

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("flat weights from two-level weights") {
    const Ensemble e = build_ensemble({GroupSpec{{comp(gauss(-1), 0.5), comp(gauss(1), 0.5)}, 0.4, 0},
                                       GroupSpec{{comp(ho(0), 1.0)}, 0.6, 0}},
                                      kUnits);
    CHECK(e.flat_weight(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(e.flat_weight(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(e.flat_weight(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(e.component_count() == 3);
    CHECK(std::abs(trace_density(e) - 1) < 1e-10);
    CHECK(e.groups()[1].components[0].state.label() == StateLabel{2, 1});
  }

  TEST_CASE("weight validation") {
    CHECK(code_of([] {
            build_ensemble({GroupSpec{{comp(ho(0), 1.0)}, 0.4, 0}, GroupSpec{{comp(ho(1), 1.0)}, 0.5, 0}}, kUnits);
          }) == ErrorCode::WeightSumError);
    CHECK(code_of([] { build_ensemble({GroupSpec{{comp(ho(0), 0.5), comp(ho(1), 0.6)}, 1.0, 0}}, kUnits); }) ==
          ErrorCode::WeightSumError);
    CHECK(code_of([] { build_ensemble({GroupSpec{{comp(ho(0), std::nullopt)}, 1.0, 0}}, kUnits); }) ==
          ErrorCode::WeightSumError);
    CHECK(code_of([] { build_ensemble({GroupSpec{{comp(ho(0), 1.5), comp(ho(1), -0.5)}, 1.0, 0}}, kUnits); }) ==
          ErrorCode::WeightSumError);
    const WaveFunction other = ho_eigenstate(0, 1, 1, make_grid(-10, 10, 2048), kUnits);
    CHECK(code_of([&] { build_ensemble({GroupSpec{{comp(ho(0), 0.5), comp(other, 0.5)}, 1.0, 0}}, kUnits); }) ==
          ErrorCode::GridMismatch);
    CHECK(code_of([] { build_ensemble({}, kUnits); }) == ErrorCode::EmptyTermList);
  }

  TEST_CASE("weights from counts are exact rationals") {
    EnsembleCounts counts{10, {4, 6}, {{2, 2}, {6}}};
    const Ensemble e = build_ensemble({GroupSpec{{comp(ho(0), std::nullopt), comp(ho(1), std::nullopt)}, {}, 0},
                                       GroupSpec{{comp(ho(2), std::nullopt)}, {}, 0}},
                                      kUnits, counts);
    CHECK(e.groups()[0].weight == 0.4);
    CHECK(e.groups()[0].components[0].weight == 0.5);
    CHECK(*e.exact_flat_weight(0, 0) == Rational(2, 10));
    CHECK(*e.exact_flat_weight(1, 0) == Rational(6, 10));
    CHECK(e.flat_weight(0, 1) == Rational(2, 10).to_double());
    CHECK(e.total_count() == 10u);
  }

  TEST_CASE("count consistency") {
    auto groups = [] {
      return std::vector<GroupSpec>{GroupSpec{{comp(ho(0), std::nullopt), comp(ho(1), std::nullopt)}, {}, 0},
                                    GroupSpec{{comp(ho(2), std::nullopt)}, {}, 0}};
    };
    CHECK(code_of([&] { build_ensemble(groups(), kUnits, EnsembleCounts{11, {4, 6}, {{2, 2}, {6}}}); }) ==
          ErrorCode::CountInconsistency);
    CHECK(code_of([&] { build_ensemble(groups(), kUnits, EnsembleCounts{10, {4, 6}, {{2, 3}, {6}}}); }) ==
          ErrorCode::CountInconsistency);
    CHECK(code_of([&] { build_ensemble(groups(), kUnits, EnsembleCounts{10, {4, 6}, {{2, 2}}}); }) ==
          ErrorCode::CountInconsistency);
    auto with_weight = groups();
    with_weight[0].weight = 0.5;
    CHECK(code_of([&] { build_ensemble(with_weight, kUnits, EnsembleCounts{10, {4, 6}, {{2, 2}, {6}}}); }) ==
          ErrorCode::CountInconsistency);
  }

  TEST_CASE("group product is the weighted average of component products") {
    const Ensemble all_gauss =
        build_ensemble({GroupSpec{{comp(gauss(-1, 1), 0.3), comp(gauss(2, -1, 0.6), 0.7)}, 1.0, 0}}, kUnits);
    CHECK(close_rel(group_product(all_gauss, 0), 0.25, 1e-8));

    const Ensemble mixed = build_ensemble({GroupSpec{{comp(ho(0), 0.3), comp(ho(1), 0.7)}, 1.0, 0}}, kUnits);
    const double oracle_value = 0.3 * oracle::ladder_moments({1}).product() + 0.7 * oracle::ladder_moments({0, 1}).product();
    CHECK(oracle_value == doctest::Approx(1.65).epsilon(1e-14));
    CHECK(close_rel(group_product(mixed, 0), oracle_value, 1e-6));

    const Ensemble single = build_ensemble({GroupSpec{{comp(ho(3), 1.0)}, 1.0, 0}}, kUnits);
    CHECK(group_product(single, 0) == single.groups()[0].components[0].stats.product);
    CHECK(code_of([&] { group_product(single, 1); }) == ErrorCode::IndexOutOfRange);
  }

  TEST_CASE("ensemble means") {
    const Ensemble sym = build_ensemble({GroupSpec{{comp(gauss(-1), 0.5), comp(gauss(1), 0.5)}, 1.0, 0}}, kUnits);
    CHECK(std::abs(ensemble_means(sym).mean_x) < 1e-12);
    const Ensemble skew = build_ensemble({GroupSpec{{comp(gauss(0), 1.0)}, 0.3, 0}, GroupSpec{{comp(gauss(1), 1.0)}, 0.7, 0}}, kUnits);
    CHECK(std::abs(ensemble_means(skew).mean_x - 0.7) < 1e-10);
    const Ensemble drift = build_ensemble({GroupSpec{{comp(gauss(-1, 2), 0.5), comp(gauss(1, 2), 0.5)}, 1.0, 0}}, kUnits);
    CHECK(std::abs(ensemble_means(drift).mean_p - 2) < 1e-10);
  }

  TEST_CASE("ensemble product and classification") {
    const Ensemble gaussians = build_ensemble(
        {GroupSpec{{comp(gauss(-1), 0.5), comp(gauss(1, 2, 0.5), 0.5)}, 0.5, 0}, GroupSpec{{comp(gauss(0, -1, 0.8), 1.0)}, 0.5, 0}},
        kUnits);
    const EquilibriumVerdict v = ensemble_product(gaussians);
    CHECK(v.classification == Classification::Equilibrium);
    CHECK(close_rel(v.product, 0.25, 1e-8));

    const Ensemble two = build_ensemble({GroupSpec{{comp(ho(0), 1.0)}, 0.5, 0}, GroupSpec{{comp(ho(1), 1.0)}, 0.5, 0}}, kUnits);
    const double oracle_value = 0.5 * 0.25 + 0.5 * oracle::ladder_moments({0, 1}).product();
    const EquilibriumVerdict w = ensemble_product(two);
    CHECK(close_rel(w.product, oracle_value, 1e-6));
    CHECK(w.classification == Classification::NonEquilibrium);

    const Ensemble pure = build_ensemble({GroupSpec{{comp(ho(0), 1.0)}, 1.0, 0}}, kUnits);
    CHECK(ensemble_product(pure).classification == Classification::Equilibrium);
  }

  TEST_CASE("equality holds iff every component saturates") {
    const Ensemble one_excited = build_ensemble(
        {GroupSpec{{comp(gauss(0), 0.99), comp(ho(1), 0.01)}, 1.0, 0}}, kUnits);
    CHECK(ensemble_product(one_excited).product > 0.25 * (1 + 1e-8));
    CHECK(ensemble_product(one_excited).classification == Classification::NonEquilibrium);
  }

  TEST_CASE("regrouping that keeps flat weights changes nothing") {
    const Ensemble a = build_ensemble({GroupSpec{{comp(gauss(-1, 1), 0.5), comp(ho(2), 0.5)}, 0.4, 0},
                                       GroupSpec{{comp(ho(1), 1.0)}, 0.6, 0}},
                                      kUnits);
    const Ensemble b = build_ensemble({GroupSpec{{comp(gauss(-1, 1), 1.0)}, 0.2, 0},
                                       GroupSpec{{comp(ho(2), 0.25), comp(ho(1), 0.75)}, 0.8, 0}},
                                      kUnits);
    CHECK(std::abs(ensemble_product(a).product - ensemble_product(b).product) <= 1e-12);
    CHECK(std::abs(ensemble_means(a).mean_x - ensemble_means(b).mean_x) <= 1e-12);
    CHECK(std::abs(ensemble_means(a).mean_p - ensemble_means(b).mean_p) <= 1e-12);
  }

  TEST_CASE("convexity bound") {
    const Ensemble e = build_ensemble({GroupSpec{{comp(ho(4), 0.2), comp(ho(0), 0.8)}, 0.5, 0},
                                       GroupSpec{{comp(gauss(1, 1, 0.7), 1.0)}, 0.5, 0}},
                                      kUnits);
    double min_product = 1e300;
    for (const auto& g : e.groups()) {
      for (const auto& c : g.components) min_product = std::min(min_product, c.stats.product);
    }
    CHECK(ensemble_product(e).product >= min_product);
  }

  TEST_CASE("mixture moments follow the law of total variance") {
    const Ensemble e = build_ensemble({GroupSpec{{comp(gauss(-1), 0.5), comp(gauss(1), 0.5)}, 1.0, 0}}, kUnits);
    const StateStats m = mixed_state_moments(e);
    // oracle: within-variance 1 plus between-variance 0.5 (1)^2 + 0.5 (-1)^2
    CHECK(std::abs(m.var_x - 2.0) < 1e-9);
    CHECK(std::abs(m.var_p - 0.25) < 1e-9);
    CHECK(std::abs(m.product - 0.5) < 1e-9);
    CHECK(close_rel(ensemble_product(e).product, 0.25, 1e-8));

    const Ensemble single = build_ensemble({GroupSpec{{comp(ho(2), 1.0)}, 1.0, 0}}, kUnits);
    const StateStats s = mixed_state_moments(single);
    const StateStats ref = single.groups()[0].components[0].stats;
    CHECK(s.var_x == doctest::Approx(ref.var_x).epsilon(1e-14));
    CHECK(s.var_p == doctest::Approx(ref.var_p).epsilon(1e-14));

    const Ensemble twins = build_ensemble({GroupSpec{{comp(ho(2), 0.1), comp(ho(2), 0.9)}, 1.0, 0}}, kUnits);
    CHECK(mixed_state_moments(twins).var_x == doctest::Approx(ref.var_x).epsilon(1e-14));

    double within = 0;
    for (std::size_t c = 0; c < 2; ++c) within += e.flat_weight(0, c) * e.groups()[0].components[c].stats.var_x;
    CHECK(m.var_x >= within - 1e-12);
  }
}
