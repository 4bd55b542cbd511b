#include <doctest.h>

#include <cmath>

#include "snslab/ergodicity.hpp"
#include "snslab/stats.hpp"
#include "test_support.hpp"

using namespace snslab;

namespace {

SpectralState rnd(const ModeSetPtr& modes, std::uint32_t s, double scale = 1.0) {
    RandomStream rng(31, s, Substream::initial);
    return scale * random_state(modes, rng);
}

StepperConfig stepper(double dt, double sample, bool states = false) {
    StepperConfig c;
    c.dt = dt;
    c.sample_interval = sample;
    c.store_states = states;
    return c;
}

}  // namespace

TEST_CASE("summary statistics") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto ms = stats::mean_se(x);
    CHECK(ms.mean == 2.5);
    CHECK(ms.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(ms.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
    const auto fit = stats::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK_THROWS_AS(stats::linear_fit(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
    CHECK(kendall_tau(x, y) == 1.0);
    const std::vector<double> r{9.0, 7.0, 5.0, 3.0};
    CHECK(kendall_tau(x, r) == -1.0);
}

TEST_CASE("two-sample tests and Wasserstein distance") {
    CHECK(stats::wasserstein1(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 2.0}) == doctest::Approx(1.0));
    CHECK(stats::wasserstein1(std::vector<double>{0.0}, std::vector<double>{0.75}, std::vector<double>{0.0, 4.0},
                              std::vector<double>{0.5, 0.5}) == doctest::Approx(2.0));
    const std::vector<double> a{0.1, 0.4, 0.7, 0.2, 0.9};
    CHECK(stats::wasserstein1(a, a) == 0.0);
    CHECK(stats::ks_two_sample(a, a).statistic == 0.0);
    CHECK(stats::ks_two_sample(a, a).p_value == doctest::Approx(1.0));
    std::vector<double> lo, hi;
    for (int i = 0; i < 200; ++i) {
        lo.push_back(i / 200.0);
        hi.push_back(0.5 + i / 200.0);
    }
    CHECK(stats::ks_two_sample(lo, hi).p_value < 1e-6);
    CHECK(stats::kolmogorov_sf(1.36) == doctest::Approx(0.049).epsilon(0.02));
    const std::vector<long> c1{50, 30, 20, 0}, c2{48, 33, 19, 0};
    const auto chi = stats::chi_square_homogeneity(c1, c2);
    CHECK(chi.dof == 2);
    CHECK(chi.p_value > 0.5);
    CHECK(stats::chi_square_sf(5.991, 2) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(stats::normal_two_sided_p(1.959964) == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("observable registry") {
    auto modes = ModeSet::make(2);
    for (const char* n : {"one", "energy", "enstrophy", "energy_ratio", "enstrophy_ratio", "energy_exp", "regime:1",
                          "mode_re:1,0,0:1", "mode_im:0,-1,2:2", "mode_atan:1,1,0:0"})
        CHECK(is_registered_observable(n, *modes));
    for (const char* n : {"velocity", "mode_re:3,0,0:1", "mode_re:1,0,0:3", "regime:x", ""})
        CHECK_FALSE(is_registered_observable(n, *modes));
    CHECK_THROWS_AS(Observable("pressure", *modes), std::invalid_argument);
    CHECK(Observable("energy_ratio", *modes).bounded());
    CHECK_FALSE(Observable("energy", *modes).bounded());
    CHECK(Observable("mode_atan:1,0,0:1", *modes).needs_state());

    PathSample s;
    s.energy = 3.0;
    s.enstrophy = 1.0;
    s.regime = 1;
    CHECK(Observable("energy_ratio", *modes)(s, nullptr) == doctest::Approx(0.75));
    CHECK(Observable("energy_exp", *modes)(s, nullptr) == doctest::Approx(std::exp(-3.0)));
    CHECK(Observable("regime:1", *modes)(s, nullptr) == 1.0);
    CHECK(Observable("regime:0", *modes)(s, nullptr) == 0.0);
    const auto u = testing::single_pair(modes, {1, 0, 0}, {cplx(0.0), cplx(2.0, -1.0), cplx(0.0)});
    CHECK(Observable("mode_re:1,0,0:1", *modes)(s, &u) == 2.0);
    CHECK(Observable("mode_im:-1,0,0:1", *modes)(s, &u) == 1.0);
    CHECK(Observable("mode_atan:1,0,0:1", *modes)(s, &u) == doctest::Approx(std::atan(2.0)));
    CHECK_THROWS_AS(Observable("mode_re:1,0,0:1", *modes)(s, nullptr), std::invalid_argument);
}

TEST_CASE("occupation measures and time averages") {
    auto spec = testing::quiet_spec(2, 1.0);
    const Dynamics dyn(spec);
    const auto u0 = testing::single_pair(dyn.modes(), {0, 1, 0}, {cplx(1.0), cplx(0.0), cplx(0.0)});
    const auto path = simulate_path(dyn, stepper(0.01, 0.01), u0, 0, 2.0, 1, 0);
    const auto& modes = *dyn.modes();

    const auto occ = occupation_measure(path, modes, 2.0, {"energy", "energy_ratio"}, 1);
    double wsum = 0.0;
    for (double w : occ.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(occ.regime_marginal.size() == 1);
    CHECK(occ.regime_marginal[0] == doctest::Approx(1.0).epsilon(1e-14));
    // (1/2) int_0^2 2 e^{-2t} dt with trapezoidal error O(dt^2)
    const double exact = (1.0 - std::exp(-4.0)) / 2.0;
    CHECK(occ.mean(0) == doctest::Approx(exact).epsilon(1e-4));
    CHECK(kb_average(path, modes, "one", 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kb_average(path, modes, "energy_exp", 1.0) < 1.0);
    CHECK_THROWS_AS(kb_average(path, modes, "energy", 2.0), std::invalid_argument);
    CHECK_THROWS_AS(kb_average(path, modes, "mode_atan:0,1,0:0", 2.0), std::invalid_argument);
    CHECK_THROWS_AS(occupation_measure(path, modes, 3.0, {"energy"}, 1), std::invalid_argument);
    CHECK_THROWS_AS(occupation_measure(path, modes, 2.0, {"energy"}, 1, 2.0), std::invalid_argument);

    const auto late = occupation_measure(path, modes, 2.0, {"energy"}, 1, 1.0);
    CHECK(late.mean(0) < occ.mean(0));

    SUBCASE("empirical distance") {
        const auto other = occupation_measure(path, modes, 1.0, {"energy", "energy_ratio"}, 1);
        CHECK(empirical_distance(occ, occ) == 0.0);
        CHECK(empirical_distance(occ, other) == doctest::Approx(empirical_distance(other, occ)));
        CHECK(empirical_distance(occ, other) > 0.0);
        auto shifted = occ;
        for (auto& r : shifted.regime) r = 1;
        shifted.regimes = 2;
        shifted.regime_marginal = {0.0, 1.0};
        auto base = occ;
        base.regimes = 2;
        base.regime_marginal = {1.0, 0.0};
        // regime weights differ by 2 and each regime is compared against a point mass at 0
        CHECK(empirical_distance(base, shifted) == doctest::Approx(2.0 + 2.0 * (occ.mean(0) + occ.mean(1))));
        const auto mismatch = occupation_measure(path, modes, 2.0, {"energy"}, 1);
        CHECK_THROWS_AS(empirical_distance(occ, mismatch), std::invalid_argument);
    }
    SUBCASE("mixtures") {
        const std::vector<OccupationMeasure> parts{occ, occ};
        const std::vector<std::size_t> sel{0, 0};
        INFO(empirical_distance(mix(parts, sel), occ));
        CHECK(empirical_distance(mix(parts, sel), occ) < 1e-12);
        CHECK_THROWS_AS(mix(parts, std::vector<std::size_t>{}), std::invalid_argument);
    }
}

TEST_CASE("stability experiment on the noise-free linear scenario") {
    auto spec = testing::quiet_spec(2, 0.5);
    const Dynamics dyn(spec);
    const auto a = rnd(dyn.modes(), 1), b = rnd(dyn.modes(), 2);
    StabilityConfig sc;
    sc.T = 10.0;
    sc.replicates = 2;
    const auto rep = stability_experiment(dyn, stepper(0.05, 0.25), a, b, 0, 0, sc);
    CHECK(rep.fit_valid);
    CHECK(rep.verdict == "decay observed");
    CHECK(rep.fit.slope == doctest::Approx(-2.0 * 0.5).epsilon(0.02));
    CHECK(rep.fit.r2 > 0.99);
    CHECK(rep.below_threshold);
    CHECK(rep.K == 0.0);
    CHECK(rep.K_crit == doctest::Approx(0.5 * 0.125));
    for (double r : rep.effective_rate) CHECK(r <= 0.5);

    const auto same = stability_experiment(dyn, stepper(0.05, 0.25), a, a, 0, 0, sc);
    CHECK(same.verdict == "identical paths");
    sc.replicates = 0;
    CHECK_THROWS_AS(stability_experiment(dyn, stepper(0.05, 0.25), a, b, 0, 0, sc), std::invalid_argument);
}

TEST_CASE("martingale and a-priori monitors") {
    auto spec = testing::quiet_spec(2, 1.0, true, 0.2);
    auto modes = spec.forcing.mode_set();
    spec.q.q = testing::low_shell_q(*modes, 0.1, 2);
    spec.forcing = testing::single_pair(modes, {1, 0, 1}, {cplx(0.3), cplx(0.0), cplx(-0.3)});
    const Dynamics dyn(spec);
    std::vector<PathRecord> paths;
    for (std::uint32_t p = 0; p < 40; ++p)
        paths.push_back(simulate_path(dyn, stepper(0.01, 0.1), rnd(modes, 100 + p, 0.3), 0, 4.0, 3, p));
    const auto mm = martingale_monitor(paths, 0.25);
    CHECK(mm.T == std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0});
    CHECK(mm.m1_fit_valid);
    CHECK(mm.m1_fit.slope < 0.0);
    CHECK_THROWS_AS(martingale_monitor(paths, 0.0), std::invalid_argument);

    const auto ap = apriori_monitor(paths, dyn);
    CHECK(ap.rows.size() == 41);
    CHECK(ap.violations1 == 0);
    CHECK(ap.violations2 == 0);
    CHECK(ap.K == doctest::Approx(dyn.K()));
    for (const auto& row : ap.rows) CHECK(row.lhs1 <= row.rhs1 + 3.0 * row.se1);
}

TEST_CASE("epsilon sweep") {
    auto spec = testing::quiet_spec(2, 1.0, false);
    auto modes = spec.forcing.mode_set();
    spec.q.q = testing::low_shell_q(*modes, 0.2, 2);
    const auto u0 = rnd(modes, 5, 0.5);
    SweepConfig sc;
    sc.epsilons = {0.4, 0.2, 0.0};
    sc.T = 1.0;
    sc.replicates = 4;
    sc.bootstrap = 20;
    SUBCASE("without the nonlinearity epsilon is irrelevant") {
        sc.mollify_initial = false;
        const auto rep = epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc);
        REQUIRE(rep.rows.size() == 3);
        for (const auto& row : rep.rows) CHECK(row.distance == 0.0);
        CHECK(rep.rows.back().epsilon == 0.0);
        CHECK(rep.noise_floor > 0.0);
    }
    SUBCASE("full dynamics produce a table with intervals") {
        spec.nonlinear = true;
        const auto rep = epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc);
        REQUIRE(rep.rows.size() == 3);
        for (const auto& row : rep.rows) {
            CHECK(row.ci_low <= row.distance);
            CHECK(row.distance <= row.ci_high);
            CHECK(row.feature_means.size() == 2);
        }
        CHECK(rep.noise_floor_ci_low <= rep.noise_floor_ci_high);
        const auto again = epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc);
        CHECK(again.rows[0].distance == rep.rows[0].distance);
    }
    SUBCASE("list validation") {
        sc.epsilons = {0.2, 0.4, 0.0};
        CHECK_THROWS_AS(epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc), std::invalid_argument);
        sc.epsilons = {0.4, 0.2};
        CHECK_THROWS_AS(epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc), std::invalid_argument);
        sc.epsilons = {50.0, 0.0};
        CHECK_THROWS_AS(epsilon_sweep(spec, stepper(0.05, 0.1), u0, 0, sc), std::invalid_argument);
    }
}
