#include <doctest.h>

#include <cmath>

#include "snslab/integrator.hpp"
#include "snslab/stats.hpp"
#include "test_support.hpp"

using namespace snslab;

namespace {

SpectralState rnd(const ModeSetPtr& modes, std::uint32_t s) {
    RandomStream rng(21, s, Substream::initial);
    return random_state(modes, rng);
}

StepperConfig coarse(double dt = 0.1) {
    StepperConfig c;
    c.dt = dt;
    c.sample_interval = dt;
    return c;
}

}  // namespace

TEST_CASE("deterministic linear decay is exact") {
    auto spec = testing::quiet_spec(2, 0.7);
    const Dynamics dyn(spec);
    const auto u0 = rnd(dyn.modes(), 1);
    const auto rec = simulate_path(dyn, coarse(), u0, 0, 1.0, 1, 0);
    REQUIRE(rec.samples.size() == 11);
    for (const auto& s : rec.samples) {
        double expected = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i) {
            const double k2 = dyn.modes()->k2(i);
            expected += std::exp(-2.0 * 0.7 * k2 * s.t) *
                        (std::norm(u0[i][0]) + std::norm(u0[i][1]) + std::norm(u0[i][2]));
        }
        CHECK(std::abs(s.energy - expected) <= 1e-10 * expected);
    }
    SUBCASE("lowest shell decays at exactly nu lambda_1") {
        const auto u = testing::single_pair(dyn.modes(), {0, 0, 1}, {cplx(1.0, 0.5), cplx(-0.3), cplx(0.0)});
        const auto r = simulate_path(dyn, coarse(), u, 0, 2.0, 1, 0);
        for (const auto& s : r.samples)
            CHECK(std::abs(s.energy - std::exp(-2.0 * 0.7 * s.t) * h_norm2(u)) <= 1e-10 * h_norm2(u));
    }
    SUBCASE("energy ledger closes") {
        for (double res : energy_ledger_residual(rec, 0.7)) CHECK(std::abs(res) <= 1e-10 * h_norm2(u0));
    }
}

TEST_CASE("forcing fixed point") {
    auto spec = testing::quiet_spec(2, 0.5);
    const auto f = testing::single_pair(spec.forcing.mode_set(), {1, 1, 0}, {cplx(1.0), cplx(-1.0), cplx(0.0, 0.5)});
    spec.forcing = f;
    const Dynamics dyn(spec);
    CHECK(dyn.forcing_level() == doctest::Approx(v_dual_norm2(f)));
    const auto u_star = (1.0 / (0.5 * 2.0)) * f;
    const auto rec = simulate_path(dyn, coarse(), u_star, 0, 1.0, 1, 0);
    for (const auto& s : rec.samples) CHECK(std::abs(s.energy - h_norm2(u_star)) <= 1e-10 * h_norm2(u_star));
    CHECK(h_norm(step(dyn, u_star, 0, 0.37, std::vector<double>(standard_dimension(*dyn.modes()), 0.0)) - u_star) <=
          1e-12 * h_norm(u_star));
}

TEST_CASE("zero data, zero noise and zero forcing stay at zero") {
    const Dynamics dyn(testing::quiet_spec(2, 1.0, true));
    const auto rec = simulate_path(dyn, coarse(0.05), SpectralState(dyn.modes()), 0, 1.0, 3, 0);
    for (const auto& s : rec.samples) CHECK(s.energy == 0.0);
    CHECK_FALSE(rec.blew_up);
}

TEST_CASE("paths are deterministic functions of (seed, path index)") {
    auto spec = testing::quiet_spec(2, 1.0, true, 0.2);
    spec.q.q = testing::low_shell_q(*spec.forcing.mode_set(), 0.2, 2);
    const Dynamics dyn(spec);
    const auto u0 = rnd(dyn.modes(), 2);
    StepperConfig cfg;
    cfg.dt = 0.01;
    const auto a = simulate_path(dyn, cfg, u0, 0, 0.5, 9, 4);
    const auto b = simulate_path(dyn, cfg, u0, 0, 0.5, 9, 4);
    const auto c = simulate_path(dyn, cfg, u0, 0, 0.5, 9, 5);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].energy == b.samples[i].energy);
    CHECK(a.noise_digest == b.noise_digest);
    CHECK(a.noise_digest != c.noise_digest);
    CHECK(a.samples.back().energy != c.samples.back().energy);
}

TEST_CASE("synchronous coupling") {
    auto spec = testing::quiet_spec(2, 1.0, true, 0.2);
    auto modes = spec.forcing.mode_set();
    spec.q.q = testing::low_shell_q(*modes, 0.2, 2);
    Eigen::MatrixXd rates(2, 2);
    rates << 0.0, 2.0, 1.0, 0.0;
    spec.chain = Generator(rates);
    spec.sigma.gains.assign(2, std::vector<double>(modes->size(), 1.0));
    for (double& g : spec.sigma.gains[1]) g = 0.5;
    const auto g0 = testing::single_pair(modes, {0, 1, 0}, {cplx(0.2), cplx(0.0), cplx(0.1)});
    spec.jumps = JumpSpec{{1.5}, {{g0}, {-1.0 * g0}}};
    const Dynamics dyn(spec);
    StepperConfig cfg;
    cfg.dt = 0.01;
    const auto u0 = rnd(modes, 3), v0 = rnd(modes, 4);

    SUBCASE("identical data give identical legs") {
        const auto [a, b] = simulate_coupled_pair(dyn, cfg, u0, u0, 0, 0, 1.0, 5, 0);
        for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].energy == b.samples[i].energy);
    }
    SUBCASE("distinct data share every noise realization") {
        const auto [a, b] = simulate_coupled_pair(dyn, cfg, u0, v0, 0, 0, 1.0, 5, 0);
        CHECK(a.noise_digest == b.noise_digest);
        REQUIRE(a.transcript.size() == b.transcript.size());
        for (std::size_t i = 0; i < a.transcript.size(); ++i) CHECK(a.transcript[i].time == b.transcript[i].time);
        CHECK(a.chain.jump_times() == b.chain.jump_times());
        CHECK(a.chain.states() == b.chain.states());
        CHECK(a.jumps.size() == b.jumps.size());
        CHECK(a.samples.back().energy != b.samples.back().energy);
    }
    SUBCASE("distinct initial regimes coalesce under shared switching atoms") {
        const auto [a, b] = simulate_coupled_pair(dyn, cfg, u0, u0, 0, 1, 5.0, 7, 0);
        bool met = false;
        for (const auto& s : a.samples) {
            const bool same = a.chain.at(s.t) == b.chain.at(s.t);
            if (met) CHECK(same);
            met = met || same;
        }
        CHECK(met);
    }
    SUBCASE("regimes switch and jumps follow the left-limit regime") {
        const auto rec = simulate_path(dyn, cfg, u0, 0, 5.0, 6, 0);
        CHECK(rec.chain.jump_count() > 0);
        CHECK_FALSE(rec.jumps.empty());
        double total = 0.0;
        for (const auto& j : rec.jumps) {
            CHECK(j.regime == rec.chain.before(j.time));
            total += j.energy_change;
        }
        CHECK(rec.samples.back().ledger.jump_sum == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("difference of two linear solutions contracts exactly") {
    auto spec = testing::quiet_spec(2, 0.8);
    auto modes = spec.forcing.mode_set();
    spec.q.q = testing::low_shell_q(*modes, 0.3, 3);
    const Dynamics dyn(spec);
    const auto w0 = testing::single_pair(modes, {1, 0, 0}, {cplx(0.0), cplx(1.0), cplx(0.5, 0.5)});
    const auto u0 = rnd(modes, 7);
    StepperConfig cfg = coarse(0.05);
    const auto [a, b] = simulate_coupled_pair(dyn, cfg, u0 + w0, u0, 0, 0, 1.0, 2, 0);
    REQUIRE(a.states.empty());
    cfg.store_states = true;
    const auto [sa, sb] = simulate_coupled_pair(dyn, cfg, u0 + w0, u0, 0, 0, 1.0, 2, 0);
    for (std::size_t i = 0; i < sa.states.size(); ++i) {
        const double t = sa.samples[i].t;
        CHECK(std::abs(h_norm2(sa.states[i] - sb.states[i]) - std::exp(-1.6 * t) * h_norm2(w0)) <= 1e-10);
    }
}

TEST_CASE("Ornstein-Uhlenbeck variance is exact in law") {
    auto spec = testing::quiet_spec(1, 1.0);
    auto modes = spec.forcing.mode_set();
    spec.q.q.assign(modes->size(), 0.4);
    const Dynamics dyn(spec);
    const double T = 0.6;
    const int n = 600;
    std::vector<double> e(n);
    for (int p = 0; p < n; ++p)
        e[p] = simulate_path(dyn, coarse(0.2), SpectralState(modes), 0, T, 8, static_cast<std::uint32_t>(p))
                   .samples.back()
                   .energy;
    double expected = 0.0;
    for (std::size_t i = 0; i < modes->size(); ++i) {
        const double k2 = modes->k2(i);
        expected += 0.4 * (1.0 - std::exp(-2.0 * k2 * T)) / (2.0 * k2);
    }
    const auto ms = stats::mean_se(e);
    CHECK(std::abs(ms.mean - expected) <= 3.0 * ms.se);
}

TEST_CASE("pure-jump ledger") {
    auto spec = testing::quiet_spec(2, 1.0);
    auto modes = spec.forcing.mode_set();
    const auto g0 = testing::single_pair(modes, {1, 1, 0}, {cplx(0.3), cplx(-0.3), cplx(0.1)});
    const auto g1 = testing::single_pair(modes, {0, 0, 2}, {cplx(0.0, 0.2), cplx(0.1), cplx(0.0)});
    spec.jumps = JumpSpec{{2.0, 1.0}, {{g0, g1}}};
    const Dynamics dyn(spec);
    StepperConfig cfg = coarse(0.05);
    cfg.store_states = true;
    const auto rec = simulate_path(dyn, cfg, rnd(modes, 12), 0, 3.0, 13, 0);
    REQUIRE(rec.jumps.size() > 3);
    double total = 0.0;
    for (const auto& j : rec.jumps) total += j.energy_change;
    const auto& l = rec.samples.back().ledger;
    CHECK(l.jump_sum == total);
    CHECK(l.quadratic_variation == 0.0);
    CHECK(l.m1 == 0.0);
    CHECK(l.jump_p2_integral == doctest::Approx(3.0 * (2.0 * h_norm2(g0) + h_norm2(g1))));
    for (const auto& u : rec.states) {
        CHECK(u.is_incompressible(1e-12));
        CHECK(u.is_real());
    }
}

TEST_CASE("energy ledger residual shrinks under refinement") {
    auto spec = testing::quiet_spec(2, 1.0, true, 0.2);
    auto modes = spec.forcing.mode_set();
    spec.q.q = testing::low_shell_q(*modes, 0.2, 2);
    spec.forcing = testing::single_pair(modes, {1, 1, 0}, {cplx(0.5), cplx(-0.5), cplx(0.0)});
    const Dynamics dyn(spec);
    const auto u0 = rnd(modes, 9);
    double prev = 0.0;
    for (double dt : {0.04, 0.01, 0.0025}) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.sample_interval = 0.2;
        cfg.noise_resolution = 0.0025;
        double acc = 0.0;
        for (std::uint32_t p = 0; p < 8; ++p) {
            const auto res = energy_ledger_residual(simulate_path(dyn, cfg, u0, 0, 1.0, 10, p), 1.0);
            acc += std::abs(res.back());
        }
        if (prev > 0.0) CHECK(acc < 0.6 * prev);
        prev = acc;
    }
}

TEST_CASE("blow-up detection and input checks") {
    auto spec = testing::quiet_spec(2, 1.0);
    const Dynamics dyn(spec);
    const auto u0 = rnd(dyn.modes(), 11);
    StepperConfig cfg = coarse();
    cfg.blowup_threshold = 0.01 * h_norm2(u0);
    const auto rec = simulate_path(dyn, cfg, u0, 0, 1.0, 1, 0);
    CHECK(rec.blew_up);
    CHECK_FALSE(rec.diagnostic.empty());
    CHECK(rec.horizon() < 1.0);

    CHECK_THROWS_AS(simulate_path(dyn, coarse(0.3), u0, 0, 1.0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_path(dyn, coarse(), u0, 1, 1.0, 1, 0), std::invalid_argument);
    StepperConfig odd = coarse(0.1);
    odd.sample_interval = 0.15;
    CHECK_THROWS_AS(simulate_path(dyn, odd, u0, 0, 1.0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_path(dyn, coarse(), rnd(ModeSet::make(3), 1), 0, 1.0, 1, 0), std::invalid_argument);
    auto bad = testing::quiet_spec(2, 0.0);
    CHECK_THROWS_AS(Dynamics{bad}, std::invalid_argument);
    CHECK_THROWS_AS(step(dyn, u0, 2, 0.1, std::vector<double>(standard_dimension(*dyn.modes()), 0.0)),
                    std::invalid_argument);
}
