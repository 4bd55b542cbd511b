#include <doctest.h>

#include <cmath>

#include "snslab/chain.hpp"
#include "snslab/noise.hpp"
#include "test_support.hpp"

using namespace snslab;

namespace {

SpectralState unit_pair(const ModeSetPtr& modes) {
    // |u|^2 = 2 * (1/2) = 1
    return testing::single_pair(modes, {1, 0, 0}, {cplx(0.0), cplx(std::sqrt(0.5)), cplx(0.0)});
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vector") {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
    const auto ff = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ff[0] == 0x408f276du);
    CHECK(ff[1] == 0x41c83b0eu);
    CHECK(ff[2] == 0xa20bc7c6u);
    CHECK(ff[3] == 0x6d5451fdu);
}

TEST_CASE("counter streams are reproducible and separated") {
    RandomStream a(5, 3, Substream::wiener), b(5, 3, Substream::wiener), c(5, 3, Substream::jumps),
        d(5, 4, Substream::wiener);
    bool differ_c = false, differ_d = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a.bits();
        CHECK(x == b.bits());
        differ_c |= x != c.bits();
        differ_d |= x != d.bits();
    }
    CHECK(differ_c);
    CHECK(differ_d);
}

TEST_CASE("Hypotheses A certificate") {
    auto modes = ModeSet::make(2);
    SUBCASE("zero noise gives K = 0") {
        RegimeDiffusion d{{std::vector<double>(modes->size(), 1.0)}};
        const auto r = verify_hypotheses_A(d, QWienerSpec::zero(*modes), JumpSpec{});
        CHECK(r.K == 0.0);
        CHECK(r.per_regime.size() == 1);
    }
    SUBCASE("one unit mark of weight 0.3") {
        RegimeDiffusion d{{std::vector<double>(modes->size(), 1.0)}};
        JumpSpec j{{0.3}, {{unit_pair(modes)}}};
        const auto r = verify_hypotheses_A(d, QWienerSpec::zero(*modes), j);
        CHECK(r.per_regime[0].g_p1 == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(r.per_regime[0].g_p2 == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(r.per_regime[0].g_p4 == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(r.K == doctest::Approx(0.3).epsilon(1e-15));
    }
    SUBCASE("lowest shell with q = 0.1 and unit gains") {
        RegimeDiffusion d{{std::vector<double>(modes->size(), 1.0)}};
        QWienerSpec q{testing::low_shell_q(*modes, 0.1, 1)};
        const auto r = verify_hypotheses_A(d, q, JumpSpec{});
        CHECK(r.K == doctest::Approx(0.6).epsilon(1e-14));
        CHECK(q.trace() == doctest::Approx(0.6).epsilon(1e-14));
    }
    SUBCASE("maximum over regimes") {
        RegimeDiffusion d{{std::vector<double>(modes->size(), 1.0), std::vector<double>(modes->size(), 2.0)}};
        QWienerSpec q{testing::low_shell_q(*modes, 0.1, 1)};
        const auto r = verify_hypotheses_A(d, q, JumpSpec{});
        CHECK(r.per_regime[1].sigma_lq2 == doctest::Approx(2.4));
        CHECK(r.K == doctest::Approx(2.4));
    }
    SUBCASE("invalid inputs") {
        RegimeDiffusion d{{std::vector<double>(modes->size(), 1.0)}};
        auto q = QWienerSpec::zero(*modes);
        q.q[0] = -1.0;
        CHECK_THROWS_AS(verify_hypotheses_A(d, q, JumpSpec{}), std::invalid_argument);
        JumpSpec bad_weight{{0.0}, {{unit_pair(modes)}}};
        CHECK_THROWS_AS(verify_hypotheses_A(d, QWienerSpec::zero(*modes), bad_weight), std::invalid_argument);
        SpectralState comp(modes);
        comp.set_pair({1, 0, 0}, {cplx(1.0), cplx(0.0), cplx(0.0)});
        JumpSpec compressible{{1.0}, {{comp}}};
        CHECK_THROWS_AS(verify_hypotheses_A(d, QWienerSpec::zero(*modes), compressible), std::invalid_argument);
    }
}

TEST_CASE("Q-Wiener increments") {
    auto modes = ModeSet::make(2);
    QWienerSpec q{testing::low_shell_q(*modes, 0.25, 2)};
    const double dt = 0.05;
    SUBCASE("shape") {
        RandomStream rng(1, 0, Substream::wiener);
        const auto w = sample_wiener_increment(q, modes, dt, rng);
        CHECK(w.is_incompressible());
        CHECK(w.is_real());
        for (std::size_t i = 0; i < modes->size(); ++i)
            if (q.q[i] == 0.0) CHECK(w[i] == Vec3c{});
        CHECK(sample_wiener_increment(QWienerSpec::zero(*modes), modes, dt, rng).is_zero());
        CHECK_THROWS_AS(sample_wiener_increment(q, modes, 0.0, rng), std::invalid_argument);
    }
    SUBCASE("Ito isometry and independence of disjoint increments") {
        const int n = 4000;
        std::vector<double> sq(n), cross(n);
        for (int p = 0; p < n; ++p) {
            RandomStream rng(2, static_cast<std::uint32_t>(p), Substream::wiener);
            const auto a = sample_wiener_increment(q, modes, dt, rng);
            const auto b = sample_wiener_increment(q, modes, dt, rng);
            sq[p] = h_norm2(a);
            cross[p] = inner(a, b);
        }
        const double expected = q.trace() * dt;
        double var = 0.0, cvar = 0.0;
        const double m = testing::mean(sq), c = testing::mean(cross);
        for (int p = 0; p < n; ++p) {
            var += (sq[p] - m) * (sq[p] - m);
            cvar += cross[p] * cross[p];
        }
        CHECK(std::abs(m - expected) <= 3.0 * std::sqrt(var / (n - 1.0) / n));
        CHECK(std::abs(c) <= 3.0 * std::sqrt(cvar / (n - 1.0) / n));
    }
}

TEST_CASE("compensated jumps") {
    auto modes = ModeSet::make(2);
    const auto g0 = unit_pair(modes);
    auto g1 = 2.0 * g0;
    JumpSpec j{{0.7, 0.5}, {{g0, g1}}};
    ChainPath frozen(0, 10.0);
    const double t0 = 0.0, t1 = 2.0;
    SUBCASE("counts, compensator and compensated mean and variance") {
        const int n = 4000;
        std::vector<double> count(n), proj(n);
        for (int p = 0; p < n; ++p) {
            RandomStream rng(3, static_cast<std::uint32_t>(p), Substream::jumps);
            const auto s = sample_jumps(j, frozen, t0, t1, modes, rng);
            count[p] = double(s.jumps.size());
            auto total = -1.0 * s.compensator;
            for (const auto& jump : s.jumps) total += jump.value;
            proj[p] = inner(total, g0);
            if (p == 0) {
                const auto c = j.compensator_drift(0, modes);
                CHECK(h_norm(s.compensator - (t1 - t0) * c) < 1e-14);
            }
        }
        const double rate = j.total_rate() * (t1 - t0);
        CHECK(std::abs(testing::mean(count) - rate) <= 3.0 * std::sqrt(rate / n));
        // <Z, g0> with Z compensated: mean 0, variance (t1 - t0) sum_j w_j <g_j, g0>^2
        const double var = (t1 - t0) * (0.7 * 1.0 + 0.5 * 4.0);
        const double m = testing::mean(proj);
        CHECK(std::abs(m) <= 3.0 * std::sqrt(var / n));
        double v = 0.0;
        for (double x : proj) v += (x - m) * (x - m);
        v /= n - 1.0;
        // variance of the sample variance for a compound Poisson sum ~ (mu4 + 2 var^2) / n
        const double mu4 = (t1 - t0) * (0.7 * 1.0 + 0.5 * 16.0) + 3.0 * var * var;
        CHECK(std::abs(v - var) <= 3.0 * std::sqrt((mu4 - var * var) / n));
    }
    SUBCASE("jump vectors follow the regime at the left limit") {
        JumpSpec two{{1.0}, {{g0}, {g1}}};
        ChainPath path(0, 10.0);
        path.push(1.0, 1);
        RandomStream rng(4, 0, Substream::jumps);
        const auto s = sample_jumps(two, path, 0.0, 2.0, modes, rng);
        for (const auto& jump : s.jumps) {
            CHECK(jump.regime == (jump.time < 1.0 ? 0 : 1));
            CHECK(jump.value == (jump.regime == 0 ? g0 : g1));
        }
        CHECK(h_norm(s.compensator - (1.0 * g0 + 1.0 * g1)) < 1e-14);
    }
    SUBCASE("degenerate inputs") {
        RandomStream rng(5, 0, Substream::jumps);
        const auto none = sample_jumps(JumpSpec{}, frozen, 0.0, 1.0, modes, rng);
        CHECK(none.jumps.empty());
        CHECK(none.compensator.is_zero());
        JumpSpec empty_marks{{0.5}, {}};
        CHECK_THROWS_AS(sample_jumps(empty_marks, frozen, 0.0, 1.0, modes, rng), std::invalid_argument);
        CHECK_THROWS_AS(sample_jumps(j, frozen, 1.0, 1.0, modes, rng), std::invalid_argument);
    }
}

TEST_CASE("random states") {
    auto modes = ModeSet::make(3);
    RandomStream rng(6, 0, Substream::initial);
    const auto u = random_state(modes, rng, 1.5);
    CHECK(u.is_incompressible());
    CHECK(u.is_real());
    CHECK(h_norm(u) > 0.0);
}
