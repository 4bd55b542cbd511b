#include <doctest.h>

#include <cmath>

#include "snslab/galerkin.hpp"
#include "snslab/noise.hpp"
#include "test_support.hpp"

using namespace snslab;

namespace {

/// Mean of |u(x)|^2 over a uniform grid fine enough to integrate the product exactly.
double grid_l2(const SpectralState& u) {
    const int n = u.modes().cutoff();
    const int m = 2 * n + 2;
    double acc = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                const double x = 2 * M_PI * a / m, y = 2 * M_PI * b / m, z = 2 * M_PI * c / m;
                cplx v[3] = {0.0, 0.0, 0.0};
                for (std::size_t i = 0; i < u.size(); ++i) {
                    const auto& k = u.modes()[i];
                    const cplx e = std::polar(1.0, k.x * x + k.y * y + k.z * z);
                    for (int d = 0; d < 3; ++d) v[d] += u[i][d] * e;
                }
                for (auto& d : v) {
                    CHECK(std::abs(d.imag()) < 1e-10);
                    acc += std::norm(d);
                }
            }
    return acc / double(m * m * m);
}

}  // namespace

TEST_CASE("mode set is ordered, closed under negation and excludes zero") {
    auto modes = ModeSet::make(2);
    CHECK(modes->size() == 124);
    for (std::size_t i = 0; i < modes->size(); ++i) {
        const auto& k = (*modes)[i];
        CHECK(k.norm2() > 0);
        CHECK((*modes)[modes->negated(i)] == -k);
        CHECK(modes->find(k) == i);
        if (i > 0) CHECK((*modes)[i - 1] < k);
    }
    CHECK_FALSE(modes->find({0, 0, 0}));
    CHECK_FALSE(modes->find({3, 0, 0}));
    CHECK(modes->representatives().size() == 62);
    CHECK_THROWS_AS(ModeSet::make(0), std::invalid_argument);
}

TEST_CASE("polarization vectors are orthonormal and perpendicular to k") {
    auto modes = ModeSet::make(3);
    for (std::size_t i = 0; i < modes->size(); ++i) {
        const auto& k = (*modes)[i];
        const auto& p = modes->polarization(i);
        for (int a = 0; a < 2; ++a) {
            CHECK(p[a][0] * k.x + p[a][1] * k.y + p[a][2] * k.z == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(p[a][0] * p[a][0] + p[a][1] * p[a][1] + p[a][2] * p[a][2] == doctest::Approx(1.0));
        }
        CHECK(p[0][0] * p[1][0] + p[0][1] * p[1][1] + p[0][2] * p[1][2] == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("norms of a single lowest-shell pair") {
    auto modes = ModeSet::make(2);
    SpectralState u(modes);
    u.set_pair({1, 0, 0}, {cplx(0.0), cplx(1.0), cplx(0.0)});
    CHECK(h_norm(u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(v_norm(u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(v_dual_norm(u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    SpectralState zero(modes);
    CHECK(h_norm(zero) == 0.0);
    CHECK(v_norm(zero) == 0.0);
    CHECK(v_dual_norm(zero) == 0.0);
}

TEST_CASE("h_norm matches physical-space grid quadrature") {
    for (int n : {1, 2, 3}) {
        auto modes = ModeSet::make(n);
        RandomStream rng(11, static_cast<std::uint32_t>(n), Substream::sampling);
        const auto u = random_state(modes, rng);
        const double exact = grid_l2(u);
        CHECK(std::abs(h_norm2(u) - exact) <= 1e-10 * exact);
    }
}

TEST_CASE("Poincare inequality with equality on the lowest shell") {
    auto modes = ModeSet::make(3);
    const double lambda1 = StokesSurrogate(*modes).lambda1();
    CHECK(lambda1 == 1.0);
    for (std::uint32_t s = 0; s < 100; ++s) {
        RandomStream rng(5, s, Substream::sampling);
        const auto u = random_state(modes, rng);
        CHECK(lambda1 * h_norm2(u) <= v_norm2(u));
    }
    SpectralState low(modes);
    low.set_pair({0, 1, 0}, {cplx(0.3, 0.1), cplx(0.0), cplx(-0.2, 0.5)});
    low.set_pair({0, 0, -1}, {cplx(1.0, 2.0), cplx(-0.5), cplx(0.0)});
    CHECK(lambda1 * h_norm2(low) == v_norm2(low));
}

TEST_CASE("Stokes eigenvalues are nondecreasing along the shell order") {
    auto modes = ModeSet::make(3);
    StokesSurrogate a(*modes);
    const auto& order = a.shell_order();
    for (std::size_t i = 1; i < order.size(); ++i)
        CHECK(a.eigenvalues()[order[i - 1]] <= a.eigenvalues()[order[i]]);
}

TEST_CASE("duality bound and its maximizer") {
    auto modes = ModeSet::make(2);
    RandomStream rng(3, 0, Substream::sampling);
    const auto f = random_state(modes, rng, 0.0);
    for (std::uint32_t s = 0; s < 100; ++s) {
        RandomStream r(3, s + 1, Substream::sampling);
        const auto u = random_state(modes, r);
        CHECK(std::abs(inner(f, u)) <= v_dual_norm(f) * v_norm(u) * (1 + 1e-14));
    }
    SpectralState best(modes);
    for (std::size_t i = 0; i < modes->size(); ++i)
        for (int c = 0; c < 3; ++c) best[i][c] = f[i][c] / modes->k2(i);
    best *= 1.0 / v_norm(best);
    CHECK(inner(f, best) == doctest::Approx(v_dual_norm(f)).epsilon(1e-13));
}

TEST_CASE("Leray projection") {
    auto modes = ModeSet::make(2);
    SUBCASE("idempotent bit for bit and a contraction") {
        for (std::uint32_t s = 0; s < 20; ++s) {
            RandomStream rng(9, s, Substream::sampling);
            SpectralState raw(modes);
            for (std::size_t i : modes->representatives()) {
                Vec3c v;
                for (auto& c : v) c = cplx(rng.normal(), rng.normal());
                raw[i] = v;
            }
            enforce_reality(raw);
            const auto p = leray_project(raw);
            CHECK(p.is_incompressible());
            CHECK(p.is_real());
            CHECK(h_norm(p) <= h_norm(raw));
            CHECK(leray_project(p) == p);
        }
    }
    SUBCASE("divergence-free input is unchanged") {
        RandomStream rng(2, 0, Substream::sampling);
        const auto u = random_state(modes, rng);
        const auto p = leray_project(u);
        CHECK(h_norm(p - u) <= 1e-14 * h_norm(u));
    }
    SUBCASE("gradients are removed") {
        SpectralState g(modes);
        g.set_pair({1, 2, -1}, {cplx(0.0, 1.0), cplx(0.0, 2.0), cplx(0.0, -1.0)});
        CHECK(h_norm(leray_project(g)) < 1e-15);
    }
    SUBCASE("reality violation is rejected") {
        SpectralState bad(modes);
        bad[0] = {cplx(1.0), cplx(0.0), cplx(0.0)};
        CHECK_THROWS_AS(leray_project(bad), std::invalid_argument);
    }
}

TEST_CASE("serialization round-trips bit for bit") {
    auto modes = ModeSet::make(2);
    RandomStream rng(4, 0, Substream::sampling);
    const auto u = random_state(modes, rng);
    const auto back = deserialize_state(serialize(u));
    CHECK(back == u);
    CHECK(serialize(back) == serialize(u));
}

TEST_CASE("arithmetic rejects mismatched mode sets") {
    SpectralState a(ModeSet::make(2)), b(ModeSet::make(3));
    CHECK_THROWS_AS(a += b, std::invalid_argument);
    CHECK_THROWS_AS(inner(a, b), std::invalid_argument);
}
