#include "snslab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snslab/chain.hpp"

namespace snslab {

double QWienerSpec::trace() const {
    double s = 0.0;
    for (double v : q) s += v;
    return s;
}

double RegimeDiffusion::lq_norm2(std::size_t regime, const QWienerSpec& q) const {
    const auto& g = gains.at(regime);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * g[k] * q.q[k];
    return s;
}

double JumpSpec::total_rate() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

SpectralState JumpSpec::compensator_drift(std::size_t regime, ModeSetPtr modes) const {
    SpectralState c(std::move(modes));
    if (marks() == 0) return c;
    for (std::size_t j = 0; j < marks(); ++j) c.axpy(weights[j], g.at(regime).at(j));
    return c;
}

double JumpSpec::moment(std::size_t regime, int p) const {
    double s = 0.0;
    for (std::size_t j = 0; j < marks(); ++j) {
        const double n2 = h_norm2(g.at(regime).at(j));
        const double np = p == 1 ? std::sqrt(n2) : (p == 2 ? n2 : (p == 4 ? n2 * n2 : std::pow(n2, 0.5 * p)));
        s += np * weights[j];
    }
    return s;
}

HypothesesAReport verify_hypotheses_A(const RegimeDiffusion& d, const QWienerSpec& q, const JumpSpec& j) {
    for (double v : q.q)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("Q weights must be finite and nonnegative");
    for (double w : j.weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("mark weights must be finite and positive");
    const std::size_t m = std::max(d.regimes(), j.g.size());
    if (j.marks() > 0 && j.g.size() != m)
        throw std::invalid_argument("jump vectors must be given for every regime");
    for (const auto& row : j.g) {
        if (row.size() != j.marks()) throw std::invalid_argument("jump vectors must be given for every mark");
        for (const auto& gv : row)
            if (!gv.is_incompressible()) throw std::invalid_argument("jump vector is not divergence-free");
    }
    HypothesesAReport report;
    report.per_regime.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto& r = report.per_regime[i];
        if (i < d.regimes()) r.sigma_lq2 = d.lq_norm2(i, q);
        if (j.marks() > 0) {
            r.g_p1 = j.moment(i, 1);
            r.g_p2 = j.moment(i, 2);
            r.g_p4 = j.moment(i, 4);
        }
        report.K = std::max({report.K, r.sigma_lq2, r.g_p1, r.g_p2, r.g_p4});
    }
    return report;
}

// ---------------------------------------------------------------------------

void wiener_from_standard(const QWienerSpec& q, std::span<const double> z, SpectralState& out) {
    const auto& modes = out.modes();
    const auto& reps = modes.representatives();
    if (z.size() != 4 * reps.size())
        throw std::invalid_argument("wiener_from_standard: wrong number of standard increments");
    for (std::size_t p = 0; p < reps.size(); ++p) {
        const std::size_t i = reps[p];
        const double amp = std::sqrt(q.q[i] / 4.0);
        const auto& pol = modes.polarization(i);
        const cplx a(z[4 * p + 0], z[4 * p + 1]);
        const cplx b(z[4 * p + 2], z[4 * p + 3]);
        Vec3c v;
        for (int c = 0; c < 3; ++c) v[c] = amp * (pol[0][c] * a + pol[1][c] * b);
        out[i] = v;
        auto& neg = out[modes.negated(i)];
        for (int c = 0; c < 3; ++c) neg[c] = std::conj(v[c]);
    }
}

SpectralState sample_wiener_increment(const QWienerSpec& q, ModeSetPtr modes, double dt, RandomStream& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_wiener_increment: dt must be positive");
    SpectralState out(modes);
    std::vector<double> z(standard_dimension(*modes));
    const double s = std::sqrt(dt);
    for (auto& v : z) v = s * rng.normal();
    wiener_from_standard(q, z, out);
    leray_project_in_place(out);
    return out;
}

std::vector<JumpAtom> sample_jump_atoms(const JumpSpec& j, double t0, double t1, RandomStream& rng) {
    std::vector<JumpAtom> atoms;
    const double rate = j.total_rate();
    if (rate <= 0.0 || t1 <= t0) return atoms;
    const long n = rng.poisson(rate * (t1 - t0));
    atoms.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) atoms.push_back({rng.uniform(t0, t1), 0});
    std::sort(atoms.begin(), atoms.end(), [](const JumpAtom& a, const JumpAtom& b) { return a.time < b.time; });
    for (auto& a : atoms) {
        double u = rng.uniform() * rate;
        a.mark = j.marks() - 1;
        for (std::size_t m = 0; m < j.marks(); ++m) {
            u -= j.weights[m];
            if (u < 0.0) {
                a.mark = m;
                break;
            }
        }
    }
    return atoms;
}

JumpSample sample_jumps(const JumpSpec& j, const ChainPath& regimes, double t0, double t1, ModeSetPtr modes,
                        RandomStream& rng) {
    if (!(t1 > t0)) throw std::invalid_argument("sample_jumps: dt must be positive");
    if (j.total_rate() > 0.0 && j.g.empty())
        throw std::invalid_argument("sample_jumps: empty mark set with positive mass");
    JumpSample out;
    out.compensator = SpectralState(modes);
    for (const auto& a : sample_jump_atoms(j, t0, t1, rng)) {
        const int r = regimes.before(a.time);
        out.jumps.push_back({a.time, a.mark, r, j.g.at(r).at(a.mark)});
    }
    if (j.marks() == 0) return out;
    // integrate the regime-dependent drift along the step path
    double t = t0;
    int r = regimes.at(t0);
    for (std::size_t k = 0; k < regimes.jump_times().size(); ++k) {
        const double s = regimes.jump_times()[k];
        if (s <= t0) continue;
        if (s >= t1) break;
        out.compensator.axpy(s - t, j.compensator_drift(r, modes));
        t = s;
        r = regimes.states()[k];
    }
    out.compensator.axpy(t1 - t, j.compensator_drift(r, modes));
    return out;
}

SpectralState random_state(ModeSetPtr modes, RandomStream& rng, double slope) {
    SpectralState u(modes);
    for (std::size_t i : modes->representatives()) {
        const double amp = std::pow(modes->k2(i), -0.5 * slope);
        Vec3c v;
        for (auto& c : v) c = amp * cplx(rng.normal(), rng.normal());
        u[i] = v;
    }
    enforce_reality(u);
    leray_project_in_place(u);
    return u;
}

}  // namespace snslab
