#include "snslab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "snslab/noise.hpp"

namespace snslab {

namespace {
// fftw planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_incompressible(const SpectralState& s, const char* what) {
    if (!s.is_incompressible(1e-10))
        throw std::invalid_argument(std::string(what) + ": input is not divergence-free");
}
}  // namespace

struct NonlinearityEngine::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Plans(int m) {
        std::vector<cplx> scratch(static_cast<std::size_t>(m) * m * m);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft_3d(m, m, m, p, p, FFTW_FORWARD, flags);
        backward = fftw_plan_dft_3d(m, m, m, p, p, FFTW_BACKWARD, flags);
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

NonlinearityEngine::NonlinearityEngine(ModeSetPtr modes) : modes_(std::move(modes)) {
    grid_ = 3 * modes_->cutoff() + 1;
    const int m = grid_;
    auto wrap = [m](int k) { return static_cast<std::size_t>((k % m + m) % m); };
    grid_index_.resize(modes_->size());
    for (std::size_t i = 0; i < modes_->size(); ++i) {
        const auto& k = (*modes_)[i];
        grid_index_[i] = (wrap(k.x) * m + wrap(k.y)) * m + wrap(k.z);
    }
    plans_ = std::make_shared<Plans>(m);
}

NonlinearityEngine::Workspace NonlinearityEngine::make_workspace() const {
    const std::size_t cells = static_cast<std::size_t>(grid_) * grid_ * grid_;
    return {std::vector<cplx>(3 * cells), std::vector<cplx>(cells), std::vector<cplx>(3 * cells)};
}

std::vector<Vec3c> NonlinearityEngine::advection(const SpectralState& u, const SpectralState& v,
                                                 ConvolutionPath path) const {
    if (path == ConvolutionPath::automatic)
        path = modes_->cutoff() <= 4 ? ConvolutionPath::direct : ConvolutionPath::transform;
    if (path == ConvolutionPath::direct) return advection_direct(u, v);
    auto ws = make_workspace();
    return advection(u, v, ws);
}

std::vector<Vec3c> NonlinearityEngine::advection_direct(const SpectralState& u,
                                                        const SpectralState& v) const {
    const auto& modes = *modes_;
    std::vector<Vec3c> out(modes.size(), Vec3c{});
    for (std::size_t ik = 0; ik < modes.size(); ++ik) {
        const auto& k = modes[ik];
        Vec3c acc{};
        for (std::size_t ip = 0; ip < modes.size(); ++ip) {
            const auto& p = modes[ip];
            const Wavevector q{k.x - p.x, k.y - p.y, k.z - p.z};
            const auto iq = modes.find(q);
            if (!iq) continue;
            const auto& up = u[ip];
            // u(p) . (i q)
            const cplx adv = cplx(0.0, 1.0) * (up[0] * double(q.x) + up[1] * double(q.y) +
                                               up[2] * double(q.z));
            const auto& vq = v[*iq];
            for (int j = 0; j < 3; ++j) acc[j] += adv * vq[j];
        }
        out[ik] = acc;
    }
    return out;
}

std::vector<Vec3c> NonlinearityEngine::advection(const SpectralState& u, const SpectralState& v,
                                                 Workspace& ws) const {
    const auto& modes = *modes_;
    const std::size_t cells = static_cast<std::size_t>(grid_) * grid_ * grid_;
    auto exec = [](fftw_plan plan, cplx* data) {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(plan, p, p);
    };

    std::fill(ws.u.begin(), ws.u.end(), cplx{});
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (int c = 0; c < 3; ++c) ws.u[c * cells + grid_index_[i]] = u[i][c];
    for (int c = 0; c < 3; ++c) exec(plans_->backward, ws.u.data() + c * cells);

    std::fill(ws.prod.begin(), ws.prod.end(), cplx{});
    for (int j = 0; j < 3; ++j) {
        for (int d = 0; d < 3; ++d) {
            std::fill(ws.grad.begin(), ws.grad.end(), cplx{});
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const auto& k = modes[i];
                const int kd = d == 0 ? k.x : (d == 1 ? k.y : k.z);
                ws.grad[grid_index_[i]] = cplx(0.0, double(kd)) * v[i][j];
            }
            exec(plans_->backward, ws.grad.data());
            const cplx* ud = ws.u.data() + d * cells;
            cplx* pj = ws.prod.data() + j * cells;
            // both factors are real in physical space
            for (std::size_t x = 0; x < cells; ++x) pj[x] += ud[x].real() * ws.grad[x].real();
        }
    }
    std::vector<Vec3c> out(modes.size());
    const double scale = 1.0 / static_cast<double>(cells);
    for (int j = 0; j < 3; ++j) {
        exec(plans_->forward, ws.prod.data() + j * cells);
        for (std::size_t i = 0; i < modes.size(); ++i)
            out[i][j] = ws.prod[j * cells + grid_index_[i]] * scale;
    }
    return out;
}

void NonlinearityEngine::project_advection(const SpectralState& u, const SpectralState& v,
                                           Workspace& ws, SpectralState& out) const {
    out.coeffs() = advection(u, v, ws);
    enforce_reality(out);
    leray_project_in_place(out);
}

// ---------------------------------------------------------------------------

double trilinear_b(const NonlinearityEngine& engine, const SpectralState& u, const SpectralState& v,
                   const SpectralState& w, ConvolutionPath path) {
    if (!same_modes(u.modes(), engine.modes()) || !same_modes(v.modes(), engine.modes()) ||
        !same_modes(w.modes(), engine.modes()))
        throw std::invalid_argument("trilinear_b: mode-set mismatch");
    require_incompressible(u, "trilinear_b");
    require_incompressible(v, "trilinear_b");
    require_incompressible(w, "trilinear_b");
    const auto adv = engine.advection(u, v, path);
    cplx sum{};
    double scale = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i)
        for (int j = 0; j < 3; ++j) {
            const cplx term = adv[i][j] * std::conj(w[i][j]);
            sum += term;
            scale += std::abs(term);
        }
    if (std::abs(sum.imag()) > 1e-10 * std::max(scale, 1e-300))
        throw std::runtime_error("trilinear_b: imaginary residual exceeds tolerance");
    return sum.real();
}

SpectralState inertial_B(const NonlinearityEngine& engine, const SpectralState& u,
                         const SpectralState& v, ConvolutionPath path) {
    if (!same_modes(u.modes(), engine.modes()) || !same_modes(v.modes(), engine.modes()))
        throw std::invalid_argument("inertial_B: mode-set mismatch");
    require_incompressible(u, "inertial_B");
    require_incompressible(v, "inertial_B");
    SpectralState out(u.mode_set(), engine.advection(u, v, path));
    enforce_reality(out);
    leray_project_in_place(out);
    return out;
}

SpectralState regularized_B(const NonlinearityEngine& engine, const SpectralState& u,
                            const SpectralState& v, const MollifierSpec& m, ConvolutionPath path) {
    return inertial_B(engine, mollify(u, m), v, path);
}

double estimate_interpolation_constant(const NonlinearityEngine& engine, const MollifierSpec& m,
                                       int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("estimate_interpolation_constant: samples >= 1");
    auto modes = m.mode_set();
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        RandomStream rng(seed, static_cast<std::uint32_t>(s), Substream::sampling);
        const auto u = random_state(modes, rng);
        const auto v = random_state(modes, rng);
        const auto w = random_state(modes, rng);
        const double b = trilinear_b(engine, mollify(u, m), v, w);
        const double rhs = std::sqrt(v_norm(u) * h_norm(u)) * v_norm(v) * std::sqrt(v_norm(w) * h_norm(w));
        if (rhs > 0.0) worst = std::max(worst, std::abs(b) / rhs);
    }
    return worst;
}

}  // namespace snslab
