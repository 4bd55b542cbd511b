#include "snslab/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace snslab {

Dynamics::Dynamics(DynamicsSpec spec)
    : spec_(std::move(spec)), engine_(spec_.forcing.mode_set()), intervals_(spec_.chain) {
    if (!(spec_.nu > 0.0)) throw std::invalid_argument("Dynamics: viscosity must be positive");
    const auto& modes = spec_.forcing.mode_set();
    if (!spec_.forcing.is_incompressible()) throw std::invalid_argument("Dynamics: forcing is not divergence-free");
    if (!same_modes(spec_.mollifier.modes(), *modes)) throw std::invalid_argument("Dynamics: mollifier mode-set mismatch");
    if (spec_.q.q.size() != modes->size()) throw std::invalid_argument("Dynamics: Q weights size mismatch");
    const int m = spec_.chain.regimes();
    if (static_cast<int>(spec_.sigma.regimes()) != m)
        throw std::invalid_argument("Dynamics: diffusion gains must be given for every regime");
    for (const auto& row : spec_.sigma.gains)
        if (row.size() != modes->size()) throw std::invalid_argument("Dynamics: gain array size mismatch");
    if (spec_.jumps.marks() > 0 && static_cast<int>(spec_.jumps.g.size()) != m)
        throw std::invalid_argument("Dynamics: jump vectors must be given for every regime");

    hypotheses_ = verify_hypotheses_A(spec_.sigma, spec_.q, spec_.jumps);
    lambda1_ = StokesSurrogate(*modes).lambda1();
    forcing_level_ = v_dual_norm2(spec_.forcing);
    const double nu = spec_.nu;
    k_crit_ = 0.5 * (nu * nu * nu * lambda1_ - forcing_level_ / nu);
    for (int i = 0; i < m; ++i) {
        compensator_.push_back(spec_.jumps.compensator_drift(i, modes));
        jump_p2_.push_back(spec_.jumps.marks() > 0 ? spec_.jumps.moment(i, 2) : 0.0);
        sigma_lq2_.push_back(spec_.sigma.lq_norm2(i, spec_.q));
    }
}

namespace {

struct Factors {
    double h = -1.0;
    std::vector<double> decay;  // e^{-nu lambda h}
    std::vector<double> phi;    // (1 - e^{-nu lambda h}) / (nu lambda)
    std::vector<double> scale;  // sqrt((1 - e^{-2 nu lambda h}) / (2 nu lambda h))
    std::vector<double> dissipation;  // (1 - e^{-2 nu lambda h}) / (2 nu)
};

void compute_factors(const Dynamics& dyn, double h, Factors& f) {
    const auto& modes = *dyn.modes();
    const double nu = dyn.nu();
    f.h = h;
    f.decay.resize(modes.size());
    f.phi.resize(modes.size());
    f.scale.resize(modes.size());
    f.dissipation.resize(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double rate = nu * modes.k2(i);
        const double x = rate * h;
        const double one_minus_e = -std::expm1(-x);
        const double one_minus_e2 = -std::expm1(-2.0 * x);
        f.decay[i] = std::exp(-x);
        f.phi[i] = one_minus_e / rate;
        f.scale[i] = std::sqrt(one_minus_e2 / (2.0 * x));
        f.dissipation[i] = one_minus_e2 / (2.0 * nu);
    }
}

class LegStepper {
public:
    LegStepper(const Dynamics& dyn, const SpectralState& u0)
        : u(u0),
          dyn_(dyn),
          drift_(dyn.modes()),
          bterm_(dyn.modes()),
          mollified_(dyn.modes()),
          noise_(dyn.modes()),
          ws_(dyn.engine().make_workspace()) {
        if (!same_modes(u0.modes(), *dyn.modes())) throw std::invalid_argument("initial state mode-set mismatch");
        has_noise_ = false;
        for (int r = 0; r < dyn.regimes(); ++r) has_noise_ = has_noise_ || dyn.sigma_lq2(r) > 0.0;
    }

    void advance(int r, double h, std::span<const double> z, LedgerSnapshot& ledger) {
        if (!(h > 0.0)) return;
        Factors& f = factors_for(h);
        const auto& spec = dyn_.spec();
        const auto& modes = *dyn_.modes();
        const auto& comp = dyn_.compensator(r);

        for (std::size_t i = 0; i < modes.size(); ++i)
            for (int c = 0; c < 3; ++c) drift_[i][c] = spec.forcing[i][c] - comp[i][c];
        if (spec.nonlinear) {
            const auto& moll = spec.mollifier;
            if (moll.is_identity()) {
                dyn_.engine().project_advection(u, u, ws_, bterm_);
            } else {
                for (std::size_t i = 0; i < modes.size(); ++i)
                    for (int c = 0; c < 3; ++c) mollified_[i][c] = moll.multiplier(i) * u[i][c];
                dyn_.engine().project_advection(mollified_, u, ws_, bterm_);
            }
            drift_ -= bterm_;
            ledger.nonlinear_work -= 2.0 * h * inner(bterm_, u);
        }
        if (has_noise_) {
            wiener_from_standard(spec.q, z, noise_);
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const double g = dyn_.gain(r, i);
                for (auto& c : noise_[i]) c *= g;
            }
        }

        double diss = 0.0, qv = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto& v = u[i];
            diss += f.dissipation[i] * (std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
            if (has_noise_) {
                const auto& n = noise_[i];
                qv += f.scale[i] * f.scale[i] * (std::norm(n[0]) + std::norm(n[1]) + std::norm(n[2]));
            }
        }
        const double u_comp = inner(u, comp);
        ledger.dissipation += diss;
        ledger.forcing_work += 2.0 * h * inner(spec.forcing, u);
        ledger.compensator_work -= 2.0 * h * u_comp;
        ledger.ito_correction += h * dyn_.sigma_lq2(r);
        ledger.quadratic_variation += qv;
        if (has_noise_) ledger.m1 += inner(u, noise_);
        ledger.m2 -= h * (2.0 * u_comp + dyn_.jump_p2(r));
        ledger.jump_p2_integral += h * dyn_.jump_p2(r);
        ledger.forcing_dual += h * dyn_.forcing_level();

        for (std::size_t i = 0; i < modes.size(); ++i) {
            auto& v = u[i];
            const auto& d = drift_[i];
            for (int c = 0; c < 3; ++c) {
                v[c] = f.decay[i] * v[c] + f.phi[i] * d[c];
                if (has_noise_) v[c] += f.scale[i] * noise_[i][c];
            }
        }
        leray_project_in_place(u);
    }

    SpectralState u;

private:
    Factors& factors_for(double h) {
        if (h == full_.h) return full_;
        if (full_.h < 0.0) {
            compute_factors(dyn_, h, full_);
            return full_;
        }
        compute_factors(dyn_, h, partial_);
        return partial_;
    }

    const Dynamics& dyn_;
    SpectralState drift_, bterm_, mollified_, noise_;
    NonlinearityEngine::Workspace ws_;
    Factors full_, partial_;
    bool has_noise_ = false;
};

std::uint64_t checked_ratio(double num, double den, const char* what) {
    const double r = num / den;
    const auto n = static_cast<std::uint64_t>(std::llround(r));
    if (n == 0 || std::abs(r - double(n)) > 1e-9 * std::max(1.0, r))
        throw std::invalid_argument(std::string("StepperConfig: ") + what);
    return n;
}

PathRecord run_leg(const Dynamics& dyn, const StepperConfig& cfg, const SpectralState& u0, int i0, double T,
                   DrivingNoise& noise) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be positive");
    if (i0 < 0 || i0 >= dyn.regimes()) throw std::invalid_argument("initial regime out of range");
    const double delta = noise.resolution();
    const std::uint64_t n_steps = checked_ratio(T, cfg.dt, "horizon must be a multiple of dt");
    const std::uint64_t cells_per_step = checked_ratio(cfg.dt, delta, "dt must be a multiple of the noise resolution");
    const std::uint64_t sample_every = checked_ratio(cfg.sample_interval, cfg.dt, "sample interval must be a multiple of dt");
    const double horizon = static_cast<double>(n_steps * cells_per_step) * delta;

    PathRecord rec;
    rec.chain = ChainPath(i0, horizon);
    LegStepper stepper(dyn, u0);
    auto& u = stepper.u;
    int r = i0;
    LedgerSnapshot ledger;
    rec.initial_energy = h_norm2(u0);
    double sup_energy = rec.initial_energy, m1_sup = 0.0, m2_sup = 0.0;

    auto record = [&](double t) {
        rec.samples.push_back({t, r, h_norm2(u), v_norm2(u), sup_energy, m1_sup, m2_sup, ledger});
        if (cfg.store_states) rec.states.push_back(u);
    };
    record(0.0);

    const std::size_t dim = noise.dimension();
    std::vector<double> zacc(dim, 0.0);
    double a = 0.0;
    for (std::uint64_t n = 0; n < n_steps; ++n) {
        int substeps = 0;
        for (std::uint64_t c = n * cells_per_step; c < (n + 1) * cells_per_step; ++c) {
            const CellNoise& cell = noise.cell(c);
            const std::vector<double>* wprev = nullptr;
            for (std::size_t e = 0; e < cell.events.size(); ++e) {
                const auto& w = cell.at_event[e];
                for (std::size_t k = 0; k < dim; ++k) zacc[k] += w[k] - (wprev ? (*wprev)[k] : 0.0);
                wprev = &w;
                const auto& ev = cell.events[e];
                const double h = ev.time - a;
                if (h > 0.0) {
                    stepper.advance(r, h, zacc, ledger);
                    ++substeps;
                    std::fill(zacc.begin(), zacc.end(), 0.0);
                    a = ev.time;
                }
                if (ev.kind == DrivingEvent::Kind::jump) {
                    const auto& g = dyn.spec().jumps.g[r][ev.mark];
                    const double before = h_norm2(u);
                    u += g;
                    const double delta_e = h_norm2(u) - before;
                    ledger.jump_sum += delta_e;
                    ledger.m2 += delta_e;
                    rec.jumps.push_back({ev.time, ev.mark, r, delta_e});
                } else {
                    const int dj = dyn.intervals().h_jump(r, ev.y);
                    if (dj != 0) {
                        r += dj;
                        rec.chain.push(ev.time, r);
                    }
                }
            }
            for (std::size_t k = 0; k < dim; ++k) zacc[k] += cell.total[k] - (wprev ? (*wprev)[k] : 0.0);
        }
        const double t_end = static_cast<double>((n + 1) * cells_per_step) * delta;
        stepper.advance(r, t_end - a, zacc, ledger);
        ++substeps;
        std::fill(zacc.begin(), zacc.end(), 0.0);
        a = t_end;
        rec.substeps += static_cast<std::size_t>(substeps);

        const double e = h_norm2(u);
        sup_energy = std::max(sup_energy, e);
        m1_sup = std::max(m1_sup, std::abs(ledger.m1));
        m2_sup = std::max(m2_sup, std::abs(ledger.m2));
        const bool last = n + 1 == n_steps;
        if (!std::isfinite(e) || e > cfg.blowup_threshold) {
            rec.blew_up = true;
            rec.diagnostic = fmt::format("non-finite or runaway state (|u|^2 = {:g}) at t = {:g}", e, t_end);
        } else if (substeps > cfg.max_substeps) {
            rec.blew_up = true;
            rec.diagnostic = fmt::format("substep budget {} exceeded at t = {:g}", cfg.max_substeps, t_end);
        }
        if (rec.blew_up || last || (n + 1) % sample_every == 0) record(t_end);
        if (rec.blew_up) break;
    }
    rec.chain.set_horizon(rec.samples.back().t);
    rec.noise_digest = noise.digest();
    rec.transcript = noise.transcript();
    return rec;
}

DrivingNoise make_noise(const Dynamics& dyn, const StepperConfig& cfg, std::uint64_t seed, std::uint32_t path) {
    const double res = cfg.noise_resolution > 0.0 ? cfg.noise_resolution : cfg.dt;
    return DrivingNoise(seed, path, standard_dimension(*dyn.modes()), dyn.spec().jumps,
                        dyn.intervals().total_length(), res);
}

}  // namespace

SpectralState step(const Dynamics& dyn, const SpectralState& u, int regime, double h,
                   std::span<const double> standard_increment) {
    if (regime < 0 || regime >= dyn.regimes()) throw std::invalid_argument("step: regime out of range");
    LegStepper stepper(dyn, u);
    LedgerSnapshot scratch;
    stepper.advance(regime, h, standard_increment, scratch);
    if (!std::isfinite(h_norm2(stepper.u))) throw std::runtime_error("step: non-finite state");
    return stepper.u;
}

SpectralState step(const Dynamics& dyn, const SpectralState& u, int regime, double h, RandomStream& rng) {
    std::vector<double> z(standard_dimension(*dyn.modes()));
    const double s = std::sqrt(h);
    for (auto& v : z) v = s * rng.normal();
    return step(dyn, u, regime, h, z);
}

PathRecord simulate_path(const Dynamics& dyn, const StepperConfig& cfg, const SpectralState& u0, int i0, double T,
                         std::uint64_t seed, std::uint32_t path_index) {
    auto noise = make_noise(dyn, cfg, seed, path_index);
    return run_leg(dyn, cfg, u0, i0, T, noise);
}

std::pair<PathRecord, PathRecord> simulate_coupled_pair(const Dynamics& dyn, const StepperConfig& cfg,
                                                        const SpectralState& u0_a, const SpectralState& u0_b,
                                                        int i0_a, int i0_b, double T, std::uint64_t seed,
                                                        std::uint32_t path_index) {
    auto noise_a = make_noise(dyn, cfg, seed, path_index);
    auto a = run_leg(dyn, cfg, u0_a, i0_a, T, noise_a);
    auto noise_b = make_noise(dyn, cfg, seed, path_index);
    auto b = run_leg(dyn, cfg, u0_b, i0_b, T, noise_b);
    return {std::move(a), std::move(b)};
}

std::vector<double> energy_ledger_residual(const PathRecord& p, double nu) {
    std::vector<double> out;
    out.reserve(p.samples.size());
    for (const auto& s : p.samples) {
        const auto& l = s.ledger;
        const double lhs = s.energy + 2.0 * nu * l.dissipation;
        const double rhs = p.initial_energy + l.forcing_work + l.quadratic_variation + 2.0 * l.m1 + l.m2 +
                           l.jump_p2_integral;
        out.push_back(lhs - rhs);
    }
    return out;
}

}  // namespace snslab
