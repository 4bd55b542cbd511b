#include "snslab/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <regex>
#include <stdexcept>

#include <fmt/format.h>

#include "snslab/parallel.hpp"

namespace snslab {

namespace {

constexpr double time_tol = 1e-9;

bool parse_mode_observable(const std::string& name, std::string& kind, Wavevector& k, int& comp) {
    static const std::regex pattern(R"(^(mode_re|mode_im|mode_atan):(-?\d+),(-?\d+),(-?\d+):([012])$)");
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) return false;
    kind = m[1];
    k = {std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4])};
    comp = std::stoi(m[5]);
    return true;
}

}  // namespace

Observable::Observable(const std::string& name, const ModeSet& modes) : name_(name) {
    std::string kind;
    Wavevector k;
    int comp = 0;
    if (name == "one") {
        bounded_ = true;
        fn_ = [](const PathSample&, const SpectralState*) { return 1.0; };
    } else if (name == "energy") {
        fn_ = [](const PathSample& s, const SpectralState*) { return s.energy; };
    } else if (name == "enstrophy") {
        fn_ = [](const PathSample& s, const SpectralState*) { return s.enstrophy; };
    } else if (name == "energy_ratio") {
        bounded_ = true;
        fn_ = [](const PathSample& s, const SpectralState*) { return s.energy / (1.0 + s.energy); };
    } else if (name == "enstrophy_ratio") {
        bounded_ = true;
        fn_ = [](const PathSample& s, const SpectralState*) { return s.enstrophy / (1.0 + s.enstrophy); };
    } else if (name == "energy_exp") {
        bounded_ = true;
        fn_ = [](const PathSample& s, const SpectralState*) { return std::exp(-s.energy); };
    } else if (name.rfind("regime:", 0) == 0) {
        std::size_t used = 0;
        int j = -1;
        try {
            j = std::stoi(name.substr(7), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != name.size() - 7 || j < 0)
            throw std::invalid_argument("unregistered observable '" + name + "'");
        bounded_ = true;
        fn_ = [j](const PathSample& s, const SpectralState*) { return s.regime == j ? 1.0 : 0.0; };
    } else if (parse_mode_observable(name, kind, k, comp)) {
        const auto idx = modes.find(k);
        if (!idx) throw std::invalid_argument("observable '" + name + "': wavevector not retained");
        needs_state_ = true;
        const std::size_t i = *idx;
        if (kind == "mode_re") {
            fn_ = [i, comp](const PathSample&, const SpectralState* u) { return (*u)[i][comp].real(); };
        } else if (kind == "mode_im") {
            fn_ = [i, comp](const PathSample&, const SpectralState* u) { return (*u)[i][comp].imag(); };
        } else {
            bounded_ = true;
            fn_ = [i, comp](const PathSample&, const SpectralState* u) { return std::atan((*u)[i][comp].real()); };
        }
    } else {
        throw std::invalid_argument("unregistered observable '" + name + "'");
    }
}

double Observable::operator()(const PathSample& s, const SpectralState* u) const {
    if (needs_state_ && !u) throw std::invalid_argument("observable '" + name_ + "' needs stored states");
    return fn_(s, u);
}

bool is_registered_observable(const std::string& name, const ModeSet& modes) {
    try {
        Observable o(name, modes);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// ---------------------------------------------------------------------------

double OccupationMeasure::mean(std::size_t f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) s += weights[k] * points[k][f];
    return s;
}

namespace {

/// Indices of samples in [t0, t1] and their trapezoidal weights (unnormalized).
std::pair<std::vector<std::size_t>, std::vector<double>> trapezoid(const PathRecord& path, double t0, double t1) {
    if (path.samples.empty()) throw std::invalid_argument("occupation: empty record");
    if (t1 > path.horizon() + time_tol * std::max(1.0, t1))
        throw std::invalid_argument(fmt::format("horizon {} exceeds record horizon {}", t1, path.horizon()));
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < path.samples.size(); ++k) {
        const double t = path.samples[k].t;
        if (t >= t0 - time_tol && t <= t1 + time_tol) idx.push_back(k);
    }
    if (idx.empty()) throw std::invalid_argument("occupation: no samples in the averaging window");
    std::vector<double> w(idx.size(), 0.0);
    if (idx.size() == 1) {
        w[0] = 1.0;
        return {idx, w};
    }
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const double h = path.samples[idx[k + 1]].t - path.samples[idx[k]].t;
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return {idx, w};
}

}  // namespace

OccupationMeasure occupation_measure(const PathRecord& path, const ModeSet& modes, double t_n,
                                     const std::vector<std::string>& features, int regimes, double burn_in) {
    if (!(t_n > 0.0)) throw std::invalid_argument("occupation_measure: horizon must be positive");
    if (burn_in < 0.0 || burn_in >= t_n) throw std::invalid_argument("occupation_measure: burn-in outside [0, t_n)");
    std::vector<Observable> obs;
    bool states = false;
    for (const auto& f : features) {
        obs.emplace_back(f, modes);
        states = states || obs.back().needs_state();
    }
    if (states && path.states.size() != path.samples.size())
        throw std::invalid_argument("occupation_measure: features need stored states");
    auto [idx, w] = trapezoid(path, burn_in, t_n);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);

    OccupationMeasure m;
    m.features = features;
    m.regimes = regimes;
    m.horizon = t_n;
    m.burn_in = burn_in;
    m.regime_marginal.assign(static_cast<std::size_t>(regimes), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& s = path.samples[idx[k]];
        const SpectralState* u = states ? &path.states[idx[k]] : nullptr;
        std::vector<double> p;
        p.reserve(obs.size());
        for (const auto& o : obs) p.push_back(o(s, u));
        if (s.regime < 0 || s.regime >= regimes) throw std::invalid_argument("occupation_measure: regime out of range");
        m.points.push_back(std::move(p));
        m.regime.push_back(s.regime);
        m.weights.push_back(w[k] / total);
        m.regime_marginal[s.regime] += w[k] / total;
    }
    return m;
}

OccupationMeasure mix(std::span<const OccupationMeasure> parts, std::span<const std::size_t> selection) {
    if (parts.empty() || selection.empty()) throw std::invalid_argument("mix: nothing to mix");
    OccupationMeasure m;
    const auto& first = parts[selection.front()];
    m.features = first.features;
    m.regimes = first.regimes;
    m.horizon = first.horizon;
    m.burn_in = first.burn_in;
    m.regime_marginal.assign(static_cast<std::size_t>(m.regimes), 0.0);
    const double share = 1.0 / double(selection.size());
    for (std::size_t s : selection) {
        const auto& p = parts[s];
        if (p.features != m.features || p.regimes != m.regimes)
            throw std::invalid_argument("mix: feature descriptor mismatch");
        m.points.insert(m.points.end(), p.points.begin(), p.points.end());
        m.regime.insert(m.regime.end(), p.regime.begin(), p.regime.end());
        for (double w : p.weights) m.weights.push_back(w * share);
        for (int r = 0; r < m.regimes; ++r) m.regime_marginal[r] += share * p.regime_marginal[r];
    }
    return m;
}

OccupationMeasure occupation_measure(std::span<const PathRecord> paths, const ModeSet& modes, double t_n,
                                     const std::vector<std::string>& features, int regimes, double burn_in) {
    std::vector<OccupationMeasure> parts;
    parts.reserve(paths.size());
    for (const auto& p : paths) parts.push_back(occupation_measure(p, modes, t_n, features, regimes, burn_in));
    std::vector<std::size_t> all(parts.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return mix(parts, all);
}

double kb_average(const PathRecord& path, const ModeSet& modes, const std::string& phi, double t) {
    const Observable o(phi, modes);
    if (!o.bounded()) throw std::invalid_argument("kb_average: observable '" + phi + "' is not bounded");
    if (!(t > 0.0)) throw std::invalid_argument("kb_average: horizon must be positive");
    if (o.needs_state() && path.states.size() != path.samples.size())
        throw std::invalid_argument("kb_average: observable needs stored states");
    auto [idx, w] = trapezoid(path, 0.0, t);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const SpectralState* u = o.needs_state() ? &path.states[idx[k]] : nullptr;
        num += w[k] * o(path.samples[idx[k]], u);
        den += w[k];
    }
    return num / den;
}

double empirical_distance(const OccupationMeasure& a, const OccupationMeasure& b) {
    if (a.features != b.features || a.regimes != b.regimes)
        throw std::invalid_argument("empirical_distance: feature descriptor mismatch");
    double d = 0.0;
    for (int r = 0; r < a.regimes; ++r) d += std::abs(a.regime_marginal[r] - b.regime_marginal[r]);
    const std::vector<double> dirac_x{0.0}, dirac_w{1.0};
    for (int r = 0; r < a.regimes; ++r) {
        for (std::size_t f = 0; f < a.features.size(); ++f) {
            auto collect = [&](const OccupationMeasure& m, std::vector<double>& x, std::vector<double>& w) {
                for (std::size_t k = 0; k < m.points.size(); ++k)
                    if (m.regime[k] == r && m.weights[k] > 0.0) {
                        x.push_back(m.points[k][f]);
                        w.push_back(m.weights[k]);
                    }
                if (x.empty()) {
                    x = dirac_x;
                    w = dirac_w;
                }
            };
            std::vector<double> xa, wa, xb, wb;
            collect(a, xa, wa);
            collect(b, xb, wb);
            d += stats::wasserstein1(xa, wa, xb, wb);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------

StabilityReport stability_experiment(const Dynamics& dyn, const StepperConfig& cfg, const SpectralState& u0_a,
                                     const SpectralState& u0_b, int i0_a, int i0_b, const StabilityConfig& sc) {
    if (sc.replicates < 1) throw std::invalid_argument("stability_experiment: replicates >= 1");
    if (!(sc.fit_window > 0.0 && sc.fit_window <= 1.0))
        throw std::invalid_argument("stability_experiment: fit window must lie in (0, 1]");
    StepperConfig c = cfg;
    c.store_states = true;

    struct Rep {
        std::vector<double> t, w2, diss;
        bool blew_up = false;
    };
    auto reps = parallel_map(static_cast<std::size_t>(sc.replicates), sc.workers, [&](std::size_t p) {
        auto [a, b] = simulate_coupled_pair(dyn, c, u0_a, u0_b, i0_a, i0_b, sc.T, sc.seed, static_cast<std::uint32_t>(p));
        Rep r;
        r.blew_up = a.blew_up || b.blew_up;
        if (r.blew_up) return r;
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            r.t.push_back(a.samples[k].t);
            r.w2.push_back(h_norm2(a.states[k] - b.states[k]));
            r.diss.push_back(a.samples[k].ledger.dissipation);
        }
        return r;
    });

    StabilityReport rep;
    rep.K = dyn.K();
    rep.K_crit = dyn.k_crit();
    rep.below_threshold = rep.K < rep.K_crit;
    rep.replicates = sc.replicates;
    std::vector<const Rep*> ok;
    for (const auto& r : reps) {
        if (r.blew_up)
            ++rep.excluded;
        else
            ok.push_back(&r);
    }
    if (ok.empty()) {
        rep.verdict = "inconclusive";
        return rep;
    }
    rep.times = ok.front()->t;
    const double base_rate = dyn.nu() * dyn.lambda1();
    std::vector<double> col(ok.size());
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        for (std::size_t p = 0; p < ok.size(); ++p) col[p] = ok[p]->w2[k];
        const auto ms = stats::mean_se(col);
        rep.mean_w2.push_back(ms.mean);
        rep.se_w2.push_back(ms.se);
        double diss = 0.0;
        for (const auto* r : ok) diss += r->diss[k];
        diss /= double(ok.size());
        const double t = rep.times[k];
        rep.effective_rate.push_back(t > 0.0 ? base_rate - diss / (dyn.nu() * t) : base_rate);
    }

    const double horizon = rep.times.back();
    rep.fit_start = (1.0 - sc.fit_window) * horizon;
    rep.fit_end = horizon;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < rep.times.size(); ++k)
        if (rep.times[k] >= rep.fit_start - time_tol && rep.mean_w2[k] > 0.0 && std::isfinite(rep.mean_w2[k])) {
            x.push_back(rep.times[k]);
            y.push_back(std::log(rep.mean_w2[k]));
        }
    const bool identical = std::all_of(rep.mean_w2.begin(), rep.mean_w2.end(), [](double v) { return v == 0.0; });
    if (x.size() >= 3) {
        rep.fit = stats::linear_fit(x, y);
        rep.fit_valid = true;
    }
    if (identical)
        rep.verdict = "identical paths";
    else if (!rep.fit_valid || rep.fit.r2 < 0.9)
        rep.verdict = "inconclusive";
    else
        rep.verdict = rep.fit.slope < 0.0 ? "decay observed" : "decay not observed";
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

void fit_loglog(const std::vector<double>& T, const std::vector<double>& r, stats::LinearFit& fit, bool& valid) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < T.size(); ++k)
        if (r[k] > 0.0) {
            x.push_back(std::log(T[k]));
            y.push_back(std::log(r[k]));
        }
    valid = x.size() >= 2;
    if (valid) fit = stats::linear_fit(x, y);
}

}  // namespace

MartingaleMonitor martingale_monitor(const PathRecord& path, double t_min) {
    if (!(t_min > 0.0)) throw std::invalid_argument("martingale_monitor: t_min must be positive");
    MartingaleMonitor m;
    const double horizon = path.horizon();
    std::size_t k = 0;
    for (double T = t_min; T <= horizon * (1.0 + time_tol); T *= 2.0) {
        while (k + 1 < path.samples.size() && path.samples[k + 1].t <= T * (1.0 + time_tol)) ++k;
        const auto& s = path.samples[k];
        m.T.push_back(T);
        m.m1_ratio.push_back(s.m1_sup / T);
        m.m2_ratio.push_back(s.m2_sup / T);
    }
    fit_loglog(m.T, m.m1_ratio, m.m1_fit, m.m1_fit_valid);
    fit_loglog(m.T, m.m2_ratio, m.m2_fit, m.m2_fit_valid);
    return m;
}

MartingaleMonitor martingale_monitor(std::span<const PathRecord> paths, double t_min) {
    if (paths.empty()) throw std::invalid_argument("martingale_monitor: empty ensemble");
    MartingaleMonitor out;
    std::size_t used = 0;
    for (const auto& p : paths) {
        if (p.blew_up) continue;
        const auto m = martingale_monitor(p, t_min);
        if (used == 0) {
            out.T = m.T;
            out.m1_ratio.assign(m.T.size(), 0.0);
            out.m2_ratio.assign(m.T.size(), 0.0);
        }
        const std::size_t n = std::min(out.T.size(), m.T.size());
        out.T.resize(n);
        out.m1_ratio.resize(n);
        out.m2_ratio.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            out.m1_ratio[k] += m.m1_ratio[k];
            out.m2_ratio[k] += m.m2_ratio[k];
        }
        ++used;
    }
    if (used == 0) throw std::invalid_argument("martingale_monitor: every path blew up");
    for (auto& v : out.m1_ratio) v /= double(used);
    for (auto& v : out.m2_ratio) v /= double(used);
    fit_loglog(out.T, out.m1_ratio, out.m1_fit, out.m1_fit_valid);
    fit_loglog(out.T, out.m2_ratio, out.m2_fit, out.m2_fit_valid);
    return out;
}

// ---------------------------------------------------------------------------

AprioriReport apriori_monitor(std::span<const PathRecord> paths, const Dynamics& dyn) {
    AprioriReport rep;
    rep.K = dyn.K();
    rep.F = dyn.forcing_level();
    rep.nu = dyn.nu();
    std::vector<const PathRecord*> ok;
    for (const auto& p : paths) {
        if (p.blew_up)
            ++rep.excluded;
        else
            ok.push_back(&p);
    }
    if (ok.empty()) return rep;
    std::size_t n = ok.front()->samples.size();
    for (const auto* p : ok) n = std::min(n, p->samples.size());
    const double nu = rep.nu;
    std::vector<double> u0(ok.size()), d1(ok.size()), d2(ok.size()), l1(ok.size()), l2(ok.size());
    for (std::size_t p = 0; p < ok.size(); ++p) u0[p] = ok[p]->initial_energy;
    const auto e0 = stats::mean_se(u0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = ok.front()->samples[k].t;
        for (std::size_t p = 0; p < ok.size(); ++p) {
            const auto& s = ok[p]->samples[k];
            const double diss = nu * s.ledger.dissipation;
            l1[p] = s.energy + diss;
            l2[p] = s.sup_energy + diss;
            d1[p] = l1[p] - u0[p];
            d2[p] = l2[p] - 2.0 * u0[p];
        }
        AprioriRow row;
        row.t = t;
        const double extra1 = rep.F * t / nu + 2.0 * rep.K * t;
        const double extra2 = 4.0 / (3.0 * nu) * rep.F * t + 100.0 * rep.K * t;
        const auto m1 = stats::mean_se(d1);
        const auto m2 = stats::mean_se(d2);
        row.lhs1 = stats::mean_se(l1).mean;
        row.rhs1 = e0.mean + extra1;
        row.se1 = m1.se;
        row.violated1 = m1.mean - extra1 > 3.0 * m1.se;
        row.lhs2 = stats::mean_se(l2).mean;
        row.rhs2 = 2.0 * e0.mean + extra2;
        row.se2 = m2.se;
        row.violated2 = m2.mean - extra2 > 3.0 * m2.se;
        rep.violations1 += row.violated1;
        rep.violations2 += row.violated2;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const int a = (x[i] > x[j]) - (x[i] < x[j]);
            const int b = (y[i] > y[j]) - (y[i] < y[j]);
            s += a * b;
        }
    return s / (0.5 * double(n) * double(n - 1));
}

namespace {

struct Ensemble {
    std::vector<OccupationMeasure> parts;  ///< per path; empty measure for blown-up paths
    std::vector<bool> ok;
};

Ensemble run_ensemble(const DynamicsSpec& spec, const StepperConfig& cfg, const SpectralState& u0, int i0,
                      const SweepConfig& sc, std::uint32_t path_offset) {
    const Dynamics dyn(spec);
    const SpectralState init = sc.mollify_initial ? mollify(u0, spec.mollifier) : u0;
    const auto& modes = *dyn.modes();
    StepperConfig c = cfg;
    for (const auto& f : sc.features) c.store_states = c.store_states || Observable(f, modes).needs_state();
    auto results = parallel_map(static_cast<std::size_t>(sc.replicates), sc.workers, [&](std::size_t p) {
        const auto rec = simulate_path(dyn, c, init, i0, sc.T, sc.seed, path_offset + static_cast<std::uint32_t>(p));
        if (rec.blew_up) return std::pair<bool, OccupationMeasure>{false, {}};
        return std::pair<bool, OccupationMeasure>{
            true, occupation_measure(rec, modes, sc.T, sc.features, dyn.regimes())};
    });
    Ensemble e;
    for (auto& [ok, m] : results) {
        e.ok.push_back(ok);
        e.parts.push_back(std::move(m));
    }
    return e;
}

struct DistanceCi {
    double distance = 0.0, lo = 0.0, hi = 0.0;
};

DistanceCi paired_distance(const Ensemble& a, const Ensemble& b, const SweepConfig& sc, std::uint32_t stream) {
    std::vector<std::size_t> common;
    for (std::size_t p = 0; p < a.ok.size(); ++p)
        if (a.ok[p] && b.ok[p]) common.push_back(p);
    if (common.empty()) throw std::runtime_error("epsilon_sweep: every replicate blew up");
    DistanceCi out;
    out.distance = empirical_distance(mix(a.parts, common), mix(b.parts, common));
    if (sc.bootstrap < 1) {
        out.lo = out.hi = out.distance;
        return out;
    }
    std::vector<double> boot;
    std::vector<std::size_t> pick(common.size());
    for (int r = 0; r < sc.bootstrap; ++r) {
        RandomStream rng(sc.seed, stream, Substream::bootstrap, static_cast<std::uint32_t>(r));
        std::uniform_int_distribution<std::size_t> draw(0, common.size() - 1);
        for (auto& v : pick) v = common[draw(rng.engine())];
        boot.push_back(empirical_distance(mix(a.parts, pick), mix(b.parts, pick)));
    }
    std::sort(boot.begin(), boot.end());
    auto quantile = [&](double q) {
        const double pos = q * double(boot.size() - 1);
        const std::size_t i = static_cast<std::size_t>(std::floor(pos));
        const std::size_t j = std::min(i + 1, boot.size() - 1);
        return boot[i] + (pos - double(i)) * (boot[j] - boot[i]);
    };
    out.lo = quantile(0.025);
    out.hi = quantile(0.975);
    return out;
}

}  // namespace

SweepReport epsilon_sweep(const DynamicsSpec& base, const StepperConfig& cfg, const SpectralState& u0, int i0,
                          const SweepConfig& sc) {
    const auto& eps = sc.epsilons;
    if (eps.empty() || eps.back() != 0.0) throw std::invalid_argument("epsilon_sweep: list must end at 0");
    const auto modes = base.forcing.mode_set();
    const double eps_max = max_positive_epsilon(modes->cutoff());
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!std::isfinite(eps[k]) || eps[k] < 0.0 || eps[k] > eps_max)
            throw std::invalid_argument(
                fmt::format("epsilon_sweep: epsilon {} outside the positivity range [0, {:.6g}]", eps[k], eps_max));
        if (k > 0 && !(eps[k] < eps[k - 1]))
            throw std::invalid_argument("epsilon_sweep: epsilons must be strictly decreasing");
    }
    if (sc.replicates < 1) throw std::invalid_argument("epsilon_sweep: replicates >= 1");

    auto spec_for = [&](double e) {
        DynamicsSpec s = base;
        s.mollifier = MollifierSpec(e, modes);
        return s;
    };
    std::vector<Ensemble> ens;
    for (double e : eps) ens.push_back(run_ensemble(spec_for(e), cfg, u0, i0, sc, 0));
    const auto floor_ens = run_ensemble(spec_for(0.0), cfg, u0, i0, sc, static_cast<std::uint32_t>(sc.replicates));

    SweepReport rep;
    const Ensemble& ref = ens.back();
    for (std::size_t k = 0; k < eps.size(); ++k) {
        SweepRow row;
        row.epsilon = eps[k];
        if (k + 1 < eps.size()) {
            const auto d = paired_distance(ens[k], ref, sc, static_cast<std::uint32_t>(k));
            row.distance = d.distance;
            row.ci_low = d.lo;
            row.ci_high = d.hi;
        }
        std::vector<std::size_t> ok;
        for (std::size_t p = 0; p < ens[k].ok.size(); ++p)
            if (ens[k].ok[p]) ok.push_back(p);
            else ++rep.excluded;
        if (!ok.empty()) {
            const auto m = mix(ens[k].parts, ok);
            for (std::size_t f = 0; f < m.features.size(); ++f) row.feature_means.push_back(m.mean(f));
            row.regime0_weight = m.regime_marginal.front();
        }
        rep.rows.push_back(std::move(row));
    }
    const auto nf = paired_distance(floor_ens, ref, sc, static_cast<std::uint32_t>(eps.size()));
    rep.noise_floor = nf.distance;
    rep.noise_floor_ci_low = nf.lo;
    rep.noise_floor_ci_high = nf.hi;

    std::vector<double> x, y;
    for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
        x.push_back(rep.rows[k].epsilon);
        y.push_back(rep.rows[k].distance);
    }
    rep.kendall_tau = kendall_tau(x, y);
    if (x.size() >= 2) rep.trend = stats::linear_fit(x, y);
    return rep;
}

}  // namespace snslab
