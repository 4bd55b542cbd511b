#include "snslab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "snslab/ergodicity.hpp"
#include "snslab/parallel.hpp"
#include "snslab/stats.hpp"

namespace snslab {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<int> workers_from_environment() {
    const char* v = std::getenv("SNSLAB_WORKERS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) return std::nullopt;
    return static_cast<int>(n);
}

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

class ArtifactWriter {
public:
    ArtifactWriter(fs::path dir, const ScenarioConfig& cfg) : dir_(std::move(dir)), cfg_(cfg) {
        fs::create_directories(dir_);
        csv_ = std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "csv") != cfg.output.formats.end();
    }

    void json_report(const std::string& name, json body) {
        body["scenario_hash"] = cfg_.hash;
        body["seed"] = cfg_.ensemble.seed;
        put(name, body.dump(2) + "\n");
    }

    /// CSV with a provenance comment line.
    void csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
        if (!csv_) return;
        std::string text = fmt::format("# scenario_hash={} seed={}\n{}\n", cfg_.hash, cfg_.ensemble.seed, header);
        for (const auto& r : rows) text += r + "\n";
        put(name, text);
    }

    void put(const std::string& name, const std::string& content) {
        write_file(dir_ / name, content);
        names_.push_back(name);
    }

    const std::vector<std::string>& names() const { return names_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    const ScenarioConfig& cfg_;
    bool csv_ = true;
    std::vector<std::string> names_;
};

json vec(const std::vector<double>& v) { return json(v); }

json fit_json(const stats::LinearFit& f, bool valid) {
    return {{"valid", valid}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"slope_se", f.slope_se}};
}

/// Dyadic grid start: horizon / 2^k with the largest k keeping it >= min_step.
double dyadic_start(double horizon, double min_step) {
    double t = horizon;
    while (t / 2.0 >= min_step * (1.0 - 1e-12)) t /= 2.0;
    return t;
}

struct Context {
    const ScenarioConfig& cfg;
    const RunOptions& options;
    int workers = 1;
    ArtifactWriter& out;
    int blown_up = 0;
    std::vector<std::string> messages;
};

// ---------------------------------------------------------------------------

void write_path_exports(Context& ctx, const PathRecord& p, const Dynamics& dyn) {
    const auto residual = energy_ledger_residual(p, dyn.nu());
    std::vector<std::string> rows;
    std::string jsonl;
    for (std::size_t k = 0; k < p.samples.size(); ++k) {
        const auto& s = p.samples[k];
        const auto& l = s.ledger;
        rows.push_back(fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", num(s.t), s.regime, num(s.energy),
                                   num(s.enstrophy), num(l.dissipation), num(l.forcing_work),
                                   num(l.compensator_work), num(l.ito_correction), num(l.quadratic_variation),
                                   num(l.m1), num(l.m2), num(l.jump_p2_integral), num(l.jump_sum),
                                   num(residual[k])));
        json line{{"t", s.t},
                  {"regime", s.regime},
                  {"energy", s.energy},
                  {"enstrophy", s.enstrophy},
                  {"sup_energy", s.sup_energy},
                  {"m1", l.m1},
                  {"m2", l.m2},
                  {"dissipation", l.dissipation},
                  {"forcing_dual", l.forcing_dual},
                  {"residual", residual[k]}};
        jsonl += line.dump() + "\n";
    }
    ctx.out.csv("path0_ledger.csv",
                "t,regime,energy,enstrophy,dissipation,forcing_work,compensator_work,ito_correction,"
                "quadratic_variation,m1,m2,jump_p2_integral,jump_sum,residual",
                rows);
    ctx.out.put("path0.jsonl", jsonl);
    std::vector<std::string> events;
    for (const auto& e : p.transcript)
        events.push_back(fmt::format("{},{},{},{}", num(e.time),
                                     e.kind == DrivingEvent::Kind::jump ? "jump" : "switch_atom", e.mark, num(e.y)));
    ctx.out.csv("path0_transcript.csv", "time,kind,mark,y", events);
}

void run_ensemble_experiments(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Dynamics dyn(cfg.dynamics);
    const auto& modes = *dyn.modes();
    const bool want_apriori = cfg.wants("apriori");
    const bool want_mart = cfg.wants("martingale");
    const bool want_occ = cfg.wants("occupation");

    int paths = cfg.ensemble.paths;
    double T = cfg.horizon;
    for (const char* key : {"apriori", "martingale", "occupation"}) {
        const auto ex = cfg.experiment(key);
        if (ex.contains("paths")) paths = std::max(paths, ex.at("paths").get<int>());
        if (ex.contains("T")) T = std::max(T, ex.at("T").get<double>());
    }
    const auto occ = cfg.experiment("occupation");
    const auto features = occ.value("features", std::vector<std::string>{"energy", "enstrophy"});
    const auto observables = occ.value("observables", std::vector<std::string>{"energy_ratio", "regime:0"});
    StepperConfig sc = cfg.stepper;
    for (const auto& f : features) sc.store_states = sc.store_states || Observable(f, modes).needs_state();
    for (const auto& f : observables) sc.store_states = sc.store_states || Observable(f, modes).needs_state();

    auto records = parallel_map(static_cast<std::size_t>(paths), ctx.workers, [&](std::size_t p) {
        return simulate_path(dyn, sc, cfg.initial, cfg.initial_regime, T, cfg.ensemble.seed,
                             static_cast<std::uint32_t>(p));
    });
    std::vector<PathRecord> ok;
    for (auto& r : records) {
        if (r.blew_up) {
            ++ctx.blown_up;
            ctx.messages.push_back("path blew up: " + r.diagnostic);
        } else {
            ok.push_back(std::move(r));
        }
    }
    if (ok.empty()) {
        ctx.messages.push_back("every ensemble path blew up; no ensemble reports written");
        return;
    }
    write_path_exports(ctx, ok.front(), dyn);

    if (want_apriori) {
        const auto rep = apriori_monitor(ok, dyn);
        json rows = json::array();
        std::vector<std::string> csv;
        for (const auto& r : rep.rows) {
            rows.push_back({{"t", r.t},
                            {"lhs1", r.lhs1},
                            {"rhs1", r.rhs1},
                            {"se1", r.se1},
                            {"violated1", r.violated1},
                            {"lhs2", r.lhs2},
                            {"rhs2", r.rhs2},
                            {"se2", r.se2},
                            {"violated2", r.violated2}});
            csv.push_back(fmt::format("{},{},{},{},{},{},{},{},{}", num(r.t), num(r.lhs1), num(r.rhs1), num(r.se1),
                                      int(r.violated1), num(r.lhs2), num(r.rhs2), num(r.se2), int(r.violated2)));
        }
        double worst_residual = 0.0;
        for (const auto& p : ok)
            for (double v : energy_ledger_residual(p, dyn.nu())) worst_residual = std::max(worst_residual, std::abs(v));
        ctx.out.json_report("apriori.json", {{"K", rep.K},
                                             {"F", rep.F},
                                             {"nu", rep.nu},
                                             {"paths", ok.size()},
                                             {"excluded", rep.excluded},
                                             {"violations1", rep.violations1},
                                             {"violations2", rep.violations2},
                                             {"max_energy_ledger_residual", worst_residual},
                                             {"rows", rows}});
        ctx.out.csv("apriori.csv", "t,lhs1,rhs1,stderr1,violated1,lhs2,rhs2,stderr2,violated2", csv);
    }
    if (want_mart) {
        const auto ex = cfg.experiment("martingale");
        const double t_min = ex.value("t_min", dyadic_start(T, cfg.stepper.sample_interval));
        const auto mon = martingale_monitor(ok, t_min);
        std::vector<std::string> csv;
        for (std::size_t k = 0; k < mon.T.size(); ++k)
            csv.push_back(fmt::format("{},{},{}", num(mon.T[k]), num(mon.m1_ratio[k]), num(mon.m2_ratio[k])));
        ctx.out.json_report("martingale.json", {{"T", vec(mon.T)},
                                                {"m1_ratio", vec(mon.m1_ratio)},
                                                {"m2_ratio", vec(mon.m2_ratio)},
                                                {"m1_fit", fit_json(mon.m1_fit, mon.m1_fit_valid)},
                                                {"m2_fit", fit_json(mon.m2_fit, mon.m2_fit_valid)}});
        ctx.out.csv("martingale.csv", "T,m1_ratio,m2_ratio", csv);
    }
    if (want_occ) {
        const double burn_in = occ.value("burn_in", 0.0);
        const auto m = occupation_measure(ok, modes, T, features, dyn.regimes(), burn_in);
        json means = json::object();
        for (std::size_t f = 0; f < features.size(); ++f) means[features[f]] = m.mean(f);
        json kb = json::object();
        std::vector<std::string> csv;
        for (const auto& name : observables) {
            std::vector<double> v;
            for (const auto& p : ok) v.push_back(kb_average(p, modes, name, T));
            const auto ms = stats::mean_se(v);
            kb[name] = {{"mean", ms.mean}, {"stderr", ms.se}};
            csv.push_back(fmt::format("{},{},{}", name, num(ms.mean), num(ms.se)));
        }
        ctx.out.json_report("occupation.json", {{"horizon", T},
                                                {"burn_in", burn_in},
                                                {"literal_time_average", burn_in == 0.0},
                                                {"paths", ok.size()},
                                                {"regime_marginal", vec(m.regime_marginal)},
                                                {"feature_means", means},
                                                {"kb_averages", kb}});
        ctx.out.csv("occupation.csv", "observable,mean,stderr", csv);
    }
}

void run_stability(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto ex = cfg.experiment("stability");
    const Dynamics dyn(cfg.dynamics);
    StabilityConfig sc;
    sc.T = ex.value("T", cfg.horizon);
    sc.replicates = ex.value("replicates", cfg.ensemble.paths);
    sc.seed = cfg.ensemble.seed;
    sc.fit_window = ex.value("fit_window", 0.5);
    sc.workers = ctx.workers;
    SpectralState u0_b(dyn.modes());
    if (ex.contains("initial_b")) {
        u0_b = SpectralState(dyn.modes());
        for (const auto& entry : ex.at("initial_b")) {
            const auto k = entry.at("k").get<std::array<int, 3>>();
            std::array<double, 3> re{0, 0, 0}, im{0, 0, 0};
            if (entry.contains("re")) re = entry.at("re").get<std::array<double, 3>>();
            if (entry.contains("im")) im = entry.at("im").get<std::array<double, 3>>();
            u0_b.set_pair({k[0], k[1], k[2]}, {cplx(re[0], im[0]), cplx(re[1], im[1]), cplx(re[2], im[2])});
        }
    }
    const int i0_b = ex.value("regime_b", cfg.initial_regime);
    const auto rep = stability_experiment(dyn, cfg.stepper, cfg.initial, u0_b, cfg.initial_regime, i0_b, sc);
    ctx.blown_up += rep.excluded;
    std::vector<std::string> csv;
    for (std::size_t k = 0; k < rep.times.size(); ++k)
        csv.push_back(fmt::format("{},{},{},{}", num(rep.times[k]), num(rep.mean_w2[k]), num(rep.se_w2[k]),
                                  num(rep.effective_rate[k])));
    ctx.out.json_report("stability.json", {{"times", vec(rep.times)},
                                           {"mean_w2", vec(rep.mean_w2)},
                                           {"stderr_w2", vec(rep.se_w2)},
                                           {"effective_rate", vec(rep.effective_rate)},
                                           {"fit", fit_json(rep.fit, rep.fit_valid)},
                                           {"fit_start", rep.fit_start},
                                           {"fit_end", rep.fit_end},
                                           {"fitted_rate", rep.fit.slope},
                                           {"K", rep.K},
                                           {"K_crit", rep.K_crit},
                                           {"below_threshold", rep.below_threshold},
                                           {"replicates", rep.replicates},
                                           {"excluded", rep.excluded},
                                           {"verdict", rep.verdict}});
    ctx.out.csv("stability.csv", "t,mean_w2,stderr,effective_rate", csv);
}

void run_sweep(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto ex = cfg.experiment("epsilon_sweep");
    SweepConfig sc;
    if (ctx.options.epsilons)
        sc.epsilons = *ctx.options.epsilons;
    else if (ex.contains("epsilons"))
        sc.epsilons = ex.at("epsilons").get<std::vector<double>>();
    else
        throw std::invalid_argument("epsilon_sweep: no epsilon list given");
    sc.T = ex.value("T", cfg.horizon);
    sc.replicates = ex.value("replicates", cfg.ensemble.paths);
    sc.seed = cfg.ensemble.seed;
    sc.bootstrap = ex.value("bootstrap", 200);
    sc.workers = ctx.workers;
    if (ex.contains("features")) sc.features = ex.at("features").get<std::vector<std::string>>();
    sc.mollify_initial = ex.value("mollify_initial", true);
    const auto rep = epsilon_sweep(cfg.dynamics, cfg.stepper, cfg.initial, cfg.initial_regime, sc);
    ctx.blown_up += rep.excluded;
    json rows = json::array();
    std::vector<std::string> csv;
    for (const auto& r : rep.rows) {
        rows.push_back({{"epsilon", r.epsilon},
                        {"distance", r.distance},
                        {"ci_low", r.ci_low},
                        {"ci_high", r.ci_high},
                        {"feature_means", vec(r.feature_means)},
                        {"regime0_weight", r.regime0_weight}});
        csv.push_back(fmt::format("{},{},{},{}", num(r.epsilon), num(r.distance), num(r.ci_low), num(r.ci_high)));
    }
    ctx.out.json_report("epsilon_sweep.json", {{"features", sc.features},
                                               {"replicates", sc.replicates},
                                               {"horizon", sc.T},
                                               {"rows", rows},
                                               {"noise_floor", rep.noise_floor},
                                               {"noise_floor_ci", {rep.noise_floor_ci_low, rep.noise_floor_ci_high}},
                                               {"kendall_tau", rep.kendall_tau},
                                               {"trend_slope", rep.trend.slope},
                                               {"excluded", rep.excluded}});
    ctx.out.csv("epsilon_sweep.csv", "epsilon,distance,ci_low,ci_high", csv);
}

void run_chain_validation(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto ex = cfg.experiment("chain_validation");
    const Generator& g = cfg.dynamics.chain;
    const int m = g.regimes();
    const int paths = ex.value("paths", 2000);
    const double T = ex.value("T", cfg.horizon);
    auto times = ex.value("times", std::vector<double>{0.25 * T, 0.5 * T, T});
    std::sort(times.begin(), times.end());
    if (times.empty() || times.front() < 0.0 || times.back() > T)
        throw std::invalid_argument("chain_validation: sample times must lie in [0, T]");

    struct Out {
        std::vector<std::vector<long>> hits;  ///< [time][state]
        std::vector<std::vector<double>> hold_s, hold_g;
        std::vector<std::vector<long>> trans_s, trans_g;
    };
    const std::size_t tasks = static_cast<std::size_t>(m) * paths;
    auto results = parallel_map(tasks, ctx.workers, [&](std::size_t task) {
        const int i = static_cast<int>(task / paths);
        const auto p = static_cast<std::uint32_t>(task % paths);
        RandomStream rs(cfg.ensemble.seed, p, Substream::chain, static_cast<std::uint32_t>(i));
        RandomStream rg(cfg.ensemble.seed, p, Substream::sampling, static_cast<std::uint32_t>(i));
        const auto sk = simulate_chain_skorohod(g, i, T, rs);
        const auto gi = simulate_chain_gillespie(g, i, T, rg);
        Out o;
        for (double t : times) {
            std::vector<long> h(static_cast<std::size_t>(m), 0);
            h[sk.at(t)] = 1;
            o.hits.push_back(h);
        }
        o.hold_s = sk.holding_times(m);
        o.hold_g = gi.holding_times(m);
        o.trans_s = sk.transition_counts(m);
        o.trans_g = gi.transition_counts(m);
        return o;
    });

    json rows = json::array();
    std::vector<std::string> csv;
    double worst_dev = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const Eigen::MatrixXd P = transition_matrix(g, times[ti]);
        for (int i = 0; i < m; ++i) {
            std::vector<long> count(static_cast<std::size_t>(m), 0);
            for (int p = 0; p < paths; ++p)
                for (int j = 0; j < m; ++j) count[j] += results[static_cast<std::size_t>(i) * paths + p].hits[ti][j];
            for (int j = 0; j < m; ++j) {
                const double emp = double(count[j]) / paths;
                worst_dev = std::max(worst_dev, std::abs(emp - P(i, j)));
                rows.push_back({{"t", times[ti]}, {"i", i}, {"j", j}, {"empirical_P", emp}, {"exact_P", P(i, j)}});
                csv.push_back(fmt::format("{},{},{},{},{}", num(times[ti]), i, j, num(emp), num(P(i, j))));
            }
        }
    }
    json tests = json::array();
    for (int i = 0; i < m; ++i) {
        std::vector<double> hs, hg;
        std::vector<long> ts(static_cast<std::size_t>(m), 0), tg(static_cast<std::size_t>(m), 0);
        for (const auto& o : results) {
            hs.insert(hs.end(), o.hold_s[i].begin(), o.hold_s[i].end());
            hg.insert(hg.end(), o.hold_g[i].begin(), o.hold_g[i].end());
            for (int j = 0; j < m; ++j) {
                ts[j] += o.trans_s[i][j];
                tg[j] += o.trans_g[i][j];
            }
        }
        json t{{"state", i}, {"holding_samples", {hs.size(), hg.size()}}};
        if (!hs.empty() && !hg.empty()) {
            const auto ks = stats::ks_two_sample(hs, hg);
            t["ks_statistic"] = ks.statistic;
            t["ks_p"] = ks.p_value;
        }
        const auto chi = stats::chi_square_homogeneity(ts, tg);
        t["chi2"] = chi.statistic;
        t["chi2_dof"] = chi.dof;
        t["chi2_p"] = chi.p_value;
        tests.push_back(t);
    }
    json pi = json::array();
    if (g.irreducible())
        for (double v : stationary_distribution(g)) pi.push_back(v);
    ctx.out.json_report("chain_validation.json", {{"paths_per_state", paths},
                                                  {"horizon", T},
                                                  {"rows", rows},
                                                  {"max_abs_deviation", worst_dev},
                                                  {"law_tests", tests},
                                                  {"stationary_distribution", pi}});
    ctx.out.csv("chain_validation.csv", "t,i,j,empirical_P,exact_P", csv);
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
    RunResult result;
    result.directory = options.output_dir ? *options.output_dir : fs::path(cfg.output.directory);
    ArtifactWriter out(result.directory, cfg);
    Context ctx{cfg, options, options.workers.value_or(cfg.ensemble.workers), out, 0, {}};

    auto selected = [&](const std::string& name) {
        if (!options.only.empty())
            return std::find(options.only.begin(), options.only.end(), name) != options.only.end();
        return cfg.wants(name);
    };

    out.put("scenario.json", canonicalize(cfg.document) + "\n");
    out.json_report("resolved.json", cfg.resolved());

    if (selected("apriori") || selected("martingale") || selected("occupation")) run_ensemble_experiments(ctx);
    if (selected("stability")) run_stability(ctx);
    if (selected("epsilon_sweep")) run_sweep(ctx);
    if (selected("chain_validation")) run_chain_validation(ctx);

    result.blown_up = ctx.blown_up;
    result.messages = std::move(ctx.messages);
    if (ctx.blown_up > cfg.ensemble.blowup_budget) {
        result.exit_code = exit_blowup;
        result.messages.push_back(
            fmt::format("{} blown-up paths exceed the budget of {}", ctx.blown_up, cfg.ensemble.blowup_budget));
    }

    json artifacts = json::array();
    for (const auto& name : out.names()) {
        const auto content = read_file(out.dir() / name);
        artifacts.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    json manifest{{"scenario_hash", cfg.hash},
                  {"seed", cfg.ensemble.seed},
                  {"exit_code", result.exit_code},
                  {"blown_up", result.blown_up},
                  {"artifacts", artifacts}};
    if (options.timestamps) manifest["created"] = timestamp();
    write_file(out.dir() / "manifest.json", manifest.dump(2) + "\n");
    result.artifacts = out.names();
    return result;
}

// ---------------------------------------------------------------------------

std::vector<fs::path> emit_plotdata(const fs::path& dir) {
    const fs::path plot = dir / "plot";
    std::vector<fs::path> written;
    auto load = [&](const char* name) -> std::optional<json> {
        const fs::path p = dir / name;
        if (!fs::exists(p)) return std::nullopt;
        return json::parse(read_file(p));
    };
    auto emit = [&](const std::string& name, const std::string& text) {
        fs::create_directories(plot);
        write_file(plot / name, text);
        written.push_back(plot / name);
    };

    if (auto s = load("stability.json")) {
        std::string text = "t,mean_w2,stderr,fit_rate\n";
        const auto t = s->at("times").get<std::vector<double>>();
        const auto m = s->at("mean_w2").get<std::vector<double>>();
        const auto e = s->at("stderr_w2").get<std::vector<double>>();
        const double rate = s->at("fitted_rate").get<double>();
        for (std::size_t k = 0; k < t.size(); ++k)
            text += fmt::format("{},{},{},{}\n", num(t[k]), num(m[k]), num(e[k]), num(rate));
        emit("stability.csv", text);
    }
    if (auto s = load("epsilon_sweep.json")) {
        auto rows = s->at("rows");
        std::vector<json> sorted(rows.begin(), rows.end());
        std::stable_sort(sorted.begin(), sorted.end(), [](const json& a, const json& b) {
            return a.at("epsilon").get<double>() > b.at("epsilon").get<double>();
        });
        std::string text = "epsilon,distance,ci_low,ci_high\n";
        for (const auto& r : sorted)
            text += fmt::format("{},{},{},{}\n", num(r.at("epsilon").get<double>()), num(r.at("distance").get<double>()),
                                num(r.at("ci_low").get<double>()), num(r.at("ci_high").get<double>()));
        emit("epsilon_sweep.csv", text);
    }
    if (auto s = load("chain_validation.json")) {
        std::string text = "t,i,j,empirical_P,exact_P\n";
        for (const auto& r : s->at("rows"))
            text += fmt::format("{},{},{},{},{}\n", num(r.at("t").get<double>()), r.at("i").get<int>(),
                                r.at("j").get<int>(), num(r.at("empirical_P").get<double>()),
                                num(r.at("exact_P").get<double>()));
        emit("chain_validation.csv", text);
    }
    std::string monitors;
    if (auto s = load("apriori.json")) {
        for (const auto& r : s->at("rows")) {
            const double t = r.at("t").get<double>();
            monitors += fmt::format("apriori_lhs1,{},{},{}\n", num(t), num(r.at("lhs1").get<double>()),
                                    num(r.at("se1").get<double>()));
            monitors += fmt::format("apriori_rhs1,{},{},0\n", num(t), num(r.at("rhs1").get<double>()));
            monitors += fmt::format("apriori_lhs2,{},{},{}\n", num(t), num(r.at("lhs2").get<double>()),
                                    num(r.at("se2").get<double>()));
            monitors += fmt::format("apriori_rhs2,{},{},0\n", num(t), num(r.at("rhs2").get<double>()));
        }
    }
    if (auto s = load("martingale.json")) {
        const auto T = s->at("T").get<std::vector<double>>();
        const auto m1 = s->at("m1_ratio").get<std::vector<double>>();
        const auto m2 = s->at("m2_ratio").get<std::vector<double>>();
        for (std::size_t k = 0; k < T.size(); ++k) {
            monitors += fmt::format("m1_sup_over_T,{},{},0\n", num(T[k]), num(m1[k]));
            monitors += fmt::format("m2_sup_over_T,{},{},0\n", num(T[k]), num(m2[k]));
        }
    }
    if (!monitors.empty()) emit("monitors.csv", "series,t,value,stderr\n" + monitors);
    if (written.empty()) throw std::runtime_error("no report files found in " + dir.string());
    return written;
}

}  // namespace snslab
