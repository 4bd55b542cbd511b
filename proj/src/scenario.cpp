#include "snslab/scenario.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "snslab/ergodicity.hpp"

namespace snslab {

using nlohmann::json;

std::string canonicalize(const json& doc) { return doc.dump(); }

std::string canonicalize(const std::string& text) { return canonicalize(json::parse(text)); }

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("sha256: cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("sha256: digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string scenario_hash(const std::string& text) { return sha256_hex(canonicalize(text)); }

json ScenarioConfig::experiment(const std::string& name) const {
    if (!experiments.contains(name)) return json::object();
    return experiments.at(name);
}

json ScenarioConfig::resolved() const {
    const auto& g = dynamics.chain.matrix();
    json gen = json::array();
    for (int i = 0; i < g.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
        gen.push_back(row);
    }
    json pi = json::array();
    for (double v : stationary_distribution(dynamics.chain)) pi.push_back(v);
    const auto& modes = *dynamics.forcing.mode_set();
    return {{"name", name},
            {"scenario_hash", hash},
            {"cutoff", modes.cutoff()},
            {"modes", modes.size()},
            {"nu", dynamics.nu},
            {"epsilon", dynamics.mollifier.epsilon()},
            {"epsilon_max", max_positive_epsilon(modes.cutoff())},
            {"lambda1", StokesSurrogate(modes).lambda1()},
            {"F", F},
            {"K", K},
            {"K_crit", K_crit},
            {"generator", gen},
            {"stationary_distribution", pi},
            {"seed", ensemble.seed},
            {"warnings", warnings}};
}

DynamicsSpec with_epsilon(const DynamicsSpec& spec, double epsilon) {
    DynamicsSpec s = spec;
    s.mollifier = MollifierSpec(epsilon, spec.forcing.mode_set());
    return s;
}

// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> top_level_keys{"schema",  "name",    "galerkin",    "dynamics", "noise",
                                           "chain",   "stepper", "initial",     "experiments",
                                           "ensemble", "output"};
const std::set<std::string> experiment_keys{"apriori", "martingale", "stability", "occupation",
                                            "epsilon_sweep", "chain_validation"};

class Checker {
public:
    std::vector<std::string> errors;

    /// Runs f, turning any exception into an error prefixed by `where`.
    bool guard(const std::string& where, const std::function<void()>& f) {
        try {
            f();
            return true;
        } catch (const std::exception& e) {
            errors.push_back(where + ": " + e.what());
            return false;
        }
    }

    void fail(const std::string& msg) { errors.push_back(msg); }
};

const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const auto& s = doc.at(key);
    if (!s.is_object()) throw std::invalid_argument(fmt::format("'{}' must be an object", key));
    return s;
}

double number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw std::invalid_argument(fmt::format("'{}' must be a number", key));
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw std::invalid_argument(fmt::format("'{}' must be finite", key));
    return d;
}

long long integer(const json& obj, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument(fmt::format("'{}' must be an integer", key));
    return v.get<long long>();
}

SpectralState parse_modes(const json& list, const ModeSetPtr& modes, const std::string& what) {
    if (!list.is_array()) throw std::invalid_argument(what + " must be a list of modes");
    SpectralState u(modes);
    std::set<std::size_t> seen;
    for (const auto& entry : list) {
        if (!entry.is_object() || !entry.contains("k")) throw std::invalid_argument(what + ": mode entry needs 'k'");
        const auto k = entry.at("k").get<std::array<int, 3>>();
        const Wavevector wk{k[0], k[1], k[2]};
        const auto idx = modes->find(wk);
        if (!idx) throw std::invalid_argument(what + ": wavevector " + to_string(wk) + " not retained");
        if (seen.count(*idx) || seen.count(modes->negated(*idx)))
            throw std::invalid_argument(what + ": wavevector " + to_string(wk) + " listed twice (with its conjugate)");
        seen.insert(*idx);
        std::array<double, 3> re{0, 0, 0}, im{0, 0, 0};
        if (entry.contains("re")) re = entry.at("re").get<std::array<double, 3>>();
        if (entry.contains("im")) im = entry.at("im").get<std::array<double, 3>>();
        Vec3c v;
        for (int c = 0; c < 3; ++c) {
            if (!std::isfinite(re[c]) || !std::isfinite(im[c]))
                throw std::invalid_argument(what + ": nonfinite coefficient");
            v[c] = {re[c], im[c]};
        }
        u.set_pair(wk, v);
    }
    if (!u.is_incompressible(1e-12)) throw std::invalid_argument(what + " is not divergence-free");
    return u;
}

/// A number, or {"default": x, "shells": {"<|k|^2>": value}}.
std::vector<double> parse_shell_values(const json& spec, const ModeSet& modes, double fallback, const std::string& what) {
    std::vector<double> out(modes.size(), fallback);
    if (spec.is_null()) return out;
    if (spec.is_number()) {
        std::fill(out.begin(), out.end(), spec.get<double>());
        return out;
    }
    if (!spec.is_object()) throw std::invalid_argument(what + " must be a number or a shell table");
    const double def = number(spec, "default", fallback);
    std::fill(out.begin(), out.end(), def);
    if (spec.contains("shells")) {
        std::set<int> present;
        for (std::size_t i = 0; i < modes.size(); ++i) present.insert(modes[i].norm2());
        for (const auto& [key, value] : spec.at("shells").items()) {
            std::size_t used = 0;
            int k2 = 0;
            try {
                k2 = std::stoi(key, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != key.size() || !present.count(k2))
                throw std::invalid_argument(what + ": shell key '" + key + "' is not a retained |k|^2");
            if (!value.is_number()) throw std::invalid_argument(what + ": shell values must be numbers");
            for (std::size_t i = 0; i < modes.size(); ++i)
                if (modes[i].norm2() == k2) out[i] = value.get<double>();
        }
    }
    for (double v : out)
        if (!std::isfinite(v)) throw std::invalid_argument(what + ": nonfinite value");
    return out;
}

std::uint64_t seed_value(const json& obj, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw std::invalid_argument(fmt::format("'{}' must be a nonnegative integer", key));
    return v.get<std::uint64_t>();
}

void check_epsilon_list(const json& list, int cutoff) {
    if (!list.is_array() || list.empty()) throw std::invalid_argument("'epsilons' must be a nonempty list");
    const double eps_max = max_positive_epsilon(cutoff);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& v : list) {
        if (!v.is_number()) throw std::invalid_argument("'epsilons' entries must be numbers");
        const double e = v.get<double>();
        if (!(e >= 0.0) || e > eps_max)
            throw std::invalid_argument(fmt::format("epsilon {} outside the positivity range [0, {:.6g}]", e, eps_max));
        if (!(e < prev)) throw std::invalid_argument("'epsilons' must be strictly decreasing");
        prev = e;
    }
    if (prev != 0.0) throw std::invalid_argument("'epsilons' must end at 0");
}

}  // namespace

ValidationResult validate_config(const std::string& text) {
    ValidationResult result;
    Checker chk;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("parse error: ") + e.what());
        return result;
    }
    if (!doc.is_object()) {
        result.errors.push_back("scenario must be a JSON object");
        return result;
    }
    for (const auto& [key, value] : doc.items())
        if (!top_level_keys.count(key)) chk.fail("unknown top-level key '" + key + "'");
    if (!doc.contains("schema") || !doc.at("schema").is_string() || doc.at("schema").get<std::string>() != scenario_schema)
        chk.fail(fmt::format("'schema' must be \"{}\"", scenario_schema));

    ScenarioConfig cfg;
    cfg.document = doc;
    cfg.hash = sha256_hex(canonicalize(doc));
    if (doc.contains("name") && doc.at("name").is_string()) cfg.name = doc.at("name").get<std::string>();

    // galerkin
    ModeSetPtr modes;
    chk.guard("galerkin", [&] {
        const auto& g = section(doc, "galerkin");
        const long long n = integer(g, "cutoff", 2);
        if (n < 1 || n > 16) throw std::invalid_argument("'cutoff' must lie in [1, 16]");
        modes = ModeSet::make(static_cast<int>(n));
    });
    if (!modes) {
        result.errors = std::move(chk.errors);
        return result;
    }

    // chain
    bool chain_ok = chk.guard("chain", [&] {
        const auto& c = section(doc, "chain");
        if (!c.contains("rates")) {
            cfg.dynamics.chain = Generator(Eigen::MatrixXd::Zero(1, 1));
            return;
        }
        const auto& rates = c.at("rates");
        if (!rates.is_array() || rates.empty()) throw std::invalid_argument("'rates' must be a square matrix");
        const auto m = static_cast<Eigen::Index>(rates.size());
        Eigen::MatrixXd g(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& row = rates.at(i);
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m)
                throw std::invalid_argument("'rates' must be a square matrix");
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!row.at(j).is_number()) throw std::invalid_argument("'rates' entries must be numbers");
                g(i, j) = row.at(j).get<double>();
                if (i != j && !(g(i, j) >= 0.0))
                    throw std::invalid_argument(fmt::format("negative rate at ({}, {})", i, j));
            }
        }
        const bool diagonal_given = c.contains("diagonal_given") && c.at("diagonal_given").get<bool>();
        cfg.dynamics.chain = diagonal_given ? Generator::from_full(g) : Generator(g);
        if (!cfg.dynamics.chain.irreducible()) throw std::invalid_argument("generator is reducible");
    });
    const int regimes = chain_ok ? cfg.dynamics.chain.regimes() : 1;

    // dynamics
    chk.guard("dynamics", [&] {
        const auto& d = section(doc, "dynamics");
        cfg.dynamics.nu = number(d, "nu", 1.0);
        if (!(cfg.dynamics.nu > 0.0)) throw std::invalid_argument("'nu' must be positive");
        cfg.dynamics.nonlinear = !d.contains("nonlinear") || d.at("nonlinear").get<bool>();
        const double eps = number(d, "epsilon", 0.0);
        const double eps_max = max_positive_epsilon(modes->cutoff());
        if (eps < 0.0 || eps > eps_max)
            throw std::invalid_argument(
                fmt::format("'epsilon' = {} outside the multiplier-positivity range [0, {:.6g}]", eps, eps_max));
        cfg.dynamics.mollifier = MollifierSpec(eps, modes);
        cfg.dynamics.forcing =
            d.contains("forcing") ? parse_modes(d.at("forcing"), modes, "forcing") : SpectralState(modes);
    });
    if (cfg.dynamics.forcing.empty()) cfg.dynamics.forcing = SpectralState(modes);

    // noise
    chk.guard("noise", [&] {
        const auto& n = section(doc, "noise");
        cfg.dynamics.q.q = parse_shell_values(n.value("q", json()), *modes, 0.0, "'q'");
        for (double v : cfg.dynamics.q.q)
            if (v < 0.0) throw std::invalid_argument("'q' values must be nonnegative");
        cfg.dynamics.sigma.gains.clear();
        const json gains = n.value("gains", json(1.0));
        if (gains.is_array()) {
            if (static_cast<int>(gains.size()) != regimes)
                throw std::invalid_argument(fmt::format("'gains' must list {} regimes", regimes));
            for (int r = 0; r < regimes; ++r)
                cfg.dynamics.sigma.gains.push_back(parse_shell_values(gains.at(r), *modes, 1.0, "'gains'"));
        } else {
            for (int r = 0; r < regimes; ++r)
                cfg.dynamics.sigma.gains.push_back(parse_shell_values(gains, *modes, 1.0, "'gains'"));
        }
        cfg.dynamics.jumps = JumpSpec{};
        if (n.contains("marks")) {
            const auto& marks = n.at("marks");
            if (!marks.is_array()) throw std::invalid_argument("'marks' must be a list");
            cfg.dynamics.jumps.g.assign(static_cast<std::size_t>(regimes), {});
            for (std::size_t j = 0; j < marks.size(); ++j) {
                const auto& mk = marks.at(j);
                const double w = number(mk, "weight", -1.0);
                if (!(w > 0.0)) throw std::invalid_argument(fmt::format("mark {}: 'weight' must be positive", j));
                cfg.dynamics.jumps.weights.push_back(w);
                if (!mk.contains("g") || !mk.at("g").is_array())
                    throw std::invalid_argument(fmt::format("mark {}: 'g' must list one mode list per regime", j));
                const auto& g = mk.at("g");
                if (static_cast<int>(g.size()) != regimes)
                    throw std::invalid_argument(fmt::format("mark {}: 'g' must list {} regimes", j, regimes));
                for (int r = 0; r < regimes; ++r)
                    cfg.dynamics.jumps.g[r].push_back(
                        parse_modes(g.at(r), modes, fmt::format("mark {} regime {} jump vector", j, r)));
            }
            if (marks.empty()) cfg.dynamics.jumps.g.clear();
        }
    });

    // stepper
    chk.guard("stepper", [&] {
        const auto& s = section(doc, "stepper");
        auto& st = cfg.stepper;
        st.dt = number(s, "dt", 0.01);
        if (!(st.dt > 0.0)) throw std::invalid_argument("'dt' must be positive");
        cfg.horizon = number(s, "T", 1.0);
        if (!(cfg.horizon > 0.0)) throw std::invalid_argument("'T' must be positive");
        auto multiple = [](double a, double b) {
            const double r = a / b;
            return std::llround(r) >= 1 && std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
        };
        if (!multiple(cfg.horizon, st.dt)) throw std::invalid_argument("'T' must be a multiple of 'dt'");
        st.noise_resolution = number(s, "noise_resolution", 0.0);
        if (st.noise_resolution < 0.0) throw std::invalid_argument("'noise_resolution' must be nonnegative");
        if (st.noise_resolution > 0.0 && !multiple(st.dt, st.noise_resolution))
            throw std::invalid_argument("'dt' must be a multiple of 'noise_resolution'");
        st.max_substeps = static_cast<int>(integer(s, "max_substeps", 64));
        if (st.max_substeps < 1) throw std::invalid_argument("'max_substeps' must be at least 1");
        st.sample_interval = number(s, "sample_interval", st.dt * std::max(1.0, std::round(0.1 / st.dt)));
        if (!multiple(st.sample_interval, st.dt))
            throw std::invalid_argument("'sample_interval' must be a multiple of 'dt'");
        st.blowup_threshold = number(s, "blowup_threshold", 1e12);
        if (!(st.blowup_threshold > 0.0)) throw std::invalid_argument("'blowup_threshold' must be positive");
    });

    // initial data
    chk.guard("initial", [&] {
        const auto& in = section(doc, "initial");
        cfg.initial_regime = static_cast<int>(integer(in, "regime", 0));
        if (cfg.initial_regime < 0 || cfg.initial_regime >= regimes)
            throw std::invalid_argument(fmt::format("'regime' must lie in [0, {})", regimes));
        if (in.contains("modes") && in.contains("random"))
            throw std::invalid_argument("give either 'modes' or 'random', not both");
        if (in.contains("modes")) {
            cfg.initial = parse_modes(in.at("modes"), modes, "initial state");
        } else if (in.contains("random")) {
            const auto& r = in.at("random");
            RandomStream rng(seed_value(r, "seed", 0), 0, Substream::initial);
            cfg.initial = random_state(modes, rng, number(r, "slope", 1.0));
            const double energy = number(r, "energy", 1.0);
            if (energy < 0.0) throw std::invalid_argument("'energy' must be nonnegative");
            const double e0 = h_norm2(cfg.initial);
            if (e0 > 0.0) cfg.initial *= std::sqrt(energy / e0);
        } else {
            cfg.initial = SpectralState(modes);
        }
    });
    if (cfg.initial.empty()) cfg.initial = SpectralState(modes);

    // ensemble and output
    chk.guard("ensemble", [&] {
        const auto& e = section(doc, "ensemble");
        cfg.ensemble.paths = static_cast<int>(integer(e, "paths", 20));
        if (cfg.ensemble.paths < 1) throw std::invalid_argument("'paths' must be at least 1");
        cfg.ensemble.seed = seed_value(e, "seed", 1);
        cfg.ensemble.workers = static_cast<int>(integer(e, "workers", 1));
        if (cfg.ensemble.workers < 1) throw std::invalid_argument("'workers' must be at least 1");
        cfg.ensemble.blowup_budget = static_cast<int>(integer(e, "blowup_budget", 0));
        if (cfg.ensemble.blowup_budget < 0) throw std::invalid_argument("'blowup_budget' must be nonnegative");
    });
    chk.guard("output", [&] {
        const auto& o = section(doc, "output");
        if (o.contains("directory")) cfg.output.directory = o.at("directory").get<std::string>();
        if (o.contains("formats")) {
            cfg.output.formats = o.at("formats").get<std::vector<std::string>>();
            for (const auto& f : cfg.output.formats)
                if (f != "json" && f != "csv") throw std::invalid_argument("unknown format '" + f + "'");
        }
    });

    // experiments
    chk.guard("experiments", [&] {
        const auto& ex = section(doc, "experiments");
        cfg.experiments = ex;
        for (const auto& [key, value] : ex.items()) {
            if (!experiment_keys.count(key)) throw std::invalid_argument("unknown experiment '" + key + "'");
            if (!value.is_object()) throw std::invalid_argument("experiment '" + key + "' must be an object");
        }
        if (ex.contains("epsilon_sweep") && ex.at("epsilon_sweep").contains("epsilons"))
            check_epsilon_list(ex.at("epsilon_sweep").at("epsilons"), modes->cutoff());
        for (const char* key : {"occupation", "epsilon_sweep"}) {
            if (!ex.contains(key)) continue;
            for (const char* list : {"features", "observables"}) {
                if (!ex.at(key).contains(list)) continue;
                for (const auto& name : ex.at(key).at(list).get<std::vector<std::string>>())
                    if (!is_registered_observable(name, *modes))
                        throw std::invalid_argument("unregistered observable '" + name + "'");
            }
        }
        if (ex.contains("stability")) {
            const auto& s = ex.at("stability");
            if (s.contains("initial_b")) parse_modes(s.at("initial_b"), modes, "stability initial_b");
            const auto rb = integer(s, "regime_b", cfg.initial_regime);
            if (rb < 0 || rb >= regimes) throw std::invalid_argument("'regime_b' out of range");
        }
    });

    if (chk.errors.empty()) {
        chk.guard("dynamics", [&] {
            const Dynamics dyn(cfg.dynamics);
            cfg.K = dyn.K();
            cfg.K_crit = dyn.k_crit();
            cfg.F = dyn.forcing_level();
        });
    }
    if (!chk.errors.empty()) {
        result.errors = std::move(chk.errors);
        return result;
    }
    if (cfg.K >= cfg.K_crit)
        cfg.warnings.push_back(
            fmt::format("K >= K_crit = {:.6g}: exponential-stability threshold not satisfied", cfg.K_crit));
    result.warnings = cfg.warnings;
    result.config = std::move(cfg);
    return result;
}

}  // namespace snslab
