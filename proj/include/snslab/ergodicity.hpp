#pragma once

// Measurements on simulated paths: occupation measures, time averages,
// exponential-stability experiments, martingale and a-priori-estimate
// monitors, and the epsilon sweep.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snslab/integrator.hpp"
#include "snslab/stats.hpp"

namespace snslab {

/// A named scalar function of (u, regime). Registered names:
///   one, energy, enstrophy, energy_ratio (|u|^2 / (1 + |u|^2)),
///   enstrophy_ratio, energy_exp (exp(-|u|^2)), regime:<j> (indicator),
///   mode_re:<x>,<y>,<z>:<c>, mode_im:<x>,<y>,<z>:<c>, mode_atan:<x>,<y>,<z>:<c>
///   (arctan of the real part; bounded).
class Observable {
public:
    /// Throws std::invalid_argument for an unregistered name.
    Observable(const std::string& name, const ModeSet& modes);

    const std::string& name() const { return name_; }
    bool bounded() const { return bounded_; }
    /// Whether the stored state is required (mode coordinates).
    bool needs_state() const { return needs_state_; }
    double operator()(const PathSample& s, const SpectralState* u) const;

private:
    std::string name_;
    bool bounded_ = false;
    bool needs_state_ = false;
    std::function<double(const PathSample&, const SpectralState*)> fn_;
};

bool is_registered_observable(const std::string& name, const ModeSet& modes);

/// Empirical realization of the time-averaged transition law: a weighted cloud
/// of (feature vector, regime) points with trapezoidal time weights.
struct OccupationMeasure {
    std::vector<std::string> features;
    int regimes = 1;
    double horizon = 0.0;
    double burn_in = 0.0;  ///< 0 for the literal time average starting at 0
    std::vector<std::vector<double>> points;
    std::vector<int> regime;
    std::vector<double> weights;          ///< sums to 1
    std::vector<double> regime_marginal;  ///< sums to 1

    /// Weighted mean of feature f.
    double mean(std::size_t f) const;
};

/// Time-uniform occupation measure of a single path over [burn_in, t_n].
OccupationMeasure occupation_measure(const PathRecord& path, const ModeSet& modes, double t_n,
                                     const std::vector<std::string>& features, int regimes, double burn_in = 0.0);
/// Ensemble version: each path contributes equal mass.
OccupationMeasure occupation_measure(std::span<const PathRecord> paths, const ModeSet& modes, double t_n,
                                     const std::vector<std::string>& features, int regimes, double burn_in = 0.0);
/// Equal-mass mixture of the selected measures (repeats allowed).
OccupationMeasure mix(std::span<const OccupationMeasure> parts, std::span<const std::size_t> selection);

/// (1/t) int_0^t phi(u(s), r(s)) ds by the trapezoidal rule over the samples.
/// phi must be a registered bounded observable.
double kb_average(const PathRecord& path, const ModeSet& modes, const std::string& phi, double t);

/// Sum over regimes of |regime-weight difference| plus, per regime and per
/// feature, the Wasserstein-1 distance of the conditional marginals. A regime
/// carrying no mass in one measure is represented there by a point mass at 0.
double empirical_distance(const OccupationMeasure& a, const OccupationMeasure& b);

struct StabilityReport {
    std::vector<double> times;
    std::vector<double> mean_w2;  ///< ensemble mean of |u_1 - u_2|^2
    std::vector<double> se_w2;
    double fit_start = 0.0;
    double fit_end = 0.0;
    stats::LinearFit fit;  ///< log(mean_w2) against t over the tail window
    bool fit_valid = false;
    std::vector<double> effective_rate;  ///< nu lambda_1 - (1/(nu t)) E int ||u_1||^2
    double K = 0.0;
    double K_crit = 0.0;
    bool below_threshold = false;
    int replicates = 0;
    int excluded = 0;  ///< replicates dropped after blow-up
    std::string verdict;  ///< "decay observed", "decay not observed" or "inconclusive"

    double fitted_rate() const { return fit.slope; }
};

struct StabilityConfig {
    double T = 10.0;
    int replicates = 50;
    std::uint64_t seed = 1;
    double fit_window = 0.5;  ///< tail fraction of [0, T] used by the fit
    int workers = 1;
};

StabilityReport stability_experiment(const Dynamics& dyn, const StepperConfig& cfg, const SpectralState& u0_a,
                                     const SpectralState& u0_b, int i0_a, int i0_b, const StabilityConfig& sc);

struct MartingaleMonitor {
    std::vector<double> T;
    std::vector<double> m1_ratio;  ///< M_1*(T) / T
    std::vector<double> m2_ratio;
    stats::LinearFit m1_fit;  ///< log-log
    stats::LinearFit m2_fit;
    bool m1_fit_valid = false;
    bool m2_fit_valid = false;
};

/// Running sup of |M_i| over [0, T] divided by T on the dyadic grid t_min 2^k.
MartingaleMonitor martingale_monitor(const PathRecord& path, double t_min);
/// Ensemble mean of the per-path ratios.
MartingaleMonitor martingale_monitor(std::span<const PathRecord> paths, double t_min);

struct AprioriRow {
    double t = 0.0;
    double lhs1 = 0.0, rhs1 = 0.0, se1 = 0.0;  ///< E|u|^2 + nu E int ||u||^2 vs its bound
    bool violated1 = false;
    double lhs2 = 0.0, rhs2 = 0.0, se2 = 0.0;  ///< E sup |u|^2 + nu E int ||u||^2 vs its bound
    bool violated2 = false;
};

struct AprioriReport {
    double K = 0.0;
    double F = 0.0;
    double nu = 1.0;
    std::vector<AprioriRow> rows;
    int violations1 = 0;
    int violations2 = 0;
    int excluded = 0;
};

/// Monte-Carlo check of the two energy estimates at every common sample time.
/// A violation is flagged only when LHS - RHS exceeds three combined
/// standard errors.
AprioriReport apriori_monitor(std::span<const PathRecord> paths, const Dynamics& dyn);

struct SweepConfig {
    std::vector<double> epsilons;  ///< strictly decreasing, ending at 0
    double T = 10.0;
    int replicates = 20;
    std::uint64_t seed = 1;
    std::vector<std::string> features{"energy", "enstrophy"};
    int bootstrap = 200;
    int workers = 1;
    bool mollify_initial = true;  ///< start the eps run from k_eps u0
};

struct SweepRow {
    double epsilon = 0.0;
    double distance = 0.0;  ///< to the eps = 0 measure
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> feature_means;
    double regime0_weight = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  ///< eps descending, eps = 0 last (distance 0)
    double noise_floor = 0.0;    ///< eps = 0 against an independent eps = 0 ensemble
    double noise_floor_ci_low = 0.0;
    double noise_floor_ci_high = 0.0;
    double kendall_tau = 0.0;  ///< rank correlation of distance with eps over eps > 0
    stats::LinearFit trend;    ///< distance against eps over eps > 0 (valid with >= 2 rows)
    int excluded = 0;
};

SweepReport epsilon_sweep(const DynamicsSpec& base, const StepperConfig& cfg, const SpectralState& u0, int i0,
                          const SweepConfig& sc);

/// Kendall rank correlation (tau-a).
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace snslab
