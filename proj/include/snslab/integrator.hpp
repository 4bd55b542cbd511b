#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "snslab/chain.hpp"
#include "snslab/driving_noise.hpp"
#include "snslab/galerkin.hpp"
#include "snslab/mollifier.hpp"
#include "snslab/noise.hpp"
#include "snslab/nonlinearity.hpp"

namespace snslab {

/// Parameters of the regularized equation
///   du + [nu A u + B_{k_eps}(u, u)] dt = f dt + sigma(r) dW + int G(r(t-), z) N~_1(dz, dt).
/// epsilon = 0 in the mollifier selects the unregularized equation.
struct DynamicsSpec {
    double nu = 1.0;
    SpectralState forcing;
    MollifierSpec mollifier;
    QWienerSpec q;
    RegimeDiffusion sigma;
    JumpSpec jumps;
    Generator chain;
    bool nonlinear = true;  ///< false drops B entirely (linear test scenarios)
};

/// DynamicsSpec with everything the stepper needs precomputed. Immutable and
/// shareable between threads.
class Dynamics {
public:
    explicit Dynamics(DynamicsSpec spec);

    const DynamicsSpec& spec() const { return spec_; }
    const ModeSetPtr& modes() const { return spec_.forcing.mode_set(); }
    const NonlinearityEngine& engine() const { return engine_; }
    const IntervalTable& intervals() const { return intervals_; }
    const HypothesesAReport& hypotheses() const { return hypotheses_; }

    int regimes() const { return spec_.chain.regimes(); }
    double nu() const { return spec_.nu; }
    double lambda1() const { return lambda1_; }
    /// F = ||f||^2_{V'} (time-independent forcing).
    double forcing_level() const { return forcing_level_; }
    double K() const { return hypotheses_.K; }
    /// (nu^3 lambda_1 - F / nu) / 2.
    double k_crit() const { return k_crit_; }

    const SpectralState& compensator(int regime) const { return compensator_[regime]; }
    double jump_p2(int regime) const { return jump_p2_[regime]; }
    double sigma_lq2(int regime) const { return sigma_lq2_[regime]; }
    double gain(int regime, std::size_t mode) const { return spec_.sigma.gains[regime][mode]; }

private:
    DynamicsSpec spec_;
    NonlinearityEngine engine_;
    IntervalTable intervals_;
    HypothesesAReport hypotheses_;
    double lambda1_ = 1.0;
    double forcing_level_ = 0.0;
    double k_crit_ = 0.0;
    std::vector<SpectralState> compensator_;
    std::vector<double> jump_p2_;
    std::vector<double> sigma_lq2_;
};

struct StepperConfig {
    double dt = 0.01;
    double noise_resolution = 0.0;  ///< Wiener cell width; 0 means dt
    int max_substeps = 64;          ///< per base step
    double sample_interval = 0.1;   ///< must be a multiple of dt
    bool store_states = false;
    double blowup_threshold = 1e12; ///< on |u|^2
};

/// Running terms of the discrete Ito energy identity.
struct LedgerSnapshot {
    double dissipation = 0.0;       ///< int ||u||^2 ds
    double forcing_work = 0.0;      ///< 2 int <f, u> ds
    double compensator_work = 0.0;  ///< -2 int (u, sum_j G nu_j) ds
    double nonlinear_work = 0.0;    ///< -2 int <B_{k_eps}(u, u), u> ds (diagnostic, ~0)
    double ito_correction = 0.0;    ///< int ||sigma(r)||^2_{L_Q} ds
    double quadratic_variation = 0.0;  ///< realized sum |sigma dW|^2
    double m1 = 0.0;                ///< int <u, sigma(r) dW>
    double m2 = 0.0;                ///< int int (|u + G|^2 - |u|^2) N~_1(dz, ds)
    double jump_p2_integral = 0.0;  ///< int int |G(r, z)|^2 nu_1(dz) ds
    double jump_sum = 0.0;          ///< sum over jumps of |u- + G|^2 - |u-|^2
    double forcing_dual = 0.0;      ///< int ||f||^2_{V'} ds
};

struct PathSample {
    double t = 0.0;
    int regime = 0;
    double energy = 0.0;     ///< |u|^2
    double enstrophy = 0.0;  ///< ||u||^2
    double sup_energy = 0.0; ///< max of |u|^2 over step ends so far
    double m1_sup = 0.0;     ///< max |M_1| over step ends so far
    double m2_sup = 0.0;
    LedgerSnapshot ledger;
};

struct JumpRecord {
    double time = 0.0;
    std::size_t mark = 0;
    int regime = 0;
    double energy_change = 0.0;
};

struct PathRecord {
    double initial_energy = 0.0;
    std::vector<PathSample> samples;
    std::vector<SpectralState> states;  ///< at sample times, when requested
    ChainPath chain;
    std::vector<JumpRecord> jumps;
    std::size_t substeps = 0;
    bool blew_up = false;
    std::string diagnostic;
    std::uint64_t noise_digest = 0;
    std::vector<DrivingEvent> transcript;

    double horizon() const { return samples.empty() ? 0.0 : samples.back().t; }
};

/// One substep with frozen regime and a supplied Q-Wiener standard increment
/// (variance h per entry, layout as in wiener_from_standard):
///   u+ = e^{-nu A h} u + phi(h) (f - c_r - B_{k_eps}(u, u)) + s(h) sigma_r dW
/// with phi = (1 - e^{-nu lambda h}) / (nu lambda) and
/// s^2 = (1 - e^{-2 nu lambda h}) / (2 nu lambda h), which makes the step exact
/// in law for the linear, frozen-regime dynamics.
SpectralState step(const Dynamics& dyn, const SpectralState& u, int regime, double h,
                   std::span<const double> standard_increment);
/// As above, drawing the Wiener increment from rng.
SpectralState step(const Dynamics& dyn, const SpectralState& u, int regime, double h, RandomStream& rng);

PathRecord simulate_path(const Dynamics& dyn, const StepperConfig& cfg, const SpectralState& u0, int i0,
                         double T, std::uint64_t seed, std::uint32_t path_index);

/// Two legs driven by the same W, N_1 and N_2 realizations.
std::pair<PathRecord, PathRecord> simulate_coupled_pair(const Dynamics& dyn, const StepperConfig& cfg,
                                                        const SpectralState& u0_a, const SpectralState& u0_b,
                                                        int i0_a, int i0_b, double T, std::uint64_t seed,
                                                        std::uint32_t path_index);

/// |u(t)|^2 + 2 nu int ||u||^2 - [|u0|^2 + 2 int <f,u> + QV + 2 M_1 + M_2 + int int |G|^2 nu_1]
/// at every sample, with the realized quadratic variation standing in for the
/// Ito correction.
std::vector<double> energy_ledger_residual(const PathRecord& p, double nu);

}  // namespace snslab
