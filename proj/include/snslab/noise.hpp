#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snslab/galerkin.hpp"
#include "snslab/random.hpp"

namespace snslab {

class ChainPath;

/// Covariance of the Q-Wiener process, diagonal in the mode basis.
struct QWienerSpec {
    std::vector<double> q;  ///< per wavevector, q(k) = q(-k) >= 0

    static QWienerSpec zero(const ModeSet& modes) { return {std::vector<double>(modes.size(), 0.0)}; }
    double trace() const;
};

/// sigma(i) as a per-mode gain, one row per regime.
struct RegimeDiffusion {
    std::vector<std::vector<double>> gains;

    std::size_t regimes() const { return gains.size(); }
    /// ||sigma(i)||^2_{L_Q} = sum_k sigma_i(k)^2 q(k).
    double lq_norm2(std::size_t regime, const QWienerSpec& q) const;
};

/// Finite mark set Z with intensity weights and per-regime jump vectors.
struct JumpSpec {
    std::vector<double> weights;                ///< nu_1({z_j}) > 0
    std::vector<std::vector<SpectralState>> g;  ///< g[regime][mark]

    std::size_t marks() const { return weights.size(); }
    double total_rate() const;
    /// sum_j G(i, z_j) nu_1({z_j}); the compensator drift of regime i.
    SpectralState compensator_drift(std::size_t regime, ModeSetPtr modes) const;
    /// int_Z |G(i, z)|^p nu_1(dz).
    double moment(std::size_t regime, int p) const;
};

struct RegimeHypotheses {
    double sigma_lq2 = 0.0;
    double g_p1 = 0.0;
    double g_p2 = 0.0;
    double g_p4 = 0.0;
};

struct HypothesesAReport {
    double K = 0.0;
    std::vector<RegimeHypotheses> per_regime;
};

HypothesesAReport verify_hypotheses_A(const RegimeDiffusion& d, const QWienerSpec& q,
                                      const JumpSpec& j);

/// Maps 4 standard increments per +-k pair (two polarizations, real and
/// imaginary part) to a divergence-free, reality-symmetric Q-Wiener increment
/// with E|dW(k)|^2 = q(k) * (variance of the inputs).
void wiener_from_standard(const QWienerSpec& q, std::span<const double> z, SpectralState& out);
inline std::size_t standard_dimension(const ModeSet& modes) { return 2 * modes.size(); }

SpectralState sample_wiener_increment(const QWienerSpec& q, ModeSetPtr modes, double dt,
                                      RandomStream& rng);

struct JumpAtom {
    double time = 0.0;
    std::size_t mark = 0;
};

/// Exact compound-Poisson atoms of N_1 on [t0, t1), sorted by time.
std::vector<JumpAtom> sample_jump_atoms(const JumpSpec& j, double t0, double t1, RandomStream& rng);

struct RealizedJump {
    double time = 0.0;
    std::size_t mark = 0;
    int regime = 0;  ///< regime in force at the left limit
    SpectralState value;
};

struct JumpSample {
    std::vector<RealizedJump> jumps;
    SpectralState compensator;  ///< int sum_j G(r(s), z_j) nu_1({z_j}) ds over the window
};

JumpSample sample_jumps(const JumpSpec& j, const ChainPath& regimes, double t0, double t1,
                        ModeSetPtr modes, RandomStream& rng);

/// Random divergence-free state with i.i.d. Gaussian coefficients scaled by
/// |k|^-slope on the retained modes.
SpectralState random_state(ModeSetPtr modes, RandomStream& rng, double slope = 0.0);

}  // namespace snslab
