#pragma once

#include <map>
#include <string>
#include <vector>

#include "snslab/galerkin.hpp"

namespace snslab {

/// Fourier transform of the normalized radial bump C exp(1/(|x|^2 - 1)) on the
/// unit ball, evaluated at |xi| by adaptive radial quadrature.
double bump_transform(double xi);

/// Smallest positive zero of bump_transform.
double bump_transform_first_zero();

/// Largest epsilon for which every multiplier on a cutoff-N mode set is
/// strictly positive (epsilon * N * sqrt(3) below the first zero).
double max_positive_epsilon(int cutoff);

/// Leray mollifier k_eps as a Fourier multiplier m_eps(k) = eta_hat(eps |k|).
class MollifierSpec {
public:
    MollifierSpec() = default;
    MollifierSpec(double epsilon, ModeSetPtr modes);

    double epsilon() const { return epsilon_; }
    const ModeSet& modes() const { return *modes_; }
    const ModeSetPtr& mode_set() const { return modes_; }
    bool is_identity() const { return epsilon_ == 0.0; }

    /// Multiplier for the mode at storage index i.
    double multiplier(std::size_t i) const { return per_mode_[i]; }
    /// Shell table keyed by |k|^2.
    const std::map<int, double>& table() const { return table_; }

    std::string table_csv() const;

private:
    double epsilon_ = 0.0;
    ModeSetPtr modes_;
    std::map<int, double> table_;
    std::vector<double> per_mode_;
};

MollifierSpec build_multiplier(double epsilon, ModeSetPtr modes);

/// u_hat(k) -> m_eps(k) u_hat(k).
SpectralState mollify(const SpectralState& u, const MollifierSpec& m);

}  // namespace snslab
