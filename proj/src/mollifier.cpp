#include "snslab/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace snslab {

namespace {

constexpr double kQuadTol = 1e-13;

double bump_profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(1.0 / (r * r - 1.0));
}

double radial_integral(double xi) {
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [xi](double r) {
        const double x = xi * r;
        const double j0 = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return bump_profile(r) * r * r * j0;
    };
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 20, kQuadTol, &err);
}

double normalization() {
    static const double norm = radial_integral(0.0);
    return norm;
}

}  // namespace

double bump_transform(double xi) {
    xi = std::abs(xi);
    if (xi == 0.0) return 1.0;
    return radial_integral(xi) / normalization();
}

double bump_transform_first_zero() {
    static const double zero = [] {
        double lo = 0.0;
        double hi = 0.25;
        while (bump_transform(hi) > 0.0) {
            lo = hi;
            hi += 0.25;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (bump_transform(mid) > 0.0 ? lo : hi) = mid;
        }
        return lo;
    }();
    return zero;
}

double max_positive_epsilon(int cutoff) {
    return bump_transform_first_zero() / (cutoff * std::sqrt(3.0));
}

MollifierSpec::MollifierSpec(double epsilon, ModeSetPtr modes)
    : epsilon_(epsilon), modes_(std::move(modes)) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("build_multiplier: epsilon must be a finite nonnegative number");
    per_mode_.resize(modes_->size());
    for (std::size_t i = 0; i < modes_->size(); ++i) {
        const int k2 = (*modes_)[i].norm2();
        auto it = table_.find(k2);
        if (it == table_.end()) {
            const double value = epsilon == 0.0 ? 1.0 : bump_transform(epsilon * std::sqrt(double(k2)));
            it = table_.emplace(k2, value).first;
        }
        per_mode_[i] = it->second;
    }
}

std::string MollifierSpec::table_csv() const {
    std::string out = "k_abs,multiplier\n";
    for (const auto& [k2, m] : table_)
        out += fmt::format("{:.17g},{:.17g}\n", std::sqrt(double(k2)), m);
    return out;
}

MollifierSpec build_multiplier(double epsilon, ModeSetPtr modes) {
    return MollifierSpec(epsilon, std::move(modes));
}

SpectralState mollify(const SpectralState& u, const MollifierSpec& m) {
    if (!same_modes(u.modes(), m.modes())) throw std::invalid_argument("mollify: mode-set mismatch");
    if (m.is_identity()) return u;
    SpectralState out = u;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = m.multiplier(i);
        for (auto& c : out[i]) c *= s;
    }
    return out;
}

}  // namespace snslab
