#include "snslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace snslab::stats {

MeanSe mean_se(std::span<const double> x) {
    MeanSe r;
    r.n = x.size();
    if (x.empty()) return r;
    r.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    if (x.size() < 2) return r;
    double ss = 0.0;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / double(x.size() - 1));
    r.se = r.sd / std::sqrt(double(x.size()));
    return r;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need matched series of length >= 2");
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double sse = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (x.size() > 2) f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
    return f;
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    TestResult r;
    r.statistic = d;
    r.p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) return 1.0;
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_homogeneity: column count mismatch");
    const double ta = std::accumulate(a.begin(), a.end(), 0.0);
    const double tb = std::accumulate(b.begin(), b.end(), 0.0);
    TestResult r;
    if (ta <= 0.0 || tb <= 0.0) return r;
    const double total = ta + tb;
    int columns = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double col = double(a[k]) + double(b[k]);
        if (col <= 0.0) continue;
        ++columns;
        const double ea = ta * col / total, eb = tb * col / total;
        r.statistic += (a[k] - ea) * (a[k] - ea) / ea + (b[k] - eb) * (b[k] - eb) / eb;
    }
    r.dof = std::max(0, columns - 1);
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double normal_two_sided_p(double z) { return boost::math::erfc(std::abs(z) / std::sqrt(2.0)); }

namespace {
std::vector<std::pair<double, double>> normalized_atoms(std::span<const double> x, std::span<const double> w) {
    if (!w.empty() && w.size() != x.size()) throw std::invalid_argument("wasserstein1: weight count mismatch");
    std::vector<std::pair<double, double>> atoms(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        if (wi < 0.0) throw std::invalid_argument("wasserstein1: negative weight");
        atoms[i] = {x[i], wi};
        total += wi;
    }
    if (!(total > 0.0)) throw std::invalid_argument("wasserstein1: empty measure");
    for (auto& a : atoms) a.second /= total;
    std::sort(atoms.begin(), atoms.end());
    return atoms;
}
}  // namespace

double wasserstein1(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                    std::span<const double> wb) {
    const auto a = normalized_atoms(xa, wa);
    const auto b = normalized_atoms(xb, wb);
    // integral of |F_a - F_b| over the merged support
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, dist = 0.0;
    double prev = std::min(a.front().first, b.front().first);
    while (i < a.size() || j < b.size()) {
        const double x = j >= b.size() || (i < a.size() && a[i].first <= b[j].first) ? a[i].first : b[j].first;
        dist += std::abs(fa - fb) * (x - prev);
        while (i < a.size() && a[i].first == x) fa += a[i++].second;
        while (j < b.size() && b[j].first == x) fb += b[j++].second;
        prev = x;
    }
    return dist;
}

double wasserstein1(std::span<const double> xa, std::span<const double> xb) { return wasserstein1(xa, {}, xb, {}); }

}  // namespace snslab::stats
