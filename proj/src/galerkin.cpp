#include "snslab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace snslab {

std::string to_string(const Wavevector& k) { return fmt::format("({},{},{})", k.x, k.y, k.z); }

namespace {

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

std::array<double, 3> normalized(std::array<double, 3> v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (auto& c : v) c /= n;
    return v;
}

std::array<std::array<double, 3>, 2> make_polarization(const Wavevector& k) {
    const std::array<double, 3> kd{double(k.x), double(k.y), double(k.z)};
    // axis along the smallest |component| is never parallel to k
    std::array<double, 3> axis{0.0, 0.0, 0.0};
    const std::array<int, 3> mag{std::abs(k.x), std::abs(k.y), std::abs(k.z)};
    axis[std::min_element(mag.begin(), mag.end()) - mag.begin()] = 1.0;
    const auto e1 = normalized(cross(kd, axis));
    const auto e2 = normalized(cross(normalized(kd), e1));
    return {e1, e2};
}

}  // namespace

ModeSet::ModeSet(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw std::invalid_argument("ModeSet: cutoff must be a positive integer");
    const int side = 2 * cutoff + 1;
    lookup_.assign(static_cast<std::size_t>(side) * side * side, -1);
    for (int x = -cutoff; x <= cutoff; ++x)
        for (int y = -cutoff; y <= cutoff; ++y)
            for (int z = -cutoff; z <= cutoff; ++z) {
                if (x == 0 && y == 0 && z == 0) continue;
                const auto flat = (static_cast<std::size_t>(x + cutoff) * side + (y + cutoff)) * side +
                                  (z + cutoff);
                lookup_[flat] = static_cast<int>(wavevectors_.size());
                wavevectors_.push_back({x, y, z});
            }
    for (std::size_t i = size() / 2; i < size(); ++i) representatives_.push_back(i);
    polarization_.resize(size());
    for (std::size_t i : representatives_) {
        polarization_[i] = make_polarization(wavevectors_[i]);
        polarization_[negated(i)] = polarization_[i];
    }
}

std::shared_ptr<const ModeSet> ModeSet::make(int cutoff) {
    return std::shared_ptr<const ModeSet>(new ModeSet(cutoff));
}

std::optional<std::size_t> ModeSet::find(const Wavevector& k) const {
    const int n = cutoff_;
    if (std::abs(k.x) > n || std::abs(k.y) > n || std::abs(k.z) > n) return std::nullopt;
    const int side = 2 * n + 1;
    const auto flat =
        (static_cast<std::size_t>(k.x + n) * side + (k.y + n)) * side + (k.z + n);
    const int idx = lookup_[flat];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

bool same_modes(const ModeSet& a, const ModeSet& b) { return &a == &b || a.cutoff() == b.cutoff(); }

// ---------------------------------------------------------------------------

SpectralState::SpectralState(ModeSetPtr modes)
    : modes_(std::move(modes)), coeffs_(modes_->size(), Vec3c{}) {}

SpectralState::SpectralState(ModeSetPtr modes, std::vector<Vec3c> coeffs)
    : modes_(std::move(modes)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != modes_->size())
        throw std::invalid_argument("SpectralState: coefficient count does not match mode set");
}

void SpectralState::set_pair(const Wavevector& k, const Vec3c& value) {
    const auto idx = modes_->find(k);
    if (!idx) throw std::invalid_argument("SpectralState: wavevector " + to_string(k) + " not retained");
    coeffs_[*idx] = value;
    auto& neg = coeffs_[modes_->negated(*idx)];
    for (int c = 0; c < 3; ++c) neg[c] = std::conj(value[c]);
}

namespace {
void require_same(const SpectralState& a, const SpectralState& b) {
    if (!same_modes(a.modes(), b.modes()))
        throw std::invalid_argument("mode-set mismatch");
}
}  // namespace

SpectralState& SpectralState::operator+=(const SpectralState& other) {
    require_same(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (int c = 0; c < 3; ++c) coeffs_[i][c] += other.coeffs_[i][c];
    return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& other) {
    require_same(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (int c = 0; c < 3; ++c) coeffs_[i][c] -= other.coeffs_[i][c];
    return *this;
}

SpectralState& SpectralState::operator*=(double s) {
    for (auto& v : coeffs_)
        for (auto& c : v) c *= s;
    return *this;
}

void SpectralState::axpy(double a, const SpectralState& x) {
    require_same(*this, x);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (int c = 0; c < 3; ++c) coeffs_[i][c] += a * x.coeffs_[i][c];
}

bool SpectralState::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Vec3c& v) {
        return v[0] == cplx{} && v[1] == cplx{} && v[2] == cplx{};
    });
}

double SpectralState::max_abs() const {
    double m = 0.0;
    for (const auto& v : coeffs_)
        for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

bool SpectralState::is_real(double rel_tol) const {
    const double scale = std::max(max_abs(), 1e-300);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const auto& a = coeffs_[i];
        const auto& b = coeffs_[modes_->negated(i)];
        for (int c = 0; c < 3; ++c)
            if (std::abs(a[c] - std::conj(b[c])) > rel_tol * scale) return false;
    }
    return true;
}

bool SpectralState::is_incompressible(double rel_tol) const {
    const double scale = std::max(max_abs(), 1e-300);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const auto& k = (*modes_)[i];
        const auto& v = coeffs_[i];
        const cplx div = double(k.x) * v[0] + double(k.y) * v[1] + double(k.z) * v[2];
        if (std::abs(div) > rel_tol * std::sqrt(double(k.norm2())) * scale) return false;
    }
    return true;
}

bool SpectralState::operator==(const SpectralState& other) const {
    return same_modes(*modes_, *other.modes_) && coeffs_ == other.coeffs_;
}

SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
SpectralState operator*(double s, SpectralState a) { return a *= s; }

// ---------------------------------------------------------------------------

StokesSurrogate::StokesSurrogate(const ModeSet& modes) {
    eigenvalues_.resize(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) eigenvalues_[i] = modes.k2(i);
    shell_order_.resize(modes.size());
    std::iota(shell_order_.begin(), shell_order_.end(), std::size_t{0});
    std::stable_sort(shell_order_.begin(), shell_order_.end(),
                     [&](std::size_t a, std::size_t b) { return eigenvalues_[a] < eigenvalues_[b]; });
    lambda1_ = eigenvalues_[shell_order_.front()];
}

double inner(const SpectralState& u, const SpectralState& v) {
    require_same(u, v);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (int c = 0; c < 3; ++c) s += (u[i][c] * std::conj(v[i][c])).real();
    return s;
}

namespace {
template <class Weight>
double weighted_norm2(const SpectralState& u, Weight w) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto& v = u[i];
        s += w(u.modes().k2(i)) * (std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    }
    return s;
}
}  // namespace

double h_norm2(const SpectralState& u) { return weighted_norm2(u, [](double) { return 1.0; }); }
double h_norm(const SpectralState& u) { return std::sqrt(h_norm2(u)); }
double v_norm2(const SpectralState& u) { return weighted_norm2(u, [](double k2) { return k2; }); }
double v_norm(const SpectralState& u) { return std::sqrt(v_norm2(u)); }
double v_dual_norm2(const SpectralState& f) {
    return weighted_norm2(f, [](double k2) { return 1.0 / k2; });
}
double v_dual_norm(const SpectralState& f) { return std::sqrt(v_dual_norm2(f)); }

namespace {
void project_mode(const Wavevector& k, Vec3c& v) {
    const double kx = k.x, ky = k.y, kz = k.z;
    const cplx dot = kx * v[0] + ky * v[1] + kz * v[2];
    // modes already divergence-free up to rounding are left untouched
    const double mag = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    if (std::abs(dot) <= 64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(double(k.norm2())) * mag) return;
    const cplx s = dot / double(k.norm2());
    v[0] -= s * kx;
    v[1] -= s * ky;
    v[2] -= s * kz;
}
}  // namespace

void leray_project_in_place(SpectralState& u) {
    const auto& modes = u.modes();
    for (std::size_t i = 0; i < u.size(); ++i) project_mode(modes[i], u[i]);
}

void enforce_reality(SpectralState& u) {
    const auto& modes = u.modes();
    for (std::size_t i : modes.representatives()) {
        auto& neg = u[modes.negated(i)];
        for (int c = 0; c < 3; ++c) neg[c] = std::conj(u[i][c]);
    }
}

SpectralState leray_project(ModeSetPtr modes, std::span<const Vec3c> raw) {
    SpectralState u(modes, std::vector<Vec3c>(raw.begin(), raw.end()));
    if (!u.is_real())
        throw std::invalid_argument("leray_project: input violates reality symmetry");
    leray_project_in_place(u);
    return u;
}

SpectralState leray_project(const SpectralState& raw) {
    return leray_project(raw.mode_set(), raw.coeffs());
}

// ---------------------------------------------------------------------------

std::string serialize(const SpectralState& u) {
    nlohmann::json modes = nlohmann::json::array();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto& k = u.modes()[i];
        const auto& v = u[i];
        modes.push_back({{"k", {k.x, k.y, k.z}},
                         {"re", {v[0].real(), v[1].real(), v[2].real()}},
                         {"im", {v[0].imag(), v[1].imag(), v[2].imag()}}});
    }
    nlohmann::json doc{{"cutoff", u.modes().cutoff()}, {"modes", std::move(modes)}};
    return doc.dump();
}

SpectralState deserialize_state(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    auto modes = ModeSet::make(doc.at("cutoff").get<int>());
    const auto& list = doc.at("modes");
    if (list.size() != modes->size())
        throw std::invalid_argument("deserialize_state: mode count mismatch");
    SpectralState u(modes);
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto k = list[i].at("k").get<std::array<int, 3>>();
        if (Wavevector{k[0], k[1], k[2]} != (*modes)[i])
            throw std::invalid_argument("deserialize_state: modes out of canonical order");
        const auto re = list[i].at("re").get<std::array<double, 3>>();
        const auto im = list[i].at("im").get<std::array<double, 3>>();
        for (int c = 0; c < 3; ++c) u[i][c] = {re[c], im[c]};
    }
    return u;
}

}  // namespace snslab
