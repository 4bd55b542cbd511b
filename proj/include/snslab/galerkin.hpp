#pragma once

// Divergence-free Fourier-Galerkin surrogate for the spaces H, V, V' on the
// periodic box [0, 2pi)^3. Fields are u(x) = sum_k u_hat(k) exp(i k.x) over
// 0 < |k|_inf <= N; the domain volume is normalized to 1 so that
// |u|^2 = sum_k |u_hat(k)|^2.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snslab {

using cplx = std::complex<double>;
using Vec3c = std::array<cplx, 3>;

struct Wavevector {
    int x = 0;
    int y = 0;
    int z = 0;

    int norm2() const { return x * x + y * y + z * z; }
    Wavevector operator-() const { return {-x, -y, -z}; }
    auto operator<=>(const Wavevector&) const = default;
};

std::string to_string(const Wavevector& k);

/// Retained wavevectors 0 < |k|_inf <= cutoff in lexicographic order.
/// The order is antisymmetric: index(-k) == size() - 1 - index(k).
class ModeSet {
public:
    static std::shared_ptr<const ModeSet> make(int cutoff);

    int cutoff() const { return cutoff_; }
    std::size_t size() const { return wavevectors_.size(); }
    const std::vector<Wavevector>& wavevectors() const { return wavevectors_; }
    const Wavevector& operator[](std::size_t i) const { return wavevectors_[i]; }

    std::size_t negated(std::size_t i) const { return size() - 1 - i; }
    std::optional<std::size_t> find(const Wavevector& k) const;

    /// Indices of the lexicographically larger member of each +-k pair.
    const std::vector<std::size_t>& representatives() const { return representatives_; }
    bool is_representative(std::size_t i) const { return i >= size() / 2; }

    double k2(std::size_t i) const { return static_cast<double>(wavevectors_[i].norm2()); }

    /// Real orthonormal basis of the plane perpendicular to k; shared by -k.
    const std::array<std::array<double, 3>, 2>& polarization(std::size_t i) const {
        return polarization_[i];
    }

private:
    explicit ModeSet(int cutoff);

    int cutoff_;
    std::vector<Wavevector> wavevectors_;
    std::vector<std::size_t> representatives_;
    std::vector<int> lookup_;
    std::vector<std::array<std::array<double, 3>, 2>> polarization_;
};

using ModeSetPtr = std::shared_ptr<const ModeSet>;

bool same_modes(const ModeSet& a, const ModeSet& b);

/// Element of H: one complex 3-vector per retained wavevector.
class SpectralState {
public:
    SpectralState() = default;
    explicit SpectralState(ModeSetPtr modes);
    SpectralState(ModeSetPtr modes, std::vector<Vec3c> coeffs);

    const ModeSet& modes() const { return *modes_; }
    const ModeSetPtr& mode_set() const { return modes_; }
    std::size_t size() const { return coeffs_.size(); }
    bool empty() const { return !modes_; }

    const Vec3c& operator[](std::size_t i) const { return coeffs_[i]; }
    Vec3c& operator[](std::size_t i) { return coeffs_[i]; }
    const std::vector<Vec3c>& coeffs() const { return coeffs_; }
    std::vector<Vec3c>& coeffs() { return coeffs_; }

    /// Sets u_hat(k) and u_hat(-k) = conj(u_hat(k)).
    void set_pair(const Wavevector& k, const Vec3c& value);

    SpectralState& operator+=(const SpectralState& other);
    SpectralState& operator-=(const SpectralState& other);
    SpectralState& operator*=(double s);
    void axpy(double a, const SpectralState& x);

    bool is_zero() const;
    bool is_real(double rel_tol = 1e-12) const;
    bool is_incompressible(double rel_tol = 1e-12) const;
    double max_abs() const;

    bool operator==(const SpectralState& other) const;

private:
    ModeSetPtr modes_;
    std::vector<Vec3c> coeffs_;
};

SpectralState operator+(SpectralState a, const SpectralState& b);
SpectralState operator-(SpectralState a, const SpectralState& b);
SpectralState operator*(double s, SpectralState a);

/// Diagonal Stokes operator on the torus: lambda(k) = |k|^2.
class StokesSurrogate {
public:
    explicit StokesSurrogate(const ModeSet& modes);

    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double lambda1() const { return lambda1_; }
    /// Mode indices sorted by |k|^2, ties broken by storage order.
    const std::vector<std::size_t>& shell_order() const { return shell_order_; }

private:
    std::vector<double> eigenvalues_;
    std::vector<std::size_t> shell_order_;
    double lambda1_ = 0.0;
};

/// Real H inner product (u, v) = sum_k Re(u_hat(k) . conj(v_hat(k))).
double inner(const SpectralState& u, const SpectralState& v);
double h_norm2(const SpectralState& u);
double h_norm(const SpectralState& u);
double v_norm2(const SpectralState& u);
double v_norm(const SpectralState& u);
double v_dual_norm2(const SpectralState& f);
double v_dual_norm(const SpectralState& f);

/// Applies (I - k k^T / |k|^2) per mode. Throws std::invalid_argument when the
/// input violates u_hat(-k) = conj(u_hat(k)).
SpectralState leray_project(ModeSetPtr modes, std::span<const Vec3c> raw);
SpectralState leray_project(const SpectralState& raw);
/// Unchecked in-place projection for hot loops.
void leray_project_in_place(SpectralState& u);
/// Overwrites the -k half with conjugates of the representative half.
void enforce_reality(SpectralState& u);

std::string serialize(const SpectralState& u);
SpectralState deserialize_state(const std::string& text);

}  // namespace snslab
