#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "snslab/galerkin.hpp"
#include "snslab/mollifier.hpp"

namespace snslab {

enum class ConvolutionPath {
    automatic,  ///< direct for cutoff <= 4, transform above
    direct,
    transform,
};

/// Evaluates the advection term (u . grad) v on a mode set.
///
/// The transform path pads to an M^3 grid with M = 3N + 1, which keeps the
/// retained modes inside the lower two thirds of the padded spectrum so that
/// no product mode aliases back onto |k_i| <= N. The direct path sums the
/// triadic convolution explicitly and serves as the oracle for the former.
class NonlinearityEngine {
public:
    explicit NonlinearityEngine(ModeSetPtr modes);

    /// Per-caller scratch for the transform path.
    struct Workspace {
        std::vector<cplx> u;
        std::vector<cplx> grad;
        std::vector<cplx> prod;
    };
    Workspace make_workspace() const;

    const ModeSet& modes() const { return *modes_; }
    int grid_size() const { return grid_; }

    /// Unprojected coefficients of (u . grad) v on the retained modes.
    std::vector<Vec3c> advection(const SpectralState& u, const SpectralState& v,
                                 ConvolutionPath path = ConvolutionPath::automatic) const;
    std::vector<Vec3c> advection(const SpectralState& u, const SpectralState& v,
                                 Workspace& ws) const;

    /// Leray-projected, reality-symmetrized advection, written into out.
    void project_advection(const SpectralState& u, const SpectralState& v, Workspace& ws,
                           SpectralState& out) const;

private:
    std::vector<Vec3c> advection_direct(const SpectralState& u, const SpectralState& v) const;

    struct Plans;
    ModeSetPtr modes_;
    int grid_ = 0;
    std::vector<std::size_t> grid_index_;
    std::shared_ptr<Plans> plans_;
};

/// b(u, v, w) = sum_ij int u_i d_i v_j w_j (volume-normalized).
double trilinear_b(const NonlinearityEngine& engine, const SpectralState& u, const SpectralState& v,
                   const SpectralState& w, ConvolutionPath path = ConvolutionPath::automatic);

/// B(u, v) with <B(u, v), w> = b(u, v, w) for divergence-free w.
SpectralState inertial_B(const NonlinearityEngine& engine, const SpectralState& u,
                         const SpectralState& v, ConvolutionPath path = ConvolutionPath::automatic);

/// B_{k_eps}(u, v) = B(k_eps u, v).
SpectralState regularized_B(const NonlinearityEngine& engine, const SpectralState& u,
                            const SpectralState& v, const MollifierSpec& m,
                            ConvolutionPath path = ConvolutionPath::automatic);

/// Max over random divergence-free triples of
/// |b(k_eps u, v, w)| / (||u||^1/2 |u|^1/2 ||v|| ||w||^1/2 |w|^1/2).
double estimate_interpolation_constant(const NonlinearityEngine& engine, const MollifierSpec& m,
                                       int samples, std::uint64_t seed);

}  // namespace snslab
