#pragma once

// Realization of (W, N_1, N_2) for one path, addressable by time rather than by
// step index, so that runs with different step sizes or different initial
// data consume exactly the same noise.
//
// N_1 and N_2 atoms are generated per unit-time window. W is generated per
// cell of width `resolution`; inside a cell, values at event times are filled
// in by sequential Brownian-bridge sampling, which depends only on the cell
// and its events.

#include <cstdint>
#include <deque>
#include <vector>

#include "snslab/chain.hpp"
#include "snslab/noise.hpp"

namespace snslab {

struct DrivingEvent {
    enum class Kind { jump, switch_atom };
    double time = 0.0;
    Kind kind = Kind::jump;
    std::size_t mark = 0;  ///< for jumps
    double y = 0.0;        ///< for switch atoms
};

struct CellNoise {
    double start = 0.0;
    double end = 0.0;
    std::vector<DrivingEvent> events;           ///< events in (start, end], sorted
    std::vector<std::vector<double>> at_event;  ///< W(event) - W(start)
    std::vector<double> total;                  ///< W(end) - W(start)
};

class DrivingNoise {
public:
    DrivingNoise(std::uint64_t seed, std::uint32_t path, std::size_t wiener_dim, const JumpSpec& jumps,
                 double switch_length, double resolution);

    double resolution() const { return resolution_; }
    std::size_t dimension() const { return dim_; }

    /// Noise of cell c = [c * resolution, (c + 1) * resolution].
    const CellNoise& cell(std::uint64_t c);

    /// FNV-1a digest of every value handed out so far.
    std::uint64_t digest() const { return digest_; }
    /// Every event handed out so far, in time order.
    const std::vector<DrivingEvent>& transcript() const { return transcript_; }

private:
    const std::vector<DrivingEvent>& window(std::int64_t w);
    void mix(double v);

    std::uint64_t seed_;
    std::uint32_t path_;
    std::size_t dim_;
    const JumpSpec* jumps_;
    double switch_length_;
    double resolution_;

    std::deque<std::pair<std::int64_t, std::vector<DrivingEvent>>> windows_;
    CellNoise cell_;
    std::uint64_t digest_ = 0xcbf29ce484222325ull;
    std::vector<DrivingEvent> transcript_;
};

}  // namespace snslab
