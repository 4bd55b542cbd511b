#include "snslab/driving_noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace snslab {

DrivingNoise::DrivingNoise(std::uint64_t seed, std::uint32_t path, std::size_t wiener_dim, const JumpSpec& jumps,
                           double switch_length, double resolution)
    : seed_(seed),
      path_(path),
      dim_(wiener_dim),
      jumps_(&jumps),
      switch_length_(switch_length),
      resolution_(resolution) {}

void DrivingNoise::mix(double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
        digest_ ^= b;
        digest_ *= 0x100000001b3ull;
    }
}

const std::vector<DrivingEvent>& DrivingNoise::window(std::int64_t w) {
    for (const auto& [idx, ev] : windows_)
        if (idx == w) return ev;
    const double t0 = static_cast<double>(w);
    const double t1 = t0 + 1.0;
    std::vector<DrivingEvent> events;
    RandomStream jump_rng(seed_, path_, Substream::jumps, static_cast<std::uint32_t>(w));
    for (const auto& a : sample_jump_atoms(*jumps_, t0, t1, jump_rng))
        events.push_back({a.time, DrivingEvent::Kind::jump, a.mark, 0.0});
    RandomStream chain_rng(seed_, path_, Substream::chain, static_cast<std::uint32_t>(w));
    for (const auto& a : sample_chain_atoms(switch_length_, t0, t1, chain_rng))
        events.push_back({a.time, DrivingEvent::Kind::switch_atom, 0, a.y});
    std::stable_sort(events.begin(), events.end(),
                     [](const DrivingEvent& a, const DrivingEvent& b) { return a.time < b.time; });
    windows_.emplace_back(w, std::move(events));
    if (windows_.size() > 3) windows_.pop_front();
    return windows_.back().second;
}

const CellNoise& DrivingNoise::cell(std::uint64_t c) {
    const double start = static_cast<double>(c) * resolution_;
    const double end = static_cast<double>(c + 1) * resolution_;
    cell_.start = start;
    cell_.end = end;
    cell_.events.clear();
    const auto w0 = static_cast<std::int64_t>(std::floor(start));
    const auto w1 = static_cast<std::int64_t>(std::floor(end));
    for (std::int64_t w = w0; w <= w1; ++w)
        for (const auto& e : window(w))
            if (e.time > start && e.time <= end) cell_.events.push_back(e);

    cell_.total.resize(dim_);
    RandomStream wiener_rng(seed_, path_, Substream::wiener, static_cast<std::uint32_t>(c));
    const double sd = std::sqrt(resolution_);
    for (auto& v : cell_.total) {
        v = sd * wiener_rng.normal();
        mix(v);
    }

    cell_.at_event.resize(cell_.events.size());
    if (!cell_.events.empty()) {
        RandomStream bridge_rng(seed_, path_, Substream::bridge, static_cast<std::uint32_t>(c));
        double prev_t = start;
        const std::vector<double>* prev = nullptr;
        for (std::size_t e = 0; e < cell_.events.size(); ++e) {
            const double t = cell_.events[e].time;
            const double span = end - prev_t;
            const double frac = span > 0.0 ? (t - prev_t) / span : 1.0;
            const double var = span > 0.0 ? (t - prev_t) * (end - t) / span : 0.0;
            const double s = std::sqrt(std::max(var, 0.0));
            auto& out = cell_.at_event[e];
            out.resize(dim_);
            for (std::size_t k = 0; k < dim_; ++k) {
                const double base = prev ? (*prev)[k] : 0.0;
                out[k] = base + frac * (cell_.total[k] - base) + s * bridge_rng.normal();
                mix(out[k]);
            }
            prev = &out;
            prev_t = t;
            transcript_.push_back(cell_.events[e]);
            mix(cell_.events[e].time);
            mix(cell_.events[e].y);
            mix(static_cast<double>(cell_.events[e].mark));
        }
    }
    return cell_;
}

}  // namespace snslab
