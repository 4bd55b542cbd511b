#pragma once

// Counter-based random streams. Every stream is addressed by
// (master seed, path index, substream label, block index) so that any piece
// of randomness can be regenerated independently of scheduling order.

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace snslab {

/// Philox4x32-10 block cipher (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

enum class Substream : std::uint32_t {
    wiener = 1,
    bridge = 2,
    jumps = 3,
    chain = 4,
    initial = 5,
    sampling = 6,
    bootstrap = 7,
};

/// UniformRandomBitGenerator over one counter-addressed stream.
class CounterEngine {
public:
    using result_type = std::uint64_t;

    CounterEngine(std::uint64_t seed, std::uint32_t path, std::uint32_t label,
                  std::uint32_t index = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 4;
};

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t path, Substream label, std::uint32_t index = 0)
        : engine_(seed, path, static_cast<std::uint32_t>(label), index) {}
    explicit RandomStream(std::uint64_t seed) : RandomStream(seed, 0, Substream::sampling) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine_); }
    double normal() { return normal_(engine_); }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<long>(mean)(engine_);
    }
    std::uint64_t bits() { return engine_(); }

    CounterEngine& engine() { return engine_; }

private:
    CounterEngine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace snslab
