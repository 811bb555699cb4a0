#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace carma_hawkes {

// Anything that hands out uniforms on the open interval (0, 1).
template <class T>
concept UniformSource = requires(T& source) {
    { source.next() } -> std::convertible_to<double>;
};

// Seeded 64-bit Mersenne Twister. Each draw keeps the top 53 bits k of the
// engine output and returns (k + 1/2) / 2^53, which is never 0 or 1 and is
// bit-identical on every platform (unlike std::uniform_real_distribution).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    double next() {
        const auto k = engine_() >> 11;
        return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// Replays a fixed list of uniforms; used for hand-traced runs. Throws
// std::out_of_range once exhausted and std::invalid_argument for values
// outside (0, 1).
class ScriptedUniforms {
public:
    explicit ScriptedUniforms(std::vector<double> values);

    double next();
    std::size_t consumed() const { return pos_; }

private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

}  // namespace carma_hawkes
