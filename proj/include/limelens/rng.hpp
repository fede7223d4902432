#pragma once

#include <cstdint>
#include <random>

namespace limelens {

/// Deterministic random stream. All floating-point draws are produced from
/// raw 64-bit engine output (never std::uniform_real_distribution, whose
/// sequence is implementation-defined), so a given seed yields the same
/// bits on every platform and build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on {1, ..., p}.
    int uniform_int(int p) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(p)) + 1;
    }

    /// Standard normal draw by inverse CDF (one uniform per draw).
    double gaussian();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 output function; used to derive independent sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Stream ids keep (seed, purpose, index) triples from colliding.
namespace streams {
inline constexpr std::uint64_t kBins = 1;
inline constexpr std::uint64_t kUndiscretize = 2;
inline constexpr std::uint64_t kInstance = 3;
inline constexpr std::uint64_t kRepetition = 4;
inline constexpr std::uint64_t kConvergence = 5;
inline constexpr std::uint64_t kDirect = 6;
}  // namespace streams

/// Seed of the sub-stream identified by (seed, stream, index). Rows of a
/// perturbation set use index = row, so generation order and thread count
/// cannot change the output.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

inline Rng stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Rng(mix_seed(seed, stream, index));
}

}  // namespace limelens
