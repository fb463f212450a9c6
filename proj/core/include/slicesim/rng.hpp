#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace slicesim {

/// Name recorded in run metadata. Changing the engine or the splitting
/// scheme below changes every seeded result.
inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64-streams";

/// One step of SplitMix64 (Steele, Lea, Flood 2014).
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of child stream `index` of `parent`. Used for Monte-Carlo rounds
/// (parent = master seed, index = round) and for per-purpose substreams.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Seeded 64-bit generator with portable sampling helpers. The standard
/// <random> distributions are implementation-defined, so draws are done by
/// hand to keep outputs byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given rate (> 0).
    [[nodiscard]] double exponential(double rate);

    /// Uniform integer in [0, bound), bound > 0, unbiased.
    [[nodiscard]] std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

}  // namespace slicesim
