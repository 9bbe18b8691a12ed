#pragma once

#include <cstdint>
#include <random>

namespace pivlp {

// Independent stream identifiers for seed derivation.
enum class Stream : std::uint64_t {
    PivotDraws = 1,
    Simulation = 2,
    Replicate = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed for (seed, stream, index); independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index);

// mt19937_64 plus portable uniform/normal transforms (the standard
// distributions are implementation-defined, so they are not used).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0,1) from the top 53 bits.
    double uniform();
    // Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pivlp
