#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace simstack {

using Rng = std::mt19937_64;

// Derive an independent sub-stream seed from a master seed (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Circularly-symmetric complex Gaussian, zero mean, unit variance:
// two independent real Gaussians with variance 1/2 each.
inline std::complex<double> sample_cn(Rng& rng) {
    static constexpr double half_sd = 0.70710678118654752440;
    std::normal_distribution<double> n(0.0, half_sd);
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

}  // namespace simstack
