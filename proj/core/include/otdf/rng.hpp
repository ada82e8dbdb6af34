#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace otdf {

// Seedable, splittable random source with platform-stable output.
//
// mt19937_64 itself is algorithmically pinned by the standard; the
// distributions are not, so uniform/poisson conversions are done by hand.
// child(seed, index) derives an independent stream per index, so parallel
// consumers (bootstrap replicates, scan points) are reproducible regardless
// of scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    static Rng child(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(seed) ^ mix(index * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n >= 1.
    std::size_t uniform_index(std::size_t n) {
        auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

  private:
    // splitmix64 finalizer; decorrelates nearby seeds.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// Poisson sampler by CDF-table inversion. Exact to double precision and
// identical on every platform; table built once per mean.
class PoissonSampler {
  public:
    explicit PoissonSampler(double mean);

    int sample(Rng& rng) const;

    double mean() const { return mean_; }

  private:
    double mean_ = 0.0;
    std::vector<double> cdf_;
};

}  // namespace otdf
