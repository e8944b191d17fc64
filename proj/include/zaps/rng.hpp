#pragma once

#include <random>
#include <string_view>

#include "zaps/bytes.hpp"

namespace zaps {

// Deterministic randomness source. Every stochastic component takes one of
// these explicitly; nothing in the library touches global RNG state, so a
// run is reproducible from its root seed alone.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), eng_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t u64() { return eng_(); }

    // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    uint64_t below(uint64_t bound);

    // Uniform double in [0, 1).
    double uniform01();

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Marsaglia polar method.
    double gauss();

    bool bernoulli(double p) { return uniform01() < p; }

    void fill(uint8_t* p, size_t n);
    Bytes bytes(size_t n);
    Digest32 digest32();
    Id16 id16();

    // Generator for an independent stream, derived from this generator's seed
    // (not its current state): child seed = first 8 bytes of
    // SHA-256(seed_be || path). Distinct paths give decorrelated streams, and
    // a stream does not depend on sibling consumption order.
    Rng child(std::string_view path) const { return Rng(derive_seed(seed_, path)); }

    static uint64_t derive_seed(uint64_t root, std::string_view path);

private:
    uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace zaps
