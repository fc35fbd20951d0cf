#pragma once

#include <cstdint>
#include <vector>

#include "qgt/errors.hpp"
#include "qgt/graph.hpp"
#include "qgt/rng.hpp"

namespace qgt {

// Defectivity vector: x[i] = 1 iff item i is defective.
struct Population {
    std::vector<std::uint8_t> x;
    double gamma = 0.0;

    std::int64_t defectives() const {
        std::int64_t k = 0;
        for (std::uint8_t v : x) k += v;
        return k;
    }
};

// Items are defective independently with probability gamma (a fraction,
// not a percentage). Deterministic in (n, gamma, seed).
inline Population sample_population(std::int64_t n, double gamma, std::uint64_t seed) {
    Population pop;
    pop.gamma = gamma;
    pop.x.resize(n);
    Rng rng(seed);
    for (std::int64_t i = 0; i < n; ++i)
        pop.x[i] = rng.bernoulli(gamma) ? 1 : 0;
    return pop;
}

// Exact test results, bundle tests first. s[t] is the number of
// defective items in test t.
struct Syndrome {
    std::vector<std::int32_t> s;
    std::int64_t m_z = 0;

    std::int32_t z_part(std::int64_t t) const { return s[t]; }
    std::int32_t x_part(std::int64_t t) const { return s[m_z + t]; }
};

// Per-bundle defective counts.
inline std::vector<std::int32_t> bundle_values(const AugmentedGraph& g,
                                               const std::vector<std::uint8_t>& x) {
    if (static_cast<std::int64_t>(x.size()) != g.params.n)
        throw DimensionError("bundle_values: x has size " + std::to_string(x.size()) +
                             ", expected n=" + std::to_string(g.params.n));
    std::vector<std::int32_t> z(g.params.n_h, 0);
    for (std::int64_t i = 0; i < g.params.n; ++i)
        if (x[i]) ++z[g.bundle_of[i]];
    return z;
}

inline Syndrome compute_syndrome(const AugmentedGraph& g, const std::vector<std::uint8_t>& x) {
    if (static_cast<std::int64_t>(x.size()) != g.params.n)
        throw DimensionError("compute_syndrome: x has size " + std::to_string(x.size()) +
                             ", expected n=" + std::to_string(g.params.n));
    Syndrome syn;
    syn.m_z = g.params.m_z;
    syn.s.reserve(g.params.m());
    std::vector<std::int32_t> z = bundle_values(g, x);
    for (const auto& test : g.cn_z) {
        std::int32_t sum = 0;
        for (std::int32_t f : test) sum += z[f];
        syn.s.push_back(sum);
    }
    for (const auto& test : g.cn_x) {
        std::int32_t sum = 0;
        for (std::int32_t i : test) sum += x[i];
        syn.s.push_back(sum);
    }
    return syn;
}

} // namespace qgt
