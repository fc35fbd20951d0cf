#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qgt/errors.hpp"
#include "qgt/params.hpp"
#include "qgt/rng.hpp"

namespace qgt {

// A bundle-augmented bipartite test design. Tests come in two classes:
// plain tests wired to individual items (cn_x) and bundle tests wired to
// whole bundles (cn_z). Bundles are the consecutive blocks
// [f*q, (f+1)*q) of the item range.
struct AugmentedGraph {
    GtParams params;
    std::vector<std::int32_t> bundle_of;            // item -> bundle, size n
    std::vector<std::vector<std::int32_t>> cn_x;    // plain test -> items, m_x rows of d_c
    std::vector<std::vector<std::int32_t>> cn_z;    // bundle test -> bundles, m_z rows of d_cz
    std::uint64_t seed = 0;
};

struct BuildOptions {
    // Forbid two items of the same bundle inside one plain test.
    bool distinct_bundles_per_test = false;
    // Repair budget: at most swap_cap_factor * (number of sockets) swaps
    // per edge class before giving up.
    std::int64_t swap_cap_factor = 10;
};

namespace detail {

// Configuration-model edge class: deal sockets into blocks of `degree`,
// then repair conflicts by swapping a conflicting socket with a uniformly
// random one. A block conflicts when two of its sockets map to the same
// key; keys are item ids, bundle ids, or (for the distinct-bundles
// option) items' bundle ids.
template <class KeyOf>
inline std::vector<std::vector<std::int32_t>> deal_blocks(
    std::vector<std::int32_t>& sockets, std::int64_t blocks, std::int64_t degree,
    KeyOf key_of, std::int64_t swap_cap, Rng& rng, const char* what) {
    const std::int64_t e = static_cast<std::int64_t>(sockets.size());
    rng.shuffle(sockets);

    auto block_conflict = [&](std::int64_t b) -> std::int64_t {
        const std::int64_t base = b * degree;
        for (std::int64_t i = 1; i < degree; ++i)
            for (std::int64_t j = 0; j < i; ++j)
                if (key_of(sockets[base + i]) == key_of(sockets[base + j]))
                    return base + i;
        return -1;
    };

    std::int64_t swaps = 0;
    bool clean = false;
    while (!clean) {
        clean = true;
        for (std::int64_t b = 0; b < blocks; ++b) {
            std::int64_t pos;
            while ((pos = block_conflict(b)) >= 0) {
                if (++swaps > swap_cap)
                    throw ConstructionError(std::string("build_graph: ") + what +
                                            " repair exceeded its swap budget");
                std::int64_t other = static_cast<std::int64_t>(rng.below(e));
                std::swap(sockets[pos], sockets[other]);
                clean = false;
            }
        }
    }

    std::vector<std::vector<std::int32_t>> out(blocks);
    for (std::int64_t b = 0; b < blocks; ++b) {
        out[b].assign(sockets.begin() + b * degree, sockets.begin() + (b + 1) * degree);
        std::sort(out[b].begin(), out[b].end());
    }
    return out;
}

} // namespace detail

// Samples a design from the regular configuration-model ensemble.
// Deterministic in (params, seed, options).
inline AugmentedGraph build_graph(const GtParams& params, std::uint64_t seed,
                                  const BuildOptions& options = {}) {
    AugmentedGraph g;
    g.params = params;
    g.seed = seed;
    g.bundle_of.resize(params.n);
    for (std::int64_t i = 0; i < params.n; ++i)
        g.bundle_of[i] = static_cast<std::int32_t>(i / params.q);

    Rng rng(seed);

    std::vector<std::int32_t> x_sockets(params.n * params.d_vx);
    for (std::int64_t i = 0; i < params.n; ++i)
        for (std::int64_t d = 0; d < params.d_vx; ++d)
            x_sockets[i * params.d_vx + d] = static_cast<std::int32_t>(i);
    const std::int64_t x_cap = options.swap_cap_factor * static_cast<std::int64_t>(x_sockets.size());
    if (options.distinct_bundles_per_test) {
        g.cn_x = detail::deal_blocks(
            x_sockets, params.m_x, params.d_c,
            [&](std::int32_t item) { return g.bundle_of[item]; }, x_cap, rng,
            "plain test (distinct bundles)");
    } else {
        g.cn_x = detail::deal_blocks(
            x_sockets, params.m_x, params.d_c, [](std::int32_t item) { return item; },
            x_cap, rng, "plain test");
    }

    if (params.d_vz > 0) {
        std::vector<std::int32_t> z_sockets(params.n_h * params.d_vz);
        for (std::int64_t f = 0; f < params.n_h; ++f)
            for (std::int64_t d = 0; d < params.d_vz; ++d)
                z_sockets[f * params.d_vz + d] = static_cast<std::int32_t>(f);
        const std::int64_t z_cap = options.swap_cap_factor * static_cast<std::int64_t>(z_sockets.size());
        g.cn_z = detail::deal_blocks(
            z_sockets, params.m_z, params.d_cz, [](std::int32_t f) { return f; },
            z_cap, rng, "bundle test");
    }

    return g;
}

// Flattens the design to one item-incidence row per test, bundle tests
// first. A bundle test row lists the q items of each of its bundles.
inline std::vector<std::vector<std::int32_t>> flatten_to_test_matrix(const AugmentedGraph& g) {
    std::vector<std::vector<std::int32_t>> rows;
    rows.reserve(g.params.m());
    for (const auto& test : g.cn_z) {
        std::vector<std::int32_t> row;
        row.reserve(test.size() * g.params.q);
        for (std::int32_t f : test)
            for (std::int64_t i = 0; i < g.params.q; ++i)
                row.push_back(static_cast<std::int32_t>(f * g.params.q + i));
        std::sort(row.begin(), row.end());
        rows.push_back(std::move(row));
    }
    for (const auto& test : g.cn_x) rows.push_back(test);
    return rows;
}

struct GraphAudit {
    std::vector<std::string> findings;
    bool ok() const { return findings.empty(); }
};

// Structural audit: sizes, uniform degrees on both sides of both edge
// classes, no parallel edges, bundle sizes, index ranges.
inline GraphAudit validate_graph(const AugmentedGraph& g) {
    GraphAudit audit;
    auto flag = [&](const std::string& msg) { audit.findings.push_back(msg); };
    const GtParams& p = g.params;

    if (static_cast<std::int64_t>(g.bundle_of.size()) != p.n)
        flag("bundle_of has size " + std::to_string(g.bundle_of.size()) +
             ", expected n=" + std::to_string(p.n));
    if (static_cast<std::int64_t>(g.cn_x.size()) != p.m_x)
        flag("cn_x has " + std::to_string(g.cn_x.size()) + " tests, expected m_x=" +
             std::to_string(p.m_x));
    if (static_cast<std::int64_t>(g.cn_z.size()) != p.m_z)
        flag("cn_z has " + std::to_string(g.cn_z.size()) + " tests, expected m_z=" +
             std::to_string(p.m_z));
    if (!audit.ok()) return audit;

    std::vector<std::int64_t> bundle_size(p.n_h, 0);
    for (std::int64_t i = 0; i < p.n; ++i) {
        std::int32_t f = g.bundle_of[i];
        if (f < 0 || f >= p.n_h) {
            flag("item " + std::to_string(i) + " has out-of-range bundle " + std::to_string(f));
            return audit;
        }
        ++bundle_size[f];
    }
    for (std::int64_t f = 0; f < p.n_h; ++f)
        if (bundle_size[f] != p.q)
            flag("bundle " + std::to_string(f) + " has size " +
                 std::to_string(bundle_size[f]) + ", expected q=" + std::to_string(p.q));

    std::vector<std::int64_t> item_degree(p.n, 0);
    for (std::size_t t = 0; t < g.cn_x.size(); ++t) {
        const auto& row = g.cn_x[t];
        if (static_cast<std::int64_t>(row.size()) != p.d_c)
            flag("plain test " + std::to_string(t) + " has degree " +
                 std::to_string(row.size()) + ", expected d_c=" + std::to_string(p.d_c));
        for (std::int32_t i : row) {
            if (i < 0 || i >= p.n) {
                flag("plain test " + std::to_string(t) + " references item " + std::to_string(i));
                return audit;
            }
            ++item_degree[i];
        }
        for (std::size_t a = 1; a < row.size(); ++a)
            for (std::size_t b = 0; b < a; ++b)
                if (row[a] == row[b])
                    flag("plain test " + std::to_string(t) + " has parallel edge to item " +
                         std::to_string(row[a]));
    }
    for (std::int64_t i = 0; i < p.n; ++i)
        if (item_degree[i] != p.d_vx)
            flag("item " + std::to_string(i) + " has plain-test degree " +
                 std::to_string(item_degree[i]) + ", expected d_vx=" + std::to_string(p.d_vx));

    std::vector<std::int64_t> hidden_degree(p.n_h, 0);
    for (std::size_t t = 0; t < g.cn_z.size(); ++t) {
        const auto& row = g.cn_z[t];
        if (static_cast<std::int64_t>(row.size()) != p.d_cz)
            flag("bundle test " + std::to_string(t) + " has degree " +
                 std::to_string(row.size()) + ", expected d_cz=" + std::to_string(p.d_cz));
        for (std::int32_t f : row) {
            if (f < 0 || f >= p.n_h) {
                flag("bundle test " + std::to_string(t) + " references bundle " + std::to_string(f));
                return audit;
            }
            ++hidden_degree[f];
        }
        for (std::size_t a = 1; a < row.size(); ++a)
            for (std::size_t b = 0; b < a; ++b)
                if (row[a] == row[b])
                    flag("bundle test " + std::to_string(t) + " has parallel edge to bundle " +
                         std::to_string(row[a]));
    }
    for (std::int64_t f = 0; f < p.n_h; ++f)
        if (hidden_degree[f] != p.d_vz)
            flag("bundle " + std::to_string(f) + " has bundle-test degree " +
                 std::to_string(hidden_degree[f]) + ", expected d_vz=" + std::to_string(p.d_vz));

    return audit;
}

} // namespace qgt
