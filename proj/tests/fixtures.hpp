#pragma once

#include <vector>

#include "qgt/graph.hpp"
#include "qgt/params.hpp"

namespace qgt::test {

// Hand-built 8-item design used across the suite: 4 bundles of 2, four
// bundle tests of degree 2 and two plain tests of degree 4.
inline AugmentedGraph small_graph() {
    AugmentedGraph g;
    g.params = derive_params(8, 2, 3, 1, 4);
    g.bundle_of = {0, 0, 1, 1, 2, 2, 3, 3};
    g.cn_z = {{0, 3}, {1, 2}, {0, 2}, {1, 3}};
    g.cn_x = {{0, 2, 4, 6}, {1, 3, 5, 7}};
    g.seed = 0;
    return g;
}

struct ToySet {
    std::int64_t n, q, d_v, d_vx, d_c;
    double gamma;
};

// Small ensembles with valid divisibility, spanning bundle sizes and
// degree splits.
inline std::vector<ToySet> toy_sets() {
    return {
        {120, 1, 3, 1, 4, 0.10}, // q=1 with bundle tests
        {120, 1, 4, 4, 8, 0.12}, // q=1 purely flat
        {64, 2, 3, 1, 4, 0.15},
        {60, 2, 5, 2, 6, 0.20},
        {100, 5, 7, 2, 10, 0.12},
        {200, 5, 6, 3, 20, 0.08},
    };
}

} // namespace qgt::test
