#pragma once

#include <cstdint>
#include <string>

#include "qgt/errors.hpp"

namespace qgt {

// Parameters of a bundle-augmented regular test design.
//
// Inputs are (n, q, d_v, d_vx, d_c); everything else is derived. Items are
// grouped into n_h = n/q bundles of size q. Each item participates in d_vx
// plain tests and, through its bundle, in d_vz = d_v - d_vx bundle tests.
// Plain tests touch d_c items; bundle tests touch d_cz = d_c/q bundles.
struct GtParams {
    std::int64_t n = 0;    // number of items
    std::int64_t q = 0;    // bundle size
    std::int64_t d_v = 0;  // total item degree
    std::int64_t d_vx = 0; // item degree towards plain tests
    std::int64_t d_vz = 0; // item degree towards bundle tests
    std::int64_t d_c = 0;  // plain test degree (items)
    std::int64_t d_cz = 0; // bundle test degree (bundles)
    std::int64_t m_x = 0;  // number of plain tests
    std::int64_t m_z = 0;  // number of bundle tests
    std::int64_t n_h = 0;  // number of bundles
    double omega = 0.0;    // test rate m/n = d_v/d_c

    std::int64_t m() const { return m_x + m_z; }

    friend bool operator==(const GtParams&, const GtParams&) = default;
};

// Derives and validates the full parameter set. Throws DivisibilityError
// naming the violated constraint, or Error for non-positive inputs.
inline GtParams derive_params(std::int64_t n, std::int64_t q, std::int64_t d_v,
                              std::int64_t d_vx, std::int64_t d_c) {
    auto fail = [](const std::string& msg) { throw Error("derive_params: " + msg); };
    if (n < 1) fail("n must be positive");
    if (q < 1) fail("q must be positive");
    if (d_v < 1) fail("d_v must be positive");
    if (d_vx < 1) fail("d_vx must be positive");
    if (d_c < 1) fail("d_c must be positive");
    if (d_vx > d_v) fail("d_vx must not exceed d_v");

    if (d_c % q != 0)
        throw DivisibilityError("derive_params: q must divide d_c (d_c=" +
                                std::to_string(d_c) + ", q=" + std::to_string(q) + ")");
    if (n % q != 0)
        throw DivisibilityError("derive_params: q must divide n (n=" +
                                std::to_string(n) + ", q=" + std::to_string(q) + ")");

    GtParams p;
    p.n = n;
    p.q = q;
    p.d_v = d_v;
    p.d_vx = d_vx;
    p.d_vz = d_v - d_vx;
    p.d_c = d_c;
    p.d_cz = d_c / q;
    p.n_h = n / q;

    if ((n * d_vx) % d_c != 0)
        throw DivisibilityError("derive_params: d_c must divide n*d_vx (n*d_vx=" +
                                std::to_string(n * d_vx) + ", d_c=" + std::to_string(d_c) + ")");
    p.m_x = n * d_vx / d_c;

    if ((p.n_h * p.d_vz) % p.d_cz != 0)
        throw DivisibilityError("derive_params: d_cz must divide n_h*d_vz (n_h*d_vz=" +
                                std::to_string(p.n_h * p.d_vz) + ", d_cz=" +
                                std::to_string(p.d_cz) + ")");
    p.m_z = p.n_h * p.d_vz / p.d_cz;

    p.omega = static_cast<double>(p.m()) / static_cast<double>(n);
    return p;
}

} // namespace qgt
