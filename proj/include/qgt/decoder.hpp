#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "qgt/errors.hpp"
#include "qgt/graph.hpp"
#include "qgt/model.hpp"

namespace qgt {

// Flat-indexed adjacency derived from an AugmentedGraph, immutable and
// shareable across decodes. Degrees are uniform, so block offsets are
// implicit: plain-test edge e belongs to test e / d_c, the edges of item
// i are x_edges[i*d_vx .. (i+1)*d_vx), and likewise on the bundle side.
struct DecoderGraph {
    GtParams params;
    std::vector<std::int32_t> ez_bundle;  // bundle-test edge -> bundle
    std::vector<std::int32_t> z_edges;    // bundle -> its edge ids, flat
    std::vector<std::int32_t> ex_item;    // plain-test edge -> item
    std::vector<std::int32_t> x_edges;    // item -> its edge ids, flat
    std::vector<std::int32_t> bundle_items; // bundle -> its item ids, flat

    static DecoderGraph from(const AugmentedGraph& g) {
        DecoderGraph dg;
        const GtParams& p = g.params;
        dg.params = p;

        dg.ez_bundle.resize(p.m_z * p.d_cz);
        for (std::int64_t t = 0; t < p.m_z; ++t)
            for (std::int64_t k = 0; k < p.d_cz; ++k)
                dg.ez_bundle[t * p.d_cz + k] = g.cn_z[t][k];
        dg.z_edges.resize(p.n_h * p.d_vz);
        {
            std::vector<std::int64_t> fill(p.n_h, 0);
            for (std::int64_t e = 0; e < static_cast<std::int64_t>(dg.ez_bundle.size()); ++e) {
                std::int32_t f = dg.ez_bundle[e];
                dg.z_edges[f * p.d_vz + fill[f]++] = static_cast<std::int32_t>(e);
            }
        }

        dg.ex_item.resize(p.m_x * p.d_c);
        for (std::int64_t t = 0; t < p.m_x; ++t)
            for (std::int64_t k = 0; k < p.d_c; ++k)
                dg.ex_item[t * p.d_c + k] = g.cn_x[t][k];
        dg.x_edges.resize(p.n * p.d_vx);
        {
            std::vector<std::int64_t> fill(p.n, 0);
            for (std::int64_t e = 0; e < static_cast<std::int64_t>(dg.ex_item.size()); ++e) {
                std::int32_t i = dg.ex_item[e];
                dg.x_edges[i * p.d_vx + fill[i]++] = static_cast<std::int32_t>(e);
            }
        }

        dg.bundle_items.resize(p.n);
        {
            std::vector<std::int64_t> fill(p.n_h, 0);
            for (std::int64_t i = 0; i < p.n; ++i) {
                std::int32_t f = g.bundle_of[i];
                dg.bundle_items[f * p.q + fill[f]++] = static_cast<std::int32_t>(i);
            }
        }
        return dg;
    }
};

// All messages are integer bound pairs (L, U) with 0 <= L <= U <= cap,
// where cap is q on the bundle side and 1 on the item side. Arrays are
// kept struct-of-arrays and indexed by the flat edge/node ids of
// DecoderGraph.
struct DecoderState {
    // bundle-test edges
    std::vector<std::int32_t> l_cz, u_cz; // test -> bundle
    std::vector<std::int32_t> l_zc, u_zc; // bundle -> test
    // per bundle
    std::vector<std::int32_t> l_zf, u_zf; // hidden VN -> its CN
    std::vector<std::int32_t> sf_l, sf_u; // hidden CN -> its VN (item sums)
    // per item
    std::vector<std::int32_t> l_fx, u_fx; // hidden CN -> item
    std::vector<std::int32_t> l_xf, u_xf; // item -> hidden CN
    // plain-test edges
    std::vector<std::int32_t> l_cx, u_cx; // test -> item
    std::vector<std::int32_t> l_xc, u_xc; // item -> test

    int iterations = 0;
    bool converged = false;
};

// Uninformative start: every outgoing variable message is the full range.
inline DecoderState init_state(const DecoderGraph& g) {
    const GtParams& p = g.params;
    DecoderState st;
    const std::int32_t q = static_cast<std::int32_t>(p.q);
    st.l_zc.assign(g.ez_bundle.size(), 0);
    st.u_zc.assign(g.ez_bundle.size(), q);
    st.l_cz.assign(g.ez_bundle.size(), 0);
    st.u_cz.assign(g.ez_bundle.size(), q);
    st.l_zf.assign(p.n_h, 0);
    st.u_zf.assign(p.n_h, q);
    st.sf_l.assign(p.n_h, 0);
    st.sf_u.assign(p.n_h, q);
    st.l_fx.assign(p.n, 0);
    st.u_fx.assign(p.n, 1);
    st.l_xf.assign(p.n, 0);
    st.u_xf.assign(p.n, 1);
    st.l_cx.assign(g.ex_item.size(), 0);
    st.u_cx.assign(g.ex_item.size(), 1);
    st.l_xc.assign(g.ex_item.size(), 0);
    st.u_xc.assign(g.ex_item.size(), 1);
    return st;
}

namespace detail {

[[noreturn]] inline void inconsistent(const char* stage, std::int64_t index,
                                      std::int32_t lo, std::int32_t hi) {
    throw InconsistentSyndromeError(std::string("decode: ") + stage + " produced L=" +
                                    std::to_string(lo) + " > U=" + std::to_string(hi) +
                                    " at index " + std::to_string(index));
}

inline bool store(std::vector<std::int32_t>& lo_arr, std::vector<std::int32_t>& hi_arr,
                  std::int64_t idx, std::int32_t lo, std::int32_t hi, const char* stage) {
    if (lo > hi) inconsistent(stage, idx, lo, hi);
    bool changed = lo_arr[idx] != lo || hi_arr[idx] != hi;
    lo_arr[idx] = lo;
    hi_arr[idx] = hi;
    return changed;
}

} // namespace detail

// Bundle tests to hidden VNs: L = s minus the others' upper bounds,
// U = s minus the others' lower bounds, clamped to [0, q].
inline bool update_cz_to_z(const DecoderGraph& g, const Syndrome& syn, DecoderState& st) {
    const GtParams& p = g.params;
    const std::int32_t q = static_cast<std::int32_t>(p.q);
    bool changed = false;
    for (std::int64_t t = 0; t < p.m_z; ++t) {
        const std::int64_t base = t * p.d_cz;
        std::int32_t sum_l = 0, sum_u = 0;
        for (std::int64_t k = 0; k < p.d_cz; ++k) {
            sum_l += st.l_zc[base + k];
            sum_u += st.u_zc[base + k];
        }
        const std::int32_t s = syn.s[t];
        for (std::int64_t k = 0; k < p.d_cz; ++k) {
            const std::int64_t e = base + k;
            std::int32_t lo = std::max(s - (sum_u - st.u_zc[e]), 0);
            std::int32_t hi = std::min(s - (sum_l - st.l_zc[e]), q);
            changed |= detail::store(st.l_cz, st.u_cz, e, lo, hi, "cz_to_z");
        }
    }
    return changed;
}

// Hidden VNs to their CNs: tightest combination of all test messages.
inline bool update_z_to_f(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    const std::int32_t q = static_cast<std::int32_t>(p.q);
    bool changed = false;
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        std::int32_t lo = 0, hi = q;
        for (std::int64_t k = 0; k < p.d_vz; ++k) {
            const std::int32_t e = g.z_edges[f * p.d_vz + k];
            lo = std::max(lo, st.l_cz[e]);
            hi = std::min(hi, st.u_cz[e]);
        }
        changed |= detail::store(st.l_zf, st.u_zf, f, lo, hi, "z_to_f");
    }
    return changed;
}

// Hidden CNs to items: the bundle count bound minus the other items'
// bounds, clamped to [0, 1].
inline bool update_f_to_x(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        const std::int64_t base = f * p.q;
        std::int32_t sum_l = 0, sum_u = 0;
        for (std::int64_t k = 0; k < p.q; ++k) {
            const std::int32_t i = g.bundle_items[base + k];
            sum_l += st.l_xf[i];
            sum_u += st.u_xf[i];
        }
        for (std::int64_t k = 0; k < p.q; ++k) {
            const std::int32_t i = g.bundle_items[base + k];
            std::int32_t lo = std::max(st.l_zf[f] - (sum_u - st.u_xf[i]), 0);
            std::int32_t hi = std::min(st.u_zf[f] - (sum_l - st.l_xf[i]), 1);
            changed |= detail::store(st.l_fx, st.u_fx, i, lo, hi, "f_to_x");
        }
    }
    return changed;
}

// Items to plain tests: combine the hidden-CN message with the other
// plain tests' messages.
inline bool update_x_to_cx(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t i = 0; i < p.n; ++i) {
        const std::int64_t base = i * p.d_vx;
        for (std::int64_t k = 0; k < p.d_vx; ++k) {
            const std::int32_t e = g.x_edges[base + k];
            std::int32_t lo = st.l_fx[i], hi = st.u_fx[i];
            for (std::int64_t k2 = 0; k2 < p.d_vx; ++k2) {
                if (k2 == k) continue;
                const std::int32_t e2 = g.x_edges[base + k2];
                lo = std::max(lo, st.l_cx[e2]);
                hi = std::min(hi, st.u_cx[e2]);
            }
            changed |= detail::store(st.l_xc, st.u_xc, e, lo, hi, "x_to_cx");
        }
    }
    return changed;
}

// Plain tests to items.
inline bool update_cx_to_x(const DecoderGraph& g, const Syndrome& syn, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t t = 0; t < p.m_x; ++t) {
        const std::int64_t base = t * p.d_c;
        std::int32_t sum_l = 0, sum_u = 0;
        for (std::int64_t k = 0; k < p.d_c; ++k) {
            sum_l += st.l_xc[base + k];
            sum_u += st.u_xc[base + k];
        }
        const std::int32_t s = syn.s[p.m_z + t];
        for (std::int64_t k = 0; k < p.d_c; ++k) {
            const std::int64_t e = base + k;
            std::int32_t lo = std::max(s - (sum_u - st.u_xc[e]), 0);
            std::int32_t hi = std::min(s - (sum_l - st.l_xc[e]), 1);
            changed |= detail::store(st.l_cx, st.u_cx, e, lo, hi, "cx_to_x");
        }
    }
    return changed;
}

// Items to their hidden CNs: combine all plain-test messages.
inline bool update_x_to_f(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t i = 0; i < p.n; ++i) {
        std::int32_t lo = 0, hi = 1;
        const std::int64_t base = i * p.d_vx;
        for (std::int64_t k = 0; k < p.d_vx; ++k) {
            const std::int32_t e = g.x_edges[base + k];
            lo = std::max(lo, st.l_cx[e]);
            hi = std::min(hi, st.u_cx[e]);
        }
        changed |= detail::store(st.l_xf, st.u_xf, i, lo, hi, "x_to_f");
    }
    return changed;
}

// Hidden CNs to their VNs: sum of the items' bounds.
inline bool update_f_to_z(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        const std::int64_t base = f * p.q;
        std::int32_t sum_l = 0, sum_u = 0;
        for (std::int64_t k = 0; k < p.q; ++k) {
            const std::int32_t i = g.bundle_items[base + k];
            sum_l += st.l_xf[i];
            sum_u += st.u_xf[i];
        }
        changed |= detail::store(st.sf_l, st.sf_u, f, sum_l, sum_u, "f_to_z");
    }
    return changed;
}

// Hidden VNs to bundle tests: combine the hidden-CN message with the
// other tests' messages.
inline bool update_z_to_cz(const DecoderGraph& g, DecoderState& st) {
    const GtParams& p = g.params;
    bool changed = false;
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        const std::int64_t base = f * p.d_vz;
        for (std::int64_t k = 0; k < p.d_vz; ++k) {
            const std::int32_t e = g.z_edges[base + k];
            std::int32_t lo = st.sf_l[f], hi = st.sf_u[f];
            for (std::int64_t k2 = 0; k2 < p.d_vz; ++k2) {
                if (k2 == k) continue;
                const std::int32_t e2 = g.z_edges[base + k2];
                lo = std::max(lo, st.l_cz[e2]);
                hi = std::min(hi, st.u_cz[e2]);
            }
            changed |= detail::store(st.l_zc, st.u_zc, e, lo, hi, "z_to_cz");
        }
    }
    return changed;
}

// One full iteration: a forward sweep from the bundle tests down to the
// plain tests, then the reverse sweep back. Every stage consumes the
// freshest available messages. Returns whether anything changed.
inline bool run_iteration(const DecoderGraph& g, const Syndrome& syn, DecoderState& st) {
    bool changed = false;
    changed |= update_cz_to_z(g, syn, st);
    changed |= update_z_to_f(g, st);
    changed |= update_f_to_x(g, st);
    changed |= update_x_to_cx(g, st);
    changed |= update_cx_to_x(g, syn, st);
    changed |= update_x_to_f(g, st);
    changed |= update_f_to_z(g, st);
    changed |= update_z_to_cz(g, st);
    return changed;
}

struct DecodeOutcome {
    std::vector<std::int32_t> item_lo, item_hi;     // final per-item bounds
    std::vector<std::int32_t> bundle_lo, bundle_hi; // final per-bundle bounds
    std::vector<std::int32_t> declared;             // items with final L = 1
    int iterations = 0;
    bool converged = false;
};

// Final per-node bounds from the incoming messages of the last state.
inline DecodeOutcome finalize(const DecoderGraph& g, const DecoderState& st) {
    const GtParams& p = g.params;
    DecodeOutcome out;
    out.iterations = st.iterations;
    out.converged = st.converged;
    out.item_lo.resize(p.n);
    out.item_hi.resize(p.n);
    for (std::int64_t i = 0; i < p.n; ++i) {
        std::int32_t lo = st.l_fx[i], hi = st.u_fx[i];
        for (std::int64_t k = 0; k < p.d_vx; ++k) {
            const std::int32_t e = g.x_edges[i * p.d_vx + k];
            lo = std::max(lo, st.l_cx[e]);
            hi = std::min(hi, st.u_cx[e]);
        }
        if (lo > hi) detail::inconsistent("finalize item", i, lo, hi);
        out.item_lo[i] = lo;
        out.item_hi[i] = hi;
        if (lo == 1) out.declared.push_back(static_cast<std::int32_t>(i));
    }
    out.bundle_lo.resize(p.n_h);
    out.bundle_hi.resize(p.n_h);
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        std::int32_t lo = st.sf_l[f], hi = st.sf_u[f];
        for (std::int64_t k = 0; k < p.d_vz; ++k) {
            const std::int32_t e = g.z_edges[f * p.d_vz + k];
            lo = std::max(lo, st.l_cz[e]);
            hi = std::min(hi, st.u_cz[e]);
        }
        if (lo > hi) detail::inconsistent("finalize bundle", f, lo, hi);
        out.bundle_lo[f] = lo;
        out.bundle_hi[f] = hi;
    }
    return out;
}

inline constexpr int default_max_iters = 200;

// Runs to a fixed point or to max_iters. iterations counts productive
// iterations: ones in which at least one message changed.
inline DecodeOutcome decode(const DecoderGraph& g, const Syndrome& syn,
                            int max_iters = default_max_iters) {
    if (static_cast<std::int64_t>(syn.s.size()) != g.params.m() || syn.m_z != g.params.m_z)
        throw DimensionError("decode: syndrome has " + std::to_string(syn.s.size()) +
                             " entries with m_z=" + std::to_string(syn.m_z) +
                             ", graph expects m=" + std::to_string(g.params.m()) +
                             " with m_z=" + std::to_string(g.params.m_z));
    DecoderState st = init_state(g);
    for (int iter = 1; iter <= max_iters; ++iter) {
        if (!run_iteration(g, syn, st)) {
            st.converged = true;
            break;
        }
        st.iterations = iter;
    }
    if (!st.converged && st.iterations == max_iters) {
        // fixed point may coincide with the last allowed iteration
        DecoderState probe = st;
        st.converged = !run_iteration(g, syn, probe);
    }
    return finalize(g, st);
}

inline DecodeOutcome decode(const AugmentedGraph& g, const Syndrome& syn,
                            int max_iters = default_max_iters) {
    return decode(DecoderGraph::from(g), syn, max_iters);
}

// Declared-set quality relative to a known truth.
struct ClassifyResult {
    std::int64_t defectives = 0;
    std::int64_t misdetected = 0;   // defectives not declared
    std::int64_t false_alarms = 0;  // non-defectives declared
    std::int64_t unresolved = 0;    // items with L < U
    bool zero_defectives = false;
    double misdetection_rate = 0.0;
    double false_alarm_rate = 0.0;
};

inline ClassifyResult classify(const DecodeOutcome& out, const std::vector<std::uint8_t>& truth) {
    if (truth.size() != out.item_lo.size())
        throw DimensionError("classify: truth has size " + std::to_string(truth.size()) +
                             ", outcome has n=" + std::to_string(out.item_lo.size()));
    ClassifyResult r;
    std::vector<std::uint8_t> declared(truth.size(), 0);
    for (std::int32_t i : out.declared) declared[i] = 1;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            ++r.defectives;
            if (!declared[i]) ++r.misdetected;
        } else if (declared[i]) {
            ++r.false_alarms;
        }
        if (out.item_lo[i] < out.item_hi[i]) ++r.unresolved;
    }
    r.zero_defectives = r.defectives == 0;
    r.misdetection_rate = r.zero_defectives
                              ? 0.0
                              : static_cast<double>(r.misdetected) / static_cast<double>(r.defectives);
    const std::int64_t negatives = static_cast<std::int64_t>(truth.size()) - r.defectives;
    r.false_alarm_rate = negatives == 0
                             ? 0.0
                             : static_cast<double>(r.false_alarms) / static_cast<double>(negatives);
    return r;
}

} // namespace qgt
