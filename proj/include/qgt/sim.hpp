#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "qgt/de.hpp"
#include "qgt/decoder.hpp"
#include "qgt/graph.hpp"
#include "qgt/model.hpp"
#include "qgt/params.hpp"
#include "qgt/rng.hpp"

namespace qgt {

struct SimConfig {
    GtParams params;
    std::vector<double> gamma_grid; // fractions
    std::int64_t trials = 0;
    std::uint64_t master_seed = 0;
    int max_iters = default_max_iters;
    bool fresh_graph_per_trial = true;
    int jobs = 1;
    BuildOptions build;
};

// Aggregated results for one gamma point. The misdetection rate is
// pooled: total misdetected over total defectives. Trials that sample
// zero defectives carry no information about it and are excluded from
// the pool (their count is reported).
struct SimPoint {
    double gamma = 0.0;
    std::int64_t trials = 0;
    std::int64_t defectives = 0;
    std::int64_t misdetected = 0;
    double misdetection_rate = 0.0;
    double se = 0.0;
    std::int64_t false_alarms = 0;
    std::int64_t unresolved = 0;
    double mean_iters = 0.0;
    std::int64_t zero_defective_trials = 0;
};

struct SimResult {
    std::vector<SimPoint> points;
    SimConfig config;
    bool monotone_ok = true;
};

namespace detail {

struct TrialStats {
    std::int64_t defectives = 0;
    std::int64_t misdetected = 0;
    std::int64_t false_alarms = 0;
    std::int64_t unresolved = 0;
    int iterations = 0;
};

template <class Fn>
inline void for_each_trial(std::int64_t trials, int jobs, Fn&& fn) {
    if (jobs <= 1 || trials <= 1) {
        for (std::int64_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::int64_t t = next.fetch_add(1);
            if (t >= trials) return;
            fn(t);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

} // namespace detail

// Monte Carlo estimate of the decoder error rates at one gamma. Each
// trial is seeded by hash derivation from (master_seed, trial), so any
// trial is reproducible in isolation and results do not depend on the
// number of worker threads.
inline SimPoint run_point(const GtParams& params, double gamma, std::int64_t trials,
                          std::uint64_t master_seed, int max_iters = default_max_iters,
                          bool fresh_graph_per_trial = true, int jobs = 1,
                          const BuildOptions& build = {}) {
    DecoderGraph shared;
    if (!fresh_graph_per_trial) {
        shared = DecoderGraph::from(
            build_graph(params, derive_seed(master_seed, stream_graph, 0), build));
    }

    std::vector<detail::TrialStats> stats(trials);
    detail::for_each_trial(trials, jobs, [&](std::int64_t t) {
        DecoderGraph local;
        const DecoderGraph* dg = &shared;
        AugmentedGraph g;
        if (fresh_graph_per_trial) {
            g = build_graph(params, derive_seed(master_seed, stream_graph, t), build);
            local = DecoderGraph::from(g);
            dg = &local;
        }
        Population pop = sample_population(params.n, gamma,
                                           derive_seed(master_seed, stream_population, t));
        Syndrome syn;
        if (fresh_graph_per_trial) {
            syn = compute_syndrome(g, pop.x);
        } else {
            // rebuild a light adjacency-independent syndrome via the flat lists
            std::vector<std::int32_t> z(params.n_h, 0);
            for (std::int64_t i = 0; i < params.n; ++i)
                if (pop.x[i]) ++z[i / params.q];
            syn.m_z = params.m_z;
            syn.s.assign(params.m(), 0);
            for (std::int64_t e = 0; e < static_cast<std::int64_t>(dg->ez_bundle.size()); ++e)
                syn.s[e / params.d_cz] += z[dg->ez_bundle[e]];
            for (std::int64_t e = 0; e < static_cast<std::int64_t>(dg->ex_item.size()); ++e)
                syn.s[params.m_z + e / params.d_c] += pop.x[dg->ex_item[e]];
        }
        DecodeOutcome out = decode(*dg, syn, max_iters);
        ClassifyResult c = classify(out, pop.x);
        stats[t] = {c.defectives, c.misdetected, c.false_alarms, c.unresolved, out.iterations};
    });

    SimPoint point;
    point.gamma = gamma;
    point.trials = trials;
    double iter_sum = 0.0;
    for (const auto& s : stats) {
        if (s.defectives == 0) ++point.zero_defective_trials;
        point.defectives += s.defectives;
        point.misdetected += s.misdetected;
        point.false_alarms += s.false_alarms;
        point.unresolved += s.unresolved;
        iter_sum += s.iterations;
    }
    point.mean_iters = trials > 0 ? iter_sum / static_cast<double>(trials) : 0.0;
    if (point.defectives > 0) {
        const double rate = static_cast<double>(point.misdetected) /
                            static_cast<double>(point.defectives);
        point.misdetection_rate = rate;
        // ratio-estimator standard error over independent trials
        double ss = 0.0;
        for (const auto& s : stats) {
            double dev = static_cast<double>(s.misdetected) - rate * static_cast<double>(s.defectives);
            ss += dev * dev;
        }
        point.se = std::sqrt(ss) / static_cast<double>(point.defectives);
    }
    return point;
}

inline SimResult sweep(const SimConfig& cfg) {
    SimResult result;
    result.config = cfg;
    for (double gamma : cfg.gamma_grid)
        result.points.push_back(run_point(cfg.params, gamma, cfg.trials, cfg.master_seed,
                                          cfg.max_iters, cfg.fresh_graph_per_trial, cfg.jobs,
                                          cfg.build));
    // waterfall sanity: misdetection should not drop as gamma grows, up to noise
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        const SimPoint& a = result.points[i - 1];
        const SimPoint& b = result.points[i];
        if (b.gamma >= a.gamma && b.misdetection_rate < a.misdetection_rate - 2.0 * (a.se + b.se))
            result.monotone_ok = false;
    }
    return result;
}

// ---------------------------------------------------------------------
// Decoder vs density evolution crosscheck: empirical message statistics
// after exactly ell iterations against the DE prediction.

struct CrosscheckCell {
    std::string family;
    std::int64_t z = 0; // conditioning truth (bundle value, or item value 0/1)
    std::int64_t v = 0; // message value
    double de_p = 0.0;
    std::int64_t count = 0;
    std::int64_t total = 0;
    double zscore = 0.0;
    bool adequate = false;   // expected count large enough for any z-test
    bool gated = false;      // expected count large enough for the main gate
    bool exact_ok = true;    // for de_p in {0, 1}: empirical agreement
};

struct CrosscheckReport {
    int ell = 0;
    std::int64_t trials = 0;
    std::vector<CrosscheckCell> cells;
    double max_abs_z = 0.0;        // over well-populated cells (across-trial t)
    double max_abs_z_sparse = 0.0; // over sparse cells (pooled binomial)
    bool exact_violation = false;

    bool pass(double sigma) const {
        return !exact_violation && max_abs_z <= sigma && max_abs_z_sparse <= sigma;
    }
};

namespace detail {

// counts[z][v] per bundle-valued family, counts[x][v] per item-valued one
struct MessageCounts {
    std::int64_t q = 0;
    std::vector<std::vector<std::int64_t>> bundle; // family -> (q+1)*(q+1)
    std::vector<std::vector<std::int64_t>> item;   // family -> 2*2

    static constexpr const char* bundle_names[] = {"l_zc", "u_zc", "l_cz", "u_cz",
                                                   "l_zf", "u_zf", "sf_l", "sf_u"};
    static constexpr const char* item_names[] = {"l_fx", "u_fx", "l_xc", "u_xc",
                                                 "l_cx", "u_cx", "l_xf", "u_xf"};

    explicit MessageCounts(std::int64_t q_)
        : q(q_), bundle(8, std::vector<std::int64_t>((q_ + 1) * (q_ + 1), 0)),
          item(8, std::vector<std::int64_t>(4, 0)) {}

    void add_bundle(int family, std::int64_t z, std::int64_t v) {
        ++bundle[family][z * (q + 1) + v];
    }
    void add_item(int family, std::int64_t x, std::int64_t v) { ++item[family][x * 2 + v]; }
};

inline void collect_counts(const DecoderGraph& g, const DecoderState& st,
                           const std::vector<std::int32_t>& z_truth,
                           const std::vector<std::uint8_t>& x_truth, MessageCounts& mc) {
    const GtParams& p = g.params;
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(g.ez_bundle.size()); ++e) {
        const std::int32_t z = z_truth[g.ez_bundle[e]];
        mc.add_bundle(0, z, st.l_zc[e]);
        mc.add_bundle(1, z, st.u_zc[e]);
        mc.add_bundle(2, z, st.l_cz[e]);
        mc.add_bundle(3, z, st.u_cz[e]);
    }
    for (std::int64_t f = 0; f < p.n_h; ++f) {
        const std::int32_t z = z_truth[f];
        mc.add_bundle(4, z, st.l_zf[f]);
        mc.add_bundle(5, z, st.u_zf[f]);
        mc.add_bundle(6, z, st.sf_l[f]);
        mc.add_bundle(7, z, st.sf_u[f]);
    }
    for (std::int64_t i = 0; i < p.n; ++i) {
        const std::int64_t x = x_truth[i];
        mc.add_item(0, x, st.l_fx[i]);
        mc.add_item(1, x, st.u_fx[i]);
        mc.add_item(6, x, st.l_xf[i]);
        mc.add_item(7, x, st.u_xf[i]);
    }
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(g.ex_item.size()); ++e) {
        const std::int64_t x = x_truth[g.ex_item[e]];
        mc.add_item(2, x, st.l_xc[e]);
        mc.add_item(3, x, st.u_xc[e]);
        mc.add_item(4, x, st.l_cx[e]);
        mc.add_item(5, x, st.u_cx[e]);
    }
}

// One cell of the comparison, fed with per-trial (count, total) pairs.
// Trials share one sampled population internally, which correlates edge
// outcomes within a trial; the honest spread of the cell frequency for a
// well-populated cell is therefore estimated across independent trials
// rather than assumed binomial. Sparse cells (pooled expected count below
// gate_min_expected) are dominated by Poisson counting noise for which
// pooling is sound, so they use a continuity-corrected binomial z instead
// and are tracked separately: their relative deviation from the tree
// prediction carries the largest finite-size amplification.
inline void report_cell(CrosscheckReport& rep, const std::string& family, std::int64_t z,
                        std::int64_t v, double de_p,
                        const std::vector<std::pair<std::int64_t, std::int64_t>>& per_trial,
                        double min_expected, double gate_min_expected) {
    CrosscheckCell cell;
    cell.family = family;
    cell.z = z;
    cell.v = v;
    cell.de_p = de_p;
    std::vector<double> freqs;
    for (const auto& [count, total] : per_trial) {
        cell.count += count;
        cell.total += total;
        if (total > 0)
            freqs.push_back(static_cast<double>(count) / static_cast<double>(total));
    }
    if (cell.total == 0) return;
    if (de_p <= 0.0 || de_p >= 1.0) {
        const std::int64_t expect = de_p >= 1.0 ? cell.total : 0;
        cell.exact_ok = cell.count == expect;
        if (!cell.exact_ok) rep.exact_violation = true;
    } else {
        const double expected = static_cast<double>(cell.total) * std::min(de_p, 1.0 - de_p);
        cell.adequate = expected >= min_expected;
        cell.gated = expected >= gate_min_expected;
        if (cell.adequate) {
            double mean = 0.0;
            for (double f : freqs) mean += f;
            mean /= static_cast<double>(freqs.size());
            double se = 0.0;
            if (cell.gated && freqs.size() >= 2) {
                double ss = 0.0;
                for (double f : freqs) ss += (f - mean) * (f - mean);
                se = std::sqrt(ss / (static_cast<double>(freqs.size()) - 1.0) /
                               static_cast<double>(freqs.size()));
            }
            if (se > 0.0) {
                cell.zscore = (mean - de_p) / se;
            } else {
                const double n_pool = static_cast<double>(cell.total);
                const double dev = static_cast<double>(cell.count) - n_pool * de_p;
                const double corrected = std::max(std::abs(dev) - 0.5, 0.0);
                cell.zscore = std::copysign(
                    corrected / std::sqrt(n_pool * de_p * (1.0 - de_p)), dev);
            }
            if (cell.gated)
                rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cell.zscore));
            else
                rep.max_abs_z_sparse = std::max(rep.max_abs_z_sparse, std::abs(cell.zscore));
        }
    }
    rep.cells.push_back(std::move(cell));
}

inline CrosscheckReport compare_counts_to_de(const std::vector<MessageCounts>& mc,
                                             const de::DeState& de_st, const de::DeConfig& cfg,
                                             double min_expected = 25.0,
                                             double gate_min_expected = 500.0) {
    CrosscheckReport rep;
    const std::int64_t q = cfg.q;

    const de::CondPmf* bundle_pmfs[8] = {&de_st.l_zc, &de_st.u_zc, &de_st.l_cz, &de_st.u_cz,
                                         &de_st.l_zf, &de_st.u_zf, nullptr, nullptr};
    de::CondPmf sf_l(q), sf_u(q);
    for (std::int64_t z = 0; z <= q; ++z) {
        sf_l.set_row(z, de::item_sum_lower_pmf(q, z, de_st.pl_xf));
        sf_u.set_row(z, de::item_sum_upper_pmf(q, z, de_st.pu0_xf));
    }
    bundle_pmfs[6] = &sf_l;
    bundle_pmfs[7] = &sf_u;

    std::vector<std::pair<std::int64_t, std::int64_t>> per_trial(mc.size());
    for (int fam = 0; fam < 8; ++fam) {
        // skip the test-edge families when no bundle tests exist
        if (cfg.d_vz == 0 && fam < 4) continue;
        for (std::int64_t z = 0; z <= q; ++z) {
            for (std::int64_t v = 0; v <= q; ++v) {
                for (std::size_t t = 0; t < mc.size(); ++t) {
                    std::int64_t total = 0;
                    for (std::int64_t w = 0; w <= q; ++w)
                        total += mc[t].bundle[fam][z * (q + 1) + w];
                    per_trial[t] = {mc[t].bundle[fam][z * (q + 1) + v], total};
                }
                report_cell(rep, detail::MessageCounts::bundle_names[fam], z, v,
                            bundle_pmfs[fam]->at(z, v), per_trial, min_expected,
                            gate_min_expected);
            }
        }
    }

    // Item families carry one free probability each: P(L=1 | X=1) for the
    // lower bounds, P(U=0 | X=0) for the upper ones. Validity pins the
    // remaining conditionings exactly.
    const double scalars[8] = {de_st.pl_fx, de_st.pu0_fx, de_st.pl_xc, de_st.pu0_xc,
                               de_st.pl_cx, de_st.pu0_cx, de_st.pl_xf, de_st.pu0_xf};
    for (int fam = 0; fam < 8; ++fam) {
        const bool lower = fam % 2 == 0;
        for (std::int64_t x = 0; x <= 1; ++x) {
            for (std::size_t t = 0; t < mc.size(); ++t)
                per_trial[t] = {mc[t].item[fam][x * 2 + 1],
                                mc[t].item[fam][x * 2] + mc[t].item[fam][x * 2 + 1]};
            const double p1 = lower ? (x == 1 ? scalars[fam] : 0.0)
                                    : (x == 1 ? 1.0 : 1.0 - scalars[fam]);
            report_cell(rep, detail::MessageCounts::item_names[fam], x, 1, p1, per_trial,
                        min_expected, gate_min_expected);
        }
    }
    return rep;
}

} // namespace detail

// Runs `trials` independent instances for exactly ell iterations each,
// accumulates per-edge message histograms conditioned on the planted
// truth, and tests them against the density evolution prediction.
inline CrosscheckReport de_crosscheck(const GtParams& params, double gamma, int ell,
                                      std::int64_t trials, std::uint64_t master_seed,
                                      double eps_tail = 1e-8) {
    de::DeConfig cfg = de::DeConfig::from(params.q, gamma, params.d_v, params.d_vx, params.d_c);
    cfg.eps_tail = eps_tail;
    de::DeEngine engine(cfg);
    for (int i = 0; i < ell; ++i) engine.step();

    std::vector<detail::MessageCounts> mc(trials, detail::MessageCounts(params.q));
    for (std::int64_t t = 0; t < trials; ++t) {
        AugmentedGraph g = build_graph(params, derive_seed(master_seed, stream_graph, t));
        DecoderGraph dg = DecoderGraph::from(g);
        Population pop = sample_population(params.n, gamma,
                                           derive_seed(master_seed, stream_population, t));
        Syndrome syn = compute_syndrome(g, pop.x);
        std::vector<std::int32_t> z_truth = bundle_values(g, pop.x);
        DecoderState st = init_state(dg);
        for (int i = 0; i < ell; ++i) run_iteration(dg, syn, st);
        detail::collect_counts(dg, st, z_truth, pop.x, mc[t]);
    }

    CrosscheckReport rep = detail::compare_counts_to_de(mc, engine.state(), cfg);
    rep.ell = ell;
    rep.trials = trials;
    return rep;
}

} // namespace qgt
