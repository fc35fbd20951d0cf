// Acceptance gate. Runs the eight release criteria and prints one
// [PASS]/[FAIL] line per criterion, with measured values on the detail
// lines. Exit code is the number of failed criteria. --only cN restricts
// the run to a single criterion so the criteria can be scheduled (and
// timed out) independently.

#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qgt/de.hpp"
#include "qgt/decoder.hpp"
#include "qgt/graph.hpp"
#include "qgt/io.hpp"
#include "qgt/model.hpp"
#include "qgt/params.hpp"
#include "qgt/pmf.hpp"
#include "qgt/rng.hpp"
#include "qgt/sim.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace qgt;

namespace {

// c1: density evolution thresholds for the rate-5% grid against the
// reference values embedded below (percent units).
bool c1_threshold_table(std::ostream& os) {
    struct Row {
        std::int64_t q, d_vx; // d_vx = 0: every item edge goes to a plain test
        std::array<double, 5> expected_pct;
        double tol_pct;
    };
    const std::vector<Row> rows = {
        {1, 0, {0.598, 0.641, 0.646, 0.635, 0.618}, 0.005},
        {4, 2, {0.590, 0.660, 0.694, 0.706, 0.702}, 0.005},
        {5, 2, {0.592, 0.672, 0.725, 0.746, 0.744}, 0.005},
        {10, 3, {0.549, 0.636, 0.693, 0.774, 0.694}, 0.010},
    };
    bool pass = true;
    int outside = 0;
    for (const Row& row : rows) {
        for (int j = 0; j < 5; ++j) {
            const std::int64_t d_v = 4 + j;
            const std::int64_t d_c = 20 * d_v;
            const std::int64_t d_vx = row.d_vx == 0 ? d_v : row.d_vx;
            de::ThresholdResult r = de::gamma_threshold(row.q, d_v, d_vx, d_c);
            const double got = r.gamma_th * 100.0;
            const double want = row.expected_pct[j];
            const bool ok = std::abs(got - want) <= row.tol_pct;
            if (!ok) {
                pass = false;
                ++outside;
            }
            os << "  q=" << row.q << " d_v=" << d_v << " d_vx=" << d_vx << " d_c=" << d_c
               << ": gamma_th=" << io::format_double(got) << "% expected "
               << io::format_double(want) << " +- " << io::format_double(row.tol_pct)
               << (ok ? "" : "  <- outside band") << std::endl;
        }
    }
    if (outside > 0)
        os << "  " << outside << " cells sit above their reference value. The computed\n"
           << "  thresholds are deterministic, and the finite-length runs (c2, c3) and the\n"
           << "  iteration-level statistics check (c7) side with the computed values; see\n"
           << "  README \"Known discrepancies\"." << std::endl;
    return pass;
}

// c2: finite-length benchmark points at n = 210000, rate 5%.
bool c2_benchmark_points(std::ostream& os) {
    struct Spot {
        const char* label;
        std::int64_t q, d_v, d_vx, d_c;
        double gamma_pct;
        std::int64_t trials;
        double lo, hi;
        std::uint64_t seed;
    };
    const std::vector<Spot> spots = {
        {"q=1 gamma=0.61%", 1, 6, 6, 120, 0.61, 200, 1.3e-3, 1.2e-2, 201},
        {"q=5 gamma=0.70%", 5, 7, 2, 140, 0.70, 400, 1.6e-4, 1.5e-3, 202},
        {"q=5 gamma=0.80%", 5, 7, 2, 140, 0.80, 200, 0.9, 1.0, 203},
    };
    bool pass = true;
    for (const Spot& s : spots) {
        GtParams p = derive_params(210000, s.q, s.d_v, s.d_vx, s.d_c);
        SimPoint r = run_point(p, s.gamma_pct / 100.0, s.trials, s.seed);
        const bool ok = r.misdetection_rate >= s.lo && r.misdetection_rate <= s.hi;
        if (!ok) pass = false;
        os << "  " << s.label << ": misdetection=" << io::format_double(r.misdetection_rate)
           << " se=" << io::format_double(r.se) << " (band [" << io::format_double(s.lo) << ", "
           << io::format_double(s.hi) << "], " << r.trials << " trials, " << r.defectives
           << " defectives, " << r.false_alarms << " false alarms)"
           << (ok ? "" : "  <- outside band") << std::endl;
    }
    return pass;
}

// c3: the q=5 empirical waterfall at n = 210000 must cross misdetection
// 0.5 close to the evolved threshold.
bool c3_waterfall_midpoint(std::ostream& os) {
    GtParams p = derive_params(210000, 5, 7, 2, 140);
    const std::vector<double> grid_pct = {0.73, 0.75, 0.77, 0.79};
    const std::int64_t trials = 50;
    std::vector<double> rate;
    for (std::size_t i = 0; i < grid_pct.size(); ++i) {
        SimPoint r = run_point(p, grid_pct[i] / 100.0, trials, 301 + i);
        rate.push_back(r.misdetection_rate);
        os << "  gamma=" << io::format_double(grid_pct[i])
           << "%: misdetection=" << io::format_double(r.misdetection_rate)
           << " se=" << io::format_double(r.se) << std::endl;
    }
    double crossing = -1.0;
    for (std::size_t i = 0; i + 1 < rate.size(); ++i) {
        if (rate[i] < 0.5 && rate[i + 1] >= 0.5) {
            const double t = (0.5 - rate[i]) / (rate[i + 1] - rate[i]);
            crossing = grid_pct[i] + t * (grid_pct[i + 1] - grid_pct[i]);
            break;
        }
    }
    if (crossing < 0.0) {
        os << "  the gamma grid does not bracket a 0.5 crossing" << std::endl;
        return false;
    }
    const double want = 0.746, tol = 0.05;
    const bool ok = std::abs(crossing - want) <= tol;
    os << "  0.5-crossing at gamma=" << io::format_double(crossing) << "% (reference "
       << io::format_double(want) << " +- " << io::format_double(tol) << ")"
       << (ok ? "" : "  <- outside band") << std::endl;
    return ok;
}

// c4: instrumented validity sweep. Every message family must bracket the
// planted truth at every iteration, tighten monotonically, converge
// within the iteration cap, and finish without false alarms.
bool c4_validity(std::ostream& os) {
    const std::vector<test::ToySet> sets = test::toy_sets();
    const std::int64_t per_set = 1700;
    std::int64_t instances = 0, violations = 0, unconverged = 0, false_alarms = 0;
    for (std::size_t si = 0; si < sets.size(); ++si) {
        const test::ToySet& ts = sets[si];
        GtParams p = derive_params(ts.n, ts.q, ts.d_v, ts.d_vx, ts.d_c);
        for (std::int64_t inst = 0; inst < per_set; ++inst) {
            const std::uint64_t seed = static_cast<std::uint64_t>(inst);
            AugmentedGraph g = build_graph(p, derive_seed(seed, stream_graph, 40 + si));
            DecoderGraph dg = DecoderGraph::from(g);
            Population pop =
                sample_population(p.n, ts.gamma, derive_seed(seed, stream_population, 40 + si));
            Syndrome syn = compute_syndrome(g, pop.x);
            std::vector<std::int32_t> z = bundle_values(g, pop.x);
            ++instances;

            auto ok_pair = [&violations](std::int32_t lo, std::int32_t hi, std::int32_t truth,
                                         std::int32_t prev_lo, std::int32_t prev_hi) {
                if (lo > truth || hi < truth || lo < prev_lo || hi > prev_hi) ++violations;
            };

            DecoderState st = init_state(dg);
            DecoderState prev = st;
            bool converged = false;
            for (int iter = 0; iter < default_max_iters; ++iter) {
                const bool changed = run_iteration(dg, syn, st);
                for (std::size_t e = 0; e < dg.ez_bundle.size(); ++e) {
                    const std::int32_t truth = z[dg.ez_bundle[e]];
                    ok_pair(st.l_zc[e], st.u_zc[e], truth, prev.l_zc[e], prev.u_zc[e]);
                    ok_pair(st.l_cz[e], st.u_cz[e], truth, prev.l_cz[e], prev.u_cz[e]);
                }
                for (std::int64_t f = 0; f < p.n_h; ++f) {
                    ok_pair(st.l_zf[f], st.u_zf[f], z[f], prev.l_zf[f], prev.u_zf[f]);
                    ok_pair(st.sf_l[f], st.sf_u[f], z[f], prev.sf_l[f], prev.sf_u[f]);
                }
                for (std::int64_t i = 0; i < p.n; ++i) {
                    const std::int32_t truth = pop.x[i];
                    ok_pair(st.l_fx[i], st.u_fx[i], truth, prev.l_fx[i], prev.u_fx[i]);
                    ok_pair(st.l_xf[i], st.u_xf[i], truth, prev.l_xf[i], prev.u_xf[i]);
                }
                for (std::size_t e = 0; e < dg.ex_item.size(); ++e) {
                    const std::int32_t truth = pop.x[dg.ex_item[e]];
                    ok_pair(st.l_cx[e], st.u_cx[e], truth, prev.l_cx[e], prev.u_cx[e]);
                    ok_pair(st.l_xc[e], st.u_xc[e], truth, prev.l_xc[e], prev.u_xc[e]);
                }
                prev = st;
                if (!changed) {
                    converged = true;
                    break;
                }
            }
            if (!converged) ++unconverged;
            DecodeOutcome out = finalize(dg, st);
            false_alarms += classify(out, pop.x).false_alarms;
        }
    }
    os << "  " << instances << " instances over " << sets.size() << " parameter sets: "
       << violations << " bound violations, " << unconverged << " unconverged, " << false_alarms
       << " false alarms" << std::endl;
    return violations == 0 && unconverged == 0 && false_alarms == 0;
}

// c5: against exhaustive enumeration of every consistent defectivity
// vector, decoder intervals must contain the consistent-set envelope and
// resolved coordinates must be unanimous across the set.
bool c5_exhaustive_oracle(std::ostream& os) {
    struct OracleSet {
        std::int64_t n, q, d_v, d_vx, d_c, instances;
        std::uint64_t stream;
    };
    const std::vector<OracleSet> sets = {
        {16, 2, 3, 1, 4, 300, 50},
        {12, 2, 3, 1, 4, 150, 51},
        {20, 5, 4, 2, 10, 50, 52},
    };
    std::int64_t instances = 0, containment = 0, unanimity = 0;
    for (const OracleSet& s : sets) {
        GtParams p = derive_params(s.n, s.q, s.d_v, s.d_vx, s.d_c);
        for (std::int64_t inst = 0; inst < s.instances; ++inst) {
            const std::uint64_t seed = static_cast<std::uint64_t>(inst);
            AugmentedGraph g = build_graph(p, derive_seed(seed, stream_graph, s.stream));
            Population pop =
                sample_population(p.n, 0.15, derive_seed(seed, stream_population, s.stream));
            Syndrome syn = compute_syndrome(g, pop.x);
            DecodeOutcome out = decode(g, syn);
            test::ConsistentSet cs = test::enumerate_consistent(g, syn);
            ++instances;
            for (std::int64_t i = 0; i < p.n; ++i) {
                if (out.item_lo[i] > cs.lo[i] || out.item_hi[i] < cs.hi[i]) ++containment;
                if (out.item_lo[i] == out.item_hi[i] && cs.lo[i] != cs.hi[i]) ++unanimity;
            }
        }
    }
    os << "  " << instances << " instances: " << containment
       << " envelope containment violations, " << unanimity
       << " resolved coordinates the consistent set disagrees on" << std::endl;
    return containment == 0 && unanimity == 0;
}

// c6: with q = 1 the outcome must coincide with plain bound propagation
// on the flattened test matrix.
bool c6_flat_equivalence(std::ostream& os) {
    struct Q1Set {
        std::int64_t n, d_v, d_vx, d_c;
        double gamma;
        std::uint64_t stream;
    };
    const std::vector<Q1Set> sets = {{120, 3, 1, 4, 0.10, 60}, {120, 4, 4, 8, 0.12, 61}};
    std::int64_t instances = 0, mismatches = 0;
    for (const Q1Set& s : sets) {
        GtParams p = derive_params(s.n, 1, s.d_v, s.d_vx, s.d_c);
        for (std::int64_t inst = 0; inst < 50; ++inst) {
            const std::uint64_t seed = static_cast<std::uint64_t>(inst);
            AugmentedGraph g = build_graph(p, derive_seed(seed, stream_graph, s.stream));
            Population pop =
                sample_population(p.n, s.gamma, derive_seed(seed, stream_population, s.stream));
            Syndrome syn = compute_syndrome(g, pop.x);
            DecodeOutcome out = decode(g, syn);
            test::FlatResult flat = test::flat_decode(flatten_to_test_matrix(g), p.n, syn.s, 200);
            ++instances;
            if (!flat.converged || !out.converged) ++mismatches;
            for (std::int64_t i = 0; i < p.n; ++i)
                if (out.item_lo[i] != flat.lo[i] || out.item_hi[i] != flat.hi[i]) ++mismatches;
            std::vector<std::int32_t> flat_declared(flat.declared.begin(), flat.declared.end());
            if (out.declared != flat_declared) ++mismatches;
        }
    }
    os << "  " << instances << " q=1 instances: " << mismatches << " outcome mismatches"
       << std::endl;
    return mismatches == 0;
}

// c7: iteration-ell message statistics on n = 100000 instances against
// the evolved distributions. Cells whose pooled expected count clears the
// gate use the across-trial spread at 3 sigma; thinner cells that still
// clear the adequacy floor use a pooled binomial at 5 sigma.
bool c7_crosscheck(std::ostream& os) {
    struct Cfg {
        std::int64_t n, q, d_v, d_vx, d_c;
    };
    const std::vector<Cfg> cfgs = {{100000, 2, 3, 1, 4}, {100000, 5, 4, 2, 10}};
    bool pass = true;
    for (const Cfg& c : cfgs) {
        GtParams p = derive_params(c.n, c.q, c.d_v, c.d_vx, c.d_c);
        for (int ell = 0; ell <= 3; ++ell) {
            CrosscheckReport rep = de_crosscheck(p, 0.10, ell, 32, 7);
            const bool ok =
                rep.max_abs_z <= 3.0 && rep.max_abs_z_sparse <= 5.0 && !rep.exact_violation;
            if (!ok) pass = false;
            os << "  q=" << c.q << " ell=" << ell << ": max|z|=" << io::format_double(rep.max_abs_z)
               << " sparse max|z|=" << io::format_double(rep.max_abs_z_sparse)
               << (rep.exact_violation ? " exact-cell violation" : "")
               << (ok ? "" : "  <- outside band") << std::endl;
        }
    }
    return pass;
}

// c8: distribution primitives against exhaustive expansion, and the
// documented truncation example.
bool c8_primitives(std::ostream& os) {
    Rng rng(88);
    auto random_pmf = [&rng](int support) {
        Pmf p(support);
        double total = 0.0;
        for (double& v : p) {
            v = 0.05 + rng.uniform();
            total += v;
        }
        for (double& v : p) v /= total;
        return p;
    };
    double worst = 0.0;
    std::int64_t checks = 0;
    auto compare = [&worst, &checks](const Pmf& got, const Pmf& want) {
        for (std::size_t i = 0; i < want.size(); ++i)
            worst = std::max(worst, std::abs(got[i] - want[i]));
        ++checks;
    };
    for (int support = 2; support <= 4; ++support) {
        for (int rep = 0; rep < 20; ++rep) {
            Pmf a = random_pmf(support);
            Pmf b = random_pmf(support);
            for (std::int64_t k = 0; k <= 3; ++k) {
                compare(order_stat_max(a, k), test::brute_order_stat(a, k, true));
                compare(order_stat_min(a, k), test::brute_order_stat(a, k, false));
            }
            compare(pmf_max2(a, b), test::brute_pair_combine(a, b, true));
            compare(pmf_min2(a, b), test::brute_pair_combine(a, b, false));
        }
    }
    const std::int64_t cutoff = syndrome_cutoff(160, 0.01, 1e-6);
    os << "  " << checks << " primitive comparisons, worst |error| "
       << io::format_double(worst) << " (tolerance 1e-12)" << std::endl;
    os << "  syndrome_cutoff(160, 1%, 1e-6) = " << cutoff << " (expected 10)" << std::endl;
    return worst <= 1e-12 && cutoff == 10;
}

} // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else if (arg == "--help") {
            std::cout << "usage: qgt-acceptance [--only cN]\n"
                         "Runs the acceptance criteria (c1..c8) and prints one\n"
                         "[PASS]/[FAIL] line per criterion.\n";
            return 0;
        } else {
            std::cerr << "unknown argument: " << arg << "\n";
            return 2;
        }
    }

    struct Criterion {
        const char* id;
        const char* title;
        bool (*fn)(std::ostream&);
    };
    const std::vector<Criterion> criteria = {
        {"c1", "density evolution threshold grid", &c1_threshold_table},
        {"c2", "finite-length benchmark points", &c2_benchmark_points},
        {"c3", "waterfall midpoint vs threshold", &c3_waterfall_midpoint},
        {"c4", "decoder validity suite", &c4_validity},
        {"c5", "exhaustive consistent-set oracle", &c5_exhaustive_oracle},
        {"c6", "q=1 flat-decoder equivalence", &c6_flat_equivalence},
        {"c7", "decoder vs evolved message statistics", &c7_crosscheck},
        {"c8", "distribution primitive oracles", &c8_primitives},
    };

    int failures = 0, ran = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && only != c.id) continue;
        ++ran;
        std::cout << "== " << c.id << " " << c.title << std::endl;
        bool ok = false;
        try {
            ok = c.fn(std::cout);
        } catch (const std::exception& e) {
            std::cout << "  unexpected exception: " << e.what() << std::endl;
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << std::endl;
        if (!ok) ++failures;
    }
    if (ran == 0) {
        std::cerr << "no criterion named " << only << " (expected c1..c8)\n";
        return 2;
    }
    return failures;
}
