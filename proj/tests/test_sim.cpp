#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "qgt/sim.hpp"

using namespace qgt;

namespace {

void expect_points_equal(const SimPoint& a, const SimPoint& b) {
    EXPECT_DOUBLE_EQ(a.gamma, b.gamma);
    EXPECT_EQ(a.trials, b.trials);
    EXPECT_EQ(a.defectives, b.defectives);
    EXPECT_EQ(a.misdetected, b.misdetected);
    EXPECT_DOUBLE_EQ(a.misdetection_rate, b.misdetection_rate);
    EXPECT_DOUBLE_EQ(a.se, b.se);
    EXPECT_EQ(a.false_alarms, b.false_alarms);
    EXPECT_EQ(a.unresolved, b.unresolved);
    EXPECT_DOUBLE_EQ(a.mean_iters, b.mean_iters);
    EXPECT_EQ(a.zero_defective_trials, b.zero_defective_trials);
}

} // namespace

TEST(Sim, EmptyGridGivesEmptyResult) {
    SimConfig cfg;
    cfg.params = derive_params(64, 2, 3, 1, 4);
    cfg.trials = 10;
    SimResult r = sweep(cfg);
    EXPECT_TRUE(r.points.empty());
    EXPECT_TRUE(r.monotone_ok);
}

TEST(Sim, DeterministicPerSeed) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    SimPoint a = run_point(p, 0.15, 50, 42);
    SimPoint b = run_point(p, 0.15, 50, 42);
    expect_points_equal(a, b);
    SimPoint c = run_point(p, 0.15, 50, 43);
    EXPECT_NE(a.defectives, c.defectives);
}

TEST(Sim, WorkerCountDoesNotChangeResults) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    SimPoint serial = run_point(p, 0.18, 40, 7, default_max_iters, true, 1);
    SimPoint threaded = run_point(p, 0.18, 40, 7, default_max_iters, true, 4);
    expect_points_equal(serial, threaded);
}

TEST(Sim, SharedGraphPathMatchesDirectDecodes) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    const std::uint64_t seed = 9;
    const std::int64_t trials = 20;
    SimPoint point = run_point(p, 0.15, trials, seed, default_max_iters, false);

    AugmentedGraph g = build_graph(p, derive_seed(seed, stream_graph, 0));
    std::int64_t defectives = 0, misdetected = 0, false_alarms = 0, unresolved = 0;
    double iter_sum = 0.0;
    std::int64_t zero_trials = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        Population pop = sample_population(p.n, 0.15, derive_seed(seed, stream_population, t));
        DecodeOutcome out = decode(g, compute_syndrome(g, pop.x));
        ClassifyResult c = classify(out, pop.x);
        defectives += c.defectives;
        misdetected += c.misdetected;
        false_alarms += c.false_alarms;
        unresolved += c.unresolved;
        iter_sum += out.iterations;
        if (c.defectives == 0) ++zero_trials;
    }
    EXPECT_EQ(point.defectives, defectives);
    EXPECT_EQ(point.misdetected, misdetected);
    EXPECT_EQ(point.false_alarms, false_alarms);
    EXPECT_EQ(point.unresolved, unresolved);
    EXPECT_DOUBLE_EQ(point.mean_iters, iter_sum / static_cast<double>(trials));
    EXPECT_EQ(point.zero_defective_trials, zero_trials);
}

TEST(Sim, ZeroGammaPoolsToZero) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    SimPoint point = run_point(p, 0.0, 10, 3);
    EXPECT_EQ(point.defectives, 0);
    EXPECT_EQ(point.zero_defective_trials, 10);
    EXPECT_DOUBLE_EQ(point.misdetection_rate, 0.0);
    EXPECT_DOUBLE_EQ(point.se, 0.0);
    EXPECT_EQ(point.false_alarms, 0);
}

TEST(Sim, CountsZeroDefectiveTrials) {
    GtParams p = derive_params(8, 2, 3, 1, 4);
    SimPoint point = run_point(p, 0.05, 60, 17);
    EXPECT_GT(point.zero_defective_trials, 0);
    EXPECT_LT(point.zero_defective_trials, 60);
    EXPECT_GE(point.misdetection_rate, 0.0);
    EXPECT_LE(point.misdetection_rate, 1.0);
}

// The reported 2SE interval must bracket an independent rerun nearly
// always; a systematic miss would mean the error bars are wrong.
TEST(Sim, ErrorBarsCoverIndependentReruns) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    int agree = 0, total = 0;
    for (double gamma : {0.12, 0.15, 0.18, 0.21}) {
        for (std::uint64_t pair = 0; pair < 3; ++pair) {
            SimPoint a = run_point(p, gamma, 200, 1000 + pair);
            SimPoint b = run_point(p, gamma, 200, 2000 + pair);
            ++total;
            if (std::abs(a.misdetection_rate - b.misdetection_rate) <= 2.0 * (a.se + b.se))
                ++agree;
        }
    }
    EXPECT_EQ(total, 12);
    EXPECT_GE(agree, 10);
}

TEST(Sim, SweepIsMonotoneThroughTheWaterfall) {
    SimConfig cfg;
    cfg.params = derive_params(64, 2, 3, 1, 4);
    cfg.gamma_grid = {0.10, 0.14, 0.18, 0.22};
    cfg.trials = 100;
    cfg.master_seed = 21;
    SimResult r = sweep(cfg);
    ASSERT_EQ(r.points.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(r.points[i].gamma, cfg.gamma_grid[i]);
    EXPECT_TRUE(r.monotone_ok);
    EXPECT_GT(r.points.back().misdetection_rate, r.points.front().misdetection_rate);
}

TEST(Crosscheck, ZeroIterationsIsExact) {
    GtParams p = derive_params(64, 2, 3, 1, 4);
    CrosscheckReport rep = de_crosscheck(p, 0.15, 0, 2, 5);
    EXPECT_EQ(rep.ell, 0);
    EXPECT_EQ(rep.trials, 2);
    EXPECT_FALSE(rep.exact_violation);
    EXPECT_DOUBLE_EQ(rep.max_abs_z, 0.0);
    EXPECT_DOUBLE_EQ(rep.max_abs_z_sparse, 0.0);
    EXPECT_TRUE(rep.pass(3.0));
    EXPECT_FALSE(rep.cells.empty());
    for (const auto& c : rep.cells) EXPECT_TRUE(c.exact_ok);
}

TEST(Crosscheck, AgreesWithEvolvedPrediction) {
    GtParams p = derive_params(20000, 2, 3, 1, 4);
    CrosscheckReport rep = de_crosscheck(p, 0.06, 2, 8, 11);
    EXPECT_FALSE(rep.exact_violation);
    EXPECT_TRUE(rep.pass(5.0)) << "gated max |z| = " << rep.max_abs_z << ", sparse max |z| = "
                               << rep.max_abs_z_sparse;
    bool any_gated = false;
    for (const auto& c : rep.cells) any_gated |= c.gated;
    EXPECT_TRUE(any_gated);
}

TEST(Crosscheck, RejectsWrongPrediction) {
    GtParams p = derive_params(20000, 2, 3, 1, 4);
    const double gamma = 0.06;
    const int ell = 1;
    const std::int64_t trials = 4;
    const std::uint64_t seed = 13;

    std::vector<detail::MessageCounts> mc(trials, detail::MessageCounts(p.q));
    for (std::int64_t t = 0; t < trials; ++t) {
        AugmentedGraph g = build_graph(p, derive_seed(seed, stream_graph, t));
        DecoderGraph dg = DecoderGraph::from(g);
        Population pop =
            sample_population(p.n, gamma, derive_seed(seed, stream_population, t));
        Syndrome syn = compute_syndrome(g, pop.x);
        std::vector<std::int32_t> z_truth = bundle_values(g, pop.x);
        DecoderState st = init_state(dg);
        for (int i = 0; i < ell; ++i) run_iteration(dg, syn, st);
        detail::collect_counts(dg, st, z_truth, pop.x, mc[t]);
    }

    // prediction evolved at a very different prevalence must be rejected
    de::DeConfig wrong = de::DeConfig::from(p.q, 0.20, p.d_v, p.d_vx, p.d_c);
    de::DeEngine engine(wrong);
    engine.step();
    CrosscheckReport rep = detail::compare_counts_to_de(mc, engine.state(), wrong);
    EXPECT_FALSE(rep.pass(5.0));
}
