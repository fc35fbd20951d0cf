// qgt: quantitative group testing toolkit with bundle-augmented designs.
//
// Units: every --gamma and --omega flag and every gamma/omega CSV column
// is in PERCENT. Library-level JSON payloads (population files) store
// fractions; see README.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgt/de.hpp"
#include "qgt/decoder.hpp"
#include "qgt/graph.hpp"
#include "qgt/io.hpp"
#include "qgt/model.hpp"
#include "qgt/params.hpp"
#include "qgt/sim.hpp"
#include "qgt/version.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fills options the command line left unset from a JSON config file.
// A manifest sidecar is accepted directly: its "config" object is used.
class ConfigSource {
public:
    ConfigSource(CLI::App* cmd, const std::string& path) : cmd_(cmd) {
        if (path.empty()) return;
        j_ = qgt::io::load_json(path);
        if (j_.contains("schema") && j_["schema"] == "qgt-manifest-v1") j_ = j_.at("config");
    }

    template <class T>
    void merge(const char* name, T& target) const {
        if (!j_.contains(name)) return;
        auto* opt = cmd_->get_option_no_throw(std::string("--") + name);
        if (opt != nullptr && opt->count() > 0) return; // flags win
        target = j_.at(name).get<T>();
    }

    bool given(const char* name) const {
        auto* opt = cmd_->get_option_no_throw(std::string("--") + name);
        return (opt != nullptr && opt->count() > 0) || j_.contains(name);
    }

private:
    CLI::App* cmd_;
    json j_ = json::object();
};

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Writes <out>.manifest.json next to each produced file.
struct ManifestWriter {
    std::string subcommand;
    json config = json::object();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::string started = utc_now();

    void write(const std::vector<std::string>& outputs) const {
        json m;
        m["schema"] = "qgt-manifest-v1";
        m["tool_version"] = qgt::version_string;
        m["subcommand"] = subcommand;
        m["config"] = config;
        m["started_utc"] = started;
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["digest"] = "fnv1a64";
        json outs = json::array();
        for (const auto& path : outputs)
            outs.push_back(json{{"path", path}, {"fnv1a64", qgt::io::hex_u64(qgt::io::fnv1a64_file(path))}});
        m["outputs"] = outs;
        for (const auto& path : outputs) qgt::io::save_json(path + ".manifest.json", m);
    }
};

qgt::GtParams params_from_flags(std::int64_t n, std::int64_t q, std::int64_t d_v,
                                std::int64_t d_vx, std::int64_t d_c) {
    if (n <= 0) throw UsageError("--n is required and must be positive");
    if (q <= 0) throw UsageError("--q is required and must be positive");
    if (d_v <= 0) throw UsageError("--dv is required and must be positive");
    if (d_vx <= 0) throw UsageError("--dvx is required and must be positive");
    if (d_c <= 0) throw UsageError("--dc is required and must be positive");
    return qgt::derive_params(n, q, d_v, d_vx, d_c);
}

// ------------------------------------------------------------- gen-graph

struct GenGraphArgs {
    std::int64_t n = 0, q = 0, d_v = 0, d_vx = 0, d_c = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool distinct_bundles = false;
    std::string out = "graph.json";
    std::string mm;
    std::string config;
};

int run_gen_graph(GenGraphArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("n", a.n);
    cfg.merge("q", a.q);
    cfg.merge("dv", a.d_v);
    cfg.merge("dvx", a.d_vx);
    cfg.merge("dc", a.d_c);
    cfg.merge("seed", a.seed);
    cfg.merge("distinct-bundles-per-test", a.distinct_bundles);
    cfg.merge("out", a.out);
    cfg.merge("mm", a.mm);
    if (!a.seed_given && !cfg.given("seed")) throw UsageError("--seed is required for gen-graph");

    qgt::GtParams p = params_from_flags(a.n, a.q, a.d_v, a.d_vx, a.d_c);
    qgt::BuildOptions opt;
    opt.distinct_bundles_per_test = a.distinct_bundles;
    qgt::AugmentedGraph g = qgt::build_graph(p, a.seed, opt);

    ManifestWriter manifest;
    manifest.subcommand = "gen-graph";
    manifest.config = json{{"n", a.n},       {"q", a.q},     {"dv", a.d_v},
                           {"dvx", a.d_vx},  {"dc", a.d_c},  {"seed", a.seed},
                           {"distinct-bundles-per-test", a.distinct_bundles},
                           {"out", a.out},   {"mm", a.mm}};

    qgt::io::save_json(a.out, qgt::io::graph_to_json(g));
    std::vector<std::string> outputs = {a.out};
    if (!a.mm.empty()) {
        qgt::io::write_file(a.mm, qgt::io::matrix_market(g));
        outputs.push_back(a.mm);
    }
    manifest.write(outputs);
    std::cout << "wrote " << a.out << " (n=" << p.n << ", m=" << p.m() << ", omega="
              << qgt::io::format_double(p.omega * 100.0) << "%)\n";
    return 0;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
    std::string graph, syndrome, population, out = "outcome.json";
    int max_iters = qgt::default_max_iters;
    std::string config;
};

int run_decode(DecodeArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("graph", a.graph);
    cfg.merge("syndrome", a.syndrome);
    cfg.merge("population", a.population);
    cfg.merge("out", a.out);
    cfg.merge("max-iters", a.max_iters);
    if (a.graph.empty()) throw UsageError("--graph is required");
    if (a.syndrome.empty() && a.population.empty())
        throw UsageError("provide --syndrome, or --population to derive one");

    qgt::AugmentedGraph g = qgt::io::graph_from_json(qgt::io::load_json(a.graph));

    qgt::Population pop;
    bool have_truth = false;
    if (!a.population.empty()) {
        pop = qgt::io::population_from_json(qgt::io::load_json(a.population));
        have_truth = true;
    }
    qgt::Syndrome syn;
    if (!a.syndrome.empty())
        syn = qgt::io::syndrome_from_json(qgt::io::load_json(a.syndrome));
    else
        syn = qgt::compute_syndrome(g, pop.x);

    qgt::DecodeOutcome out = qgt::decode(g, syn, a.max_iters);
    qgt::ClassifyResult cls;
    if (have_truth) cls = qgt::classify(out, pop.x);

    ManifestWriter manifest;
    manifest.subcommand = "decode";
    manifest.config = json{{"graph", a.graph},           {"syndrome", a.syndrome},
                           {"population", a.population}, {"out", a.out},
                           {"max-iters", a.max_iters}};
    qgt::io::save_json(a.out, qgt::io::outcome_to_json(out, have_truth ? &cls : nullptr));
    manifest.write({a.out});

    std::cout << "declared " << out.declared.size() << " defectives in " << out.iterations
              << " iterations (" << (out.converged ? "converged" : "iteration cap") << ")\n";
    return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
    std::int64_t n = 0, q = 0, d_v = 0, d_vx = 0, d_c = 0;
    std::vector<double> gamma_pct;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int max_iters = qgt::default_max_iters;
    bool fixed_graph = false;
    bool distinct_bundles = false;
    int jobs = 1;
    std::string out = "sim.csv";
    std::string config;
};

int run_simulate(SimulateArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("n", a.n);
    cfg.merge("q", a.q);
    cfg.merge("dv", a.d_v);
    cfg.merge("dvx", a.d_vx);
    cfg.merge("dc", a.d_c);
    cfg.merge("gamma", a.gamma_pct);
    cfg.merge("trials", a.trials);
    cfg.merge("seed", a.seed);
    cfg.merge("max-iters", a.max_iters);
    cfg.merge("fixed-graph", a.fixed_graph);
    cfg.merge("distinct-bundles-per-test", a.distinct_bundles);
    cfg.merge("jobs", a.jobs);
    cfg.merge("out", a.out);
    if (!a.seed_given && !cfg.given("seed")) throw UsageError("--seed is required for simulate");
    if (a.trials < 1) throw UsageError("--trials must be at least 1");
    if (a.jobs < 1) throw UsageError("--jobs must be at least 1");

    qgt::SimConfig sim;
    sim.params = params_from_flags(a.n, a.q, a.d_v, a.d_vx, a.d_c);
    for (double pct : a.gamma_pct) {
        if (!(pct > 0.0 && pct < 100.0))
            throw UsageError("--gamma values are percentages in (0, 100)");
        sim.gamma_grid.push_back(pct / 100.0);
    }
    sim.trials = a.trials;
    sim.master_seed = a.seed;
    sim.max_iters = a.max_iters;
    sim.fresh_graph_per_trial = !a.fixed_graph;
    sim.jobs = a.jobs;
    sim.build.distinct_bundles_per_test = a.distinct_bundles;

    ManifestWriter manifest;
    manifest.subcommand = "simulate";
    manifest.config = json{{"n", a.n},          {"q", a.q},
                           {"dv", a.d_v},       {"dvx", a.d_vx},
                           {"dc", a.d_c},       {"gamma", a.gamma_pct},
                           {"trials", a.trials}, {"seed", a.seed},
                           {"max-iters", a.max_iters}, {"fixed-graph", a.fixed_graph},
                           {"distinct-bundles-per-test", a.distinct_bundles},
                           {"jobs", a.jobs},    {"out", a.out}};

    qgt::SimResult result = qgt::sweep(sim);
    qgt::io::write_file(a.out, qgt::io::sim_csv(result.points));
    manifest.write({a.out});

    for (const auto& p : result.points) {
        std::cout << "gamma=" << qgt::io::format_double(p.gamma * 100.0)
                  << "% misdetection=" << qgt::io::format_double(p.misdetection_rate)
                  << " se=" << qgt::io::format_double(p.se) << " (" << p.defectives
                  << " defectives, " << p.false_alarms << " false alarms)\n";
        if (p.zero_defective_trials > 0)
            std::cerr << "note: " << p.zero_defective_trials << " zero-defective trials at gamma="
                      << qgt::io::format_double(p.gamma * 100.0) << "% were excluded from the rate\n";
    }
    return 0;
}

// ---------------------------------------------------- de-threshold, de-rate

struct DeThresholdArgs {
    std::int64_t q = 0, d_v = 0, d_vx = 0, d_c = 0;
    double omega_pct = 0.0;
    double gamma_hi_pct = 5.0;
    double tol_pct = 0.001;
    double eps_tail = 1e-8;
    std::string csv = "thresholds.csv";
    std::string config;
};

int run_de_threshold(DeThresholdArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("q", a.q);
    cfg.merge("dv", a.d_v);
    cfg.merge("dvx", a.d_vx);
    cfg.merge("dc", a.d_c);
    cfg.merge("omega", a.omega_pct);
    cfg.merge("gamma-hi", a.gamma_hi_pct);
    cfg.merge("tol", a.tol_pct);
    cfg.merge("eps-tail", a.eps_tail);
    cfg.merge("csv", a.csv);

    if (a.d_c == 0 && a.omega_pct > 0.0) {
        double dc = 100.0 * static_cast<double>(a.d_v) / a.omega_pct;
        a.d_c = static_cast<std::int64_t>(dc + 0.5);
        if (std::abs(dc - static_cast<double>(a.d_c)) > 1e-6)
            throw UsageError("--omega does not yield an integer d_c for this d_v");
    }
    if (a.q <= 0 || a.d_v <= 0 || a.d_vx <= 0 || a.d_c <= 0)
        throw UsageError("de-threshold requires --q, --dv, --dvx and --dc (or --omega)");

    qgt::de::SearchOptions opt;
    opt.gamma_hi = a.gamma_hi_pct / 100.0;
    opt.tol = a.tol_pct / 100.0;
    opt.eps_tail = a.eps_tail;

    ManifestWriter manifest;
    manifest.subcommand = "de-threshold";
    manifest.config = json{{"q", a.q},         {"dv", a.d_v},   {"dvx", a.d_vx},
                           {"dc", a.d_c},      {"omega", a.omega_pct},
                           {"gamma-hi", a.gamma_hi_pct}, {"tol", a.tol_pct},
                           {"eps-tail", a.eps_tail},     {"csv", a.csv}};

    qgt::de::ThresholdResult r = qgt::de::gamma_threshold(a.q, a.d_v, a.d_vx, a.d_c, opt);
    qgt::io::write_file(a.csv, qgt::io::threshold_csv({r}));
    manifest.write({a.csv});

    std::cout << "gamma_th = " << qgt::io::format_double(r.gamma_th * 100.0) << "% (bracket ["
              << qgt::io::format_double(r.bracket_lo * 100.0) << ", "
              << qgt::io::format_double(r.bracket_hi * 100.0) << "], "
              << r.iters_at_threshold << " iterations at threshold)\n";
    return 0;
}

struct DeRateArgs {
    std::int64_t q = 0, d_v = 0, d_vx = 0;
    double gamma_pct = 0.0;
    double eps_tail = 1e-8;
    std::string csv = "rates.csv";
    std::string config;
};

int run_de_rate(DeRateArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("q", a.q);
    cfg.merge("dv", a.d_v);
    cfg.merge("dvx", a.d_vx);
    cfg.merge("gamma", a.gamma_pct);
    cfg.merge("eps-tail", a.eps_tail);
    cfg.merge("csv", a.csv);
    if (a.q <= 0 || a.d_v <= 0 || a.d_vx <= 0)
        throw UsageError("de-rate requires --q, --dv and --dvx");
    if (!(a.gamma_pct > 0.0 && a.gamma_pct < 100.0))
        throw UsageError("--gamma is a percentage in (0, 100)");

    qgt::de::SearchOptions opt;
    opt.eps_tail = a.eps_tail;

    ManifestWriter manifest;
    manifest.subcommand = "de-rate";
    manifest.config = json{{"q", a.q},           {"dv", a.d_v},  {"dvx", a.d_vx},
                           {"gamma", a.gamma_pct}, {"eps-tail", a.eps_tail}, {"csv", a.csv}};

    qgt::de::ThresholdResult r = qgt::de::min_rate(a.q, a.gamma_pct / 100.0, a.d_v, a.d_vx, opt);
    qgt::io::write_file(a.csv, qgt::io::rate_csv({r}));
    manifest.write({a.csv});

    std::cout << "omega_th = " << qgt::io::format_double(r.omega_th * 100.0) << "% (d_c = "
              << r.d_c_th << ")\n";
    return 0;
}

// ------------------------------------------------------------ crosscheck

struct CrosscheckArgs {
    std::int64_t n = 0, q = 0, d_v = 0, d_vx = 0, d_c = 0;
    double gamma_pct = 0.0;
    int ell = 1;
    std::int64_t trials = 8;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double sigma = 5.0;
    std::string out;
    std::string config;
};

int run_crosscheck(CrosscheckArgs& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("n", a.n);
    cfg.merge("q", a.q);
    cfg.merge("dv", a.d_v);
    cfg.merge("dvx", a.d_vx);
    cfg.merge("dc", a.d_c);
    cfg.merge("gamma", a.gamma_pct);
    cfg.merge("ell", a.ell);
    cfg.merge("trials", a.trials);
    cfg.merge("seed", a.seed);
    cfg.merge("sigma", a.sigma);
    cfg.merge("out", a.out);
    if (!a.seed_given && !cfg.given("seed")) throw UsageError("--seed is required for crosscheck");
    if (a.ell < 0 || a.ell > 3) throw UsageError("--ell must be in 0..3");
    if (!(a.gamma_pct > 0.0 && a.gamma_pct < 100.0))
        throw UsageError("--gamma is a percentage in (0, 100)");

    qgt::GtParams p = params_from_flags(a.n, a.q, a.d_v, a.d_vx, a.d_c);
    qgt::CrosscheckReport rep =
        qgt::de_crosscheck(p, a.gamma_pct / 100.0, a.ell, a.trials, a.seed);

    if (!a.out.empty()) {
        ManifestWriter manifest;
        manifest.subcommand = "crosscheck";
        manifest.config = json{{"n", a.n},     {"q", a.q},         {"dv", a.d_v},
                               {"dvx", a.d_vx}, {"dc", a.d_c},     {"gamma", a.gamma_pct},
                               {"ell", a.ell}, {"trials", a.trials}, {"seed", a.seed},
                               {"sigma", a.sigma}, {"out", a.out}};
        qgt::io::write_file(a.out, qgt::io::crosscheck_csv(rep));
        manifest.write({a.out});
    }

    std::cout << "iteration " << rep.ell << ", " << rep.trials << " trials: max |z| = "
              << qgt::io::format_double(rep.max_abs_z) << " (sparse cells "
              << qgt::io::format_double(rep.max_abs_z_sparse) << ")"
              << (rep.exact_violation ? ", exact-cell violation" : "") << " -> "
              << (rep.pass(a.sigma) ? "PASS" : "FAIL") << "\n";
    if (!rep.pass(a.sigma))
        throw qgt::Error("crosscheck: decoder statistics disagree with density evolution");
    return 0;
}

// ------------------------------------------------- reproduce-table1/fig3

struct Table1Args {
    std::string rows = "q1,q4,q5,q10";
    std::vector<std::int64_t> dv_list = {4, 5, 6, 7, 8};
    std::string csv = "table1.csv";
    std::string config;
};

int run_reproduce_table1(Table1Args& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("rows", a.rows);
    cfg.merge("dv", a.dv_list);
    cfg.merge("csv", a.csv);

    struct RowSpec {
        const char* key;
        std::int64_t q, d_vx; // d_vx = 0 means d_vx = d_v
    };
    const RowSpec all_rows[] = {{"q1", 1, 0}, {"q4", 4, 2}, {"q5", 5, 2}, {"q10", 10, 3}};

    ManifestWriter manifest;
    manifest.subcommand = "reproduce-table1";
    manifest.config = json{{"rows", a.rows}, {"dv", a.dv_list}, {"csv", a.csv}};

    std::vector<qgt::de::ThresholdResult> results;
    for (const auto& row : all_rows) {
        if (a.rows.find(row.key) == std::string::npos) continue;
        for (std::int64_t d_v : a.dv_list) {
            const std::int64_t d_c = 20 * d_v; // rate 5%
            const std::int64_t d_vx = row.d_vx == 0 ? d_v : row.d_vx;
            qgt::de::ThresholdResult r = qgt::de::gamma_threshold(row.q, d_v, d_vx, d_c);
            results.push_back(r);
            std::cout << "q=" << row.q << " d_v=" << d_v << " d_vx=" << d_vx << " d_c=" << d_c
                      << ": gamma_th = " << qgt::io::format_double(r.gamma_th * 100.0) << "%\n";
        }
    }
    qgt::io::write_file(a.csv, qgt::io::threshold_csv(results));
    manifest.write({a.csv});
    return 0;
}

struct Fig3Args {
    std::string points = "q1,q5a,q5b,q5c,q5d,q10";
    std::int64_t trials = 0; // 0 = per-point defaults
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string csv = "fig3.csv";
    std::string config;
};

int run_reproduce_fig3(Fig3Args& a, CLI::App* cmd) {
    ConfigSource cfg(cmd, a.config);
    cfg.merge("points", a.points);
    cfg.merge("trials", a.trials);
    cfg.merge("seed", a.seed);
    cfg.merge("jobs", a.jobs);
    cfg.merge("csv", a.csv);

    struct PointSpec {
        const char* key;
        std::int64_t q, d_v, d_vx, d_c;
        double gamma_pct;
        std::int64_t default_trials;
        double reference; // published misdetection rate
    };
    const PointSpec all_points[] = {
        {"q1", 1, 6, 6, 120, 0.61, 200, 3.958e-3},
        {"q5a", 5, 7, 2, 140, 0.70, 400, 4.816e-4},
        {"q5b", 5, 7, 2, 140, 0.745, 200, 0.18909},
        {"q5c", 5, 7, 2, 140, 0.77, 200, 0.65322},
        {"q5d", 5, 7, 2, 140, 0.80, 200, 0.99600},
        {"q10", 10, 7, 3, 140, 0.75, 200, 5.819e-3},
    };

    ManifestWriter manifest;
    manifest.subcommand = "reproduce-fig3";
    manifest.config = json{{"points", a.points}, {"trials", a.trials}, {"seed", a.seed},
                           {"jobs", a.jobs},     {"csv", a.csv}};

    std::ostringstream csv;
    csv << "q,d_v,d_vx,d_c,gamma,trials,defectives,misdetected,misdetection_rate,se,"
           "false_alarms,unresolved,mean_iters,reference\n";
    for (const auto& pt : all_points) {
        if (a.points.find(pt.key) == std::string::npos) continue;
        qgt::GtParams p = qgt::derive_params(210000, pt.q, pt.d_v, pt.d_vx, pt.d_c);
        const std::int64_t trials = a.trials > 0 ? a.trials : pt.default_trials;
        qgt::SimPoint sp = qgt::run_point(p, pt.gamma_pct / 100.0, trials, a.seed,
                                          qgt::default_max_iters, true, a.jobs);
        csv << pt.q << "," << pt.d_v << "," << pt.d_vx << "," << pt.d_c << ","
            << qgt::io::format_double(pt.gamma_pct) << "," << sp.trials << "," << sp.defectives
            << "," << sp.misdetected << "," << qgt::io::format_double(sp.misdetection_rate)
            << "," << qgt::io::format_double(sp.se) << "," << sp.false_alarms << ","
            << sp.unresolved << "," << qgt::io::format_double(sp.mean_iters) << ","
            << qgt::io::format_double(pt.reference) << "\n";
        std::cout << pt.key << " (gamma=" << qgt::io::format_double(pt.gamma_pct)
                  << "%): misdetection=" << qgt::io::format_double(sp.misdetection_rate)
                  << " reference=" << qgt::io::format_double(pt.reference) << "\n";
    }
    qgt::io::write_file(a.csv, csv.str());
    manifest.write({a.csv});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantitative group testing with bundle-augmented test designs\n"
                 "All --gamma/--omega values and CSV columns are in percent."};
    app.set_version_flag("--version", qgt::version_string);
    app.require_subcommand(1);

    GenGraphArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-graph", "sample a test design and write it as JSON");
    cmd_gen->add_option("--n", gen.n, "number of items");
    cmd_gen->add_option("--q", gen.q, "bundle size");
    cmd_gen->add_option("--dv", gen.d_v, "item degree (total)");
    cmd_gen->add_option("--dvx", gen.d_vx, "item degree towards plain tests");
    cmd_gen->add_option("--dc", gen.d_c, "plain test degree");
    cmd_gen->add_option("--seed", gen.seed, "graph seed")->each([&](const std::string&) {
        gen.seed_given = true;
    });
    cmd_gen->add_flag("--distinct-bundles-per-test", gen.distinct_bundles,
                      "forbid two items of one bundle in the same plain test");
    cmd_gen->add_option("--out", gen.out, "output graph JSON path");
    cmd_gen->add_option("--mm", gen.mm, "also write the flattened matrix (Matrix Market)");
    cmd_gen->add_option("--config", gen.config, "JSON config file (flags win)");

    DecodeArgs dec;
    auto* cmd_dec = app.add_subcommand("decode", "run the bound-propagation decoder");
    cmd_dec->add_option("--graph", dec.graph, "graph JSON path");
    cmd_dec->add_option("--syndrome", dec.syndrome, "syndrome JSON path");
    cmd_dec->add_option("--population", dec.population,
                        "population JSON path (derives the syndrome, enables classification)");
    cmd_dec->add_option("--out", dec.out, "output outcome JSON path");
    cmd_dec->add_option("--max-iters", dec.max_iters, "iteration cap");
    cmd_dec->add_option("--config", dec.config, "JSON config file (flags win)");

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo misdetection sweep over gamma");
    cmd_sim->add_option("--n", sim.n, "number of items");
    cmd_sim->add_option("--q", sim.q, "bundle size");
    cmd_sim->add_option("--dv", sim.d_v, "item degree (total)");
    cmd_sim->add_option("--dvx", sim.d_vx, "item degree towards plain tests");
    cmd_sim->add_option("--dc", sim.d_c, "plain test degree");
    cmd_sim->add_option("--gamma", sim.gamma_pct, "defect prevalence in percent (repeatable)");
    cmd_sim->add_option("--trials", sim.trials, "trials per gamma point");
    cmd_sim->add_option("--seed", sim.seed, "master seed")->each([&](const std::string&) {
        sim.seed_given = true;
    });
    cmd_sim->add_option("--max-iters", sim.max_iters, "decoder iteration cap");
    cmd_sim->add_flag("--fixed-graph", sim.fixed_graph,
                      "reuse one graph for all trials (default: fresh graph per trial)");
    cmd_sim->add_flag("--distinct-bundles-per-test", sim.distinct_bundles,
                      "forbid two items of one bundle in the same plain test");
    cmd_sim->add_option("--jobs", sim.jobs, "worker threads");
    cmd_sim->add_option("--out", sim.out, "output CSV path");
    cmd_sim->add_option("--config", sim.config, "JSON config file (flags win)");

    DeThresholdArgs th;
    auto* cmd_th = app.add_subcommand("de-threshold", "gamma threshold by density evolution");
    cmd_th->add_option("--q", th.q, "bundle size");
    cmd_th->add_option("--dv", th.d_v, "item degree (total)");
    cmd_th->add_option("--dvx", th.d_vx, "item degree towards plain tests");
    cmd_th->add_option("--dc", th.d_c, "plain test degree");
    cmd_th->add_option("--omega", th.omega_pct, "rate in percent (alternative to --dc)");
    cmd_th->add_option("--gamma-hi", th.gamma_hi_pct, "upper search bound in percent");
    cmd_th->add_option("--tol", th.tol_pct, "bisection tolerance in percent");
    cmd_th->add_option("--eps-tail", th.eps_tail, "syndrome truncation tail mass");
    cmd_th->add_option("--csv", th.csv, "output CSV path");
    cmd_th->add_option("--config", th.config, "JSON config file (flags win)");

    DeRateArgs rate;
    auto* cmd_rate = app.add_subcommand("de-rate", "minimum rate at fixed gamma by density evolution");
    cmd_rate->add_option("--q", rate.q, "bundle size");
    cmd_rate->add_option("--dv", rate.d_v, "item degree (total)");
    cmd_rate->add_option("--dvx", rate.d_vx, "item degree towards plain tests");
    cmd_rate->add_option("--gamma", rate.gamma_pct, "defect prevalence in percent");
    cmd_rate->add_option("--eps-tail", rate.eps_tail, "syndrome truncation tail mass");
    cmd_rate->add_option("--csv", rate.csv, "output CSV path");
    cmd_rate->add_option("--config", rate.config, "JSON config file (flags win)");

    CrosscheckArgs cc;
    auto* cmd_cc = app.add_subcommand("crosscheck",
                                      "compare decoder message statistics with density evolution");
    cmd_cc->add_option("--n", cc.n, "number of items");
    cmd_cc->add_option("--q", cc.q, "bundle size");
    cmd_cc->add_option("--dv", cc.d_v, "item degree (total)");
    cmd_cc->add_option("--dvx", cc.d_vx, "item degree towards plain tests");
    cmd_cc->add_option("--dc", cc.d_c, "plain test degree");
    cmd_cc->add_option("--gamma", cc.gamma_pct, "defect prevalence in percent");
    cmd_cc->add_option("--ell", cc.ell, "iteration to compare (0..3)");
    cmd_cc->add_option("--trials", cc.trials,
                       "independent instances (across-trial spread sets the error bars)");
    cmd_cc->add_option("--seed", cc.seed, "master seed")->each([&](const std::string&) {
        cc.seed_given = true;
    });
    cmd_cc->add_option("--sigma", cc.sigma, "failure threshold in standard errors");
    cmd_cc->add_option("--out", cc.out, "optional per-cell CSV path");
    cmd_cc->add_option("--config", cc.config, "JSON config file (flags win)");

    Table1Args t1;
    auto* cmd_t1 = app.add_subcommand("reproduce-table1", "regenerate the threshold grid");
    cmd_t1->add_option("--rows", t1.rows, "comma list among q1,q4,q5,q10");
    cmd_t1->add_option("--dv", t1.dv_list, "item degrees to sweep");
    cmd_t1->add_option("--csv", t1.csv, "output CSV path");
    cmd_t1->add_option("--config", t1.config, "JSON config file (flags win)");

    Fig3Args f3;
    auto* cmd_f3 = app.add_subcommand("reproduce-fig3", "rerun the benchmark simulation points");
    cmd_f3->add_option("--points", f3.points, "comma list among q1,q5a,q5b,q5c,q5d,q10");
    cmd_f3->add_option("--trials", f3.trials, "override trials for every point");
    cmd_f3->add_option("--seed", f3.seed, "master seed");
    cmd_f3->add_option("--jobs", f3.jobs, "worker threads");
    cmd_f3->add_option("--csv", f3.csv, "output CSV path");
    cmd_f3->add_option("--config", f3.config, "JSON config file (flags win)");

    try {
        app.parse(argc, argv);
        if (cmd_gen->parsed()) return run_gen_graph(gen, cmd_gen);
        if (cmd_dec->parsed()) return run_decode(dec, cmd_dec);
        if (cmd_sim->parsed()) return run_simulate(sim, cmd_sim);
        if (cmd_th->parsed()) return run_de_threshold(th, cmd_th);
        if (cmd_rate->parsed()) return run_de_rate(rate, cmd_rate);
        if (cmd_cc->parsed()) return run_crosscheck(cc, cmd_cc);
        if (cmd_t1->parsed()) return run_reproduce_table1(t1, cmd_t1);
        if (cmd_f3->parsed()) return run_reproduce_fig3(f3, cmd_f3);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qgt::DivisibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qgt::DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qgt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
