#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgt/de.hpp"
#include "qgt/decoder.hpp"
#include "qgt/errors.hpp"
#include "qgt/graph.hpp"
#include "qgt/model.hpp"
#include "qgt/sim.hpp"

namespace qgt {
namespace io {

using nlohmann::json;

// Shortest round-trip decimal representation, for deterministic files.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_u64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    for (int shift = 60; shift >= 0; shift -= 4) out += digits[(v >> shift) & 0xf];
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::string bytes = read_file(path);
    return fnv1a64(bytes.data(), bytes.size());
}

inline json load_json(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, true, true);
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    write_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- params

inline json params_to_json(const GtParams& p) {
    return json{{"n", p.n},     {"q", p.q},     {"d_v", p.d_v}, {"d_vx", p.d_vx},
                {"d_vz", p.d_vz}, {"d_c", p.d_c}, {"d_cz", p.d_cz}, {"m_x", p.m_x},
                {"m_z", p.m_z}, {"n_h", p.n_h}, {"omega", p.omega}};
}

inline GtParams params_from_json(const json& j) {
    GtParams p = derive_params(j.at("n").get<std::int64_t>(), j.at("q").get<std::int64_t>(),
                               j.at("d_v").get<std::int64_t>(), j.at("d_vx").get<std::int64_t>(),
                               j.at("d_c").get<std::int64_t>());
    return p;
}

// ----------------------------------------------------------------- graph

inline json graph_to_json(const AugmentedGraph& g) {
    json j;
    j["schema"] = "qgt-graph-v1";
    j["params"] = params_to_json(g.params);
    j["bundle_of"] = g.bundle_of;
    j["cn_x"] = g.cn_x;
    j["cn_z"] = g.cn_z;
    j["seed"] = g.seed;
    return j;
}

inline AugmentedGraph graph_from_json(const json& j) {
    AugmentedGraph g;
    g.params = params_from_json(j.at("params"));
    g.bundle_of = j.at("bundle_of").get<std::vector<std::int32_t>>();
    g.cn_x = j.at("cn_x").get<std::vector<std::vector<std::int32_t>>>();
    g.cn_z = j.at("cn_z").get<std::vector<std::vector<std::int32_t>>>();
    g.seed = j.value("seed", std::uint64_t{0});
    GraphAudit audit = validate_graph(g);
    if (!audit.ok()) {
        std::string msg = "graph import failed validation:";
        for (const auto& f : audit.findings) msg += "\n  " + f;
        throw Error(msg);
    }
    return g;
}

// Sparse pattern export of the flattened test matrix, 1-based, bundle
// tests first.
inline std::string matrix_market(const AugmentedGraph& g) {
    auto rows = flatten_to_test_matrix(g);
    std::int64_t nnz = 0;
    for (const auto& r : rows) nnz += static_cast<std::int64_t>(r.size());
    std::ostringstream out;
    out << "%%MatrixMarket matrix coordinate pattern general\n";
    out << "% rows are tests (bundle tests first), columns are items\n";
    out << rows.size() << " " << g.params.n << " " << nnz << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::int32_t i : rows[r]) out << (r + 1) << " " << (i + 1) << "\n";
    return out.str();
}

// ------------------------------------------------- population / syndrome

inline json population_to_json(const Population& p) {
    json j;
    j["schema"] = "qgt-population-v1";
    j["n"] = p.x.size();
    j["gamma"] = p.gamma; // fraction
    j["x"] = std::vector<int>(p.x.begin(), p.x.end());
    return j;
}

inline Population population_from_json(const json& j) {
    Population p;
    p.gamma = j.value("gamma", 0.0);
    auto x = j.at("x").get<std::vector<int>>();
    p.x.reserve(x.size());
    for (int v : x) {
        if (v != 0 && v != 1) throw Error("population entries must be 0 or 1");
        p.x.push_back(static_cast<std::uint8_t>(v));
    }
    return p;
}

inline json syndrome_to_json(const Syndrome& s) {
    json j;
    j["schema"] = "qgt-syndrome-v1";
    j["m"] = s.s.size();
    j["m_z"] = s.m_z;
    j["s"] = s.s;
    return j;
}

inline Syndrome syndrome_from_json(const json& j) {
    Syndrome s;
    s.s = j.at("s").get<std::vector<std::int32_t>>();
    s.m_z = j.at("m_z").get<std::int64_t>();
    if (s.m_z < 0 || s.m_z > static_cast<std::int64_t>(s.s.size()))
        throw Error("syndrome m_z out of range");
    return s;
}

// --------------------------------------------------------------- outcome

inline json outcome_to_json(const DecodeOutcome& out, const ClassifyResult* cls = nullptr) {
    json j;
    j["schema"] = "qgt-outcome-v1";
    j["iterations"] = out.iterations;
    j["converged"] = out.converged;
    j["declared"] = out.declared;
    j["item_lower"] = out.item_lo;
    j["item_upper"] = out.item_hi;
    j["bundle_lower"] = out.bundle_lo;
    j["bundle_upper"] = out.bundle_hi;
    std::int64_t unresolved = 0;
    for (std::size_t i = 0; i < out.item_lo.size(); ++i)
        if (out.item_lo[i] < out.item_hi[i]) ++unresolved;
    j["unresolved"] = unresolved;
    if (cls) {
        j["classification"] = json{{"defectives", cls->defectives},
                                   {"misdetected", cls->misdetected},
                                   {"false_alarms", cls->false_alarms},
                                   {"unresolved", cls->unresolved},
                                   {"misdetection_rate", cls->misdetection_rate},
                                   {"false_alarm_rate", cls->false_alarm_rate},
                                   {"zero_defectives", cls->zero_defectives}};
    }
    return j;
}

// ------------------------------------------------------------------- csv
// All gamma and omega columns are in percent.

inline std::string sim_csv(const std::vector<SimPoint>& points) {
    std::ostringstream out;
    out << "gamma,trials,defectives,misdetected,misdetection_rate,se,false_alarms,"
           "unresolved,mean_iters\n";
    for (const auto& p : points) {
        out << format_double(p.gamma * 100.0) << "," << p.trials << "," << p.defectives << ","
            << p.misdetected << "," << format_double(p.misdetection_rate) << ","
            << format_double(p.se) << "," << p.false_alarms << "," << p.unresolved << ","
            << format_double(p.mean_iters) << "\n";
    }
    return out.str();
}

inline std::string threshold_csv(const std::vector<de::ThresholdResult>& rows) {
    std::ostringstream out;
    out << "q,d_v,d_vx,d_c,omega,gamma_th,bracket_lo,bracket_hi,iters\n";
    for (const auto& r : rows) {
        const auto& c = r.config;
        out << c.q << "," << c.d_v << "," << c.d_vx << "," << c.d_c << ","
            << format_double(100.0 * static_cast<double>(c.d_v) / static_cast<double>(c.d_c))
            << "," << format_double(r.gamma_th * 100.0) << ","
            << format_double(r.bracket_lo * 100.0) << "," << format_double(r.bracket_hi * 100.0)
            << "," << r.iters_at_threshold << "\n";
    }
    return out.str();
}

// Rate-search rows: omega_th is the result, gamma the operating point.
inline std::string rate_csv(const std::vector<de::ThresholdResult>& rows) {
    std::ostringstream out;
    out << "q,d_v,d_vx,gamma,omega_th,d_c_th,bracket_lo,bracket_hi,iters\n";
    for (const auto& r : rows) {
        const auto& c = r.config;
        out << c.q << "," << c.d_v << "," << c.d_vx << "," << format_double(c.gamma * 100.0)
            << "," << format_double(r.omega_th * 100.0) << "," << r.d_c_th << ","
            << format_double(r.bracket_lo * 100.0) << "," << format_double(r.bracket_hi * 100.0)
            << "," << r.iters_at_threshold << "\n";
    }
    return out.str();
}

inline std::string crosscheck_csv(const CrosscheckReport& rep) {
    std::ostringstream out;
    out << "family,z,v,de_p,count,total,freq,zscore,adequate,gated,exact_ok\n";
    for (const auto& c : rep.cells) {
        const double freq =
            c.total > 0 ? static_cast<double>(c.count) / static_cast<double>(c.total) : 0.0;
        out << c.family << "," << c.z << "," << c.v << "," << format_double(c.de_p) << ","
            << c.count << "," << c.total << "," << format_double(freq) << ","
            << format_double(c.zscore) << "," << (c.adequate ? 1 : 0) << ","
            << (c.gated ? 1 : 0) << "," << (c.exact_ok ? 1 : 0) << "\n";
    }
    return out.str();
}

} // namespace io
} // namespace qgt
