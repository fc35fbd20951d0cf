#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qgt/errors.hpp"
#include "qgt/params.hpp"
#include "qgt/pmf.hpp"

namespace qgt {
namespace de {

// Distribution of a bundle-side bound conditioned on the true bundle
// value: row z holds P(bound = v | Z = z) for v in 0..q. Validity pins
// the support: lower bounds live on [0, z], upper bounds on [z, q].
struct CondPmf {
    std::int64_t q = 0;
    std::vector<double> t;

    CondPmf() = default;
    explicit CondPmf(std::int64_t q_) : q(q_), t((q_ + 1) * (q_ + 1), 0.0) {}

    double& at(std::int64_t z, std::int64_t v) { return t[z * (q + 1) + v]; }
    double at(std::int64_t z, std::int64_t v) const { return t[z * (q + 1) + v]; }

    Pmf row(std::int64_t z) const {
        return Pmf(t.begin() + z * (q + 1), t.begin() + (z + 1) * (q + 1));
    }
    void set_row(std::int64_t z, const Pmf& p) {
        for (std::int64_t v = 0; v <= q; ++v)
            at(z, v) = v < static_cast<std::int64_t>(p.size()) ? p[v] : 0.0;
    }

    // every row a point mass at v
    static CondPmf all_rows_delta(std::int64_t q, std::int64_t v) {
        CondPmf c(q);
        for (std::int64_t z = 0; z <= q; ++z) c.at(z, v) = 1.0;
        return c;
    }

    friend bool operator==(const CondPmf&, const CondPmf&) = default;
};

struct DeConfig {
    std::int64_t q = 0;
    std::int64_t d_v = 0, d_vx = 0, d_vz = 0;
    std::int64_t d_c = 0, d_cz = 0;
    double gamma = 0.0;          // fraction, not percent
    double eps_tail = 1e-8;      // syndrome truncation tail mass
    double delta_success = 1e-8; // residual error declared negligible
    int max_iters = 2000;

    static DeConfig from(std::int64_t q, double gamma, std::int64_t d_v, std::int64_t d_vx,
                         std::int64_t d_c) {
        if (q < 1) throw Error("DeConfig: q must be positive");
        if (d_vx < 1 || d_vx > d_v) throw Error("DeConfig: need 1 <= d_vx <= d_v");
        if (d_c < 1) throw Error("DeConfig: d_c must be positive");
        if (d_c % q != 0)
            throw DivisibilityError("DeConfig: q must divide d_c (d_c=" + std::to_string(d_c) +
                                    ", q=" + std::to_string(q) + ")");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("DeConfig: gamma must be in [0, 1]");
        DeConfig c;
        c.q = q;
        c.gamma = gamma;
        c.d_v = d_v;
        c.d_vx = d_vx;
        c.d_vz = d_v - d_vx;
        c.d_c = d_c;
        c.d_cz = d_c / q;
        return c;
    }
};

// Edge-perspective state after an iteration. Scalars are the only
// non-deterministic coordinates of the item-side messages: lower bounds
// of defective items (p(L=1 | X=1)) and upper bounds of non-defective
// items (p(U=0 | X=0)). The other conditionings are pinned by validity.
struct DeState {
    CondPmf l_zc, u_zc; // hidden VN -> bundle test
    CondPmf l_cz, u_cz; // bundle test -> hidden VN
    CondPmf l_zf, u_zf; // hidden VN -> hidden CN
    double pl_fx = 0.0, pu0_fx = 0.0; // hidden CN -> item
    double pl_xc = 0.0, pu0_xc = 0.0; // item -> plain test
    double pl_cx = 0.0, pu0_cx = 0.0; // plain test -> item
    double pl_xf = 0.0, pu0_xf = 0.0; // item -> hidden CN
    double app_l = 0.0, app_u0 = 0.0; // final-decision aggregates
    int iter = 0;

    friend bool operator==(const DeState&, const DeState&) = default;
};

namespace detail {

inline void check_cond_pmf(const CondPmf& c, bool lower, const char* what) {
    for (std::int64_t z = 0; z <= c.q; ++z) {
        double sum = 0.0;
        for (std::int64_t v = 0; v <= c.q; ++v) {
            double p = c.at(z, v);
            if (p < -1e-12 || p > 1.0 + 1e-12)
                throw Error(std::string("de: ") + what + " has out-of-range mass");
            bool in_support = lower ? v <= z : v >= z;
            if (!in_support && p > 1e-12)
                throw Error(std::string("de: ") + what + " puts mass " + std::to_string(p) +
                            " outside the valid support at z=" + std::to_string(z) +
                            ", v=" + std::to_string(v));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error(std::string("de: ") + what + " row " + std::to_string(z) +
                        " sums to " + std::to_string(sum));
    }
}

} // namespace detail

// Bundle-test update. Enumerates the joint values of the d_cz - 1 other
// bundles as multisets with multinomial weights, truncated to totals at
// most s_max; the un-enumerated residual collapses to the uninformative
// message. Weights are accumulated in log space.
inline void update_test_bundle(const DeConfig& cfg, std::int64_t s_max, const CondPmf& l_zc,
                               const CondPmf& u_zc, CondPmf& l_cz, CondPmf& u_cz) {
    const std::int64_t q = cfg.q;
    const std::int64_t k = cfg.d_cz - 1;
    l_cz = CondPmf(q);
    u_cz = CondPmf(q);

    std::vector<double> log_pv(q + 1);
    for (std::int64_t v = 0; v <= q; ++v) {
        double p = binom_pmf(q, v, cfg.gamma);
        log_pv[v] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }

    // k-fold self-convolutions of the value-0 rows
    std::vector<Pmf> pow_l0(k + 1), pow_u0(k + 1);
    pow_l0[0] = delta_pmf(1, 0);
    pow_u0[0] = delta_pmf(1, 0);
    for (std::int64_t j = 1; j <= k; ++j) {
        pow_l0[j] = convolve(pow_l0[j - 1], l_zc.row(0));
        pow_u0[j] = convolve(pow_u0[j - 1], u_zc.row(0));
    }

    const double lgk = std::lgamma(static_cast<double>(k) + 1.0);
    double total_weight = 0.0;

    // Applies one enumerated configuration of the other bundles: their
    // value total, occurrence weight, and bound-sum pmfs.
    auto apply = [&](double w, std::int64_t others_total, const Pmf& sum_l, const Pmf& sum_u) {
        total_weight += w;
        std::vector<double> cdf_l(sum_l.size()), cdf_u(sum_u.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < sum_l.size(); ++i) cdf_l[i] = (acc += sum_l[i]);
        acc = 0.0;
        for (std::size_t i = 0; i < sum_u.size(); ++i) cdf_u[i] = (acc += sum_u[i]);
        auto at = [](const Pmf& p, std::int64_t i) {
            return i >= 0 && i < static_cast<std::int64_t>(p.size()) ? p[i] : 0.0;
        };
        auto cdf_at = [](const std::vector<double>& f, std::int64_t i) {
            if (i < 0) return 0.0;
            if (i >= static_cast<std::int64_t>(f.size())) return f.empty() ? 0.0 : f.back();
            return f[i];
        };
        for (std::int64_t z = 0; z <= q; ++z) {
            const std::int64_t s = z + others_total;
            // L = max(s - sum of others' U, 0)
            l_cz.at(z, 0) += w * (1.0 - cdf_at(cdf_u, s - 1));
            for (std::int64_t v = 1; v <= z; ++v) l_cz.at(z, v) += w * at(sum_u, s - v);
            // U = min(s - sum of others' L, q)
            u_cz.at(z, q) += w * cdf_at(cdf_l, s - q);
            for (std::int64_t v = z; v < q; ++v) u_cz.at(z, v) += w * at(sum_l, s - v);
        }
    };

    if (k == 0) {
        apply(1.0, 0, delta_pmf(1, 0), delta_pmf(1, 0));
    } else {
        // choose counts n_v for v = q down to 1; value 0 absorbs the rest
        struct Frame {
            std::int64_t remaining, total;
            double logw;
            Pmf sum_l, sum_u;
        };
        auto recurse = [&](auto&& self, std::int64_t v, const Frame& fr) -> void {
            if (v == 0) {
                double logw = fr.logw - std::lgamma(static_cast<double>(fr.remaining) + 1.0);
                if (fr.remaining > 0) logw += static_cast<double>(fr.remaining) * log_pv[0];
                if (!std::isfinite(logw)) return;
                apply(std::exp(lgk + logw), fr.total,
                      convolve(fr.sum_l, pow_l0[fr.remaining]),
                      convolve(fr.sum_u, pow_u0[fr.remaining]));
                return;
            }
            Frame next = fr;
            for (std::int64_t count = 0; count <= fr.remaining; ++count) {
                if (fr.total + count * v > s_max) break;
                if (count > 0) {
                    if (log_pv[v] == -std::numeric_limits<double>::infinity()) break;
                    next.remaining = fr.remaining - count;
                    next.total = fr.total + count * v;
                    next.logw = fr.logw - std::lgamma(static_cast<double>(count) + 1.0) +
                                static_cast<double>(count) * log_pv[v];
                    next.sum_l = count == 1 ? convolve(fr.sum_l, l_zc.row(v))
                                            : convolve(next.sum_l, l_zc.row(v));
                    next.sum_u = count == 1 ? convolve(fr.sum_u, u_zc.row(v))
                                            : convolve(next.sum_u, u_zc.row(v));
                    self(self, v - 1, next);
                } else {
                    self(self, v - 1, fr);
                }
            }
        };
        Frame root{k, 0, 0.0, delta_pmf(1, 0), delta_pmf(1, 0)};
        recurse(recurse, q, root);
    }

    // Truncated configurations are treated as uninformative.
    double residual = 1.0 - total_weight;
    if (residual < 0.0) residual = 0.0;
    for (std::int64_t z = 0; z <= q; ++z) {
        l_cz.at(z, 0) += residual;
        u_cz.at(z, q) += residual;
    }
    detail::check_cond_pmf(l_cz, true, "l_cz");
    detail::check_cond_pmf(u_cz, false, "u_cz");
}

// Bound-sum pmfs of a bundle's item messages, conditioned on the true
// bundle value z: the z defective items contribute Bernoulli(pl) lower
// bounds, the q - z others contribute Bernoulli(1 - pu0) upper bounds on
// top of the z certain ones.
inline Pmf item_sum_lower_pmf(std::int64_t q, std::int64_t z, double pl_xf) {
    Pmf out(q + 1, 0.0);
    for (std::int64_t v = 0; v <= z; ++v) out[v] = binom_pmf(z, v, pl_xf);
    return out;
}

inline Pmf item_sum_upper_pmf(std::int64_t q, std::int64_t z, double pu0_xf) {
    Pmf out(q + 1, 0.0);
    for (std::int64_t v = 0; v <= q - z; ++v) out[z + v] = binom_pmf(q - z, v, 1.0 - pu0_xf);
    return out;
}

// Hidden VN to hidden CN: best of the d_vz test messages.
inline void update_z_to_f(const DeConfig& cfg, const CondPmf& l_cz, const CondPmf& u_cz,
                          CondPmf& l_zf, CondPmf& u_zf) {
    const std::int64_t q = cfg.q;
    l_zf = CondPmf(q);
    u_zf = CondPmf(q);
    for (std::int64_t z = 0; z <= q; ++z) {
        l_zf.set_row(z, order_stat_max(l_cz.row(z), cfg.d_vz));
        u_zf.set_row(z, order_stat_min(u_cz.row(z), cfg.d_vz));
    }
    detail::check_cond_pmf(l_zf, true, "l_zf");
    detail::check_cond_pmf(u_zf, false, "u_zf");
}

// Hidden VN to bundle test: best of the d_vz - 1 other test messages
// combined with the hidden-CN message.
inline void update_z_to_c(const DeConfig& cfg, const CondPmf& l_cz, const CondPmf& u_cz,
                          double pl_xf, double pu0_xf, CondPmf& l_zc, CondPmf& u_zc) {
    const std::int64_t q = cfg.q;
    if (cfg.d_vz == 0) {
        // no bundle-test edges exist; keep the family uninformative
        l_zc = CondPmf::all_rows_delta(q, 0);
        u_zc = CondPmf::all_rows_delta(q, q);
        return;
    }
    l_zc = CondPmf(q);
    u_zc = CondPmf(q);
    for (std::int64_t z = 0; z <= q; ++z) {
        Pmf tests_l = order_stat_max(l_cz.row(z), cfg.d_vz - 1);
        Pmf tests_u = order_stat_min(u_cz.row(z), cfg.d_vz - 1);
        l_zc.set_row(z, pmf_max2(tests_l, item_sum_lower_pmf(q, z, pl_xf)));
        u_zc.set_row(z, pmf_min2(tests_u, item_sum_upper_pmf(q, z, pu0_xf)));
    }
    detail::check_cond_pmf(l_zc, true, "l_zc");
    detail::check_cond_pmf(u_zc, false, "u_zc");
}

// Hidden CN to item. A defective item is pinned from below when its
// bundle's lower bound is tight (L = z) and the other defectives are
// already resolved from above; dually for non-defectives.
inline void update_f_to_x(const DeConfig& cfg, const CondPmf& l_zf, const CondPmf& u_zf,
                          double pl_xf, double pu0_xf, double& pl_fx, double& pu0_fx) {
    const std::int64_t q = cfg.q;
    const double gamma = cfg.gamma;
    double pl = 0.0, pu0 = 0.0;
    for (std::int64_t z = 1; z <= q; ++z) {
        // Z | X=1 is 1 + Bino(q-1, gamma)
        double pz = binom_pmf(q - 1, z - 1, gamma);
        pl += pz * l_zf.at(z, z) * std::pow(pu0_xf, static_cast<double>(q - z));
    }
    for (std::int64_t z = 0; z <= q - 1; ++z) {
        // Z | X=0 is Bino(q-1, gamma)
        double pz = binom_pmf(q - 1, z, gamma);
        pu0 += pz * u_zf.at(z, z) * std::pow(pl_xf, static_cast<double>(z));
    }
    pl_fx = pl;
    pu0_fx = pu0;
}

// One iteration in the same stage order as the decoder sweep.
inline void de_step(const DeConfig& cfg, std::int64_t s_max, DeState& st) {
    update_test_bundle(cfg, s_max, st.l_zc, st.u_zc, st.l_cz, st.u_cz);
    update_z_to_f(cfg, st.l_cz, st.u_cz, st.l_zf, st.u_zf);
    update_f_to_x(cfg, st.l_zf, st.u_zf, st.pl_xf, st.pu0_xf, st.pl_fx, st.pu0_fx);

    const double dvx1 = static_cast<double>(cfg.d_vx - 1);
    st.pl_xc = 1.0 - std::pow(1.0 - st.pl_cx, dvx1) * (1.0 - st.pl_fx);
    st.pu0_xc = 1.0 - std::pow(1.0 - st.pu0_cx, dvx1) * (1.0 - st.pu0_fx);

    const double dc1 = static_cast<double>(cfg.d_c - 1);
    st.pl_cx = std::pow(1.0 - (1.0 - cfg.gamma) * (1.0 - st.pu0_xc), dc1);
    st.pu0_cx = std::pow(1.0 - cfg.gamma * (1.0 - st.pl_xc), dc1);

    const double dvx = static_cast<double>(cfg.d_vx);
    st.pl_xf = 1.0 - std::pow(1.0 - st.pl_cx, dvx);
    st.pu0_xf = 1.0 - std::pow(1.0 - st.pu0_cx, dvx);

    update_z_to_c(cfg, st.l_cz, st.u_cz, st.pl_xf, st.pu0_xf, st.l_zc, st.u_zc);

    st.app_l = 1.0 - std::pow(1.0 - st.pl_cx, dvx) * (1.0 - st.pl_fx);
    st.app_u0 = 1.0 - std::pow(1.0 - st.pu0_cx, dvx) * (1.0 - st.pu0_fx);
    ++st.iter;
}

// Tracks the residual error probabilities of a (d_v, d_c) ensemble under
// the bound-propagation decoder as n grows without bound.
class DeEngine {
public:
    explicit DeEngine(const DeConfig& cfg) : cfg_(cfg) {
        s_max_ = syndrome_cutoff(cfg.d_c, cfg.gamma, cfg.eps_tail);
        reset();
    }

    void reset() {
        st_ = DeState{};
        st_.l_zc = CondPmf::all_rows_delta(cfg_.q, 0);
        st_.u_zc = CondPmf::all_rows_delta(cfg_.q, cfg_.q);
        st_.l_cz = CondPmf::all_rows_delta(cfg_.q, 0);
        st_.u_cz = CondPmf::all_rows_delta(cfg_.q, cfg_.q);
        st_.l_zf = CondPmf::all_rows_delta(cfg_.q, 0);
        st_.u_zf = CondPmf::all_rows_delta(cfg_.q, cfg_.q);
    }

    const DeConfig& config() const { return cfg_; }
    const DeState& state() const { return st_; }
    std::int64_t s_max() const { return s_max_; }

    void step() { de_step(cfg_, s_max_, st_); }

    // Residual misdetection and false-alarm probabilities.
    double residual_l() const { return 1.0 - st_.app_l; }
    double residual_u() const { return 1.0 - st_.app_u0; }

    bool succeeded() const {
        return residual_l() < cfg_.delta_success && residual_u() < cfg_.delta_success;
    }

    struct RunResult {
        bool success = false;
        int iters = 0;
        bool stalled = false;
    };

    // Iterates until success, a fixed point, or the iteration cap.
    RunResult run() {
        RunResult r;
        for (int i = 0; i < cfg_.max_iters; ++i) {
            DeState prev = st_;
            step();
            r.iters = st_.iter;
            if (succeeded()) {
                r.success = true;
                return r;
            }
            // the state carried across iterations, compared exactly
            if (st_.l_zc == prev.l_zc && st_.u_zc == prev.u_zc && st_.pl_cx == prev.pl_cx &&
                st_.pu0_cx == prev.pu0_cx && st_.pl_xf == prev.pl_xf &&
                st_.pu0_xf == prev.pu0_xf) {
                r.stalled = true;
                return r;
            }
        }
        return r;
    }

private:
    DeConfig cfg_;
    std::int64_t s_max_ = 0;
    DeState st_;
};

// Convenience probe: does density evolution drive the residual errors
// below delta_success at this gamma?
inline bool de_succeeds(const DeConfig& cfg) {
    DeEngine engine(cfg);
    return engine.run().success;
}

struct SearchOptions {
    double gamma_lo = 1e-6;     // fraction
    double gamma_hi = 0.05;     // fraction
    double tol = 1e-5;          // bracket width, fraction (0.001 in percent units)
    double eps_tail = 1e-8;
    double delta_success = 1e-8;
    int max_iters = 2000;
};

struct ThresholdResult {
    double gamma_th = 0.0;   // fraction; midpoint of the final bracket
    double omega_th = 0.0;   // d_v / d_c at the threshold (rate searches)
    std::int64_t d_c_th = 0; // largest successful d_c (rate searches)
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iters_at_threshold = 0;
    DeConfig config;
};

// Bisects the decoding threshold in gamma for a fixed ensemble.
inline ThresholdResult gamma_threshold(std::int64_t q, std::int64_t d_v, std::int64_t d_vx,
                                       std::int64_t d_c, const SearchOptions& opt = {}) {
    auto make_cfg = [&](double gamma) {
        DeConfig c = DeConfig::from(q, gamma, d_v, d_vx, d_c);
        c.eps_tail = opt.eps_tail;
        c.delta_success = opt.delta_success;
        c.max_iters = opt.max_iters;
        return c;
    };
    auto probe = [&](double gamma, int& iters) {
        DeEngine engine(make_cfg(gamma));
        auto r = engine.run();
        iters = r.iters;
        return r.success;
    };

    int iters_lo = 0, iters_hi = 0;
    double lo = opt.gamma_lo, hi = opt.gamma_hi;
    if (probe(hi, iters_hi))
        throw NoBracketError("gamma_threshold: density evolution still succeeds at gamma=" +
                             std::to_string(hi) + "; raise gamma_hi");
    if (!probe(lo, iters_lo))
        throw NoBracketError("gamma_threshold: density evolution already fails at gamma=" +
                             std::to_string(lo) + "; lower gamma_lo");

    while (hi - lo > opt.tol) {
        double mid = 0.5 * (lo + hi);
        int iters = 0;
        if (probe(mid, iters)) {
            lo = mid;
            iters_lo = iters;
        } else {
            hi = mid;
        }
    }

    ThresholdResult r;
    r.gamma_th = 0.5 * (lo + hi);
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.iters_at_threshold = iters_lo;
    r.config = make_cfg(r.gamma_th);
    r.omega_th = static_cast<double>(d_v) / static_cast<double>(d_c);
    r.d_c_th = d_c;
    return r;
}

// Smallest achievable rate at a fixed gamma: the largest d_c (multiple
// of q) for which density evolution succeeds. Exact integer bisection.
inline ThresholdResult min_rate(std::int64_t q, double gamma, std::int64_t d_v,
                                std::int64_t d_vx, const SearchOptions& opt = {}) {
    if (gamma <= 0.0)
        throw Error("min_rate: gamma must be positive (any rate succeeds at gamma=0)");
    auto make_cfg = [&](std::int64_t d_c) {
        DeConfig c = DeConfig::from(q, gamma, d_v, d_vx, d_c);
        c.eps_tail = opt.eps_tail;
        c.delta_success = opt.delta_success;
        c.max_iters = opt.max_iters;
        return c;
    };
    auto probe = [&](std::int64_t d_c, int& iters) {
        DeEngine engine(make_cfg(d_c));
        auto r = engine.run();
        iters = r.iters;
        return r.success;
    };

    int iters = 0, iters_best = 0;
    std::int64_t lo = q; // largest known success, in multiples of q
    if (!probe(lo, iters_best))
        throw NoBracketError("min_rate: density evolution fails even at d_c=" +
                             std::to_string(lo) + " (maximum rate)");
    std::int64_t hi = lo;
    const std::int64_t d_c_cap = 1 << 20;
    while (probe(hi * 2, iters)) {
        hi *= 2;
        lo = hi;
        iters_best = iters;
        if (hi > d_c_cap)
            throw NoBracketError("min_rate: density evolution still succeeds at d_c=" +
                                 std::to_string(hi));
    }
    hi *= 2; // first known failure
    while (hi - lo > q) {
        std::int64_t mid = (lo + hi) / 2;
        mid -= mid % q;
        if (mid <= lo) mid = lo + q;
        if (mid >= hi) mid = hi - q;
        if (probe(mid, iters)) {
            lo = mid;
            iters_best = iters;
        } else {
            hi = mid;
        }
    }

    ThresholdResult r;
    r.gamma_th = gamma;
    r.d_c_th = lo;
    r.omega_th = static_cast<double>(d_v) / static_cast<double>(lo);
    r.bracket_lo = static_cast<double>(d_v) / static_cast<double>(hi);
    r.bracket_hi = r.omega_th;
    r.iters_at_threshold = iters_best;
    r.config = make_cfg(lo);
    return r;
}

} // namespace de
} // namespace qgt
