#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace qgt {

// Dense pmf over {0, 1, ..., size()-1}.
using Pmf = std::vector<double>;

inline double log_binomial_coeff(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Binomial point mass, stable for large n via log-space evaluation.
inline double binom_pmf(std::int64_t n, std::int64_t k, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    double lg = log_binomial_coeff(n, k) + static_cast<double>(k) * std::log(p) +
                static_cast<double>(n - k) * std::log1p(-p);
    return std::exp(lg);
}

inline Pmf binom_pmf_vector(std::int64_t n, double p) {
    Pmf out(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = binom_pmf(n, k, p);
    return out;
}

// Smallest s with P(Bino(n, p) > s) <= eps. Tail mass is summed from
// above so no subtractive cancellation is involved.
inline std::int64_t syndrome_cutoff(std::int64_t n, double p, double eps) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) pmf[static_cast<std::size_t>(k)] = binom_pmf(n, k, p);
    double tail = 0.0;
    for (std::int64_t s = n; s >= 0; --s) {
        tail += pmf[static_cast<std::size_t>(s)];
        if (tail > eps) return s;
    }
    return 0;
}

inline Pmf delta_pmf(std::size_t size, std::size_t at) {
    Pmf out(size, 0.0);
    out[at] = 1.0;
    return out;
}

inline Pmf convolve(const Pmf& a, const Pmf& b) {
    Pmf out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// Distribution of max(A, B) for independent A ~ a, B ~ b.
inline Pmf pmf_max2(const Pmf& a, const Pmf& b) {
    std::size_t size = std::max(a.size(), b.size());
    Pmf out(size, 0.0);
    double fa = 0.0, fb = 0.0;
    for (std::size_t v = 0; v < size; ++v) {
        double pa = v < a.size() ? a[v] : 0.0;
        double pb = v < b.size() ? b[v] : 0.0;
        out[v] = pa * fb + pb * fa + pa * pb;
        fa += pa;
        fb += pb;
    }
    return out;
}

// Distribution of min(A, B) for independent A ~ a, B ~ b.
inline Pmf pmf_min2(const Pmf& a, const Pmf& b) {
    std::size_t size = std::max(a.size(), b.size());
    Pmf out(size, 0.0);
    double ga = 1.0, gb = 1.0; // P(A >= v), P(B >= v)
    for (std::size_t v = 0; v < size; ++v) {
        double pa = v < a.size() ? a[v] : 0.0;
        double pb = v < b.size() ? b[v] : 0.0;
        out[v] = pa * (gb - pb) + pb * (ga - pa) + pa * pb;
        ga -= pa;
        gb -= pb;
    }
    return out;
}

// Distribution of the max of k iid draws from p, via cdf powers. k = 0
// yields the identity of the max-lattice: a point mass at 0.
inline Pmf order_stat_max(const Pmf& p, std::int64_t k) {
    if (k == 0) return delta_pmf(p.size(), 0);
    if (k == 1) return p;
    Pmf out(p.size(), 0.0);
    double f = 0.0, fprev = 0.0;
    for (std::size_t v = 0; v < p.size(); ++v) {
        f += p[v];
        double fc = std::min(f, 1.0);
        out[v] = std::pow(fc, static_cast<double>(k)) -
                 std::pow(fprev, static_cast<double>(k));
        if (out[v] < 0.0) out[v] = 0.0;
        fprev = fc;
    }
    return out;
}

// Distribution of the min of k iid draws from p. k = 0 yields a point
// mass at the top of the support.
inline Pmf order_stat_min(const Pmf& p, std::int64_t k) {
    if (k == 0) return delta_pmf(p.size(), p.size() - 1);
    if (k == 1) return p;
    Pmf out(p.size(), 0.0);
    double g = 1.0; // P(draw >= v)
    for (std::size_t v = 0; v < p.size(); ++v) {
        double gnext = g - p[v];
        if (gnext < 0.0) gnext = 0.0;
        out[v] = std::pow(g, static_cast<double>(k)) -
                 std::pow(gnext, static_cast<double>(k));
        if (out[v] < 0.0) out[v] = 0.0;
        g = gnext;
    }
    return out;
}

inline double pmf_sum(const Pmf& p) {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

} // namespace qgt
