#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qgt/pmf.hpp"
#include "qgt/rng.hpp"

using namespace qgt;

namespace {

void expect_pmf_near(const Pmf& a, const Pmf& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

Pmf random_pmf(std::size_t size, Rng& rng) {
    Pmf p(size);
    double sum = 0.0;
    for (auto& v : p) sum += (v = rng.uniform() + 1e-3);
    for (auto& v : p) v /= sum;
    return p;
}

} // namespace

TEST(Pmf, BinomialBasics) {
    EXPECT_NEAR(binom_pmf(5, 2, 0.3), 0.3087, 1e-12);
    EXPECT_DOUBLE_EQ(binom_pmf(5, 0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(binom_pmf(5, 5, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(binom_pmf(5, 6, 0.3), 0.0);
    Pmf p = binom_pmf_vector(40, 0.37);
    EXPECT_NEAR(pmf_sum(p), 1.0, 1e-12);
}

TEST(Pmf, BinomialConvolutionIdentity) {
    // Bino(a, p) + Bino(b, p) = Bino(a+b, p)
    Pmf a = binom_pmf_vector(7, 0.21);
    Pmf b = binom_pmf_vector(5, 0.21);
    expect_pmf_near(convolve(a, b), binom_pmf_vector(12, 0.21), 1e-13);
}

TEST(Pmf, SyndromeCutoffReference) {
    EXPECT_EQ(syndrome_cutoff(160, 0.01, 1e-6), 10);
    EXPECT_EQ(syndrome_cutoff(160, 1e-12, 1e-6), 0);
    EXPECT_EQ(syndrome_cutoff(20, 1.0, 1e-6), 20);
}

TEST(Pmf, SyndromeCutoffAgainstDirectSum) {
    // independent evaluation via direct descending-factorial products
    auto direct = [](std::int64_t n, double p, double eps) {
        std::vector<double> pmf(n + 1);
        for (std::int64_t k = 0; k <= n; ++k) {
            double term = 1.0;
            for (std::int64_t j = 0; j < k; ++j)
                term *= p * static_cast<double>(n - j) / static_cast<double>(j + 1);
            for (std::int64_t j = 0; j < n - k; ++j) term *= 1.0 - p;
            pmf[k] = term;
        }
        for (std::int64_t s = 0; s <= n; ++s) {
            double tail = 0.0;
            for (std::int64_t k = s + 1; k <= n; ++k) tail += pmf[k];
            if (tail <= eps) return s;
        }
        return n;
    };
    for (auto [n, p, eps] : {std::tuple{120LL, 0.00646, 1e-7}, std::tuple{80LL, 0.012, 1e-8},
                             std::tuple{160LL, 0.01, 1e-6}, std::tuple{28LL, 0.05, 1e-9}}) {
        EXPECT_EQ(syndrome_cutoff(n, p, eps), direct(n, p, eps)) << n << " " << p << " " << eps;
    }
}

TEST(Pmf, OrderStatIdentities) {
    Rng rng(11);
    Pmf p = random_pmf(5, rng);
    expect_pmf_near(order_stat_max(p, 1), p, 0.0);
    expect_pmf_near(order_stat_min(p, 1), p, 0.0);
    expect_pmf_near(order_stat_max(p, 0), delta_pmf(5, 0), 0.0);
    expect_pmf_near(order_stat_min(p, 0), delta_pmf(5, 4), 0.0);

    // min of two fair coin flips: P(0) = 3/4, P(1) = 1/4
    Pmf coin = {0.5, 0.5};
    Pmf m = order_stat_min(coin, 2);
    EXPECT_NEAR(m[0], 0.75, 1e-15);
    EXPECT_NEAR(m[1], 0.25, 1e-15);
}

TEST(Pmf, MaxWithPointMassAtZeroIsIdentity) {
    Rng rng(12);
    Pmf p = random_pmf(6, rng);
    expect_pmf_near(pmf_max2(delta_pmf(6, 0), p), p, 1e-15);
    expect_pmf_near(pmf_min2(delta_pmf(6, 5), p), p, 1e-15);
}

TEST(Pmf, OrderStatsMatchExhaustiveExpansion) {
    Rng rng(13);
    for (std::size_t size = 2; size <= 4; ++size) {
        for (int k = 0; k <= 3; ++k) {
            Pmf p = random_pmf(size, rng);
            expect_pmf_near(order_stat_max(p, k), test::brute_order_stat(p, k, true), 1e-12);
            expect_pmf_near(order_stat_min(p, k), test::brute_order_stat(p, k, false), 1e-12);
        }
    }
}

TEST(Pmf, PairCombinesMatchExhaustiveExpansion) {
    Rng rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        Pmf a = random_pmf(2 + rep % 3, rng);
        Pmf b = random_pmf(2 + (rep + 1) % 3, rng);
        expect_pmf_near(pmf_max2(a, b), test::brute_pair_combine(a, b, true), 1e-13);
        expect_pmf_near(pmf_min2(a, b), test::brute_pair_combine(a, b, false), 1e-13);
    }
}

TEST(Pmf, CombinesPreserveMass) {
    Rng rng(15);
    for (int rep = 0; rep < 10; ++rep) {
        Pmf a = random_pmf(6, rng), b = random_pmf(6, rng);
        EXPECT_NEAR(pmf_sum(pmf_max2(a, b)), 1.0, 1e-13);
        EXPECT_NEAR(pmf_sum(pmf_min2(a, b)), 1.0, 1e-13);
        EXPECT_NEAR(pmf_sum(order_stat_max(a, 7)), 1.0, 1e-13);
        EXPECT_NEAR(pmf_sum(order_stat_min(a, 7)), 1.0, 1e-13);
    }
}
