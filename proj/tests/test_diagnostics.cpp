#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "optbench/diagnostics.hpp"

using namespace optbench;

namespace {

struct Brute {
    std::vector<HTriple> h;  // per index i = 1..n
    double delta = 0.0;
};

// Direct double sums over (i, j), and the triple sum for Delta.
Brute brute_force(const std::vector<double>& tau, double alpha) {
    std::vector<double> T(tau.size());
    std::partial_sum(tau.begin(), tau.end(), T.begin());
    Brute b;
    for (std::size_t i = 0; i < T.size(); ++i) {
        HTriple v;
        for (std::size_t j = 0; j <= i; ++j) {
            const double gap = T[i] - T[j];
            const double w = std::exp(-alpha * gap);
            v.h0 += gap * w;
            v.h1 += w;
            v.h2 += double(i - j) * w;
        }
        b.h.push_back(v);
        for (std::size_t j = 0; j <= i; ++j)
            for (std::size_t l = 0; l <= i; ++l) b.delta += alpha * alpha * std::exp(-alpha * (2 * T[i] - T[j] - T[l]));
    }
    return b;
}

// E[Delta_n] from E[e^{-alpha(G_a + G_b)}] = (1+2a)^{-a} (1+a)^{-(b-a)} for a <= b.
double expected_delta_by_laplace(std::size_t n, double alpha) {
    double total = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t a = 0; a < i; ++a)
            for (std::size_t b = 0; b < i; ++b) {
                const auto lo = double(std::min(a, b)), hi = double(std::max(a, b));
                total += std::pow(1 + 2 * alpha, -lo) * std::pow(1 + alpha, -(hi - lo));
            }
    return alpha * alpha * total;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST(Accumulators, FirstIndex) {
    const auto acc = diag_update(make_accumulators(0.3), 5.0);
    EXPECT_EQ(acc.h0, 0.0);
    EXPECT_EQ(acc.h1, 1.0);
    EXPECT_EQ(acc.h2, 0.0);
    EXPECT_DOUBLE_EQ(acc.delta_partial, 0.09);
}

TEST(Accumulators, TwoJumpHandValues) {
    auto acc = diag_update(make_accumulators(0.5), 1.0);
    acc = diag_update(acc, 2.0);
    EXPECT_NEAR(acc.h1, 1.36787944, 1e-8);
    EXPECT_NEAR(acc.h0, 0.73575888, 1e-8);
    EXPECT_NEAR(acc.h2, std::exp(-1.0), 1e-15);
}

TEST(Accumulators, MatchBruteForceSums) {
    Rng rng(Seed{1});
    for (double alpha : {0.1, 0.5, 1.0}) {
        for (int s = 0; s < 200; ++s) {
            const std::size_t len = 1 + static_cast<std::size_t>(rng() % 12);
            std::vector<double> tau(len);
            for (auto& t : tau) t = rng.exponential();
            const Brute b = brute_force(tau, alpha);
            auto acc = make_accumulators(alpha);
            for (std::size_t i = 0; i < len; ++i) {
                acc = diag_update(acc, tau[i]);
                EXPECT_LE(std::abs(acc.h0 - b.h[i].h0), 1e-12 * std::max(1.0, b.h[i].h0));
                EXPECT_LE(rel(acc.h1, b.h[i].h1), 1e-12);
                EXPECT_LE(std::abs(acc.h2 - b.h[i].h2), 1e-12 * std::max(1.0, b.h[i].h2));
            }
            EXPECT_LE(rel(acc.delta_partial, b.delta), 1e-12);
            EXPECT_LE(rel(delta_n(JumpSchedule(tau), alpha), b.delta), 1e-12);
        }
    }
}

TEST(ExpectedH, SmallIndices) {
    for (double a : {0.1, 0.7, 3.0}) {
        const HTriple e = expected_H(1, a);
        EXPECT_EQ(e.h0, 0.0);
        EXPECT_DOUBLE_EQ(e.h1, 1.0);
        EXPECT_EQ(e.h2, 0.0);
    }
    const HTriple e2 = expected_H(2, 1.0);
    EXPECT_DOUBLE_EQ(e2.h1, 1.5);
    EXPECT_DOUBLE_EQ(e2.h0, 0.25);
    EXPECT_DOUBLE_EQ(e2.h2, 0.5);
    EXPECT_THROW(expected_H(0, 1.0), DomainError);
    EXPECT_THROW(expected_H(3, 0.0), DomainError);
}

TEST(ExpectedH, MatchesTermwiseSums) {
    for (double a : {0.05, 0.3, 1.0, 2.5})
        for (std::size_t i : {1u, 2u, 3u, 10u, 57u, 400u}) {
            const double q = 1.0 / (1.0 + a);
            double s1 = 0, s2 = 0, s0 = 0;
            for (std::size_t m = 0; m < i; ++m) {
                s1 += std::pow(q, double(m));
                s2 += double(m) * std::pow(q, double(m));
                s0 += double(m) * std::pow(q, double(m + 1));
            }
            const HTriple e = expected_H(i, a);
            EXPECT_LE(std::abs(e.h1 - s1), 1e-11 * s1);
            EXPECT_LE(std::abs(e.h2 - s2), 1e-10 * std::max(1.0, s2));
            EXPECT_LE(std::abs(e.h0 - s0), 1e-10 * std::max(1.0, s0));
        }
}

TEST(ExpectedH, MonteCarloIndexTen) {
    const double alpha = 0.3;
    for (auto [q, pick] : {std::pair{McQuantity::H0, 0}, {McQuantity::H1, 1}, {McQuantity::H2, 2}}) {
        McRequest req;
        req.quantity = q;
        req.n = 10;
        req.alpha = alpha;
        req.trials = 100000;
        req.seed = Seed{17};
        const McStats st = monte_carlo_stats(req);
        const HTriple e = expected_H(10, alpha);
        const double want = pick == 0 ? e.h0 : pick == 1 ? e.h1 : e.h2;
        EXPECT_NEAR(st.mean, want, 4.0 * st.std_error);
    }
}

TEST(ExpectedDelta, SmallCases) {
    EXPECT_DOUBLE_EQ(expected_delta(1, 0.5), 0.25);
    EXPECT_NEAR(expected_delta(2, 0.5), 0.95833333, 1e-8);
    EXPECT_NEAR(expected_delta(2, 0.5), 0.25 + 0.70833333, 1e-8);
}

TEST(ExpectedDelta, MatchesLaplaceTransformSums) {
    for (double a : {0.05, 0.3, 0.5, 1.0, 2.0})
        for (std::size_t n : {1u, 2u, 3u, 7u, 40u, 150u})
            EXPECT_LE(rel(expected_delta(n, a), expected_delta_by_laplace(n, a)), 1e-10) << n << " " << a;
}

TEST(ExpectedDelta, BelowLinearUpperBound) {
    for (double a : {1e-4, 0.1, 0.5, 1.0, 4.0})
        for (std::size_t n : {1u, 2u, 10u, 1000u, 100000u}) EXPECT_LE(expected_delta(n, a), expected_delta_upper(n, a));
    EXPECT_DOUBLE_EQ(expected_delta_upper(1, 0.5), 3.5);
    EXPECT_NEAR(expected_delta_upper(10, 1e-12), 10.0, 1e-9);
}

TEST(ExpectedDelta, UpperBoundAboveMonteCarlo) {
    McRequest req;
    req.quantity = McQuantity::delta;
    req.n = 100;
    req.alpha = 0.3;
    req.trials = 2000;
    const McStats st = monte_carlo_stats(req);
    EXPECT_LE(st.mean, expected_delta_upper(100, 0.3));
}

TEST(ExpectedDelta, DeterministicAtOne) {
    McRequest req;
    req.quantity = McQuantity::delta_ratio;
    req.n = 1;
    req.trials = 50;
    const McStats st = monte_carlo_stats(req);
    for (double v : st.samples) EXPECT_EQ(v, 1.0);
    const JumpSchedule one({0.123});
    EXPECT_DOUBLE_EQ(delta_n(one, 0.5), 0.25);
}

TEST(Membership, TrivialCases) {
    const JumpSchedule one({0.7});
    EXPECT_TRUE(a_n_verdict(one, 0.4, 1.0).member);
    const AnVerdict v = a_n_verdict(one, 0.4, 0.5);
    EXPECT_FALSE(v.member);
    ASSERT_TRUE(v.first_violation.has_value());
    EXPECT_EQ(v.first_violation->i, 1u);
    EXPECT_EQ(v.first_violation->which, HComponent::H1);
    EXPECT_THROW(a_n_verdict(one, 0.4, 0.0), DomainError);
}

TEST(Membership, FractionAtDeskScale) {
    McRequest req;
    req.quantity = McQuantity::an_membership;
    req.n = 1000;
    req.trials = 100;
    req.seed = Seed{2};
    EXPECT_GE(monte_carlo_stats(req).mean, 0.95);
}

TEST(Histogram, FreedmanDiaconis) {
    EXPECT_EQ(freedman_diaconis({}).bins(), 0u);
    const Histogram flat = freedman_diaconis({2.0, 2.0, 2.0});
    EXPECT_EQ(flat.bins(), 1u);
    EXPECT_EQ(flat.total(), 3u);

    Rng rng(Seed{6});
    std::vector<double> v(10000);
    for (auto& x : v) x = rng.normal();
    const Histogram h = freedman_diaconis(v);
    EXPECT_EQ(h.total(), v.size());
    EXPECT_EQ(h.edges.size(), h.bins() + 1);
    EXPECT_EQ(h.edges.front(), *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(h.edges.back(), *std::max_element(v.begin(), v.end()));
    // 2 IQR / N^{1/3} with IQR ~ 1.349 gives ~0.125 width over a range ~7.5
    EXPECT_GT(h.bins(), 40u);
    EXPECT_LT(h.bins(), 90u);
}

TEST(MonteCarlo, CenteredLawHasZeroMean) {
    McRequest req;
    req.quantity = McQuantity::H1;
    req.n = 100;
    req.index = 2;
    req.trials = 10000;
    req.centered = true;
    const McStats st = monte_carlo_stats(req);
    EXPECT_NEAR(st.mean, 0.0, 4.0 * st.std_error);
    EXPECT_EQ(st.histogram.total(), 10000u);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
    McRequest req;
    req.quantity = McQuantity::delta;
    req.n = 50;
    req.trials = 64;
    const McStats a = monte_carlo_stats(req, 1);
    const McStats b = monte_carlo_stats(req, 7);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.mean, b.mean);
}

TEST(MonteCarlo, Preconditions) {
    McRequest req;
    req.trials = 1;
    EXPECT_THROW(monte_carlo_stats(req), DomainError);
    req.trials = 5;
    req.n = 3;
    req.index = 4;
    req.quantity = McQuantity::H0;
    EXPECT_THROW(monte_carlo_stats(req), DomainError);
}
