#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "optbench/rng.hpp"

using namespace optbench;

namespace {

// Yields a scripted sequence of raw words, then repeats the last one.
struct ScriptedGen {
    using result_type = std::uint64_t;
    std::vector<std::uint64_t> words;
    std::size_t pos = 0;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }
    result_type operator()() { return words[std::min(pos++, words.size() - 1)]; }
};

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

}  // namespace

TEST(Uniform, MaxWordMapsToOneAndIsRedrawnForExponential) {
    ScriptedGen g{{~0ULL, ~0ULL, 0ULL}};
    EXPECT_EQ(uniform_open_closed(g), 1.0);
    g.pos = 0;
    const double tau = exponential_unit(g);
    EXPECT_GT(tau, 0.0);
    EXPECT_EQ(g.pos, 3u);
    EXPECT_DOUBLE_EQ(tau, 53.0 * std::log(2.0));
}

TEST(Uniform, ZeroWordGivesSmallestPositive) {
    ScriptedGen g{{0ULL}};
    EXPECT_EQ(uniform_open_closed(g), 0x1.0p-53);
}

TEST(SampleIncrements, EmptyRejected) {
    EXPECT_THROW(sample_increments(Seed{1}, 0), EmptyScheduleError);
}

TEST(SampleIncrements, SingleIncrementPositive) {
    for (std::uint64_t s = 0; s < 1000; ++s) EXPECT_GT(sample_increments(Seed{s}, 1).increment(0), 0.0);
}

TEST(SampleIncrements, MeanOfExponential) {
    const auto sched = sample_increments(Seed{7}, 100000);
    const std::vector<double> tau(sched.increments().begin(), sched.increments().end());
    EXPECT_NEAR(mean(tau), 1.0, 3.0 / std::sqrt(1e5));
}

TEST(SampleIncrements, KolmogorovSmirnovAgainstExp1) {
    const std::size_t n = 20000;
    const auto sched = sample_increments(Seed{2024}, n);
    std::vector<double> tau(sched.increments().begin(), sched.increments().end());
    std::sort(tau.begin(), tau.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = -std::expm1(-tau[i]);
        d = std::max({d, cdf - double(i) / double(n), double(i + 1) / double(n) - cdf});
    }
    // 1% critical value
    EXPECT_LT(d, 1.63 / std::sqrt(double(n)));
}

TEST(SampleIncrements, GammaWindowMean) {
    const std::size_t n = 100000, w = 30;
    const auto sched = sample_increments(Seed{99}, n);
    // non-overlapping windows are independent Gamma(30, 1) draws: mean 30, variance 30
    std::vector<double> windows;
    for (std::size_t k = w; k < n; k += w) windows.push_back(sched.time(k) - sched.time(k - w));
    const double se = std::sqrt(30.0 / double(windows.size()));
    EXPECT_NEAR(mean(windows), 30.0, 3.0 * se);
}

TEST(JumpSchedule, TimesAreRunningSums) {
    const auto sched = sample_increments(Seed{5}, 5000);
    long double sum = 0.0L;
    for (std::size_t k = 0; k < sched.count(); ++k) {
        sum += sched.increment(k);
        EXPECT_NEAR(sched.time(k), double(sum), 1e-12 * double(sum));
    }
}

TEST(SampleIncrements, Deterministic) {
    const auto a = sample_increments(Seed{3}, 100);
    const auto b = sample_increments(Seed{3}, 100);
    EXPECT_TRUE(std::equal(a.increments().begin(), a.increments().end(), b.increments().begin()));
}

TEST(SpawnStream, DistinctAndDeterministic) {
    const Seed s{12345};
    EXPECT_NE(spawn_stream(s, 0), spawn_stream(s, 1));
    EXPECT_EQ(spawn_stream(s, 17), spawn_stream(s, 17));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(spawn_stream(s, i).value);
    EXPECT_EQ(seen.size(), 10000u);
    EXPECT_NE(spawn_stream(Seed{1}, 0), spawn_stream(Seed{0}, 1));
}

TEST(SpawnStream, PooledStreamsAreExp1) {
    const Seed s{77};
    double total = 0.0;
    const std::size_t streams = 1000, per = 1000;
    for (std::size_t i = 0; i < streams; ++i) {
        Rng rng(spawn_stream(s, i));
        for (std::size_t k = 0; k < per; ++k) total += rng.exponential();
    }
    EXPECT_NEAR(total / double(streams * per), 1.0, 3.0 / std::sqrt(double(streams * per)));
}

TEST(SpawnStream, NeighbouringStreamsUncorrelated) {
    const std::size_t n = 20000;
    Rng a(spawn_stream(Seed{8}, 0)), b(spawn_stream(Seed{8}, 1));
    double sab = 0.0;
    for (std::size_t k = 0; k < n; ++k) sab += (a.exponential() - 1.0) * (b.exponential() - 1.0);
    EXPECT_NEAR(sab / double(n), 0.0, 4.0 / std::sqrt(double(n)));
}
