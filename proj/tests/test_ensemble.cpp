#include <bit>
#include <cstdint>
#include <random>
#include <unordered_set>

#include <gtest/gtest.h>

#include "lgqa/ensemble.hpp"

using namespace lgqa;

TEST(Ensemble, SeedIsDeterministic) {
    EXPECT_EQ(trajectory_seed(1, 2, 3), trajectory_seed(1, 2, 3));
    static_assert(trajectory_seed(1, 2, 3) == trajectory_seed(1, 2, 3));
}

TEST(Ensemble, NoSeedCollisionsOverAMillionIndices) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1100000);
    for (std::uint64_t i = 0; i <= 1000000; ++i) seen.insert(trajectory_seed(2019, 42, i));
    EXPECT_EQ(seen.size(), 1000001u);
}

TEST(Ensemble, EveryInputAffectsTheSeed) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t m = rng(), e = rng(), k = rng();
        const std::uint64_t base = trajectory_seed(m, e, k);
        const std::uint64_t bit = 1ULL << (rng() % 64);
        EXPECT_NE(base, trajectory_seed(m ^ bit, e, k));
        EXPECT_NE(base, trajectory_seed(m, e ^ bit, k));
        EXPECT_NE(base, trajectory_seed(m, e, k ^ bit));
    }
}

TEST(Ensemble, ExperimentIdIsOrderSensitive) {
    EXPECT_NE(experiment_id({1, 2}), experiment_id({2, 1}));
    EXPECT_EQ(experiment_id({1, 2}), experiment_id({1, 2}));
}

TEST(Ensemble, RunningStatsMatchesTwoPass) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(3.0, 2.0);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = n(rng);
    RunningStats st;
    for (double x : xs) st.add(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= xs.size() - 1;
    EXPECT_NEAR(st.mean(), mean, 1e-12);
    EXPECT_NEAR(st.variance(), var, 1e-10);
    EXPECT_NEAR(st.stderr_mean(), std::sqrt(var / xs.size()), 1e-12);

    RunningStats a, b;
    for (std::size_t i = 0; i < xs.size(); ++i) (i < 3000 ? a : b).add(xs[i]);
    a.merge(b);
    EXPECT_EQ(a.count(), xs.size());
    EXPECT_NEAR(a.mean(), mean, 1e-12);
    EXPECT_NEAR(a.variance(), var, 1e-10);
}

TEST(Ensemble, OrderedReduceIsBitExactAcrossWorkerCounts) {
    const auto run = [](unsigned workers) {
        return ordered_reduce<StatsBundle<1>>(50000, Parallelism{workers, 512}, [](std::size_t i, StatsBundle<1>& acc) {
            TrajectoryEngine rng(trajectory_seed(7, 1, i));
            acc[0].add(std::normal_distribution<double>(0.0, 1.0)(rng));
        });
    };
    const auto one = run(1);
    for (unsigned w : {2u, 8u}) {
        const auto other = run(w);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(one[0].mean()), std::bit_cast<std::uint64_t>(other[0].mean()));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(one[0].variance()), std::bit_cast<std::uint64_t>(other[0].variance()));
    }
    EXPECT_EQ(one[0].count(), 50000u);
}

TEST(Ensemble, OrderedReducePropagatesExceptions) {
    const auto body = [](std::size_t i, StatsBundle<1>& acc) {
        if (i == 777) throw std::runtime_error("boom");
        acc[0].add(1.0);
    };
    EXPECT_THROW((void)ordered_reduce<StatsBundle<1>>(5000, Parallelism{4, 100}, body), std::runtime_error);
    EXPECT_THROW((void)ordered_reduce<StatsBundle<1>>(5000, Parallelism{1, 100}, body), std::runtime_error);
}

TEST(Ensemble, EmptyRange) {
    const auto st = ordered_reduce<StatsBundle<1>>(0, Parallelism{}, [](std::size_t, StatsBundle<1>&) {});
    EXPECT_EQ(st[0].count(), 0u);
}
