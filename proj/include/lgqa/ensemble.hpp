#pragma once

// Trajectory-parallel Monte Carlo plumbing. Each trajectory draws only from
// an engine seeded by trajectory_seed(master, experiment, index). Work is cut
// into fixed-size blocks whose partial results are merged in block order, so
// results are bit-identical for any worker count.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace lgqa {

/// SplitMix64 finalizer (bijective on 64-bit words).
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for one trajectory. For fixed (master, experiment) the map from index
/// to seed is a bijection, so distinct indices never collide.
constexpr std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t experiment_id,
                                        std::uint64_t trajectory_index) {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ experiment_id);
    return splitmix64(h ^ trajectory_index);
}

/// Order-sensitive combination of tags into an experiment id.
constexpr std::uint64_t experiment_id(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6c67716100000000ULL;
    for (auto p : parts) h = splitmix64(h ^ p);
    return h;
}

using TrajectoryEngine = std::mt19937_64;

/// Mean / variance accumulator (Welford) with an order-deterministic merge.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(o.n_);
        const double d = o.mean_ - mean_;
        const double n = na + nb;
        mean_ += d * nb / n;
        m2_ += o.m2_ + d * d * na * nb / n;
        n_ += o.n_;
    }

    [[nodiscard]] std::size_t count() const { return n_; }
    [[nodiscard]] double mean() const { return mean_; }
    [[nodiscard]] double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    [[nodiscard]] double stddev() const { return std::sqrt(variance()); }
    [[nodiscard]] double stderr_mean() const {
        return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Fixed-width bundle of RunningStats, one per tracked quantity.
template <std::size_t N>
struct StatsBundle {
    std::array<RunningStats, N> s;

    void merge(const StatsBundle& o) {
        for (std::size_t i = 0; i < N; ++i) s[i].merge(o.s[i]);
    }
    RunningStats& operator[](std::size_t i) { return s[i]; }
    const RunningStats& operator[](std::size_t i) const { return s[i]; }
};

struct Parallelism {
    /// Worker threads; 0 means hardware concurrency.
    unsigned workers = 1;
    /// Trajectories per reduction block. Part of the result's identity: results
    /// are reproducible for a fixed block size, independent of `workers`.
    std::size_t block_size = 2048;

    [[nodiscard]] unsigned resolved_workers() const {
        if (workers != 0) return workers;
        return std::max(1u, std::thread::hardware_concurrency());
    }
};

/// Runs body(index, acc) for index in [0, n) and merges per-block accumulators
/// in block order. Acc must be default-constructible and provide merge().
template <class Acc, class Body>
Acc ordered_reduce(std::size_t n, const Parallelism& par, const Body& body) {
    const std::size_t block = std::max<std::size_t>(1, par.block_size);
    const std::size_t n_blocks = (n + block - 1) / block;
    std::vector<Acc> partial(n_blocks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                Acc acc;
                const std::size_t end = std::min(n, (b + 1) * block);
                for (std::size_t i = b * block; i < end; ++i) body(i, acc);
                partial[b] = std::move(acc);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_blocks);
                return;
            }
        }
    };

    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(par.resolved_workers(), n_blocks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Acc total;
    for (auto& p : partial) total.merge(p);
    return total;
}

}  // namespace lgqa
