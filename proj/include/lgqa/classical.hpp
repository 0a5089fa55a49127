#pragma once

// Classical comparator: a unit spin m under the classical image of the
// annealing field, E(m) = b(t).m, with Gilbert damping and isotropic thermal
// noise (stochastic LLG, Stratonovich, Heun stepping).
//
//   dm = -g m x (b dt + dW) + g eta m x (m x (b dt + dW)),
//   <dW_i dW_j> = 2 eta / (beta g (1 + eta^2)) delta_ij dt.
//
// g = 2 makes the noise-free precession identical to the qubit's Bloch
// equation. The damping term drives m towards -b (lower energy) and the noise
// strength gives the Boltzmann distribution exp(-beta E) at equilibrium.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lgqa/ensemble.hpp"
#include "lgqa/errors.hpp"
#include "lgqa/experiments.hpp"
#include "lgqa/model.hpp"

namespace lgqa {

using Vec3 = std::array<double, 3>;

namespace vec {
inline Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 scale(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 normalized(const Vec3& a) { return scale(1.0 / norm(a), a); }
}  // namespace vec

struct ClassicalSpin {
    Vec3 m{-1.0, 0.0, 0.0};
};

struct LangevinParams {
    double eta = 0.0;
    /// May be +infinity for noise-free damped dynamics.
    double beta = 10.0;
    double dt = 1e-3;
    std::size_t n_traj = 100000;
    std::uint64_t master_seed = kDefaultMasterSeed;
    double precession_factor = 2.0;

    void validate() const {
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw ContractViolation("LangevinParams: eta must be >= 0");
        if (!(beta > 0.0)) throw ContractViolation("LangevinParams: beta must be > 0");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("LangevinParams: dt must be > 0");
        if (n_traj < 1) throw ContractViolation("LangevinParams: n_traj must be >= 1");
        if (!(precession_factor > 0.0) || !std::isfinite(precession_factor)) {
            throw ContractViolation("LangevinParams: precession_factor must be > 0");
        }
    }

    /// Variance per unit time of each noise component.
    [[nodiscard]] double noise_variance() const {
        if (eta == 0.0 || std::isinf(beta)) return 0.0;
        return 2.0 * eta / (beta * precession_factor * (1.0 + eta * eta));
    }

    [[nodiscard]] long long step_index(double t) const { return std::llround(t / dt); }
    [[nodiscard]] double grid_time(long long k) const { return static_cast<double>(k) * dt; }

    friend bool operator==(const LangevinParams&, const LangevinParams&) = default;
};

/// Default damping for a quantum coupling strength.
inline double eta_from_alpha(double alpha) { return std::numbers::pi * alpha; }

template <Schedule S>
Vec3 effective_field(const S& sched, double t) {
    detail::require_in_domain(sched, t, "effective_field");
    const auto f = sched.field(t);
    return {f.hx, 0.0, f.hz};
}

/// Spin anti-aligned with the t = 0 field.
template <Schedule S>
ClassicalSpin classical_initial_spin(const S& sched) {
    return {vec::scale(-1.0, vec::normalized(effective_field(sched, 0.0)))};
}

namespace detail {

inline Vec3 llg_increment(const Vec3& m, const Vec3& h, double g, double eta) {
    const Vec3 mxh = vec::cross(m, h);
    return vec::add(vec::scale(-g, mxh), vec::scale(g * eta, vec::cross(m, mxh)));
}

}  // namespace detail

/// One Heun step from t to t + dt; the same noise increment feeds predictor and corrector.
template <Schedule S, class Rng>
ClassicalSpin langevin_step(const ClassicalSpin& spin, double t, const LangevinParams& lp, const S& sched, Rng& rng) {
    Vec3 w{0.0, 0.0, 0.0};
    if (const double var = lp.noise_variance(); var > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double sd = std::sqrt(var * lp.dt);
        for (auto& x : w) x = sd * normal(rng);
    }
    const double g = lp.precession_factor;
    const Vec3 h0 = vec::add(vec::scale(lp.dt, effective_field(sched, t)), w);
    const Vec3 h1 = vec::add(vec::scale(lp.dt, effective_field(sched, std::min(t + lp.dt, sched.duration()))), w);
    const Vec3 k1 = detail::llg_increment(spin.m, h0, g, lp.eta);
    const Vec3 pred = vec::normalized(vec::add(spin.m, k1));
    const Vec3 k2 = detail::llg_increment(pred, h1, g, lp.eta);
    return {vec::normalized(vec::add(spin.m, vec::scale(0.5, vec::add(k1, k2))))};
}

namespace detail {

// Per-trajectory mz at a set of grid step indices (sorted ascending).
template <Schedule S, class Rng>
void record_mz(const LangevinParams& lp, const S& sched, const std::vector<long long>& steps, Rng& rng,
               std::vector<double>& out) {
    out.assign(steps.size(), 0.0);
    ClassicalSpin spin = classical_initial_spin(sched);
    long long k = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (; k < steps[i]; ++k) spin = langevin_step(spin, lp.grid_time(k), lp, sched, rng);
        out[i] = spin.m[2];
    }
}

struct StatsTable {
    std::vector<RunningStats> s;

    void merge(const StatsTable& o) {
        if (s.empty()) s.resize(o.s.size());
        for (std::size_t i = 0; i < o.s.size(); ++i) s[i].merge(o.s[i]);
    }
};

inline constexpr std::uint64_t kTagClassical = 0x636c6173ULL;

template <Schedule S>
void require_classical_time(const LangevinParams& lp, const S& sched, double t, const char* what) {
    require_in_domain(sched, t, what);
    if (lp.grid_time(lp.step_index(t)) > sched.duration() * (1.0 + 1e-12)) {
        throw DomainError(std::string(what) + ": time rounds past the end of the schedule");
    }
}

}  // namespace detail

/// Mean and stderr of mz(t_i) mz(t_j), trajectories starting from classical_initial_spin.
template <Schedule S>
CorrelatorEstimate classical_correlator(double t_i, double t_j, const LangevinParams& lp, const S& sched,
                                        const Parallelism& par = {}) {
    lp.validate();
    detail::require_classical_time(lp, sched, t_i, "classical_correlator");
    detail::require_classical_time(lp, sched, t_j, "classical_correlator");
    if (t_j < t_i) throw DomainError("classical_correlator: t_j < t_i");
    const std::vector<long long> steps{lp.step_index(t_i), lp.step_index(t_j)};
    const std::uint64_t id = experiment_id({detail::kTagClassical, static_cast<std::uint64_t>(steps[0]),
                                            static_cast<std::uint64_t>(steps[1])});
    const auto st = ordered_reduce<StatsBundle<1>>(lp.n_traj, par, [&](std::size_t i, StatsBundle<1>& acc) {
        TrajectoryEngine rng(trajectory_seed(lp.master_seed, id, i));
        std::vector<double> mz;
        detail::record_mz(lp, sched, steps, rng, mz);
        acc[0].add(mz[0] * mz[1]);
    });
    return {st[0].mean(), st[0].stderr_mean(), st[0].count(), lp.grid_time(steps[0]), lp.grid_time(steps[1])};
}

/// Classical K3 sweep with t1 = 0, t2 = tau, t3 = 2 tau. One ensemble records
/// mz at every grid time, so all tau points share trajectories; the K3
/// standard errors come from the per-trajectory K3 samples and therefore
/// include the covariance between correlators.
template <Schedule S>
std::vector<LgiPoint> classical_lgi_sweep(const LangevinParams& lp, const S& sched, const std::vector<double>& tau_grid,
                                          const Parallelism& par = {}) {
    lp.validate();
    std::vector<long long> steps;
    std::vector<std::array<std::size_t, 2>> slot;  // (tau, 2 tau) positions in `steps`
    for (double tau : tau_grid) {
        if (!(tau >= 0.0)) throw DomainError("classical_lgi_sweep: tau must be >= 0");
        detail::require_classical_time(lp, sched, 2.0 * lp.grid_time(lp.step_index(tau)), "classical_lgi_sweep");
        const long long k = lp.step_index(tau);
        steps.push_back(k);
        steps.push_back(2 * k);
    }
    std::vector<long long> uniq = steps;
    uniq.push_back(0);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const auto pos = [&](long long k) {
        return static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), k) - uniq.begin());
    };
    for (std::size_t i = 0; i < tau_grid.size(); ++i) slot.push_back({pos(steps[2 * i]), pos(steps[2 * i + 1])});

    const std::size_t n_tau = tau_grid.size();
    const std::uint64_t id = experiment_id({detail::kTagClassical, detail::kTagLgi});
    const auto table = ordered_reduce<detail::StatsTable>(lp.n_traj, par, [&](std::size_t i, detail::StatsTable& acc) {
        if (acc.s.empty()) acc.s.resize(6 * n_tau);
        TrajectoryEngine rng(trajectory_seed(lp.master_seed, id, i));
        std::vector<double> mz;
        detail::record_mz(lp, sched, uniq, rng, mz);
        const double m1 = mz[0];
        for (std::size_t j = 0; j < n_tau; ++j) {
            const double m2 = mz[slot[j][0]];
            const double m3 = mz[slot[j][1]];
            const double c12 = m1 * m2;
            const double c23 = m2 * m3;
            const double c13 = m1 * m3;
            RunningStats* row = &acc.s[6 * j];
            row[0].add(c12);
            row[1].add(c23);
            row[2].add(c13);
            for (std::size_t v = 0; v < 3; ++v) row[3 + v].add(k3(c12, c23, c13, kK3Variants[v]));
        }
    });

    std::vector<LgiPoint> out;
    for (std::size_t j = 0; j < n_tau; ++j) {
        const RunningStats* row = &table.s[6 * j];
        const double t2 = lp.grid_time(steps[2 * j]);
        const double t3 = lp.grid_time(steps[2 * j + 1]);
        const auto est = [&](const RunningStats& r, double ti, double tj) {
            return CorrelatorEstimate{r.mean(), r.stderr_mean(), r.count(), ti, tj};
        };
        LgiPoint p{t2, est(row[0], 0.0, t2), est(row[1], t2, t3), est(row[2], 0.0, t3), {}};
        for (std::size_t v = 0; v < 3; ++v) p.k3[v] = {kK3Variants[v], t2, row[3 + v].mean(), row[3 + v].stderr_mean()};
        out.push_back(p);
    }
    return out;
}

}  // namespace lgqa
