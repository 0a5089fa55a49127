#pragma once

// Two-time sigma_z correlators, third-order Leggett-Garg functions and the
// measurement-backaction sweep.
//
// Measurement times: t1 = 0, t2 = tau, t3 = 2 tau, so tau = t_f/2 puts the
// last measurement at t_f. Weak-mode correlators run exactly two readouts per
// trajectory; C12, C23 and C13 are separate families with disjoint seed
// streams.
//
// All trajectories share the deterministic evolution between measurement
// times, so it is computed once per family as a TransferMap (the RK4 stepper
// applied to the matrix units) and applied to each conditional state.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lgqa/algebra.hpp"
#include "lgqa/bath.hpp"
#include "lgqa/ensemble.hpp"
#include "lgqa/integrate.hpp"
#include "lgqa/measure.hpp"
#include "lgqa/model.hpp"

namespace lgqa {

enum class MeasurementMode { weak, projective };
enum class Dynamics { quantum, classical };

inline constexpr std::uint64_t kDefaultMasterSeed = 2019;

/// tau in {0, 0.5, ..., t_f/2}.
inline std::vector<double> default_tau_grid(double t_f = 14.0, double step = 0.5) {
    std::vector<double> g;
    const auto n = static_cast<long long>(std::llround(0.5 * t_f / step));
    for (long long k = 0; k <= n; ++k) g.push_back(static_cast<double>(k) * step);
    return g;
}

template <Schedule S = AnnealSchedule>
struct BasicExperimentConfig {
    S sched{};
    BathParams bath{};
    MeasurementParams meas{};
    IntegratorConfig integ{};
    std::size_t n_traj = 100000;
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::vector<double> tau_grid = default_tau_grid();
    MeasurementMode mode = MeasurementMode::weak;
    Dynamics dynamics = Dynamics::quantum;

    void validate() const {
        if constexpr (requires { sched.validate(); }) sched.validate();
        bath.validate();
        meas.validate();
        integ.validate(sched.duration());
        if (n_traj < 1) throw ContractViolation("ExperimentConfig: n_traj must be >= 1");
        const double half = 0.5 * sched.duration();
        for (double tau : tau_grid) {
            if (!(tau >= 0.0) || integ.snap(2.0 * tau) > sched.duration() * (1.0 + 1e-12) ||
                tau > half * (1.0 + 1e-12)) {
                throw ContractViolation("ExperimentConfig: tau=" + std::to_string(tau) + " outside [0, t_f/2]");
            }
        }
    }

    friend bool operator==(const BasicExperimentConfig&, const BasicExperimentConfig&) = default;
};

using ExperimentConfig = BasicExperimentConfig<AnnealSchedule>;

struct CorrelatorEstimate {
    double mean = 0.0;
    /// Zero for deterministic (projective) estimates.
    double stderr_ = 0.0;
    /// Trajectory count; zero for deterministic estimates.
    std::size_t n = 0;
    double t_i = 0.0;
    double t_j = 0.0;
};

enum class K3Variant { a, b, c };
inline constexpr std::array<K3Variant, 3> kK3Variants{K3Variant::a, K3Variant::b, K3Variant::c};

inline std::string_view to_string(K3Variant v) {
    switch (v) {
        case K3Variant::a: return "a";
        case K3Variant::b: return "b";
        case K3Variant::c: return "c";
    }
    throw ContractViolation("k3: unknown variant");
}

struct K3Result {
    K3Variant variant = K3Variant::a;
    double tau = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
};

/// a: C12 + C23 - C13,  b: -C12 - C23 - C13,  c: -C12 + C23 + C13.
inline double k3(double c12, double c23, double c13, K3Variant variant) {
    switch (variant) {
        case K3Variant::a: return c12 + c23 - c13;
        case K3Variant::b: return -c12 - c23 - c13;
        case K3Variant::c: return -c12 + c23 + c13;
    }
    throw ContractViolation("k3: unknown variant");
}

/// One tau point of a Leggett-Garg sweep.
struct LgiPoint {
    double tau = 0.0;
    CorrelatorEstimate c12;
    CorrelatorEstimate c23;
    CorrelatorEstimate c13;
    std::array<K3Result, 3> k3;

    [[nodiscard]] const K3Result& variant(K3Variant v) const { return k3[static_cast<std::size_t>(v)]; }
};

/// Flattens sweep points to (tau, variant) rows in grid order.
inline std::vector<K3Result> k3_results(const std::vector<LgiPoint>& points) {
    std::vector<K3Result> out;
    out.reserve(3 * points.size());
    for (const auto& p : points)
        for (const auto& r : p.k3) out.push_back(r);
    return out;
}

namespace detail {

inline constexpr std::uint64_t kTagWeak = 0x7765616bULL;
inline constexpr std::uint64_t kTagLgi = 0x6c6769ULL;
inline constexpr std::uint64_t kTagResEnergy = 0x72657365ULL;

inline LgiPoint make_point(double tau, CorrelatorEstimate c12, CorrelatorEstimate c23, CorrelatorEstimate c13) {
    LgiPoint p{tau, c12, c23, c13, {}};
    const double err = std::sqrt(c12.stderr_ * c12.stderr_ + c23.stderr_ * c23.stderr_ + c13.stderr_ * c13.stderr_);
    for (std::size_t v = 0; v < 3; ++v) {
        p.k3[v] = {kK3Variants[v], tau, k3(c12.mean, c23.mean, c13.mean, kK3Variants[v]), err};
    }
    return p;
}

inline double sigma_z_of(const DensityMatrix& rho) { return rho.p_up() - rho.p_down(); }

template <Schedule S>
void require_ordered_times(const BasicExperimentConfig<S>& ec, double t_i, double t_j, const char* what) {
    require_interval(ec.sched, t_i, t_j, what);
}

}  // namespace detail

/// sum_a a p_a <sigma_z>(t_j | a at t_i), by enumerating projective branches at t_i.
template <Schedule S>
CorrelatorEstimate correlator_projective(double t_i, double t_j, const BasicExperimentConfig<S>& ec,
                                         const MasterEquation<S>& gen) {
    detail::require_ordered_times(ec, t_i, t_j, "correlator_projective");
    const DensityMatrix rho_i = evolve(initial_state(ec.sched), 0.0, t_i, gen, ec.integ);
    double sum = 0.0;
    for (const auto& branch : projective_branches(rho_i)) {
        const DensityMatrix rho_j = evolve(branch.state, t_i, t_j, gen, ec.integ);
        sum += branch.outcome * branch.probability * detail::sigma_z_of(rho_j);
    }
    return {sum, 0.0, 0, ec.integ.snap(t_i), ec.integ.snap(t_j)};
}

template <Schedule S>
CorrelatorEstimate correlator_projective(double t_i, double t_j, const BasicExperimentConfig<S>& ec) {
    ec.validate();
    return correlator_projective(t_i, t_j, ec, MasterEquation<S>(ec.sched, ec.bath));
}

/// Mean and standard error of r_i r_j over ec.n_traj two-readout trajectories.
template <Schedule S>
CorrelatorEstimate correlator_weak(double t_i, double t_j, const BasicExperimentConfig<S>& ec,
                                   const MasterEquation<S>& gen, std::uint64_t exp_id, const Parallelism& par = {}) {
    detail::require_ordered_times(ec, t_i, t_j, "correlator_weak");
    const double ti = ec.integ.snap(t_i);
    const double tj = ec.integ.snap(t_j);
    const DensityMatrix rho_i = evolve(initial_state(ec.sched), 0.0, ti, gen, ec.integ);
    const TransferMap between = transfer_map(ti, tj, gen, ec.integ);

    const auto stats = ordered_reduce<StatsBundle<1>>(ec.n_traj, par, [&](std::size_t i, StatsBundle<1>& acc) {
        TrajectoryEngine rng(trajectory_seed(ec.master_seed, exp_id, i));
        const Readout first = sample_readout(rho_i, ec.meas, rng, ti);
        const DensityMatrix after = between.apply(weak_update(rho_i, first, ec.meas), tj);
        const Readout second = sample_readout(after, ec.meas, rng, tj);
        acc[0].add(first.r * second.r);
    });
    return {stats[0].mean(), stats[0].stderr_mean(), stats[0].count(), ti, tj};
}

template <Schedule S>
CorrelatorEstimate correlator_weak(double t_i, double t_j, const BasicExperimentConfig<S>& ec,
                                   const Parallelism& par = {}) {
    ec.validate();
    const std::uint64_t id = experiment_id(
        {detail::kTagWeak, static_cast<std::uint64_t>(ec.integ.step_index(t_i)),
         static_cast<std::uint64_t>(ec.integ.step_index(t_j))});
    return correlator_weak(t_i, t_j, ec, MasterEquation<S>(ec.sched, ec.bath), id, par);
}

/// K3 sweep over ec.tau_grid with t1 = 0, t2 = tau, t3 = 2 tau.
template <Schedule S>
std::vector<LgiPoint> lgi_sweep(const BasicExperimentConfig<S>& ec, const Parallelism& par = {}) {
    ec.validate();
    const MasterEquation<S> gen(ec.sched, ec.bath);
    std::vector<LgiPoint> out;
    out.reserve(ec.tau_grid.size());
    for (double tau : ec.tau_grid) {
        const long long k = ec.integ.step_index(tau);
        const double t2 = ec.integ.grid_time(k);
        const double t3 = ec.integ.grid_time(2 * k);
        if (ec.mode == MeasurementMode::projective) {
            out.push_back(detail::make_point(t2, correlator_projective(0.0, t2, ec, gen),
                                             correlator_projective(t2, t3, ec, gen),
                                             correlator_projective(0.0, t3, ec, gen)));
        } else {
            const auto id = [&](std::uint64_t family) {
                return experiment_id({detail::kTagLgi, family, static_cast<std::uint64_t>(k)});
            };
            out.push_back(detail::make_point(t2, correlator_weak(0.0, t2, ec, gen, id(12), par),
                                             correlator_weak(t2, t3, ec, gen, id(23), par),
                                             correlator_weak(0.0, t3, ec, gen, id(13), par)));
        }
    }
    return out;
}

/// One (D, tau) cell of the measurement-backaction sweep: statistics of the
/// trajectory-averaged final state after readouts at tau and 2 tau.
struct ResEnergyRow {
    double D = 0.0;
    double tau = 0.0;
    double res_energy = 0.0;
    double res_energy_stderr = 0.0;
    double fidelity = 0.0;
    double fidelity_stderr = 0.0;
    DensityMatrix mean_state;
    /// Standard errors of (p_up, Re <up|rho|down>, Im <up|rho|down>).
    std::array<double, 3> state_stderr{};
    std::size_t n = 0;
};

namespace detail {

template <Schedule S>
ResEnergyRow summarize_final_states(const S& sched, double D, double tau, const StatsBundle<5>& st) {
    const complex c{st[1].mean(), st[2].mean()};
    const double p_up = st[0].mean();
    ResEnergyRow row;
    row.D = D;
    row.tau = tau;
    row.mean_state = DensityMatrix::normalized({p_up, c, std::conj(c), 1.0 - p_up});
    row.res_energy = residual_energy(row.mean_state, sched);
    row.fidelity = fidelity(row.mean_state, sched, sched.duration());
    row.res_energy_stderr = st[3].stderr_mean();
    row.fidelity_stderr = st[4].stderr_mean();
    row.state_stderr = {st[0].stderr_mean(), st[1].stderr_mean(), st[2].stderr_mean()};
    row.n = st[0].count();
    return row;
}

template <Schedule S>
void accumulate_final_state(StatsBundle<5>& acc, const DensityMatrix& rho, const S& sched) {
    acc[0].add(rho.p_up());
    acc[1].add(rho.coherence().real());
    acc[2].add(rho.coherence().imag());
    acc[3].add(residual_energy(rho, sched));
    acc[4].add(fidelity(rho, sched, sched.duration()));
}

}  // namespace detail

/// Residual energy and fidelity after two measurements at (tau, 2 tau), for
/// every (D, tau) in d_grid x ec.tau_grid (D outer, tau inner). Weak mode
/// averages ec.n_traj conditional trajectories; projective mode enumerates
/// branches deterministically and ignores D.
template <Schedule S>
std::vector<ResEnergyRow> resenergy_sweep(const BasicExperimentConfig<S>& ec, const std::vector<double>& d_grid,
                                          const Parallelism& par = {}) {
    ec.validate();
    const MasterEquation<S> gen(ec.sched, ec.bath);
    const double T = ec.sched.duration();

    struct TauPlan {
        double t1;
        double t2;
        long long k;
        DensityMatrix rho1;
        TransferMap first_to_second;
        TransferMap second_to_end;
    };
    std::vector<TauPlan> plans;
    for (double tau : ec.tau_grid) {
        const long long k = ec.integ.step_index(tau);
        const double t1 = ec.integ.grid_time(k);
        const double t2 = ec.integ.grid_time(2 * k);
        plans.push_back({t1, t2, k, evolve(initial_state(ec.sched), 0.0, t1, gen, ec.integ),
                         transfer_map(t1, t2, gen, ec.integ), transfer_map(t2, T, gen, ec.integ)});
    }

    std::vector<ResEnergyRow> rows;
    for (double D : d_grid) {
        MeasurementParams mp = ec.meas;
        mp.D = D;
        mp.validate();
        for (const auto& plan : plans) {
            StatsBundle<5> st;
            if (ec.mode == MeasurementMode::projective) {
                // Deterministic: accumulate each branch's final state weighted by its probability.
                DensityMatrix mean_final;
                ComplexMatrix2 sum;
                for (const auto& b1 : projective_branches(plan.rho1)) {
                    const DensityMatrix mid = plan.first_to_second.apply(b1.state, plan.t2);
                    for (const auto& b2 : projective_branches(mid)) {
                        const DensityMatrix fin = plan.second_to_end.apply(b2.state, T);
                        sum += (b1.probability * b2.probability) * fin.matrix();
                    }
                }
                mean_final = DensityMatrix::normalized(sum);
                detail::accumulate_final_state(st, mean_final, ec.sched);
            } else {
                const std::uint64_t id = experiment_id(
                    {detail::kTagResEnergy, std::bit_cast<std::uint64_t>(D), static_cast<std::uint64_t>(plan.k)});
                st = ordered_reduce<StatsBundle<5>>(ec.n_traj, par, [&](std::size_t i, StatsBundle<5>& acc) {
                    TrajectoryEngine rng(trajectory_seed(ec.master_seed, id, i));
                    const Readout r1 = sample_readout(plan.rho1, mp, rng, plan.t1);
                    const DensityMatrix mid = plan.first_to_second.apply(weak_update(plan.rho1, r1, mp), plan.t2);
                    const Readout r2 = sample_readout(mid, mp, rng, plan.t2);
                    const DensityMatrix fin = plan.second_to_end.apply(weak_update(mid, r2, mp), T);
                    detail::accumulate_final_state(acc, fin, ec.sched);
                });
            }
            rows.push_back(detail::summarize_final_states(ec.sched, D, plan.t1, st));
        }
    }
    return rows;
}

struct TracePoint {
    double t = 0.0;
    double sigma_x = 0.0;
    double sigma_z = 0.0;
    double ground_population = 0.0;
};

struct AnnealRun {
    DensityMatrix rho_final;
    double res_energy = 0.0;
    double fidelity = 0.0;
    std::vector<TracePoint> trace;
};

/// Measurement-free sweep over [0, t_f], sampling observables every `sample_every`.
template <Schedule S>
AnnealRun run_single_anneal(const BasicExperimentConfig<S>& ec, double sample_every = 0.1) {
    ec.validate();
    const MasterEquation<S> gen(ec.sched, ec.bath);
    const double T = ec.sched.duration();
    const long long k_end = ec.integ.step_index(T);
    const long long stride = std::max<long long>(1, ec.integ.step_index(sample_every));

    AnnealRun run;
    DensityMatrix rho = initial_state(ec.sched);
    const auto record = [&](long long k) {
        const double t = ec.integ.grid_time(k);
        run.trace.push_back({t, expectation(rho, pauli::x()), expectation(rho, pauli::z()), fidelity(rho, ec.sched, t)});
    };
    record(0);
    for (long long k = 0; k < k_end;) {
        const long long next = std::min(k_end, k + stride);
        rho = evolve(rho, ec.integ.grid_time(k), ec.integ.grid_time(next), gen, ec.integ);
        k = next;
        record(k);
    }
    run.rho_final = rho;
    run.res_energy = residual_energy(rho, ec.sched);
    run.fidelity = fidelity(rho, ec.sched, T);
    return run;
}

}  // namespace lgqa
