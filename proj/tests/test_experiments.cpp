#include <bit>
#include <cmath>

#include <gtest/gtest.h>

#include "lgqa/experiments.hpp"
#include "support/oracles.hpp"

using namespace lgqa;

namespace {

constexpr double kUnitaryResidual = 6.8131e-4;

ExperimentConfig config(double alpha = 0.0, MeasurementMode mode = MeasurementMode::weak, std::size_t n = 100000) {
    ExperimentConfig ec;
    ec.bath.alpha = alpha;
    ec.mode = mode;
    ec.n_traj = n;
    return ec;
}

}  // namespace

TEST(Experiments, K3Examples) {
    EXPECT_EQ(k3(1, 1, 1, K3Variant::a), 1);
    EXPECT_EQ(k3(1, 1, 1, K3Variant::b), -3);
    EXPECT_EQ(k3(-1, -1, 1, K3Variant::b), 1);
    EXPECT_EQ(k3(0.1, 0.2, 0.4, K3Variant::c), 0.5);
}

TEST(Experiments, K3BoundsUnderEveryDeterministicAssignment) {
    for (int q1 : {-1, 1})
        for (int q2 : {-1, 1})
            for (int q3 : {-1, 1})
                for (K3Variant v : kK3Variants) {
                    const double k = k3(q1 * q2, q2 * q3, q1 * q3, v);
                    EXPECT_GE(k, -3.0);
                    EXPECT_LE(k, 1.0);
                }
}

TEST(Experiments, ProjectiveEqualTimesIsOne) {
    const auto ec = config();
    for (double t : {0.0, 3.0, 14.0}) EXPECT_NEAR(correlator_projective(t, t, ec).mean, 1.0, 1e-15);
    const auto diss = config(1e-2);
    EXPECT_NEAR(correlator_projective(5.0, 5.0, diss).mean, 1.0, 1e-15);
}

TEST(Experiments, ProjectiveMatchesHeisenbergOracle) {
    const auto ec = config();
    const MasterEquation<AnnealSchedule> gen(ec.sched, ec.bath);
    for (auto [ti, tj] : {std::pair{0.0, 7.0}, {0.0, 14.0}, {2.5, 9.0}, {7.0, 14.0}, {1.0, 1.5}}) {
        const double c = correlator_projective(ti, tj, ec, gen).mean;
        EXPECT_NEAR(c, oracle::heisenberg_correlator(ti, tj, ec.sched, ec.integ), 1e-8) << ti << "," << tj;
    }
}

TEST(Experiments, ProjectiveEstimateIsDeterministic) {
    const auto est = correlator_projective(0.0, 14.0, config(1e-3));
    EXPECT_EQ(est.stderr_, 0.0);
    EXPECT_EQ(est.n, 0u);
    EXPECT_EQ(est.t_j, 14.0);
}

TEST(Experiments, WeakAgreesWithProjectiveOverFullSweep) {
    const auto ec = config();
    const auto weak = correlator_weak(0.0, 14.0, ec);
    const auto proj = correlator_projective(0.0, 14.0, ec);
    EXPECT_EQ(weak.n, 100000u);
    EXPECT_NEAR(weak.mean, proj.mean, 3 * weak.stderr_);
}

TEST(Experiments, WeakProductMomentsForFrozenDownState) {
    BasicExperimentConfig<FrozenSchedule> ec;
    ec.sched = FrozenSchedule{AnnealSchedule{}, 1.0, 14.0};
    ec.n_traj = 100000;
    const auto est = correlator_weak(2.0, 9.0, ec);
    const double D = ec.meas.D;
    EXPECT_NEAR(est.mean, 1.0, 4 * est.stderr_);
    EXPECT_NEAR(est.stderr_, std::sqrt(2 * D + D * D) / std::sqrt(1e5), 0.02 * est.stderr_);
}

TEST(Experiments, WeakSameTimeReadoutsAtStart) {
    const auto est = correlator_weak(0.0, 0.0, config());
    EXPECT_NEAR(est.mean, 1.0, 4 * est.stderr_);
}

TEST(Experiments, WeakIsBitExactAcrossWorkers) {
    const auto ec = config(1e-3, MeasurementMode::weak, 20000);
    const auto one = correlator_weak(1.0, 6.0, ec, Parallelism{1});
    for (unsigned w : {2u, 8u}) {
        const auto other = correlator_weak(1.0, 6.0, ec, Parallelism{w});
        EXPECT_EQ(std::bit_cast<std::uint64_t>(one.mean), std::bit_cast<std::uint64_t>(other.mean));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(one.stderr_), std::bit_cast<std::uint64_t>(other.stderr_));
    }
}

TEST(Experiments, MeanReadoutEqualsSigmaZ) {
    const auto ec = config();
    const DensityMatrix rho = evolve(initial_state(ec.sched), 0.0, 10.0, ec.sched, ec.bath, ec.integ);
    TrajectoryEngine rng(5);
    RunningStats st;
    for (int i = 0; i < 200000; ++i) st.add(sample_readout(rho, ec.meas, rng).r);
    EXPECT_NEAR(st.mean(), expectation(nonselective_weak(rho, ec.meas), pauli::z()), 4 * st.stderr_mean());
}

TEST(Experiments, LgiSweepAtZeroDelay) {
    auto ec = config(0.0, MeasurementMode::projective);
    ec.tau_grid = {0.0};
    const auto pts = lgi_sweep(ec);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].c12.mean, 1.0, 1e-15);
    EXPECT_NEAR(pts[0].c13.mean, 1.0, 1e-15);
    EXPECT_NEAR(pts[0].variant(K3Variant::a).value, 1.0, 1e-15);
}

TEST(Experiments, ProjectiveViolationPattern) {
    auto ec = config(0.0, MeasurementMode::projective);
    const auto pts = lgi_sweep(ec);
    ASSERT_EQ(pts.size(), 15u);
    EXPECT_GT(pts.back().variant(K3Variant::a).value, 1.0);
    bool b = false, c = false;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        b = b || pts[i].variant(K3Variant::b).value > 1.0;
        c = c || pts[i].variant(K3Variant::c).value > 1.0;
        for (K3Variant v : kK3Variants) EXPECT_GE(pts[i].variant(v).value, -3.0);
    }
    EXPECT_TRUE(b);
    EXPECT_TRUE(c);
}

TEST(Experiments, WeakSweepPropagatesStderr) {
    auto ec = config(0.0, MeasurementMode::weak, 5000);
    ec.tau_grid = {3.0};
    const auto p = lgi_sweep(ec).front();
    const double rss = std::sqrt(std::pow(p.c12.stderr_, 2) + std::pow(p.c23.stderr_, 2) + std::pow(p.c13.stderr_, 2));
    for (const auto& r : p.k3) EXPECT_DOUBLE_EQ(r.stderr_, rss);
    EXPECT_EQ(p.c23.t_i, 3.0);
    EXPECT_EQ(p.c23.t_j, 6.0);
}

TEST(Experiments, ConfigRejectsTauBeyondHalfSweep) {
    auto ec = config();
    ec.tau_grid = {7.5};
    EXPECT_THROW((void)lgi_sweep(ec), ContractViolation);
    ec.tau_grid = {-0.5};
    EXPECT_THROW((void)lgi_sweep(ec), ContractViolation);
    ec.tau_grid = {1.0};
    ec.n_traj = 0;
    EXPECT_THROW((void)lgi_sweep(ec), ContractViolation);
}

TEST(Experiments, ResEnergyMatchesDephasingOracle) {
    for (double alpha : {0.0, 1e-2}) {
        auto ec = config(alpha, MeasurementMode::weak, 20000);
        ec.tau_grid = {1.5, 5.0};
        const auto rows = resenergy_sweep(ec, {2.0, 20.0});
        ASSERT_EQ(rows.size(), 4u);
        for (const auto& row : rows) {
            const DensityMatrix ref = oracle::dephased_final_state(ec, row.D, row.tau, 2 * row.tau);
            EXPECT_NEAR(row.mean_state.p_up(), ref.p_up(), 4 * row.state_stderr[0]);
            EXPECT_NEAR(row.mean_state.coherence().real(), ref.coherence().real(), 4 * row.state_stderr[1]);
            EXPECT_NEAR(row.mean_state.coherence().imag(), ref.coherence().imag(), 4 * row.state_stderr[2]);
            EXPECT_NEAR(row.res_energy, residual_energy(ref, ec.sched), 4 * row.res_energy_stderr);
            EXPECT_NEAR(row.fidelity, fidelity(ref, ec.sched, 14.0), 4 * row.fidelity_stderr);
        }
    }
}

TEST(Experiments, ResEnergyRowOrder) {
    auto ec = config(0.0, MeasurementMode::weak, 100);
    ec.tau_grid = {1.0, 2.0};
    const auto rows = resenergy_sweep(ec, {5.0, 50.0});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].D, 5.0);
    EXPECT_EQ(rows[1].tau, 2.0);
    EXPECT_EQ(rows[2].D, 50.0);
}

TEST(Experiments, ProjectiveMidSweepMeasurementsAreDetrimental) {
    auto proj = config(0.0, MeasurementMode::projective);
    proj.tau_grid = {3.5};
    auto weak = config(0.0, MeasurementMode::weak, 20000);
    weak.tau_grid = {3.5};
    const auto p = resenergy_sweep(proj, {20.0}).front();
    const auto w = resenergy_sweep(weak, {20.0}).front();
    EXPECT_EQ(p.res_energy_stderr, 0.0);
    EXPECT_LT(p.fidelity, w.fidelity - 0.05);
}

TEST(Experiments, SingleAnneal) {
    const auto run = run_single_anneal(config());
    EXPECT_NEAR(run.res_energy, kUnitaryResidual, 1e-7);
    EXPECT_NEAR(run.fidelity, 0.999, 0.001);
    ASSERT_EQ(run.trace.size(), 141u);
    EXPECT_NEAR(run.trace.front().sigma_x, -1.0, 1e-15);
    EXPECT_EQ(run.trace.back().t, 14.0);
    EXPECT_NEAR(run.trace.back().sigma_z, -1.0, 2e-3);

    const auto diss = run_single_anneal(config(1e-2));
    EXPECT_GT(std::abs(diss.res_energy - run.res_energy), 1e-5);

    auto slow = config();
    slow.sched.t_f = 140.0;
    slow.tau_grid = {0.0};
    EXPECT_LT(run_single_anneal(slow).res_energy, run.res_energy);
}
