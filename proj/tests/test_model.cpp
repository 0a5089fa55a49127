#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lgqa/integrate.hpp"
#include "lgqa/model.hpp"
#include "support/oracles.hpp"

using namespace lgqa;

TEST(Model, HamiltonianEndpointsAndMidpoint) {
    const AnnealSchedule s;
    EXPECT_EQ(max_abs_diff(hamiltonian(s, 0.0), pauli::x() * 0.5), 0.0);
    EXPECT_EQ(max_abs_diff(hamiltonian(s, 14.0), pauli::z() * 0.5), 0.0);
    EXPECT_LT(max_abs_diff(hamiltonian(s, 7.0), pauli::x() * 0.25 + pauli::z() * 0.25), 1e-16);
    EXPECT_NEAR(spectral_gap(s, 7.0), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Model, HamiltonianDomain) {
    const AnnealSchedule s;
    EXPECT_THROW((void)hamiltonian(s, -0.1), DomainError);
    EXPECT_THROW((void)hamiltonian(s, 14.1), DomainError);
}

TEST(Model, HamiltonianTracelessHermitianAndGapClosedForm) {
    const AnnealSchedule s{1.3, 0.7, 9.0};
    for (int k = 0; k <= 90; ++k) {
        const double t = 0.1 * k;
        const ComplexMatrix2 h = hamiltonian(s, t);
        EXPECT_TRUE(is_hermitian(h));
        EXPECT_NEAR(std::abs(h.trace()), 0.0, 1e-15);
        const double u = t / 9.0;
        EXPECT_NEAR(spectral_gap(s, t), std::hypot((1 - u) * 1.3, u * 0.7), 1e-12);
    }
}

TEST(Model, EigensystemEndpoints) {
    const AnnealSchedule s;
    const auto e0 = eigensystem(s, 0.0);
    EXPECT_NEAR(e0.e0, -0.5, 1e-15);
    EXPECT_NEAR(e0.v0.up.real(), M_SQRT1_2, 1e-15);
    EXPECT_NEAR(e0.v0.down.real(), -M_SQRT1_2, 1e-15);
    const auto e1 = eigensystem(s, 14.0);
    EXPECT_NEAR(e1.e0, -0.5, 1e-15);
    EXPECT_NEAR(std::abs(e1.v0.up), 0.0, 1e-15);
    EXPECT_NEAR(e1.v0.down.real(), 1.0, 1e-15);
}

TEST(Model, EigenvectorsSolveTheEigenproblemWithFixedPhase) {
    const AnnealSchedule s;
    for (int k = 0; k <= 140; ++k) {
        const double t = 0.1 * k;
        const auto es = eigensystem(s, t);
        const ComplexMatrix2 h = hamiltonian(s, t);
        for (const auto& [v, e] : {std::pair{es.v0, es.e0}, std::pair{es.v1, es.e1}}) {
            EXPECT_NEAR(v.norm(), 1.0, 1e-14);
            const Ket hv = h * v;
            EXPECT_NEAR(std::abs(hv.up - e * v.up), 0.0, 1e-14);
            EXPECT_NEAR(std::abs(hv.down - e * v.down), 0.0, 1e-14);
            const complex big = std::abs(v.up) >= std::abs(v.down) - 1e-12 ? v.up : v.down;
            EXPECT_GT(big.real(), 0.0);
            EXPECT_EQ(big.imag(), 0.0);
        }
        EXPECT_LE(es.e0, es.e1);
        EXPECT_NEAR(std::abs(inner(es.v0, es.v1)), 0.0, 1e-14);
    }
}

TEST(Model, InitialState) {
    const DensityMatrix rho = initial_state(AnnealSchedule{});
    EXPECT_NEAR(rho.p_up(), 0.5, 1e-15);
    EXPECT_NEAR(rho.coherence().real(), -0.5, 1e-15);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
    EXPECT_NEAR(expectation(rho, pauli::z()), 0.0, 1e-15);
    EXPECT_NEAR(expectation(rho, pauli::x()), -1.0, 1e-15);
}

TEST(Model, ResidualEnergyExamples) {
    const AnnealSchedule s;
    EXPECT_NEAR(residual_energy(DensityMatrix::diagonal(0, 1), s), 0.0, 1e-15);
    EXPECT_NEAR(residual_energy(DensityMatrix::diagonal(1, 0), s), 1.0, 1e-15);
    EXPECT_NEAR(residual_energy(DensityMatrix{}, s), 0.5, 1e-15);
}

TEST(Model, FidelityExamples) {
    const AnnealSchedule s;
    EXPECT_NEAR(fidelity(DensityMatrix::diagonal(0, 1), s, 14.0), 1.0, 1e-15);
    for (double t : {0.0, 3.3, 7.0, 14.0}) EXPECT_NEAR(fidelity(DensityMatrix{}, s, t), 0.5, 1e-15);
}

TEST(Model, ResidualEnergyNonNegativeAndFidelityComplement) {
    std::mt19937_64 rng(3);
    const AnnealSchedule s;
    for (int i = 0; i < 500; ++i) {
        const DensityMatrix rho = oracle::random_density(rng);
        EXPECT_GE(residual_energy(rho, s), -1e-10);
        const auto es = eigensystem(s, 14.0);
        const double excited = inner(es.v1, rho.matrix() * es.v1).real();
        EXPECT_NEAR(fidelity(rho, s, 14.0) + excited, 1.0, 1e-12);
    }
}

TEST(Model, UnitaryFidelityNearPaperAnchor) {
    const AnnealSchedule s;
    const Ket psi = evolve_unitary(eigensystem(s, 0.0).v0, 0.0, 14.0, s, IntegratorConfig{});
    EXPECT_NEAR(fidelity(DensityMatrix::pure(psi), s, 14.0), 0.999, 0.001);
}
