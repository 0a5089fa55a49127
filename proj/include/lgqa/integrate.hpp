#pragma once

// Fixed-step RK4 propagation of the master equation on a time grid of
// spacing dt. Every time argument is snapped to the nearest grid point, and
// grid times are computed as k*dt (never accumulated), so runs are
// bit-reproducible.

#include <array>
#include <cmath>
#include <string>

#include "lgqa/algebra.hpp"
#include "lgqa/bath.hpp"
#include "lgqa/model.hpp"

namespace lgqa {

enum class StepMethod { rk4 };

struct IntegratorConfig {
    double dt = 1e-3;
    StepMethod method = StepMethod::rk4;
    bool renormalize = true;

    void validate(double duration) const {
        if (!(dt > 0.0)) throw ContractViolation("IntegratorConfig: dt must be > 0");
        if (dt > duration / 100.0 * (1.0 + 1e-12)) {
            throw ContractViolation("IntegratorConfig: dt must be <= t_f/100");
        }
    }

    /// Index of the grid point nearest to t.
    [[nodiscard]] long long step_index(double t) const { return std::llround(t / dt); }
    [[nodiscard]] double grid_time(long long k) const { return static_cast<double>(k) * dt; }
    [[nodiscard]] double snap(double t) const { return grid_time(step_index(t)); }

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

namespace detail {

template <class Rhs, class State>
State rk4_step(const Rhs& f, double t, const State& y, double dt) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
    const State k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
    const State k4 = f(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <Schedule S>
void require_interval(const S& sched, double t0, double t1, const char* what) {
    require_in_domain(sched, t0, what);
    require_in_domain(sched, t1, what);
    if (t1 < t0) throw DomainError(std::string(what) + ": t1 < t0");
}

// Trace renormalization plus Hermitization; keeps rounding residue from accumulating.
inline ComplexMatrix2 tidy(const ComplexMatrix2& m, bool renormalize) {
    const double scale = renormalize ? 1.0 / (m(0, 0).real() + m(1, 1).real()) : 1.0;
    const complex c = 0.5 * scale * (m(0, 1) + std::conj(m(1, 0)));
    return {scale * m(0, 0).real(), c, std::conj(c), scale * m(1, 1).real()};
}

inline void check_positive(const ComplexMatrix2& m, double t) {
    const double lam = min_eigenvalue(m);
    if (!(lam >= -kPositivityTol)) {
        throw IntegrationError("positivity violated (min eigenvalue " + std::to_string(lam) + ")", t);
    }
}

}  // namespace detail

/// Integrates rho from t0 to t1 (both snapped to the dt grid) with a prebuilt generator.
template <Schedule S>
DensityMatrix evolve(const DensityMatrix& rho, double t0, double t1, const MasterEquation<S>& gen,
                     const IntegratorConfig& cfg) {
    const S& sched = gen.schedule();
    cfg.validate(sched.duration());
    detail::require_interval(sched, t0, t1, "evolve");
    const long long k0 = cfg.step_index(t0);
    const long long k1 = cfg.step_index(t1);
    if (k0 == k1) return rho;

    const auto f = [&gen](double t, const ComplexMatrix2& m) { return gen.rhs(t, m); };
    ComplexMatrix2 m = rho.matrix();
    for (long long k = k0; k < k1; ++k) {
        const double t = cfg.grid_time(k);
        m = detail::tidy(detail::rk4_step(f, t, m, cfg.dt), cfg.renormalize);
        detail::check_positive(m, cfg.grid_time(k + 1));
    }
    return DensityMatrix(m, cfg.renormalize ? kTraceTol : kPositivityTol);
}

template <Schedule S>
DensityMatrix evolve(const DensityMatrix& rho, double t0, double t1, const S& sched, const BathParams& bp,
                     const IntegratorConfig& cfg) {
    return evolve(rho, t0, t1, MasterEquation<S>(sched, bp), cfg);
}

/// Schrodinger-equation fast path for alpha = 0.
template <Schedule S>
Ket evolve_unitary(const Ket& psi, double t0, double t1, const S& sched, const IntegratorConfig& cfg) {
    cfg.validate(sched.duration());
    detail::require_interval(sched, t0, t1, "evolve_unitary");
    const long long k0 = cfg.step_index(t0);
    const long long k1 = cfg.step_index(t1);
    if (k0 == k1) return psi;

    static const complex minus_i{0.0, -1.0};
    const auto f = [&sched](double t, const Ket& k) { return minus_i * (hamiltonian(sched, t) * k); };
    Ket k = psi;
    for (long long j = k0; j < k1; ++j) {
        k = detail::rk4_step(f, cfg.grid_time(j), k, cfg.dt);
        if (cfg.renormalize) k = k.normalized();
    }
    return k;
}

/// Linear propagator rho(t0) -> rho(t1) produced by the same RK4 stepper,
/// stored as the images of the four matrix units E_ij.
class TransferMap {
public:
    TransferMap() {
        images_[0] = {1.0, 0.0, 0.0, 0.0};
        images_[1] = {0.0, 1.0, 0.0, 0.0};
        images_[2] = {0.0, 0.0, 1.0, 0.0};
        images_[3] = {0.0, 0.0, 0.0, 1.0};
    }
    explicit TransferMap(const std::array<ComplexMatrix2, 4>& images) : images_(images) {}

    [[nodiscard]] ComplexMatrix2 apply(const ComplexMatrix2& m) const {
        ComplexMatrix2 out;
        for (std::size_t i = 0; i < 4; ++i) out += m.a[i] * images_[i];
        return out;
    }

    /// Applies the map and validates the image as a density matrix; the trace is
    /// renormalized and positivity checked against the stepper tolerance.
    [[nodiscard]] DensityMatrix apply(const DensityMatrix& rho, double t_end) const {
        const ComplexMatrix2 m = detail::tidy(apply(rho.matrix()), true);
        detail::check_positive(m, t_end);
        return DensityMatrix(m);
    }

    [[nodiscard]] const std::array<ComplexMatrix2, 4>& images() const noexcept { return images_; }

private:
    std::array<ComplexMatrix2, 4> images_;
};

template <Schedule S>
TransferMap transfer_map(double t0, double t1, const MasterEquation<S>& gen, const IntegratorConfig& cfg) {
    const S& sched = gen.schedule();
    cfg.validate(sched.duration());
    detail::require_interval(sched, t0, t1, "transfer_map");
    const long long k0 = cfg.step_index(t0);
    const long long k1 = cfg.step_index(t1);
    TransferMap id;
    std::array<ComplexMatrix2, 4> units = id.images();
    const auto f = [&gen](double t, const ComplexMatrix2& m) { return gen.rhs(t, m); };
    for (long long k = k0; k < k1; ++k) {
        const double t = cfg.grid_time(k);
        for (auto& u : units) u = detail::rk4_step(f, t, u, cfg.dt);
    }
    return TransferMap(units);
}

}  // namespace lgqa
