#pragma once

// Linear annealing schedule H(s) = (1-s) Gx/2 sigma_x + s Gz/2 sigma_z and
// the closed-form instantaneous eigensystem derived from it.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <utility>

#include "lgqa/algebra.hpp"

namespace lgqa {

/// Real transverse-field decomposition H = hx sigma_x + hz sigma_z.
struct FieldComponents {
    double hx = 0.0;
    double hz = 0.0;
};

/// Anything that provides a real {sigma_x, sigma_z} field on [0, duration()].
template <class S>
concept Schedule = requires(const S& s, double t) {
    { s.field(t) } -> std::same_as<FieldComponents>;
    { s.duration() } -> std::convertible_to<double>;
    { s.gap_bounds() } -> std::same_as<std::pair<double, double>>;
};

struct AnnealSchedule {
    double gamma_x = 1.0;
    double gamma_z = 1.0;
    double t_f = 14.0;

    void validate() const {
        if (!(gamma_x > 0.0)) throw ContractViolation("AnnealSchedule: gamma_x must be > 0");
        if (!(gamma_z > 0.0)) throw ContractViolation("AnnealSchedule: gamma_z must be > 0");
        if (!(t_f > 0.0)) throw ContractViolation("AnnealSchedule: t_f must be > 0");
    }

    [[nodiscard]] double duration() const { return t_f; }

    [[nodiscard]] FieldComponents field(double t) const {
        const double s = std::clamp(t / t_f, 0.0, 1.0);
        return {(1.0 - s) * 0.5 * gamma_x, s * 0.5 * gamma_z};
    }

    /// Range of E1 - E0 over the sweep; the minimum sits at s = Gx^2 / (Gx^2 + Gz^2).
    [[nodiscard]] std::pair<double, double> gap_bounds() const {
        return {gamma_x * gamma_z / std::hypot(gamma_x, gamma_z), std::max(gamma_x, gamma_z)};
    }

    friend bool operator==(const AnnealSchedule&, const AnnealSchedule&) = default;
};

/// The schedule held fixed at one value of s for `horizon` time units.
/// Used for equilibrium and Rabi-type checks.
struct FrozenSchedule {
    AnnealSchedule base;
    double s = 0.0;
    double horizon = 14.0;

    void validate() const {
        base.validate();
        if (!(s >= 0.0 && s <= 1.0)) throw ContractViolation("FrozenSchedule: s must lie in [0, 1]");
        if (!(horizon > 0.0)) throw ContractViolation("FrozenSchedule: horizon must be > 0");
    }

    [[nodiscard]] double duration() const { return horizon; }
    [[nodiscard]] FieldComponents field(double /*t*/) const { return base.field(s * base.t_f); }
    [[nodiscard]] std::pair<double, double> gap_bounds() const {
        const auto f = field(0.0);
        const double g = 2.0 * std::hypot(f.hx, f.hz);
        return {g, g};
    }

    friend bool operator==(const FrozenSchedule&, const FrozenSchedule&) = default;
};

namespace detail {
inline constexpr double kTimeSlack = 1e-9;

template <Schedule S>
void require_in_domain(const S& sched, double t, const char* what) {
    const double T = sched.duration();
    const double slack = kTimeSlack * std::max(1.0, T);
    if (!(t >= -slack && t <= T + slack)) {
        throw DomainError(std::string(what) + ": t=" + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
    }
}

// Fixes the global sign so the larger-magnitude component is positive; exact
// ties (within rounding) resolve to the first component.
inline Ket fix_phase(double a, double b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    const bool use_first = ma >= mb || std::abs(ma - mb) <= 1e-12 * std::max(ma, mb);
    const double pivot = use_first ? a : b;
    if (pivot < 0.0) {
        a = -a;
        b = -b;
    }
    return {a, b};
}
}  // namespace detail

template <Schedule S>
ComplexMatrix2 hamiltonian(const S& sched, double t) {
    detail::require_in_domain(sched, t, "hamiltonian");
    const auto f = sched.field(t);
    return {f.hz, f.hx, f.hx, -f.hz};
}

struct Eigensystem {
    double e0 = 0.0;
    double e1 = 0.0;
    Ket v0;
    Ket v1;

    [[nodiscard]] double gap() const { return e1 - e0; }
};

/// Closed-form diagonalization of a real field; E0 <= E1.
inline Eigensystem eigensystem(FieldComponents f) {
    const double r = std::hypot(f.hx, f.hz);
    // Both (hx, -(r+hz)) and (r-hz, -hx) are ground vectors; take the better conditioned one.
    double a = 0.0;
    double b = 0.0;
    if (r == 0.0) {
        a = 0.0;
        b = 1.0;
    } else if (f.hz >= 0.0) {
        a = f.hx;
        b = -(r + f.hz);
    } else {
        a = r - f.hz;
        b = -f.hx;
    }
    const double n = std::hypot(a, b);
    a /= n;
    b /= n;
    return {-r, r, detail::fix_phase(a, b), detail::fix_phase(-b, a)};
}

template <Schedule S>
Eigensystem eigensystem(const S& sched, double t) {
    detail::require_in_domain(sched, t, "eigensystem");
    return eigensystem(sched.field(t));
}

template <Schedule S>
double spectral_gap(const S& sched, double t) {
    return eigensystem(sched, t).gap();
}

/// Pure ground state of the schedule at t = 0.
template <Schedule S>
DensityMatrix initial_state(const S& sched) {
    return DensityMatrix::pure(eigensystem(sched, 0.0).v0);
}

/// Tr[rho H(t_f)] - E0(t_f).
template <Schedule S>
double residual_energy(const DensityMatrix& rho, const S& sched) {
    const double T = sched.duration();
    return expectation(rho, hamiltonian(sched, T)) - eigensystem(sched, T).e0;
}

/// Population of the instantaneous ground state, <v0(t)|rho|v0(t)>.
template <Schedule S>
double fidelity(const DensityMatrix& rho, const S& sched, double t) {
    const Ket v0 = eigensystem(sched, t).v0;
    return inner(v0, rho.matrix() * v0).real();
}

}  // namespace lgqa
