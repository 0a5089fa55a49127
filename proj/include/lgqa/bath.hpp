#pragma once

// Ohmic bath coupled through sigma_z, treated in the adiabatic weak-coupling
// (secular) limit: KMS rates, principal-value Lamb shift, jump operators in
// the instantaneous eigenbasis and the Lindblad right-hand side.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "lgqa/algebra.hpp"
#include "lgqa/model.hpp"

namespace lgqa {

struct BathParams {
    double alpha = 0.0;
    double beta = 10.0;
    double omega_c = 10.0;
    bool lamb_shift = true;

    void validate() const {
        if (!(alpha >= 0.0)) throw ContractViolation("BathParams: alpha must be >= 0");
        if (!(beta > 0.0)) throw ContractViolation("BathParams: beta must be > 0");
        if (!(omega_c > 0.0)) throw ContractViolation("BathParams: omega_c must be > 0");
    }

    friend bool operator==(const BathParams&, const BathParams&) = default;
};

/// gamma(w) = 2 pi alpha w exp(-|w|/wc) / (1 - exp(-beta w)), gamma(0) = 2 pi alpha / beta.
inline double rate_gamma(double omega, const BathParams& bp) {
    if (bp.alpha == 0.0) return 0.0;
    const double two_pi_alpha = 2.0 * std::numbers::pi * bp.alpha;
    if (omega == 0.0) return two_pi_alpha / bp.beta;
    // -expm1(-beta w) overflows to -inf for very negative w; the quotient then is +0.
    return two_pi_alpha * omega * std::exp(-std::abs(omega) / bp.omega_c) / -std::expm1(-bp.beta * omega);
}

struct LambShiftQuadrature {
    /// Total Gauss-Legendre node budget across all panels.
    int nodes = 4096;
    /// Pole-window half-width and integration half-range, in units of omega_c.
    double window = 1e-6;
    double range = 20.0;
};

namespace detail {

inline constexpr int kPanelOrder = 16;

// Integrates f over [p, p + len] (len may be negative) with panels graded
// geometrically toward the anchor p.
template <class F>
double graded_integral(const F& f, double p, double len, int panels) {
    using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;
    if (len == 0.0) return 0.0;
    const double finest = 1e-8;
    const double q = std::pow(finest, 1.0 / (panels - 1));
    double sum = 0.0;
    double lo = 0.0;
    for (int k = 1; k <= panels; ++k) {
        const double hi = std::pow(q, panels - k);
        const double a = p + len * lo;
        const double b = p + len * hi;
        sum += (len > 0.0) ? Rule::integrate(f, a, b) : -Rule::integrate(f, b, a);
        lo = hi;
    }
    return sum;
}

}  // namespace detail

/// S(w) = (1/2pi) PV int gamma(w') / (w - w') dw' over [-range wc, range wc].
///
/// The pole is handled by subtracting gamma(w) (whose PV integral is a closed
/// form log) and excluding a symmetric window of half-width window*wc around
/// it; the remaining integrand is smooth. Panels are graded toward the pole and
/// toward w' = 0, where gamma has a kink.
inline double lamb_shift_S(double omega, const BathParams& bp, const LambShiftQuadrature& quad = {}) {
    if (!bp.lamb_shift || bp.alpha == 0.0) return 0.0;
    const double L = quad.range * bp.omega_c;
    const double delta = quad.window * bp.omega_c;
    if (!(std::abs(omega) + delta < L)) throw ContractViolation("lamb_shift_S: |omega| outside quadrature range");

    const double g_pole = rate_gamma(omega, bp);
    const auto integrand = [&](double x) { return (rate_gamma(x, bp) - g_pole) / (omega - x); };

    // Segments between special points; each is split in half and both halves graded
    // toward their special endpoint.
    std::vector<std::pair<double, double>> segments;
    if (omega == 0.0) {
        segments = {{-L, -delta}, {delta, L}};
    } else if (omega > 0.0) {
        segments = {{-L, 0.0}, {0.0, omega - delta}, {omega + delta, L}};
    } else {
        segments = {{-L, omega - delta}, {omega + delta, 0.0}, {0.0, L}};
    }
    const int halves = 2 * static_cast<int>(segments.size());
    const int panels = std::max(4, quad.nodes / (detail::kPanelOrder * halves));

    double pv = 0.0;
    for (const auto& [a, b] : segments) {
        const double mid = 0.5 * (a + b);
        pv += detail::graded_integral(integrand, a, mid - a, panels);
        pv += detail::graded_integral(integrand, b, mid - b, panels) * -1.0;
    }
    // PV int_{-L}^{L} dx / (w - x) = log((L + w) / (L - w)).
    pv += g_pole * std::log((L + omega) / (L - omega));
    return pv / (2.0 * std::numbers::pi);
}

/// One secular jump channel at Bohr frequency `omega`.
struct LindbladTerm {
    double omega = 0.0;
    ComplexMatrix2 op;
    double rate = 0.0;
    double shift = 0.0;
};

using LindbladTerms = std::array<LindbladTerm, 3>;

namespace detail {

inline ComplexMatrix2 outer(const Ket& u, const Ket& w) {
    return {u.up * std::conj(w.up), u.up * std::conj(w.down), u.down * std::conj(w.up), u.down * std::conj(w.down)};
}

// L_w = sum_{e_b - e_a = w} <a|sigma_z|b> |a><b|, ordered {-gap, 0, +gap}.
inline std::array<ComplexMatrix2, 3> jump_operators(const Eigensystem& es) {
    const ComplexMatrix2 sz = pauli::z();
    const complex c00 = inner(es.v0, sz * es.v0);
    const complex c11 = inner(es.v1, sz * es.v1);
    const complex c01 = inner(es.v0, sz * es.v1);
    const complex c10 = inner(es.v1, sz * es.v0);
    return {c10 * outer(es.v1, es.v0), c00 * outer(es.v0, es.v0) + c11 * outer(es.v1, es.v1),
            c01 * outer(es.v0, es.v1)};
}

struct ChannelCoefficients {
    std::array<double, 3> rate{};
    std::array<double, 3> shift{};
};

inline LindbladTerms assemble_terms(const Eigensystem& es, const ChannelCoefficients& cc) {
    const auto ops = jump_operators(es);
    const double g = es.gap();
    const std::array<double, 3> omegas{-g, 0.0, g};
    LindbladTerms out;
    for (std::size_t k = 0; k < 3; ++k) out[k] = {omegas[k], ops[k], cc.rate[k], cc.shift[k]};
    return out;
}

inline ComplexMatrix2 lindblad_rhs(const ComplexMatrix2& h, const LindbladTerms& terms, const ComplexMatrix2& rho,
                                   bool dissipative) {
    static const complex minus_i{0.0, -1.0};
    if (!dissipative) return minus_i * commutator(h, rho);
    ComplexMatrix2 h_eff = h;
    ComplexMatrix2 d;
    for (const auto& term : terms) {
        const ComplexMatrix2 ldag = term.op.adjoint();
        const ComplexMatrix2 ldl = ldag * term.op;
        h_eff += term.shift * ldl;
        d += term.rate * (term.op * rho * ldag - 0.5 * anticommutator(ldl, rho));
    }
    return minus_i * commutator(h_eff, rho) + d;
}

}  // namespace detail

/// The three secular channels at time t, with rates and directly integrated shifts.
template <Schedule S>
LindbladTerms lindblad_terms(const S& sched, double t, const BathParams& bp, const LambShiftQuadrature& quad = {}) {
    const Eigensystem es = eigensystem(sched, t);
    const double g = es.gap();
    detail::ChannelCoefficients cc;
    cc.rate = {rate_gamma(-g, bp), rate_gamma(0.0, bp), rate_gamma(g, bp)};
    cc.shift = {lamb_shift_S(-g, bp, quad), lamb_shift_S(0.0, bp, quad), lamb_shift_S(g, bp, quad)};
    return detail::assemble_terms(es, cc);
}

/// -i[H + H_LS, rho] + sum_w gamma(w) (L rho L^dag - 1/2 {L^dag L, rho}), evaluated directly.
template <Schedule S>
ComplexMatrix2 master_rhs(const DensityMatrix& rho, const S& sched, double t, const BathParams& bp) {
    const ComplexMatrix2 h = hamiltonian(sched, t);
    if (bp.alpha == 0.0) return detail::lindblad_rhs(h, {}, rho.matrix(), false);
    return detail::lindblad_rhs(h, lindblad_terms(sched, t, bp), rho.matrix(), true);
}

/// Barycentric interpolant on Chebyshev-Lobatto points of [lo, hi].
class ChebyshevTable {
public:
    ChebyshevTable() = default;

    template <class F>
    ChebyshevTable(const F& f, double lo, double hi, int degree = 32) : lo_(lo), hi_(hi) {
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) {
            values_ = {f(0.5 * (lo + hi))};
            return;
        }
        nodes_.resize(static_cast<std::size_t>(degree) + 1);
        values_.resize(nodes_.size());
        for (int j = 0; j <= degree; ++j) {
            const double x = std::cos(std::numbers::pi * j / degree);
            nodes_[static_cast<std::size_t>(j)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
            values_[static_cast<std::size_t>(j)] = f(nodes_[static_cast<std::size_t>(j)]);
        }
    }

    [[nodiscard]] double operator()(double x) const {
        if (values_.size() == 1) return values_.front();
        double num = 0.0;
        double den = 0.0;
        const std::size_t n = nodes_.size() - 1;
        for (std::size_t j = 0; j <= n; ++j) {
            const double dx = x - nodes_[j];
            if (dx == 0.0) return values_[j];
            double w = (j % 2 == 0) ? 1.0 : -1.0;
            if (j == 0 || j == n) w *= 0.5;
            w /= dx;
            num += w * values_[j];
            den += w;
        }
        return num / den;
    }

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

/// Master-equation generator for one (schedule, bath) pair. The Lamb shift
/// S(+-gap) is tabulated once over the schedule's gap range; the object is
/// immutable after construction and safe to share between threads.
template <Schedule S>
class MasterEquation {
public:
    MasterEquation(S sched, BathParams bp, const LambShiftQuadrature& quad = {})
        : sched_(std::move(sched)), bath_(bp) {
        bath_.validate();
        if (!dissipative()) return;
        const auto [lo, hi] = sched_.gap_bounds();
        if (bath_.lamb_shift) {
            shift_pos_ = ChebyshevTable([&](double w) { return lamb_shift_S(w, bath_, quad); }, lo, hi);
            shift_neg_ = ChebyshevTable([&](double w) { return lamb_shift_S(-w, bath_, quad); }, lo, hi);
            shift_zero_ = lamb_shift_S(0.0, bath_, quad);
        }
        rate_zero_ = rate_gamma(0.0, bath_);
    }

    [[nodiscard]] const S& schedule() const noexcept { return sched_; }
    [[nodiscard]] const BathParams& bath() const noexcept { return bath_; }
    [[nodiscard]] bool dissipative() const noexcept { return bath_.alpha > 0.0; }

    [[nodiscard]] LindbladTerms terms(double t) const {
        const Eigensystem es = eigensystem(sched_, t);
        return detail::assemble_terms(es, coefficients(es.gap()));
    }

    [[nodiscard]] ComplexMatrix2 rhs(double t, const ComplexMatrix2& rho) const {
        const ComplexMatrix2 h = hamiltonian(sched_, t);
        if (!dissipative()) return detail::lindblad_rhs(h, {}, rho, false);
        return detail::lindblad_rhs(h, terms(t), rho, true);
    }

private:
    [[nodiscard]] detail::ChannelCoefficients coefficients(double gap) const {
        detail::ChannelCoefficients cc;
        cc.rate = {rate_gamma(-gap, bath_), rate_zero_, rate_gamma(gap, bath_)};
        if (bath_.lamb_shift) cc.shift = {shift_neg_(gap), shift_zero_, shift_pos_(gap)};
        return cc;
    }

    S sched_;
    BathParams bath_;
    ChebyshevTable shift_pos_;
    ChebyshevTable shift_neg_;
    double shift_zero_ = 0.0;
    double rate_zero_ = 0.0;
};

/// Gibbs state exp(-beta H)/Z of a fixed field, in closed form.
inline DensityMatrix gibbs_state(FieldComponents f, double beta) {
    const Eigensystem es = eigensystem(f);
    // Populations of (E0, E1) = (-r, r): weights 1 and exp(-2 beta r) after factoring exp(beta r).
    const double w1 = std::exp(-beta * es.gap());
    const double p0 = 1.0 / (1.0 + w1);
    const double p1 = w1 / (1.0 + w1);
    return DensityMatrix(p0 * es.v0.projector() + p1 * es.v1.projector());
}

}  // namespace lgqa
