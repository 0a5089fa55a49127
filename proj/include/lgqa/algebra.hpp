#pragma once

// Closed-form complex 2x2 algebra for a single qubit.
//
// Basis convention: |up> = (1, 0), |down> = (0, 1), sigma_z = diag(+1, -1).
// Index 0 is "up", index 1 is "down" everywhere in the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "lgqa/errors.hpp"

namespace lgqa {

using complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-9;

/// Row-major complex 2x2 matrix (a00, a01, a10, a11).
struct ComplexMatrix2 {
    std::array<complex, 4> a{};

    constexpr ComplexMatrix2() = default;
    constexpr ComplexMatrix2(complex a00, complex a01, complex a10, complex a11)
        : a{a00, a01, a10, a11} {}

    constexpr complex& operator()(int row, int col) { return a[static_cast<std::size_t>(2 * row + col)]; }
    constexpr const complex& operator()(int row, int col) const {
        return a[static_cast<std::size_t>(2 * row + col)];
    }

    [[nodiscard]] complex trace() const { return a[0] + a[3]; }

    [[nodiscard]] ComplexMatrix2 adjoint() const {
        return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
    }

    ComplexMatrix2& operator+=(const ComplexMatrix2& o) {
        for (std::size_t i = 0; i < 4; ++i) a[i] += o.a[i];
        return *this;
    }
    ComplexMatrix2& operator-=(const ComplexMatrix2& o) {
        for (std::size_t i = 0; i < 4; ++i) a[i] -= o.a[i];
        return *this;
    }
    ComplexMatrix2& operator*=(complex s) {
        for (auto& x : a) x *= s;
        return *this;
    }

    friend ComplexMatrix2 operator+(ComplexMatrix2 l, const ComplexMatrix2& r) { return l += r; }
    friend ComplexMatrix2 operator-(ComplexMatrix2 l, const ComplexMatrix2& r) { return l -= r; }
    friend ComplexMatrix2 operator*(ComplexMatrix2 m, complex s) { return m *= s; }
    friend ComplexMatrix2 operator*(complex s, ComplexMatrix2 m) { return m *= s; }
    friend ComplexMatrix2 operator*(ComplexMatrix2 m, double s) { return m *= complex{s, 0.0}; }
    friend ComplexMatrix2 operator*(double s, ComplexMatrix2 m) { return m *= complex{s, 0.0}; }
    friend ComplexMatrix2 operator-(ComplexMatrix2 m) { return m *= complex{-1.0, 0.0}; }

    friend ComplexMatrix2 operator*(const ComplexMatrix2& l, const ComplexMatrix2& r) {
        return {l.a[0] * r.a[0] + l.a[1] * r.a[2], l.a[0] * r.a[1] + l.a[1] * r.a[3],
                l.a[2] * r.a[0] + l.a[3] * r.a[2], l.a[2] * r.a[1] + l.a[3] * r.a[3]};
    }

    friend bool operator==(const ComplexMatrix2&, const ComplexMatrix2&) = default;
};

/// Largest entrywise modulus of the difference.
inline double max_abs_diff(const ComplexMatrix2& x, const ComplexMatrix2& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
    return d;
}

namespace pauli {
inline ComplexMatrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
inline ComplexMatrix2 x() { return {0.0, 1.0, 1.0, 0.0}; }
inline ComplexMatrix2 y() { return {0.0, complex{0.0, -1.0}, complex{0.0, 1.0}, 0.0}; }
inline ComplexMatrix2 z() { return {1.0, 0.0, 0.0, -1.0}; }
}  // namespace pauli

inline bool is_hermitian(const ComplexMatrix2& m, double tol = kHermitianTol) {
    return std::abs(m(0, 0).imag()) <= tol && std::abs(m(1, 1).imag()) <= tol &&
           std::abs(m(0, 1) - std::conj(m(1, 0))) <= tol;
}

inline ComplexMatrix2 commutator(const ComplexMatrix2& a, const ComplexMatrix2& b) { return a * b - b * a; }
inline ComplexMatrix2 anticommutator(const ComplexMatrix2& a, const ComplexMatrix2& b) { return a * b + b * a; }

namespace detail {
// Half the eigenvalue splitting of a Hermitian matrix: |c| in c0 I + c.sigma.
inline double bloch_radius(const ComplexMatrix2& m) {
    return std::hypot(0.5 * (m(0, 0).real() - m(1, 1).real()), std::abs(m(0, 1)));
}
inline void require_hermitian(const ComplexMatrix2& m, const char* what) {
    if (!is_hermitian(m)) throw ContractViolation(std::string(what) + ": matrix is not Hermitian");
}
}  // namespace detail

inline double min_eigenvalue(const ComplexMatrix2& m) {
    detail::require_hermitian(m, "min_eigenvalue");
    return 0.5 * (m(0, 0).real() + m(1, 1).real()) - detail::bloch_radius(m);
}

inline double max_eigenvalue(const ComplexMatrix2& m) {
    detail::require_hermitian(m, "max_eigenvalue");
    return 0.5 * (m(0, 0).real() + m(1, 1).real()) + detail::bloch_radius(m);
}

/// Normalized-or-not qubit ket (amplitude of |up>, amplitude of |down>).
struct Ket {
    complex up{};
    complex down{};

    [[nodiscard]] double norm() const { return std::sqrt(std::norm(up) + std::norm(down)); }
    [[nodiscard]] Ket normalized() const {
        const double n = norm();
        return {up / n, down / n};
    }
    [[nodiscard]] ComplexMatrix2 projector() const {
        return {up * std::conj(up), up * std::conj(down), down * std::conj(up), down * std::conj(down)};
    }
    friend Ket operator*(const ComplexMatrix2& m, const Ket& k) {
        return {m(0, 0) * k.up + m(0, 1) * k.down, m(1, 0) * k.up + m(1, 1) * k.down};
    }
    friend Ket operator+(const Ket& l, const Ket& r) { return {l.up + r.up, l.down + r.down}; }
    friend Ket operator*(complex s, const Ket& k) { return {s * k.up, s * k.down}; }
    friend Ket operator*(double s, const Ket& k) { return {s * k.up, s * k.down}; }
};

inline complex inner(const Ket& bra, const Ket& ket) {
    return std::conj(bra.up) * ket.up + std::conj(bra.down) * ket.down;
}

/// Qubit density matrix. Hermitian by construction; trace and positivity are
/// validated when it is built.
class DensityMatrix {
public:
    /// Maximally mixed state.
    DensityMatrix() : m_{0.5, 0.0, 0.0, 0.5} {}

    /// Hermitizes `m` (averaging the off-diagonal pair, dropping imaginary
    /// diagonal parts) and validates trace within `trace_tol` and positivity.
    explicit DensityMatrix(const ComplexMatrix2& m, double trace_tol = kTraceTol) : m_(hermitize(m)) {
        const double tr = m_(0, 0).real() + m_(1, 1).real();
        if (!std::isfinite(tr) || std::abs(tr - 1.0) > trace_tol) {
            throw ContractViolation("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
        }
        if (min_eigenvalue(m_) < -kPositivityTol) {
            throw ContractViolation("DensityMatrix: negative eigenvalue " + std::to_string(min_eigenvalue(m_)));
        }
    }

    /// Rescales the trace to one before validating.
    static DensityMatrix normalized(const ComplexMatrix2& m) {
        const double tr = m(0, 0).real() + m(1, 1).real();
        return DensityMatrix(m * (1.0 / tr));
    }

    static DensityMatrix pure(const Ket& k) { return DensityMatrix(k.normalized().projector()); }

    static DensityMatrix diagonal(double p_up, double p_down) { return DensityMatrix({p_up, 0.0, 0.0, p_down}); }

    [[nodiscard]] const ComplexMatrix2& matrix() const noexcept { return m_; }
    [[nodiscard]] double p_up() const { return m_(0, 0).real(); }
    [[nodiscard]] double p_down() const { return m_(1, 1).real(); }
    /// <up|rho|down>.
    [[nodiscard]] complex coherence() const { return m_(0, 1); }
    [[nodiscard]] double trace() const { return m_(0, 0).real() + m_(1, 1).real(); }
    [[nodiscard]] double purity() const {
        return m_(0, 0).real() * m_(0, 0).real() + m_(1, 1).real() * m_(1, 1).real() + 2.0 * std::norm(m_(0, 1));
    }

private:
    static ComplexMatrix2 hermitize(const ComplexMatrix2& m) {
        const complex c = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
        return {m(0, 0).real(), c, std::conj(c), m(1, 1).real()};
    }

    ComplexMatrix2 m_;
};

/// Tr[rho A] for Hermitian A.
inline double expectation(const DensityMatrix& rho, const ComplexMatrix2& obs) {
    detail::require_hermitian(obs, "expectation");
    return (rho.matrix() * obs).trace().real();
}

/// Trace distance 1/2 ||a - b||_1 between two density matrices.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return detail::bloch_radius(a.matrix() - b.matrix());
}

}  // namespace lgqa
