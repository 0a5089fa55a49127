#pragma once

// sigma_z readout through a Gaussian pointer. Outcomes for |down> and |up>
// are centred on -1 and +1 with variance D; the conditional state follows
// Bayes' rule for that likelihood.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lgqa/algebra.hpp"

namespace lgqa {

struct MeasurementParams {
    /// Variance of each readout peak.
    double D = 20.0;
    static constexpr double peak_down = -1.0;
    static constexpr double peak_up = 1.0;

    void validate() const {
        if (!(D > 0.0)) throw ContractViolation("MeasurementParams: D must be > 0");
    }

    friend bool operator==(const MeasurementParams&, const MeasurementParams&) = default;
};

struct Readout {
    double r = 0.0;
    double t = 0.0;
};

/// Draws r from rho_dd N(-1, D) + rho_uu N(+1, D).
template <class Rng>
Readout sample_readout(const DensityMatrix& rho, const MeasurementParams& mp, Rng& rng, double t = 0.0) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const bool down = uniform(rng) < rho.p_down();
    const double centre = down ? MeasurementParams::peak_down : MeasurementParams::peak_up;
    return {centre + std::sqrt(mp.D) * normal(rng), t};
}

/// Conditional update with log-likelihood ratio g: rho_dd e^g, rho_uu e^-g,
/// coherence unchanged, then renormalized.
inline DensityMatrix weak_update_strength(const DensityMatrix& rho, double g) {
    // Scale by e^-|g| so neither exponential overflows.
    const double a = std::abs(g);
    const double w_down = rho.p_down() * std::exp(g - a);
    const double w_up = rho.p_up() * std::exp(-g - a);
    const double norm = w_down + w_up;
    if (!(norm > 1e-300)) throw DegenerateOutcome("weak_update: outcome has vanishing likelihood");
    const complex c = rho.coherence() * (std::exp(-a) / norm);
    return DensityMatrix({w_up / norm, c, std::conj(c), w_down / norm});
}

/// Log-likelihood ratio for a readout, g = -r / D.
inline double update_strength(const Readout& read, const MeasurementParams& mp) { return -read.r / mp.D; }

inline DensityMatrix weak_update(const DensityMatrix& rho, const Readout& read, const MeasurementParams& mp) {
    mp.validate();
    if (!std::isfinite(read.r)) throw ContractViolation("weak_update: readout is not finite");
    return weak_update_strength(rho, update_strength(read, mp));
}

/// Ensemble average of weak_update over outcomes: populations kept,
/// coherences damped by exp(-1/(2D)).
inline DensityMatrix nonselective_weak(const DensityMatrix& rho, const MeasurementParams& mp) {
    const complex c = rho.coherence() * std::exp(-1.0 / (2.0 * mp.D));
    return DensityMatrix({rho.p_up(), c, std::conj(c), rho.p_down()});
}

struct ProjectiveOutcome {
    /// sigma_z eigenvalue, +1 (up) or -1 (down).
    int outcome = 0;
    double probability = 0.0;
    DensityMatrix state;
};

inline constexpr double kBranchCutoff = 1e-15;

/// Both projective branches with their probabilities; branches below 1e-15 are dropped.
inline std::vector<ProjectiveOutcome> projective_branches(const DensityMatrix& rho) {
    std::vector<ProjectiveOutcome> out;
    if (rho.p_up() >= kBranchCutoff) out.push_back({+1, rho.p_up(), DensityMatrix::diagonal(1.0, 0.0)});
    if (rho.p_down() >= kBranchCutoff) out.push_back({-1, rho.p_down(), DensityMatrix::diagonal(0.0, 1.0)});
    return out;
}

template <class Rng>
ProjectiveOutcome projective_sample(const DensityMatrix& rho, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (uniform(rng) < rho.p_down()) return {-1, rho.p_down(), DensityMatrix::diagonal(0.0, 1.0)};
    return {+1, rho.p_up(), DensityMatrix::diagonal(1.0, 0.0)};
}

/// Non-selective projective measurement: the dephased state.
inline DensityMatrix dephase(const DensityMatrix& rho) { return DensityMatrix::diagonal(rho.p_up(), rho.p_down()); }

}  // namespace lgqa
