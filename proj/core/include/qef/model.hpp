// model.hpp: quadratic M-mode open-system description and its two-mode specialization.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qef/errors.hpp"

namespace qef {

using cd = std::complex<double>;

enum class RateKind { damped, amplified };

struct ModeRate {
    RateKind kind{RateKind::damped};
    double rate{0.0}; // gamma >= 0, angular-frequency units
};

// An M-mode system with Hamiltonian
//   H = sum_{jk} eps_jk a_j^dag a_k + sum_{j<=k} (kappa_jk a_j a_k + H.c.)
// plus one zero-temperature damping or amplification channel per mode.
// Convention: kappa is stored symmetric but the Hamiltonian single-counts
// off-diagonal pairs (j<=k), so the two-mode shorthand stores kappa_12 = kappa
// verbatim. Diagonal entries enter as kappa_jj a_j^2, hence the two-mode
// single-mode-squeezing strength g is stored as kappa_jj = g/2 (the factor of
// 1/2 bookkeeping lives here and in two_mode_system below).
struct QuadraticSystem {
    int num_modes{0};
    Eigen::MatrixXcd epsilon; // M x M, Hermitian
    Eigen::MatrixXcd kappa;   // M x M, symmetric
    std::vector<ModeRate> rates;
    // Set by two_mode_system for g < 0 inputs: the stored parameters describe
    // the phase-flipped operators a_j -> i a_j (see two_mode_system).
    bool phase_flipped{false};
};

// Two-mode shorthand parameters. All reals, rates nonnegative.
struct TwoModeParams {
    double gamma1d{0.0}; // mode-1 damping
    double gamma2a{0.0}; // mode-2 amplification
    double epsilon{0.0}; // linear inter-mode coupling
    double kappa{0.0};   // two-mode squeezing
    double g{0.0};       // single-mode squeezing, signed

    double gamma_plus() const { return (gamma1d + gamma2a) / 4.0; }
    double gamma_minus() const { return (gamma1d - gamma2a) / 4.0; }
    double alpha() const { return std::sqrt(kappa * kappa + gamma_plus() * gamma_plus()); }
    // beta may be imaginary; stored complex (principal square root).
    cd beta() const {
        return std::sqrt(cd(epsilon * epsilon - alpha() * alpha(), 0.0));
    }
};

// Enforces the structural invariants: epsilon Hermitian, kappa symmetric,
// rates >= 0. Deviations within `tol` (relative to the matrix norm) are
// symmetrized away; larger ones raise config_error. Idempotent.
QuadraticSystem validate(const QuadraticSystem& system, double tol = 1e-12);

// Builds the M=2 system for the shorthand parameters: eps_12 = eps_21 = eps,
// kappa_12 = kappa_21 = kappa, kappa_11 = kappa_22 = g/2; mode 1 damped at
// gamma1d, mode 2 amplified at gamma2a. For g < 0 the phase convention of the
// mode operators is flipped (a_j -> i a_j), which maps (kappa, g) to
// (-kappa, -g) with an identical spectrum; the returned system stores the
// flipped values and records phase_flipped = true so the closed-form
// eigenvector formulas (which assume g >= 0) stay valid.
QuadraticSystem two_mode_system(const TwoModeParams& p);

// JSON-compatible configuration parsing. Accepts either the full schema
//   { "modes": M, "epsilon": [[re,im],...], "kappa": ..., "rates": [{"kind","rate"},...] }
// or the two-mode shorthand
//   { "gamma1d": x, "gamma2a": x, "epsilon": x, "kappa": x, "g": x }.
// Raises config_error with a field diagnostic on malformed input.
QuadraticSystem system_from_json(const std::string& json_text);

// True when the config carried the two-mode shorthand; used by the CLI to
// decide whether closed-form routes apply. Also exposes the parsed params.
bool two_mode_params_from_json(const std::string& json_text, TwoModeParams& out);

} // namespace qef
