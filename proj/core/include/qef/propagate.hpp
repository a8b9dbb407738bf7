// propagate.hpp: moment-hierarchy time evolution, the closed-form two-level
// solution, and frequency-content verification.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qef/dynamics.hpp"
#include "qef/momentspec.hpp"
#include "qef/numerics/pencil.hpp"

namespace qef {

// Moment values keyed by canonical multiset. The *value* of a multiset means
// the expectation of the palindromically ordered product: creation-type
// factors in ascending mode order, then annihilation-type factors in
// descending mode order (a normal ordering). That word is subsequence-closed
// (deleting a noise pair leaves another palindromic word) and its
// reverse-dagger is the palindromic word of the daggered multiset, which is
// what makes the conjugation invariant below exact. Display strings keep the
// mode-then-dagger order of MomentIndex::display.
struct MomentState {
    int order{0}; // maximum order P held
    std::map<MomentIndex, cd> values;

    // conjugation consistency: value(daggered(m)) == conj(value(m)).
    // Violations beyond tol raise config_error.
    void check_conjugation(double tol = 1e-9) const;
};

// All normally ordered moments zero up to order P (vacuum default of the CLI).
MomentState vacuum_state(int num_modes, int P);

// Moments of a coherent-like Gaussian initial condition: first moments
// b0 = P^{-1} alpha and pair contractions W = P^{-1} J (P^{-1})^T with J the
// per-mode commutator matrix; higher moments by recursive Wick expansion of
// the palindromic words. alpha lists <a_1>, <a_1^dag>, ... at t = 0.
MomentState coherent_state(const BasicSpectrum& s, const Eigen::VectorXcd& alpha, int P);

// First-order flow <b>(t) = exp(-i Omega t) b0 componentwise. Requires a
// diagonalizable spectrum; use the DynamicsMatrix overload at an EP.
Eigen::VectorXcd propagate_first(const BasicSpectrum& s, const Eigen::VectorXcd& b0,
                                 double t);

// Jordan-aware first-order flow in the stacked (a, a^dag) basis:
// <A>(t) = expm(-i m_omega t) a0. Exact at EPs (polynomial-in-t factors).
Eigen::VectorXcd propagate_first(const DynamicsMatrix& d, const Eigen::VectorXcd& a0,
                                 double t);

// Exact hierarchy propagation: orders 0..P stacked into one block-triangular
// generator (diagonal -i sum of basic frequencies; the noise correlators
// K_tilde couple order p to order p-2 through every factor pair) and advanced
// by a single matrix exponential. Secular t*exp behaviour at resonances falls
// out of the exponential; no small-denominator division ever happens.
MomentState propagate_hierarchy(const BasicSpectrum& s, const Eigen::MatrixXcd& k_tilde,
                                const MomentState& init, double t);

// Closed-form two-level-atom mean values (sigma_0, sigma_+, sigma_-, sigma_1).
// The (sigma_0, sigma_1) block mixes through exp(-gamma t) cosh/sinh(gamma t);
// the (sigma_+, sigma_-) block through exp(-gamma t) cos/sin(Omega_perp t)
// with Omega_perp = sqrt(omega^2 - gamma_x^2), evaluated through the series
// limit at the EP (sin(Omega t)/Omega -> t), so omega = gamma_x is exact.
std::array<cd, 4> tla_evolution(double omega, double gamma_x,
                                const std::array<cd, 4>& init, double t);

// Complex frequencies lambda_k (signal model sum c_k t^j exp(-i lambda_k t))
// recovered from a uniform time series by the matrix-pencil fit; confluent
// roots are reported with multiplicity > 1 (the defective-mode signature).
numerics::PencilResult frequency_content(const std::vector<cd>& samples, double dt,
                                         double rank_tol = 1e-8);

// Trajectory CSV rows (t, multiset, re, im), multisets in canonical order.
std::string trajectory_to_csv(const std::vector<double>& times,
                              const std::vector<MomentState>& states);

} // namespace qef
