// dynamics.hpp: Heisenberg-Langevin dynamics matrix, its spectrum, and the
// two-mode closed forms.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "qef/model.hpp"

namespace qef {

// Drift and noise data for the stacked operator vector
// (a_1, a_1^dag, a_2, a_2^dag, ...): d<A>/dt = -i m_omega <A> (+ Langevin
// forces whose delta-correlators <L_i(t) L_j(t')> = noise_corr[i,j] delta(t-t')).
struct DynamicsMatrix {
    Eigen::MatrixXcd m_omega;    // 2M x 2M
    Eigen::MatrixXcd noise_corr; // 2M x 2M
};

// Diagonalized basic spectrum. omegas holds the 2M eigenfrequencies ordered
// pairwise (Omega_1, -conj(Omega_1), Omega_2, -conj(Omega_2), ...); pairing
// lists the slot index pairs (2m, 2m+1). Purely imaginary eigenfrequencies
// are each their own -conj image; in that overdamped regime the two
// self-conjugate values of a mode pair share a pairing entry, ordered by
// descending imaginary part. p_matrix columns are right eigenvectors; for an
// oscillatory pair the partner column is the conjugate-swapped copy of the
// representative, which makes the transformed pair operators literal
// adjoints of one another. At an exceptional point no faithful P exists:
// diagonalizable is false and p_matrix/p_inverse are left empty rather than
// ill-conditioned.
struct BasicSpectrum {
    Eigen::VectorXcd omegas;
    Eigen::MatrixXcd p_matrix;
    Eigen::MatrixXcd p_inverse;
    std::vector<std::pair<int, int>> pairing;
    bool diagonalizable{true};
};

// Drift from canonical commutators applied to the quadratic Hamiltonian plus
// the -i gamma^d/2 (damped) or +i gamma^a/2 (amplified) diagonal insertions;
// noise correlators <L_j L_j^dag> = gamma_j^d and <L_k^dag L_k> = gamma_k^a.
DynamicsMatrix build_dynamics_matrix(const QuadraticSystem& system);

// Dense non-Hermitian eigendecomposition. Uses the quartic closed form for
// 2M = 4 (default fast path) and the in-tree complex Hessenberg + shifted QR
// solver otherwise. Eigenvalues are sorted into (Omega, -conj(Omega)) pairs by
// greedy matching under `pair_tol` (default 1e-9 * max(1, ||m_omega||), pass
// 0 for the default); a missing partner raises numerical_error listing the
// unpaired values. Defective spectra are flagged, not inverted.
BasicSpectrum eigendecompose(const DynamicsMatrix& d, double pair_tol = 0.0);

// Closed-form two-mode spectrum and (unnormalized) eigenvectors:
//   Omega_{1,2}^r = sqrt(beta^2 - g^2 +- 2 g alpha),  Omega^i = gamma_minus,
// eigenfrequencies {+-Omega_1^r - i Omega^i, +-Omega_2^r - i Omega^i} with
// principal-branch square roots (imaginary Omega^r allowed, stored complex).
// For g < 0 the same phase flip as two_mode_system is applied first, so this
// describes exactly the system two_mode_system(p) returns. When the spectrum
// is defective (an Omega^r vanishes or the two pairs coincide) the
// transformation is flagged non-diagonalizable just like eigendecompose.
BasicSpectrum two_mode_closed_form(const TwoModeParams& p);

// Unnormalized closed-form eigenvector for eigenfrequency branch 1 or 2
// evaluated at frequency `omega` (the conjugate partner uses -omega). Exposed
// separately for rank tests; two_mode_closed_form assembles P from these.
Eigen::Vector4cd two_mode_eigenvector(const TwoModeParams& p, int branch, cd omega);

// Transformed noise correlators K = P^{-1} L:
//   K_tilde = P^{-1} * noise_corr * (P^{-1})^T.
// Raises numerical_error when s is flagged non-diagonalizable (P is singular
// at an EP; use the Jordan-aware propagation instead).
Eigen::MatrixXcd transform_noise(const BasicSpectrum& s, const DynamicsMatrix& d);

// Spectrum export record { omegas, pairing, diagonalizable } as a JSON string.
std::string spectrum_to_json(const BasicSpectrum& s);

} // namespace qef
