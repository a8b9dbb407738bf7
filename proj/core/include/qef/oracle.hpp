// oracle.hpp: independently constructed truncated Lindblad-Liouvillian ground
// truth for cross-validating the Heisenberg-Langevin predictions.
//
// Vectorization convention (bit-exact, all oracle indices depend on it):
// density matrices are COLUMN-stacked, vec(X)[i + dim*j] = X(i,j), so
// vec(A X B) = (B^T kron A) vec(X) and the master equation
//   drho/dt = -i[H, rho] + sum_c gamma_c (L rho L^dag - {L^dag L, rho}/2)
// becomes the superoperator
//   L = -i (I kron H - H^T kron I)
//     + sum_c gamma_c [ conj(L) kron L - (I kron L^dag L + (L^dag L)^T kron I)/2 ].
// The Fock basis of mode j is |0..N_j-1>; multi-mode indices are mixed-radix
// with mode 1 fastest: |n_1, n_2, ...> -> n_1 + N_1*(n_2 + N_2*(...)).
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qef/model.hpp"
#include "qef/momentspec.hpp"

namespace qef {

struct TruncatedLiouvillian {
    std::vector<int> cutoffs;          // Fock dimension per mode
    int dim{0};                        // product Fock dimension D
    Eigen::SparseMatrix<cd> superop;   // D^2 x D^2, column stacking
    std::vector<int> hermiticity_map;  // vec index of the transposed entry:
                                       // rho -> rho^dag is conj() composed
                                       // with this permutation
    bool amplified_warning{false};     // an amplified rate >= total damping
};

// The exact two-level-atom Liouvillian (transverse sigma_x coupling) as a
// dense 4x4 in the basis (rho_00, rho_01, rho_10, rho_11):
//   -i * [[-i gx, 0, 0, i gx], [0, -w - i gx, i gx, 0],
//         [0, i gx, w - i gx, 0], [i gx, 0, 0, -i gx]].
// Its eigenvalues are {0, -gx +- i sqrt(w^2 - gx^2), -2 gx}.
Eigen::Matrix4cd build_tla_liouvillian(double omega, double gamma_x);

// Sparse truncated Liouvillian of a validated quadratic system. The entry
// budget caps D^2 (superoperator dimension) at `max_super_dim`; beyond it a
// dimension_cap_error is raised. Net amplification only sets
// amplified_warning (truncation-divergence risk); callers gate on it.
TruncatedLiouvillian build_fock_liouvillian(const QuadraticSystem& system,
                                            const std::vector<int>& cutoffs,
                                            int max_super_dim = 4096 * 4);

// k eigenvalues nearest 0 in |Re| (slowest-decaying, includes the exact 0).
// Dense LAPACK solver below superoperator dimension 1024, multi-shift block
// shift-invert Arnoldi above it. `hint_shifts` seeds the shift placement
// (the superoperator diagonal alone misses oscillatory sectors when the
// Hamiltonian is purely off-diagonal); hints only steer which exact
// eigenvalues converge first, every reported value carries a true-residual
// check against the superoperator itself.
std::vector<cd> liouvillian_spectrum(const TruncatedLiouvillian& l, int k,
                                     const std::vector<cd>& hint_shifts = {});

struct SpectrumMatch {
    struct Pair {
        cd predicted;  // -i * moment frequency
        cd oracle;
        double deviation;
        std::string label; // multiset display, "1" for the stationary value
    };
    std::vector<Pair> matched;
    std::vector<std::pair<cd, std::string>> unmatched_predicted;
    std::vector<cd> unmatched_oracle; // expected beyond order P, labeled so
    double max_deviation{0.0};
    bool all_oracle_matched{false};
};

// Greedy bipartite matching of -i*(predicted frequencies up to order P, plus
// the order-0 stationary value 0) against oracle eigenvalues within tol.
SpectrumMatch compare_spectra(const std::vector<MomentFrequencyTable>& predicted,
                              const std::vector<cd>& oracle_vals, double tol);

struct StationaryState {
    Eigen::VectorXcd rho_vec;  // unit trace kernel vector (column stacking)
    bool degenerate{false};
    std::vector<Eigen::VectorXcd> kernel; // all kernel vectors when degenerate
    double hermiticity_residual{0.0};
    double min_eigenvalue{0.0}; // most negative eigenvalue of rho
};

// Kernel of the Liouvillian via shift-inverted iteration, normalized to unit
// trace; checks Hermiticity (<= 1e-10) and positive semidefiniteness
// (eigenvalues >= -1e-8). A degenerate kernel is reported, not normalized.
StationaryState stationary_state(const TruncatedLiouvillian& l);

// Trace-preservation residual |vec(I)^T L| / ||L|| (should be <= 1e-10) and
// the lambda <-> conj(lambda) closure residual via the hermiticity map.
double trace_preservation_residual(const TruncatedLiouvillian& l);

// Convergence protocol: eigenvalues reported at cutoff N+4 paired greedily
// with the cutoff-N values; converged means the movement is < tol/10.
struct ConvergedSpectrum {
    std::vector<cd> eigenvalues;     // cutoff N+4 values
    std::vector<bool> converged;
    std::vector<double> movement;
};
ConvergedSpectrum converged_spectrum(const QuadraticSystem& system,
                                     const std::vector<int>& cutoffs_lo,
                                     int k, double tol, int max_super_dim = 4096 * 4);

} // namespace qef
