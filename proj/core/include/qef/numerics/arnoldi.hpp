// arnoldi.hpp: block shift-invert Arnoldi for a few eigenvalues of a large
// sparse complex matrix nearest a shift. The block (width 4) Krylov basis is
// what resolves the exactly degenerate Liouvillian eigenvalues that a
// single-vector iteration cannot see.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <vector>

namespace qef::numerics {

using cd = std::complex<double>;

struct ArnoldiOptions {
    cd shift{1e-2, 0.0};    // sigma; (A - sigma I)^{-1} is the iterated operator
    int block{4};           // Krylov block width
    int max_basis{160};     // maximum basis size before giving up
    double tol{1e-10};      // relative residual ||A v - lambda v|| / ||A||_F
    unsigned seed{0x5eed5u}; // deterministic start block
    // Return whatever converged when the basis budget runs out instead of
    // throwing; multi-shift sweeps only need the pairs local to their shift.
    bool allow_partial{false};
};

struct RitzPair {
    cd lambda;
    Eigen::VectorXcd vec;
    double residual; // true residual against A, relative
};

// k eigenvalues of `a` nearest opts.shift (by shift-invert dominance), with
// true-residual convergence checks. Throws numerical_error when the basis
// budget is exhausted before k pairs converge; the message carries the best
// residuals achieved.
std::vector<RitzPair> shift_invert_arnoldi(const Eigen::SparseMatrix<cd>& a,
                                           int k, const ArnoldiOptions& opts);

} // namespace qef::numerics
