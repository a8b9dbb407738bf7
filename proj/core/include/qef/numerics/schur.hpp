// schur.hpp: in-tree dense complex eigensolver (Hessenberg reduction followed
// by the shifted QR iteration), kept deliberately free of external eigensolver
// backends so the dynamics route stays independent of the oracle route.
#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qef::numerics {

// Complex Schur decomposition A = Q T Q^H with T upper triangular.
// Throws numerical_error if the QR iteration fails to deflate (does not
// happen for finite input within the generous sweep budget, but the failure
// path reports the stuck subdiagonal).
struct SchurResult {
    Eigen::MatrixXcd t; // upper triangular
    Eigen::MatrixXcd q; // unitary
};

SchurResult complex_schur(const Eigen::MatrixXcd& a);

// Eigenvalues only (diagonal of T).
Eigen::VectorXcd schur_eigenvalues(const Eigen::MatrixXcd& a);

// Right eigenvectors via back-substitution on the triangular factor; near-zero
// pivots (clustered eigenvalues) are perturbed at machine scale, which is fine
// for the diagonalizable case and irrelevant otherwise because callers check
// diagonalizability separately. Columns are unit-norm.
Eigen::MatrixXcd schur_eigenvectors(const SchurResult& s);

} // namespace qef::numerics
