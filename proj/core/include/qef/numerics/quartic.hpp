// quartic.hpp: closed-form roots of quartic/cubic/quadratic complex monic
// polynomials (Ferrari resolvent) with a Newton polish pass. Fast path for the
// 4x4 dynamics matrices.
#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace qef::numerics {

using cd = std::complex<double>;

// Roots of z^4 + a z^3 + b z^2 + c z + d. Each root is polished by a few
// Newton steps on the original polynomial to clean up cancellation in the
// radical formulas.
std::array<cd, 4> quartic_roots(cd a, cd b, cd c, cd d);

// Eigenvalues of a 4x4 complex matrix through its characteristic polynomial.
Eigen::Vector4cd quartic_eigenvalues(const Eigen::Matrix4cd& m);

} // namespace qef::numerics
