// expm.hpp: dense complex matrix exponential, scaling-and-squaring with the
// degree-13 Pade approximant. Handles defective generators exactly (the
// polynomial-in-t Jordan factors come out of the exponential itself), which is
// what the EP propagation paths rely on.
#pragma once

#include <Eigen/Dense>

namespace qef::numerics {

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

} // namespace qef::numerics
