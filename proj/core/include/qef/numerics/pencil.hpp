// pencil.hpp: matrix-pencil (Prony-type linear prediction) fit of a uniformly
// sampled complex signal by a sum of exponentials sum_k c_k t^j exp(-i lambda_k t),
// including confluent (polynomial-in-t) modes at defective frequencies.
#pragma once

#include <complex>
#include <vector>

namespace qef::numerics {

using cd = std::complex<double>;

struct ExpMode {
    cd lambda;        // signal model exp(-i lambda t)
    int multiplicity; // > 1 when a polynomial-in-t factor was detected
};

struct PencilResult {
    std::vector<ExpMode> modes;
    double residual;   // relative reconstruction residual over the samples
    int rank;          // numerical rank of the Hankel matrix
    bool rank_warning; // fewer modes returned than requested/possible
};

// samples[j] = f(j*dt), at least 64 samples. `rank_tol` is the relative
// singular-value threshold for the Hankel rank decision; `cluster_tol` groups
// prediction roots into confluent modes.
PencilResult exponential_fit(const std::vector<cd>& samples, double dt,
                             double rank_tol = 1e-8, double cluster_tol = 1e-5);

} // namespace qef::numerics
