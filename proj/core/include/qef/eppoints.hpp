// eppoints.hpp: detection and classification of spectral degeneracies (QEP /
// QDP / QHP, hidden EPs, provenance) and EP-surface sampling.
//
// Two independent routes produce DegeneracyReport data:
//  * detect_coalescence works at the matrix level (eigenvalue clustering plus
//    SVD rank decisions) and reports the true Jordan structure.
//  * moment_degeneracy_report works generatively from the coalescence pattern
//    of the basic spectrum and reproduces the two-mode degeneracy-table
//    bookkeeping (QEP degeneracy 2^k per cell, multinomial QDP multiplicity).
// The two disagree *by construction* on fine Jordan data at moment order
// p >= 2 (the p-th power of a defective matrix has longer chains than the
// per-cell product bookkeeping: a pair of 2-chains sums to a 3-chain plus a
// 1-chain), so tests cross-check the shared observables: cluster frequencies,
// per-cluster algebraic totals, and the first-order geometric multiplicities.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "qef/dynamics.hpp"
#include "qef/momentspec.hpp"

namespace qef {

enum class PointClass { none, qep, qdp, qhp };
enum class Provenance { inherited, genuine, induced, na };

struct DegeneracyCluster {
    cd frequency;
    int algebraic{1};
    int geometric{1};
    PointClass classification{PointClass::none};
    // Matrix route: largest Jordan chain length. Generative route: the
    // table-cell QEP degeneracy (2^k with redundant orderings, chain length
    // k+1 without).
    int qep_degeneracy{1};
    // Matrix route: eigenvector count (= geometric). Generative route: the
    // table-cell QDP multiplicity.
    int qdp_multiplicity{1};
    bool hidden{false};
    Provenance provenance{Provenance::na};
    bool low_confidence{false};
    std::vector<int> members; // eigenvalue slots (matrix) or row indices (generative)
};

struct DegeneracyReport {
    std::vector<DegeneracyCluster> clusters;
    double tol{0.0};
    bool low_confidence{false}; // any cluster flagged
};

// Left-hand sides of the three EP surface conditions for the two-mode system:
//   r_minus = eps^2 - (sqrt(kappa^2+gamma_plus^2) - g)^2   (Omega_1^r -> 0)
//   r_plus  = eps^2 - (sqrt(kappa^2+gamma_plus^2) + g)^2   (Omega_2^r -> 0)
//   r_qhp   = eps^2 - kappa^2 - gamma_plus^2               (g = 0 circle)
struct QepResiduals {
    double r_minus;
    double r_plus;
    double r_qhp;
};
QepResiduals qep_residuals(const TwoModeParams& p);

// Matrix-level degeneracy analysis: single-linkage eigenvalue clustering with
// radius tol*max(1, ||m||), geometric multiplicities from SVD null spaces
// thresholded at tol*sigma_max, Jordan chain data from the Weyr sequence
// rank((m - lambda)^k). Clusters whose separation is within 10x the merge
// radius are flagged low-confidence instead of erroring. Default tol 1e-8.
DegeneracyReport detect_coalescence(const Eigen::MatrixXcd& m, double tol = 1e-8);

// Generative degeneracy report for a two-mode basic spectrum at (or near) an
// EP. Detects which pairs coalesce from s itself, then reproduces the
// degeneracy-table cells: with redundant orderings included, an order-p
// multiset with k factors from a coalescing pair sits in a cell of QEP
// degeneracy 2^k and QDP multiplicity p!/(k! n2! n2d!); rows untouched by the
// EP keep their ordering degeneracy as pure QDP multiplicity. For the g = 0
// full coalescence the cells are QDP C(p,j) x QEP 2^p per mode-pattern group
// j, and with include_redundant = false the order-p QDP multiplicity reduces
// to p+1. Throws config_error for spectra that are not 4-dimensional.
DegeneracyReport moment_degeneracy_report(const BasicSpectrum& s, int p,
                                          bool include_redundant = true,
                                          double tol = 1e-8);

// Rows of `table` whose frequency is EP-insensitive even though they involve
// operators of a coalescing cluster: the net coefficient over every defective
// cluster cancels (e.g. b1d b1 at Om1r - Om1r = 0). Returns row indices.
std::vector<int> hidden_qep_scan(const MomentFrequencyTable& table,
                                 const BasicSpectrum& s, double tol = 1e-8);

// One sampled EP-surface point, coordinates normalized by eps.
struct SurfacePoint {
    double gamma_plus_over_eps;
    double kappa_over_eps;
    double g_over_eps;
    std::string branch; // "minus", "plus", or "circle"
    double residual;
};

struct SweepGrid {
    double gamma_max{2.0};
    double kappa_max{2.0};
    double g_max{1.5}; // scanned symmetrically over [-g_max, g_max]
    int n_gamma{200};
    int n_kappa{200};
    int n_g{200};
};

// Scans the (gamma_plus/eps, kappa/eps, g/eps) grid for sign changes of the
// surface residuals along the gamma axis and refines each crossing by
// bisection until |residual| <= tol. The g = 0 slice carries the "circle"
// branch (where both cone branches meet the unit circle). `jobs` > 1 splits
// the columns across threads; output order is deterministic regardless.
std::vector<SurfacePoint> sweep_surface(const SweepGrid& grid, double tol = 1e-6,
                                        int jobs = 1);

// Provenance labels across moment orders. `with_redundant` and
// `without_redundant` are per-order reports (index 0 = order 1). Labels:
// inherited = degeneracy already present in the basic spectrum; induced =
// multiplicity that disappears when redundant orderings are excluded;
// genuine = frequency shared across different orders (possible only in the
// balanced case Omega^i = 0). Updates provenance in place on the
// with_redundant reports and returns them.
std::vector<DegeneracyReport> classify_qhp_provenance(
    std::vector<DegeneracyReport> with_redundant,
    const std::vector<DegeneracyReport>& without_redundant,
    bool balanced, double tol = 1e-8);

// CSV (gamma_plus_over_eps, kappa_over_eps, g_over_eps, branch, residual).
std::string surface_to_csv(const std::vector<SurfacePoint>& points);
// JSON array of DegeneracyReport clusters.
std::string report_to_json(const DegeneracyReport& r);

} // namespace qef
