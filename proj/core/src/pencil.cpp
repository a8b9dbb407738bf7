// Matrix-pencil exponential fit: Hankel SVD rank detection, shift-invariance
// eigenproblem for the signal poles, confluent-root clustering for defective
// modes, and a least-squares amplitude residual.
#include "qef/numerics/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qef/errors.hpp"
#include "qef/numerics/schur.hpp"

namespace qef::numerics {

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Union-find grouping of pencil roots that coincide within tol; a cluster of
// size k is treated as one mode of multiplicity k (defective signal content).
std::vector<std::vector<int>> cluster_roots(const std::vector<cd>& z, double tol) {
    const int n = static_cast<int>(z.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double scale = std::max(1.0, std::max(std::abs(z[static_cast<std::size_t>(i)]),
                                                  std::abs(z[static_cast<std::size_t>(j)])));
            if (std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]) <= tol * scale)
                parent[static_cast<std::size_t>(find(j))] = find(i);
        }
    std::vector<std::vector<int>> groups;
    std::vector<int> root_of(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_of[static_cast<std::size_t>(r)] < 0) {
            root_of[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(root_of[static_cast<std::size_t>(r)])].push_back(i);
    }
    return groups;
}

} // namespace

PencilResult exponential_fit(const std::vector<cd>& samples, double dt,
                             double rank_tol, double cluster_tol) {
    if (samples.size() < 64)
        throw qef::config_error("exponential_fit: need at least 64 samples");
    if (!(dt > 0.0)) throw qef::config_error("exponential_fit: dt must be positive");
    const int n = static_cast<int>(samples.size());
    const int l = n / 2;
    const int rows = n - l;

    Mat hankel(rows, l + 1);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j <= l; ++j)
            hankel(i, j) = samples[static_cast<std::size_t>(i + j)];

    PencilResult out;
    out.residual = 0.0;
    out.rank = 0;
    out.rank_warning = false;

    double fnorm = hankel.norm();
    if (fnorm == 0.0) return out;

    Eigen::BDCSVD<Mat> svd(hankel, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > rank_tol * sv(0)) ++rank;
    out.rank = rank;
    if (rank == 0) {
        out.rank_warning = true;
        return out;
    }
    // An ambiguous cut (first discarded value close to the threshold) means the
    // fit may be missing weak modes.
    if (rank < sv.size() && sv(rank) > 0.1 * rank_tol * sv(0)) out.rank_warning = true;
    if (rank == std::min<int>(rows, l + 1)) out.rank_warning = true;

    // Shift invariance of the signal subspace: U2 = U1 * Phi, eig(Phi) = poles.
    Mat u = svd.matrixU().leftCols(rank);
    Mat u1 = u.topRows(rows - 1);
    Mat u2 = u.bottomRows(rows - 1);
    Mat phi = u1.colPivHouseholderQr().solve(u2);
    Vec zs = schur_eigenvalues(phi);

    std::vector<cd> roots(zs.data(), zs.data() + zs.size());
    auto groups = cluster_roots(roots, cluster_tol);

    for (const auto& g : groups) {
        cd zbar(0.0, 0.0);
        for (int idx : g) zbar += roots[static_cast<std::size_t>(idx)];
        zbar /= static_cast<double>(g.size());
        if (std::abs(zbar) == 0.0) continue;
        // Signal model f(t_i) = sum c_k e^{-i lambda_k t_i}: z = e^{-i lambda dt}.
        cd lambda = cd(0.0, 1.0) * std::log(zbar) / dt;
        out.modes.push_back({lambda, static_cast<int>(g.size())});
    }
    std::sort(out.modes.begin(), out.modes.end(), [](const ExpMode& a, const ExpMode& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });

    // Amplitude fit on a confluent Vandermonde basis gives the residual.
    int ncols = 0;
    for (const auto& m : out.modes) ncols += m.multiplicity;
    Mat basis(n, ncols);
    int col = 0;
    for (const auto& m : out.modes) {
        cd z = std::exp(cd(0.0, -1.0) * m.lambda * dt);
        for (int j = 0; j < m.multiplicity; ++j, ++col) {
            cd zp(1.0, 0.0);
            for (int i = 0; i < n; ++i) {
                basis(i, col) = std::pow(static_cast<double>(i), j) * zp;
                zp *= z;
            }
        }
    }
    Eigen::Map<const Vec> f(samples.data(), n);
    Vec coef = basis.colPivHouseholderQr().solve(f);
    out.residual = (basis * coef - f).norm() / f.norm();
    return out;
}

} // namespace qef::numerics
