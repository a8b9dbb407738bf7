// Block shift-invert Arnoldi for sparse spectra near a target shift. Blocking
// is required here: the spectra of interest carry exactly degenerate
// eigenvalues that single-vector Krylov iterations cannot resolve.
#include "qef/numerics/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SparseLU>

#include "qef/errors.hpp"
#include "qef/numerics/schur.hpp"

namespace qef::numerics {

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Sparse = Eigen::SparseMatrix<cd>;

// Orthogonalize w against the first m columns of v (two-pass classical
// Gram-Schmidt), accumulating coefficients into h.
void orthogonalize(const Mat& v, Eigen::Index m, Mat& w, Mat& h, Eigen::Index col0) {
    for (int pass = 0; pass < 2; ++pass) {
        Mat proj = v.leftCols(m).adjoint() * w;
        w -= v.leftCols(m) * proj;
        h.block(0, col0, m, w.cols()) += proj;
    }
}

} // namespace

std::vector<RitzPair> shift_invert_arnoldi(const Sparse& a, int k, const ArnoldiOptions& opts) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw qef::config_error("shift_invert_arnoldi: matrix must be square");
    if (k <= 0) throw qef::config_error("shift_invert_arnoldi: k must be positive");
    const int b = std::max(1, opts.block);
    const Eigen::Index maxm = std::min<Eigen::Index>(opts.max_basis, n);
    if (k > maxm)
        throw qef::config_error("shift_invert_arnoldi: k exceeds basis budget");

    Sparse shifted = a;
    Sparse eye(n, n);
    eye.setIdentity();
    shifted -= opts.shift * eye;
    shifted.makeCompressed();
    Eigen::SparseLU<Sparse> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        throw qef::numerical_error("shift_invert_arnoldi: factorization of shifted operator failed");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_block = [&](Eigen::Index cols) {
        Mat blk(n, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < n; ++i) blk(i, j) = cd(gauss(rng), gauss(rng));
        return blk;
    };

    Mat v(n, maxm + b);
    Mat h = Mat::Zero(maxm + b, maxm);

    // Orthonormal starting block.
    {
        Mat w = random_block(b);
        Eigen::HouseholderQR<Mat> qr(w);
        v.leftCols(b) = qr.householderQ() * Mat::Identity(n, b);
    }

    double anorm = 0.0;
    for (int i = 0; i < a.outerSize(); ++i)
        for (Sparse::InnerIterator it(a, i); it; ++it) anorm += std::norm(it.value());
    anorm = std::max(1.0, std::sqrt(anorm));

    std::vector<RitzPair> result;
    Eigen::Index m = 0;
    while (m + b <= maxm) {
        // W = (A - shift I)^{-1} V_m..m+b
        Mat w(n, b);
        for (int j = 0; j < b; ++j) w.col(j) = lu.solve(v.col(m + j).eval());
        Eigen::Index mnew = m + b;
        orthogonalize(v, mnew, w, h, m);
        // QR of the remainder gives the next block; replace breakdown columns
        // with fresh random directions so degenerate invariant subspaces do not
        // stall the expansion.
        Eigen::HouseholderQR<Mat> qr(w);
        Mat r = qr.matrixQR().topRows(b).triangularView<Eigen::Upper>();
        Mat qfull = qr.householderQ() * Mat::Identity(n, b);
        for (int j = 0; j < b; ++j) {
            if (std::abs(r(j, j)) < 1e-13) {
                Mat fresh = random_block(1);
                for (int pass = 0; pass < 2; ++pass)
                    fresh -= v.leftCols(mnew) * (v.leftCols(mnew).adjoint() * fresh);
                if (j > 0) fresh -= qfull.leftCols(j) * (qfull.leftCols(j).adjoint() * fresh);
                double nn = fresh.norm();
                if (nn < 1e-14) throw qef::numerical_error("shift_invert_arnoldi: basis breakdown");
                qfull.col(j) = fresh / nn;
                r.row(j).setZero();
            }
        }
        h.block(mnew, m, b, b) = r;
        v.middleCols(mnew, b) = qfull;
        m = mnew;

        if (m < k + b && m + b <= maxm) continue;

        // Ritz extraction from the leading m-by-m Hessenberg block.
        SchurResult sch = complex_schur(h.topLeftCorner(m, m));
        Mat y = schur_eigenvectors(sch);
        Vec theta = sch.t.diagonal();

        // Dominant theta = eigenvalue nearest the shift.
        std::vector<int> order(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            return std::abs(theta(i)) > std::abs(theta(j));
        });

        result.clear();
        bool all_converged = true;
        for (int idx = 0; idx < k; ++idx) {
            int i = order[static_cast<std::size_t>(idx)];
            if (std::abs(theta(i)) < 1e-300) {
                all_converged = false;
                break;
            }
            cd lambda = opts.shift + 1.0 / theta(i);
            Vec x = v.leftCols(m) * y.col(i);
            x.normalize();
            double res = (a * x - lambda * x).norm() / anorm;
            result.push_back({lambda, x, res});
            if (res > opts.tol) all_converged = false;
        }
        if (all_converged && static_cast<int>(result.size()) == k) return result;
        if (m + b > maxm) break;
    }

    if (opts.allow_partial) {
        std::vector<RitzPair> converged;
        for (auto& rp : result)
            if (rp.residual <= opts.tol) converged.push_back(std::move(rp));
        if (!converged.empty()) return converged;
    }

    std::ostringstream msg;
    msg << "shift_invert_arnoldi: basis of " << maxm << " exhausted before " << k
        << " eigenvalues converged";
    if (!result.empty()) {
        double worst = 0.0;
        for (const auto& rp : result) worst = std::max(worst, rp.residual);
        msg << " (worst residual " << worst << ")";
    }
    throw qef::numerical_error(msg.str());
}

} // namespace qef::numerics
