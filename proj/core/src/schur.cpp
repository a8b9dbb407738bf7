// Dense complex Schur decomposition: Householder Hessenberg reduction followed
// by explicit single-shift QR with Wilkinson shifts and occasional exceptional
// shifts, accumulating the unitary factor throughout.
#include "qef/numerics/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qef/errors.hpp"

namespace qef::numerics {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cd = std::complex<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Unitary phase of z (1 for z = 0).
cd phase(cd z) {
    double a = std::abs(z);
    return a == 0.0 ? cd(1.0, 0.0) : z / a;
}

// Reduce a to upper Hessenberg form, accumulating the transform into q.
void hessenberg(Mat& a, Mat& q) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        Vec x = a.col(k).segment(k + 1, n - k - 1);
        double xnorm = x.norm();
        if (xnorm <= kEps * a.norm()) {
            a.col(k).segment(k + 2, n - k - 2).setZero();
            continue;
        }
        // Householder vector v: (I - tau v v^H) x = -phase(x0) ||x|| e1
        cd alpha = -phase(x(0)) * xnorm;
        Vec v = x;
        v(0) -= alpha;
        double vnorm = v.norm();
        if (vnorm <= kEps * xnorm) continue;
        v /= vnorm;

        auto rows = Eigen::seq(k + 1, n - 1);
        a(rows, Eigen::all) -= 2.0 * v * (v.adjoint() * a(rows, Eigen::all));
        a(Eigen::all, rows) -= 2.0 * (a(Eigen::all, rows) * v) * v.adjoint();
        q(Eigen::all, rows) -= 2.0 * (q(Eigen::all, rows) * v) * v.adjoint();

        a.col(k).segment(k + 2, n - k - 2).setZero();
        a(k + 1, k) = alpha;
    }
}

struct Givens {
    double c;
    cd s;
};

// Rotation with G [a; b] = [r; 0], G = [[c, s], [-conj(s), c]], c real.
Givens make_givens(cd a, cd b) {
    double bmag = std::abs(b);
    if (bmag == 0.0) return {1.0, cd(0.0, 0.0)};
    double amag = std::abs(a);
    double r = std::hypot(amag, bmag);
    if (amag == 0.0) return {0.0, cd(1.0, 0.0)};
    return {amag / r, phase(a) * std::conj(b) / (r)};
}

// Eigenvalue of [[a, b], [c, d]] closest to d (Wilkinson shift).
cd wilkinson(cd a, cd b, cd c, cd d) {
    cd tr = a + d;
    cd det = a * d - b * c;
    cd disc = std::sqrt(tr * tr - 4.0 * det);
    cd l1 = 0.5 * (tr + disc);
    cd l2 = 0.5 * (tr - disc);
    return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

} // namespace

SchurResult complex_schur(const Eigen::MatrixXcd& a0) {
    const Eigen::Index n = a0.rows();
    if (n != a0.cols()) throw qef::config_error("complex_schur: matrix must be square");
    SchurResult res;
    res.t = a0;
    res.q = Mat::Identity(n, n);
    if (n <= 1) return res;
    if (!res.t.allFinite()) throw qef::config_error("complex_schur: non-finite entries");

    Mat& t = res.t;
    Mat& q = res.q;
    hessenberg(t, q);

    const double anorm = std::max(t.norm(), kEps);
    Eigen::Index hi = n - 1;
    int since_deflation = 0;
    long budget = 60 * static_cast<long>(n) + 200;

    while (hi > 0) {
        if (--budget < 0) {
            std::ostringstream msg;
            msg << "complex_schur: QR iteration failed to deflate at row " << hi
                << " (subdiagonal " << std::abs(t(hi, hi - 1)) << ")";
            throw qef::numerical_error(msg.str());
        }
        // Deflate negligible subdiagonals.
        bool deflated = false;
        for (Eigen::Index i = hi; i > 0; --i) {
            double small = kEps * (std::abs(t(i - 1, i - 1)) + std::abs(t(i, i)));
            if (small == 0.0) small = kEps * anorm;
            if (std::abs(t(i, i - 1)) <= small) t(i, i - 1) = cd(0.0, 0.0);
        }
        while (hi > 0 && t(hi, hi - 1) == cd(0.0, 0.0)) {
            --hi;
            deflated = true;
        }
        if (hi == 0) break;
        if (deflated) since_deflation = 0;

        // Active block [lo, hi].
        Eigen::Index lo = hi;
        while (lo > 0 && t(lo, lo - 1) != cd(0.0, 0.0)) --lo;

        cd sigma;
        if (++since_deflation % 12 == 0) {
            // Exceptional shift to break symmetry-induced stalls.
            sigma = t(hi, hi) + cd(0.75 * std::abs(t(hi, hi - 1)), 0.0);
        } else {
            sigma = wilkinson(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
        }

        // Explicit shifted QR sweep on the active block.
        const Eigen::Index m = hi - lo + 1;
        std::vector<Givens> rot(static_cast<std::size_t>(m > 1 ? m - 1 : 0));
        for (Eigen::Index i = lo; i <= hi; ++i) t(i, i) -= sigma;
        for (Eigen::Index i = lo; i < hi; ++i) {
            Givens g = make_givens(t(i, i), t(i + 1, i));
            rot[static_cast<std::size_t>(i - lo)] = g;
            for (Eigen::Index j = i; j < n; ++j) {
                cd u = t(i, j), w = t(i + 1, j);
                t(i, j) = g.c * u + g.s * w;
                t(i + 1, j) = -std::conj(g.s) * u + g.c * w;
            }
        }
        for (Eigen::Index i = lo; i < hi; ++i) {
            const Givens& g = rot[static_cast<std::size_t>(i - lo)];
            Eigen::Index top = std::min(i + 2, hi) ;
            for (Eigen::Index r = 0; r <= top; ++r) {
                cd u = t(r, i), w = t(r, i + 1);
                t(r, i) = g.c * u + std::conj(g.s) * w;
                t(r, i + 1) = -g.s * u + g.c * w;
            }
            for (Eigen::Index r = 0; r < n; ++r) {
                cd u = q(r, i), w = q(r, i + 1);
                q(r, i) = g.c * u + std::conj(g.s) * w;
                q(r, i + 1) = -g.s * u + g.c * w;
            }
        }
        for (Eigen::Index i = lo; i <= hi; ++i) t(i, i) += sigma;
    }

    // Clean the (exactly known) zero lower triangle.
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) t(i, j) = cd(0.0, 0.0);
    return res;
}

Eigen::VectorXcd schur_eigenvalues(const Eigen::MatrixXcd& a) {
    return complex_schur(a).t.diagonal();
}

Eigen::MatrixXcd schur_eigenvectors(const SchurResult& s) {
    const Eigen::Index n = s.t.rows();
    Mat vecs = Mat::Zero(n, n);
    const double anorm = std::max(s.t.norm(), kEps);
    for (Eigen::Index j = 0; j < n; ++j) {
        Vec y = Vec::Zero(n);
        y(j) = cd(1.0, 0.0);
        cd lambda = s.t(j, j);
        for (Eigen::Index i = j - 1; i >= 0; --i) {
            cd rhs = -(s.t.row(i).segment(i + 1, j - i) * y.segment(i + 1, j - i)).value();
            cd piv = s.t(i, i) - lambda;
            if (std::abs(piv) < kEps * anorm) piv = cd(kEps * anorm, 0.0);
            y(i) = rhs / piv;
        }
        y.normalize();
        vecs.col(j) = s.q * y;
    }
    return vecs;
}

} // namespace qef::numerics
