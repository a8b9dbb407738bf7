// Closed-form complex quartic roots (Ferrari resolvent factorization) with a
// Newton polish pass against the monic polynomial.
#include "qef/numerics/quartic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qef/errors.hpp"

namespace qef::numerics {

namespace {

using cd = std::complex<double>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// One root of w^3 + a w^2 + b w + c = 0 (the largest-magnitude Cardano root,
// which keeps the subsequent division by s = sqrt(w) well conditioned).
cd cubic_one_root(cd a, cd b, cd c) {
    cd p = b - a * a / 3.0;
    cd q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    cd disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cd u3 = -q / 2.0 + disc;
    cd u3alt = -q / 2.0 - disc;
    if (std::abs(u3alt) > std::abs(u3)) u3 = u3alt;
    if (std::abs(u3) == 0.0) return -a / 3.0;
    cd u = std::pow(u3, 1.0 / 3.0);
    cd best = u - p / (3.0 * u) - a / 3.0;
    // The three cube-root branches give the three roots; take the largest.
    const cd w1(-0.5, std::sqrt(3.0) / 2.0);
    for (cd rot : {u * w1, u * std::conj(w1)}) {
        cd cand = rot - p / (3.0 * rot) - a / 3.0;
        if (std::abs(cand) > std::abs(best)) best = cand;
    }
    return best;
}

// Stable roots of z^2 + b z + c = 0.
std::array<cd, 2> quadratic(cd b, cd c) {
    cd disc = std::sqrt(b * b - 4.0 * c);
    // Pick the sign that avoids cancellation in -b -/+ disc.
    cd t = (std::real(std::conj(b) * disc) >= 0.0) ? -b - disc : -b + disc;
    cd z1 = t / 2.0;
    cd z2 = (std::abs(z1) > 0.0) ? c / z1 : -b - z1;
    return {z1, z2};
}

cd horner(const std::array<cd, 5>& c, cd z) {
    cd v = c[0];
    for (int i = 1; i < 5; ++i) v = v * z + c[i];
    return v;
}

} // namespace

std::array<cd, 4> quartic_roots(cd a, cd b, cd c, cd d) {
    // Depressed form z = y - a/4: y^4 + p y^2 + q y + r.
    cd p = b - 3.0 * a * a / 8.0;
    cd q = c - a * b / 2.0 + a * a * a / 8.0;
    cd r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;

    double scale = std::max({std::abs(p), std::abs(q), std::abs(r), 1.0});
    std::array<cd, 4> y;
    if (std::abs(q) <= kEps * scale * scale) {
        // Biquadratic: y^2 solves a quadratic directly.
        auto y2 = quadratic(p, r);
        cd s0 = std::sqrt(y2[0]);
        cd s1 = std::sqrt(y2[1]);
        y = {s0, -s0, s1, -s1};
    } else {
        // Factor y^4 + p y^2 + q y + r = (y^2 + s y + u)(y^2 - s y + v) with
        // w = s^2 a root of w^3 + 2p w^2 + (p^2 - 4r) w - q^2 = 0.
        cd w = cubic_one_root(2.0 * p, p * p - 4.0 * r, -q * q);
        cd s = std::sqrt(w);
        if (std::abs(s) <= kEps * scale) {
            auto y2 = quadratic(p, r);
            cd s0 = std::sqrt(y2[0]);
            cd s1 = std::sqrt(y2[1]);
            y = {s0, -s0, s1, -s1};
        } else {
            cd u = (p + w - q / s) / 2.0;
            cd v = (p + w + q / s) / 2.0;
            auto r1 = quadratic(s, u);
            auto r2 = quadratic(-s, v);
            y = {r1[0], r1[1], r2[0], r2[1]};
        }
    }

    std::array<cd, 4> roots;
    const std::array<cd, 5> mono = {cd(1.0), a, b, c, d};
    const std::array<cd, 5> deriv = {cd(0.0), cd(4.0), 3.0 * a, 2.0 * b, c};
    for (int k = 0; k < 4; ++k) {
        cd z = y[static_cast<std::size_t>(k)] - a / 4.0;
        // Newton polish; bail out when the step stalls or the value grows.
        double fbest = std::abs(horner(mono, z));
        for (int it = 0; it < 8; ++it) {
            cd f = horner(mono, z);
            cd fp = horner(deriv, z);
            if (std::abs(fp) == 0.0) break;
            cd step = f / fp;
            cd znew = z - step;
            double fnew = std::abs(horner(mono, znew));
            if (fnew >= fbest) break;
            z = znew;
            fbest = fnew;
            if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(z))) break;
        }
        roots[static_cast<std::size_t>(k)] = z;
    }
    return roots;
}

Eigen::Vector4cd quartic_eigenvalues(const Eigen::Matrix4cd& m) {
    if (!m.allFinite()) throw qef::config_error("quartic_eigenvalues: non-finite entries");
    // Characteristic polynomial coefficients from Faddeev-LeVerrier traces.
    cd t1 = m.trace();
    Eigen::Matrix4cd m2 = m * m;
    cd t2 = m2.trace();
    cd t3 = (m2 * m).trace();
    cd c1 = -t1;
    cd c2 = (t1 * t1 - t2) / 2.0;
    cd c3 = -(t1 * t1 * t1 - 3.0 * t1 * t2 + 2.0 * t3) / 6.0;
    cd c4 = m.determinant();
    const auto roots = quartic_roots(c1, c2, c3, c4);
    Eigen::Vector4cd out;
    for (int k = 0; k < 4; ++k) out(k) = roots[static_cast<std::size_t>(k)];
    return out;
}

} // namespace qef::numerics
