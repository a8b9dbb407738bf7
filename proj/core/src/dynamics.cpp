// Dynamics matrix assembly, pairwise eigendecomposition, the two-mode closed
// forms, and the noise-correlator transform.
#include "qef/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <json.hpp>

#include "qef/exports.hpp"
#include "qef/numerics/quartic.hpp"
#include "qef/numerics/schur.hpp"

namespace qef {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Per-mode (a, a^dag) swap: S conj(M) S = -M, which is what makes the
// conjugate-swapped eigenvector of Omega an eigenvector of -conj(Omega).
Vec conj_swap(const Vec& v) {
    Vec out(v.size());
    for (Eigen::Index m = 0; 2 * m < v.size(); ++m) {
        out(2 * m) = std::conj(v(2 * m + 1));
        out(2 * m + 1) = std::conj(v(2 * m));
    }
    return out;
}

// Single-linkage clusters of eigenvalue slots within radius r.
std::vector<std::vector<int>> linkage_clusters(const Vec& vals, double r) {
    const int n = static_cast<int>(vals.size());
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < n; ++i) {
        if (label[static_cast<std::size_t>(i)] >= 0) continue;
        std::vector<int> stack = {i};
        label[static_cast<std::size_t>(i)] = static_cast<int>(clusters.size());
        std::vector<int> members;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int v = 0; v < n; ++v) {
                if (label[static_cast<std::size_t>(v)] >= 0) continue;
                if (std::abs(vals(u) - vals(v)) <= r) {
                    label[static_cast<std::size_t>(v)] = label[static_cast<std::size_t>(i)];
                    stack.push_back(v);
                }
            }
        }
        std::sort(members.begin(), members.end());
        clusters.push_back(std::move(members));
    }
    return clusters;
}

// Orthonormal null-space basis of (m - lambda I) with rank cut at
// sigma <= cut. Columns ordered as returned by the SVD (descending sigma).
Mat null_space(const Mat& m, cd lambda, double cut, int& geom) {
    Mat shifted = m - lambda * Mat::Identity(m.rows(), m.cols());
    Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    geom = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cut) ++geom;
    if (geom == 0) return Mat(m.rows(), 0);
    return svd.matrixV().rightCols(geom);
}

} // namespace

DynamicsMatrix build_dynamics_matrix(const QuadraticSystem& system) {
    QuadraticSystem s = validate(system);
    const int m = s.num_modes;
    const int n = 2 * m;
    DynamicsMatrix d;
    d.m_omega = Mat::Zero(n, n);
    d.noise_corr = Mat::Zero(n, n);

    for (int mm = 0; mm < m; ++mm) {
        for (int k = 0; k < m; ++k) {
            double dup = (mm == k) ? 2.0 : 1.0;
            d.m_omega(2 * mm, 2 * k) += s.epsilon(mm, k);
            d.m_omega(2 * mm, 2 * k + 1) += dup * std::conj(s.kappa(mm, k));
            d.m_omega(2 * mm + 1, 2 * k) += -dup * s.kappa(mm, k);
            d.m_omega(2 * mm + 1, 2 * k + 1) += -std::conj(s.epsilon(mm, k));
        }
        const ModeRate& r = s.rates[static_cast<std::size_t>(mm)];
        if (r.kind == RateKind::damped) {
            d.m_omega(2 * mm, 2 * mm) += cd(0.0, -r.rate / 2.0);
            d.m_omega(2 * mm + 1, 2 * mm + 1) += cd(0.0, -r.rate / 2.0);
            d.noise_corr(2 * mm, 2 * mm + 1) = cd(r.rate, 0.0);
        } else {
            d.m_omega(2 * mm, 2 * mm) += cd(0.0, r.rate / 2.0);
            d.m_omega(2 * mm + 1, 2 * mm + 1) += cd(0.0, r.rate / 2.0);
            d.noise_corr(2 * mm + 1, 2 * mm) = cd(r.rate, 0.0);
        }
    }
    return d;
}

BasicSpectrum eigendecompose(const DynamicsMatrix& d, double pair_tol) {
    const Eigen::Index n = d.m_omega.rows();
    if (n != d.m_omega.cols() || n % 2 != 0 || n == 0)
        throw config_error("eigendecompose: m_omega must be square with even dimension");
    if (!d.m_omega.allFinite()) throw config_error("eigendecompose: non-finite entries");

    const double scale = std::max(1.0, d.m_omega.norm());
    const double tol = pair_tol > 0.0 ? pair_tol : 1e-9 * scale;

    Vec lambdas(n);
    if (n == 4) {
        auto roots = numerics::quartic_eigenvalues(d.m_omega);
        for (int i = 0; i < 4; ++i) lambdas(i) = roots[static_cast<std::size_t>(i)];
    } else {
        lambdas = numerics::schur_eigenvalues(d.m_omega);
    }

    // Greedy (Omega, -conj Omega) matching: globally smallest |l_j + conj(l_i)|
    // first. Leftover mismatches are legal only for purely imaginary values
    // (overdamped regime), which are grouped among themselves.
    struct Cand {
        double cost;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            cands.push_back({std::abs(lambdas(j) + std::conj(lambdas(i))), i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    for (const Cand& c : cands) {
        if (c.cost > tol) break;
        if (partner[static_cast<std::size_t>(c.i)] >= 0 || partner[static_cast<std::size_t>(c.j)] >= 0)
            continue;
        partner[static_cast<std::size_t>(c.i)] = c.j;
        partner[static_cast<std::size_t>(c.j)] = c.i;
    }
    std::vector<int> leftovers;
    for (int i = 0; i < n; ++i)
        if (partner[static_cast<std::size_t>(i)] < 0) leftovers.push_back(i);
    // Overdamped leftovers are self-conjugate up to tol; pair them by
    // descending imaginary part so the grouping is deterministic.
    for (int i : leftovers)
        if (std::abs(lambdas(i).real()) > tol) {
            std::ostringstream msg;
            msg << "eigendecompose: no -conj partner for eigenfrequency "
                << format_complex(lambdas(i));
            throw numerical_error(msg.str());
        }
    std::sort(leftovers.begin(), leftovers.end(), [&](int a, int b) {
        if (lambdas(a).imag() != lambdas(b).imag()) return lambdas(a).imag() > lambdas(b).imag();
        return a < b;
    });
    if (leftovers.size() % 2 != 0)
        throw numerical_error("eigendecompose: odd number of unpaired eigenfrequencies");
    for (std::size_t i = 0; i + 1 < leftovers.size(); i += 2) {
        partner[static_cast<std::size_t>(leftovers[i])] = leftovers[i + 1];
        partner[static_cast<std::size_t>(leftovers[i + 1])] = leftovers[i];
    }

    // Representative = positive-real-part member (larger imaginary part when
    // both are on the imaginary axis); pairs ordered by descending Re, Im.
    struct PairRec {
        int rep, par;
        bool overdamped;
    };
    std::vector<PairRec> pairs;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        if (seen[static_cast<std::size_t>(i)]) continue;
        int j = partner[static_cast<std::size_t>(i)];
        seen[static_cast<std::size_t>(i)] = seen[static_cast<std::size_t>(j)] = true;
        bool over = std::abs(lambdas(i).real()) <= tol && std::abs(lambdas(j).real()) <= tol;
        int rep = i, par = j;
        if (!over) {
            if (lambdas(j).real() > lambdas(i).real()) std::swap(rep, par);
        } else {
            if (lambdas(j).imag() > lambdas(i).imag()) std::swap(rep, par);
        }
        pairs.push_back({rep, par, over});
    }
    std::sort(pairs.begin(), pairs.end(), [&](const PairRec& a, const PairRec& b) {
        cd la = lambdas(a.rep), lb = lambdas(b.rep);
        if (la.real() != lb.real()) return la.real() > lb.real();
        if (la.imag() != lb.imag()) return la.imag() > lb.imag();
        return a.rep < b.rep;
    });

    BasicSpectrum out;
    out.omegas = Vec(n);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out.omegas(2 * static_cast<Eigen::Index>(p)) = lambdas(pairs[p].rep);
        out.omegas(2 * static_cast<Eigen::Index>(p) + 1) = lambdas(pairs[p].par);
        out.pairing.emplace_back(2 * static_cast<int>(p), 2 * static_cast<int>(p) + 1);
    }

    // Defect detection: cluster with a radius generous enough to merge the
    // O(sqrt(eps)) split of a numerically computed double root, then compare
    // geometric multiplicity against cluster size.
    const double defect_r = std::max(tol, 1e-7 * scale);
    const double rank_cut = std::max(tol, 1e-8 * scale);
    auto clusters = linkage_clusters(out.omegas, defect_r);
    out.diagonalizable = true;
    std::vector<Mat> bases(clusters.size());
    std::vector<cd> centers(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        cd mean(0.0, 0.0);
        for (int idx : clusters[c]) mean += out.omegas(idx);
        mean /= static_cast<double>(clusters[c].size());
        centers[c] = mean;
        int geom = 0;
        bases[c] = null_space(d.m_omega, mean, rank_cut, geom);
        if (geom < static_cast<int>(clusters[c].size())) out.diagonalizable = false;
    }
    if (!out.diagonalizable) return out;

    // Assemble P cluster by cluster; fill a pair's partner column with the
    // conjugate-swapped representative so the pair operators are adjoints.
    Mat p = Mat::Zero(n, n);
    std::vector<int> used(clusters.size(), 0);
    auto cluster_of = [&](int slot) {
        for (std::size_t c = 0; c < clusters.size(); ++c)
            for (int idx : clusters[c])
                if (idx == slot) return static_cast<int>(c);
        return -1;
    };
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        int rep_slot = 2 * static_cast<int>(pi);
        int par_slot = rep_slot + 1;
        int c = cluster_of(rep_slot);
        p.col(rep_slot) = bases[static_cast<std::size_t>(c)].col(used[static_cast<std::size_t>(c)]++);
        if (pairs[pi].overdamped) {
            int c2 = cluster_of(par_slot);
            p.col(par_slot) =
                bases[static_cast<std::size_t>(c2)].col(used[static_cast<std::size_t>(c2)]++);
        } else {
            p.col(par_slot) = conj_swap(p.col(rep_slot));
            int c2 = cluster_of(par_slot);
            used[static_cast<std::size_t>(c2)]++;
        }
    }

    Eigen::FullPivLU<Mat> lu(p);
    if (!lu.isInvertible()) {
        out.diagonalizable = false;
        return out;
    }
    out.p_matrix = p;
    out.p_inverse = lu.inverse();

    // Faithfulness check: P^-1 M P must be diagonal to working precision.
    Mat diag = out.p_inverse * d.m_omega * out.p_matrix;
    for (Eigen::Index i = 0; i < n; ++i) diag(i, i) = cd(0.0, 0.0);
    if (diag.norm() > 1e-9 * scale) {
        out.diagonalizable = false;
        out.p_matrix.resize(0, 0);
        out.p_inverse.resize(0, 0);
    }
    return out;
}

Eigen::Vector4cd two_mode_eigenvector(const TwoModeParams& p0, int branch, cd omega) {
    if (branch != 1 && branch != 2)
        throw config_error("two_mode_eigenvector: branch must be 1 or 2");
    TwoModeParams p = p0;
    if (p.g < 0.0) {
        p.kappa = -p.kappa;
        p.g = -p.g;
    }
    const double eps = p.epsilon, kap = p.kappa, g = p.g, gp = p.gamma_plus();
    const double alpha = p.alpha();
    const cd igp(0.0, gp);
    const double sg = (branch == 1) ? -1.0 : 1.0; // -alpha for branch 1, +alpha for branch 2
    Eigen::Vector4cd y;
    y(0) = -eps * kap + igp * (g + sg * alpha) + sg * alpha * omega;
    y(1) = alpha * alpha + sg * g * alpha - igp * omega;
    y(2) = -sg * eps * alpha + kap * omega;
    y(3) = kap * (g + sg * alpha) - igp * eps;
    return y;
}

BasicSpectrum two_mode_closed_form(const TwoModeParams& p0) {
    TwoModeParams p = p0;
    if (p.g < 0.0) {
        p.kappa = -p.kappa;
        p.g = -p.g;
    }
    const double alpha = p.alpha();
    const cd beta2(p.epsilon * p.epsilon - alpha * alpha, 0.0);
    const cd om1 = std::sqrt(beta2 - p.g * p.g + 2.0 * p.g * alpha);
    const cd om2 = std::sqrt(beta2 - p.g * p.g - 2.0 * p.g * alpha);
    const cd shift(0.0, -p.gamma_minus());

    BasicSpectrum out;
    out.omegas = Vec(4);
    out.omegas(0) = om1 + shift;
    out.omegas(1) = -om1 + shift;
    out.omegas(2) = om2 + shift;
    out.omegas(3) = -om2 + shift;
    out.pairing = {{0, 1}, {2, 3}};

    const double scale = std::max({1.0, std::abs(p.epsilon), std::abs(p.kappa),
                                   std::abs(p.g), p.gamma_plus()});
    const double tol = 1e-9 * scale;
    bool defective = std::abs(om1) <= tol || std::abs(om2) <= tol;
    out.diagonalizable = !defective;
    if (defective) return out;

    Mat pm(4, 4);
    pm.col(0) = two_mode_eigenvector(p, 1, om1);
    pm.col(1) = two_mode_eigenvector(p, 1, -om1);
    pm.col(2) = two_mode_eigenvector(p, 2, om2);
    pm.col(3) = two_mode_eigenvector(p, 2, -om2);
    for (int c = 0; c < 4; ++c) {
        double nn = pm.col(c).norm();
        if (nn <= tol * tol) {
            out.diagonalizable = false;
            return out;
        }
        pm.col(c) /= nn;
    }
    Eigen::FullPivLU<Mat> lu(pm);
    if (!lu.isInvertible()) {
        out.diagonalizable = false;
        return out;
    }
    out.p_matrix = pm;
    out.p_inverse = lu.inverse();
    return out;
}

Eigen::MatrixXcd transform_noise(const BasicSpectrum& s, const DynamicsMatrix& d) {
    if (!s.diagonalizable || s.p_inverse.size() == 0)
        throw numerical_error("transform_noise: spectrum is not diagonalizable (exceptional point)");
    if (s.p_inverse.rows() != d.noise_corr.rows())
        throw config_error("transform_noise: spectrum and dynamics dimensions differ");
    return s.p_inverse * d.noise_corr * s.p_inverse.transpose();
}

std::string spectrum_to_json(const BasicSpectrum& s) {
    nlohmann::ordered_json j;
    j["omegas"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < s.omegas.size(); ++i)
        j["omegas"].push_back({s.omegas(i).real(), s.omegas(i).imag()});
    j["pairing"] = nlohmann::ordered_json::array();
    for (const auto& pr : s.pairing) j["pairing"].push_back({pr.first, pr.second});
    j["diagonalizable"] = s.diagonalizable;
    return j.dump(2);
}

} // namespace qef
