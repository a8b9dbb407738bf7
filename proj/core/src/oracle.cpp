// Truncated Lindblad-Liouvillian oracle: an independently constructed ground
// truth in the Schroedinger picture used to cross-validate every
// Heisenberg-Langevin prediction. Nothing here reuses the dynamics-matrix
// code paths; the superoperator is assembled directly from H and the jump
// operators in the Fock basis.
#include "qef/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/SparseLU>

#include "qef/exports.hpp"
#include "qef/numerics/arnoldi.hpp"

namespace qef {

namespace {

using Sparse = Eigen::SparseMatrix<cd>;
using Triplet = Eigen::Triplet<cd>;

// Sparse Kronecker product, column-stacking convention.
Sparse kron(const Sparse& a, const Sparse& b) {
    Sparse out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (Sparse::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (Sparse::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(ia.row() * b.rows() + ib.row(),
                                       ia.col() * b.cols() + ib.col(),
                                       ia.value() * ib.value());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Sparse sparse_identity(int n) {
    Sparse id(n, n);
    id.setIdentity();
    return id;
}

// Annihilation operator of one mode embedded in the product Fock space,
// mixed-radix with mode 1 fastest.
Sparse mode_annihilation(const std::vector<int>& cutoffs, int mode) {
    const int m = static_cast<int>(cutoffs.size());
    Sparse op = sparse_identity(1);
    for (int j = 0; j < m; ++j) {
        const int nj = cutoffs[static_cast<std::size_t>(j)];
        Sparse factor;
        if (j == mode) {
            factor = Sparse(nj, nj);
            std::vector<Triplet> trips;
            for (int n = 1; n < nj; ++n)
                trips.emplace_back(n - 1, n, cd(std::sqrt(static_cast<double>(n)), 0.0));
            factor.setFromTriplets(trips.begin(), trips.end());
        } else {
            factor = sparse_identity(nj);
        }
        // Mode 1 fastest: later modes multiply from the left in the Kronecker
        // product (vec index n_1 + N_1 n_2 + ...).
        op = (j == 0) ? factor : kron(factor, op);
    }
    return op;
}

// Dissipator of jump operator l at rate g, column-stacked:
// g [ conj(l) kron l - (I kron l^dag l + (l^dag l)^T kron I)/2 ].
Sparse dissipator(const Sparse& l, double g, int dim) {
    Sparse ldl = (Sparse(l.adjoint()) * l).pruned();
    Sparse id = sparse_identity(dim);
    Sparse out = kron(Sparse(l.conjugate()), l);
    out -= 0.5 * kron(id, ldl);
    out -= 0.5 * kron(Sparse(ldl.transpose()), id);
    return (g * out).pruned();
}

// Dense eigenvalues via LAPACK zgeev (no eigenvectors).
std::vector<cd> dense_eigenvalues(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXcd a = m;
    std::vector<cd> w(static_cast<std::size_t>(n));
    int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), nullptr, 1,
                             nullptr, 1);
    if (info != 0) throw numerical_error("dense_eigenvalues: zgeev failed");
    return w;
}

} // namespace

Eigen::Matrix4cd build_tla_liouvillian(double omega, double gamma_x) {
    if (!(gamma_x >= 0.0)) throw config_error("build_tla_liouvillian: gamma_x must be >= 0");
    const cd i(0.0, 1.0);
    const cd gx(gamma_x, 0.0);
    Eigen::Matrix4cd m;
    m << -i * gx, 0, 0, i * gx,
         0, cd(-omega, 0.0) - i * gx, i * gx, 0,
         0, i * gx, cd(omega, 0.0) - i * gx, 0,
         i * gx, 0, 0, -i * gx;
    return -i * m;
}

TruncatedLiouvillian build_fock_liouvillian(const QuadraticSystem& system,
                                            const std::vector<int>& cutoffs,
                                            int max_super_dim) {
    QuadraticSystem s = validate(system);
    const int m = s.num_modes;
    if (static_cast<int>(cutoffs.size()) != m)
        throw config_error("build_fock_liouvillian: one cutoff per mode required");
    long dim = 1;
    for (int c : cutoffs) {
        if (c < 2) throw config_error("build_fock_liouvillian: cutoffs must be >= 2");
        dim *= c;
        if (dim > 65536) throw dimension_cap_error("build_fock_liouvillian: Fock dimension overflow");
    }
    if (dim * dim > static_cast<long>(max_super_dim))
        throw dimension_cap_error("build_fock_liouvillian: superoperator dimension " +
                                  std::to_string(dim * dim) + " exceeds cap");

    const int d = static_cast<int>(dim);
    std::vector<Sparse> a_ops;
    a_ops.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) a_ops.push_back(mode_annihilation(cutoffs, j));

    // H = sum eps_jk a_j^dag a_k + sum_{j<=k} (kappa_jk a_j a_k + h.c.)
    Sparse h(d, d);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            cd e = s.epsilon(j, k);
            if (e != cd(0.0, 0.0))
                h += e * Sparse(Sparse(a_ops[static_cast<std::size_t>(j)].adjoint()) *
                                a_ops[static_cast<std::size_t>(k)]);
        }
    for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k) {
            cd kap = s.kappa(j, k);
            if (kap == cd(0.0, 0.0)) continue;
            Sparse prod = Sparse(a_ops[static_cast<std::size_t>(j)] * a_ops[static_cast<std::size_t>(k)]);
            h += kap * prod;
            h += std::conj(kap) * Sparse(prod.adjoint());
        }
    h.prune(cd(0.0, 0.0));

    TruncatedLiouvillian out;
    out.cutoffs = cutoffs;
    out.dim = d;

    Sparse id = sparse_identity(d);
    Sparse lsuper = cd(0.0, -1.0) * (kron(id, h) - kron(Sparse(h.transpose()), id));
    double total_damp = 0.0, total_amp = 0.0;
    for (int j = 0; j < m; ++j) {
        const ModeRate& r = s.rates[static_cast<std::size_t>(j)];
        if (r.rate == 0.0) continue;
        if (r.kind == RateKind::damped) {
            lsuper += dissipator(a_ops[static_cast<std::size_t>(j)], r.rate, d);
            total_damp += r.rate;
        } else {
            lsuper += dissipator(Sparse(a_ops[static_cast<std::size_t>(j)].adjoint()), r.rate, d);
            total_amp += r.rate;
        }
    }
    out.superop = lsuper.pruned();
    out.amplified_warning = total_amp > 0.0 && total_amp >= total_damp;

    out.hermiticity_map.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row)
            out.hermiticity_map[static_cast<std::size_t>(row + d * col)] = col + d * row;
    return out;
}

std::vector<cd> liouvillian_spectrum(const TruncatedLiouvillian& l, int k,
                                     const std::vector<cd>& hint_shifts) {
    const int n = static_cast<int>(l.superop.rows());
    if (k < 1) throw config_error("liouvillian_spectrum: k must be >= 1");
    if (k > n) throw config_error("liouvillian_spectrum: k exceeds superoperator dimension");

    std::vector<cd> all;
    if (n < 1024) {
        all = dense_eigenvalues(Eigen::MatrixXcd(l.superop));
    } else {
        // Shift-invert converges the eigenvalues nearest its shift, so a
        // single shift near the real axis starves the slow oscillatory
        // sectors. The superoperator diagonal is a cheap eigenvalue proxy
        // (exact for the uncoupled part): cluster its slowest entries into a
        // handful of shifts, sweep each, and merge the sweeps.
        std::vector<cd> diag(static_cast<std::size_t>(n));
        double max_re = 0.0;
        for (int i = 0; i < n; ++i) {
            diag[static_cast<std::size_t>(i)] = l.superop.coeff(i, i);
            max_re = std::max(max_re, std::abs(diag[static_cast<std::size_t>(i)].real()));
        }
        double slow = 0.0;
        for (const cd& v : diag) {
            double re = std::abs(v.real());
            if (re > 1e-12 * std::max(1.0, max_re) && (slow == 0.0 || re < slow)) slow = re;
        }
        if (slow == 0.0) slow = 1e-2;

        std::sort(diag.begin(), diag.end(), [](cd a, cd b) {
            if (std::abs(a.real()) != std::abs(b.real()))
                return std::abs(a.real()) < std::abs(b.real());
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() < b.imag();
        });
        const std::size_t probe = std::min<std::size_t>(diag.size(),
                                                        std::max<std::size_t>(4 * static_cast<std::size_t>(k), 32));
        const double cluster_radius = 0.5 * slow;
        std::vector<cd> centers;
        auto add_center = [&](cd v) {
            for (const cd& c : centers)
                if (std::abs(v - c) <= cluster_radius) return;
            centers.push_back(v);
        };
        std::vector<cd> hints = hint_shifts;
        std::sort(hints.begin(), hints.end(), [](cd a, cd b) {
            if (std::abs(a.real()) != std::abs(b.real()))
                return std::abs(a.real()) < std::abs(b.real());
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() < b.imag();
        });
        // Hermiticity preservation pairs every eigenvalue with its conjugate,
        // so only the upper half plane needs sweeping; the lower half is
        // reconstructed through the hermiticity map afterwards.
        for (const cd& h : hints) {
            if (centers.size() >= 10) break;
            if (h.imag() >= -cluster_radius) add_center(h);
        }
        for (std::size_t i = 0; i < probe && centers.size() < 10; ++i)
            if (diag[i].imag() >= -cluster_radius) add_center(diag[i]);
        if (centers.empty()) centers.push_back(cd(0.0, 0.0));

        const int kk = std::min(n, 10);
        std::vector<numerics::RitzPair> pool;
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            cd offset = slow * cd(0.19, 0.11);
            for (int attempt = 0; attempt < 3; ++attempt) {
                numerics::ArnoldiOptions opts;
                opts.shift = centers[ci] + offset;
                opts.block = 4;
                opts.max_basis = std::min(120, n);
                opts.tol = 3e-8;
                opts.seed = 0x5eed5u + static_cast<unsigned>(ci);
                opts.allow_partial = true;
                try {
                    auto ritz = numerics::shift_invert_arnoldi(l.superop, kk, opts);
                    for (auto& rp : ritz) pool.push_back(std::move(rp));
                    break;
                } catch (const numerical_error&) {
                    offset *= 1.7; // singular or stalled factorization: nudge the shift
                }
            }
        }
        if (pool.empty())
            throw numerical_error("liouvillian_spectrum: every shifted sweep failed");

        {
            double pool_scale = 0.0;
            for (const auto& rp : pool) pool_scale = std::max(pool_scale, std::abs(rp.lambda));
            const double mirror_tol = 1e-6 * std::max(1.0, pool_scale);
            const std::size_t swept = pool.size();
            for (std::size_t i = 0; i < swept; ++i) {
                if (std::abs(pool[i].lambda.imag()) <= mirror_tol) continue;
                numerics::RitzPair mirrored;
                mirrored.lambda = std::conj(pool[i].lambda);
                mirrored.residual = pool[i].residual;
                mirrored.vec.resize(n);
                for (int idx = 0; idx < n; ++idx)
                    mirrored.vec(idx) =
                        std::conj(pool[i].vec(l.hermiticity_map[static_cast<std::size_t>(idx)]));
                pool.push_back(std::move(mirrored));
            }
        }

        // Merge the sweeps. Candidates within dedup_tol of each other are a
        // group; the group's true multiplicity is the numerical rank of its
        // stacked eigenvectors (cross-sweep duplicates are rank-deficient,
        // genuinely degenerate eigenvalues are not).
        double scale = 0.0;
        for (const auto& rp : pool) scale = std::max(scale, std::abs(rp.lambda));
        const double dedup_tol = 1e-6 * std::max(1.0, scale);
        std::sort(pool.begin(), pool.end(), [](const numerics::RitzPair& a, const numerics::RitzPair& b) {
            if (std::abs(a.lambda.real()) != std::abs(b.lambda.real()))
                return std::abs(a.lambda.real()) < std::abs(b.lambda.real());
            if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
            if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
            return a.residual < b.residual;
        });
        std::vector<bool> used(pool.size(), false);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            std::vector<std::size_t> group;
            for (std::size_t j = i; j < pool.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(pool[j].lambda - pool[i].lambda) <= dedup_tol) {
                    group.push_back(j);
                    used[j] = true;
                }
            }
            std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
                return pool[a].residual < pool[b].residual;
            });
            Eigen::MatrixXcd v(n, static_cast<Eigen::Index>(group.size()));
            for (std::size_t g = 0; g < group.size(); ++g)
                v.col(static_cast<Eigen::Index>(g)) = pool[group[g]].vec.normalized();
            int rank = 1;
            if (group.size() > 1) {
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
                rank = 0;
                for (Eigen::Index s = 0; s < svd.singularValues().size(); ++s)
                    if (svd.singularValues()(s) > 0.35) ++rank;
                rank = std::max(rank, 1);
            }
            for (int g = 0; g < rank && g < static_cast<int>(group.size()); ++g)
                all.push_back(pool[group[static_cast<std::size_t>(g)]].lambda);
        }
        if (static_cast<int>(all.size()) < k)
            throw numerical_error("liouvillian_spectrum: merged sweeps resolved fewer than k eigenvalues");
    }
    std::sort(all.begin(), all.end(), [](cd a, cd b) {
        if (std::abs(a.real()) != std::abs(b.real())) return std::abs(a.real()) < std::abs(b.real());
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    all.resize(static_cast<std::size_t>(k));
    return all;
}

SpectrumMatch compare_spectra(const std::vector<MomentFrequencyTable>& predicted,
                              const std::vector<cd>& oracle_vals, double tol) {
    if (!(tol > 0.0)) throw config_error("compare_spectra: tol must be positive");
    std::vector<std::pair<cd, std::string>> pred;
    pred.emplace_back(cd(0.0, 0.0), "1");
    for (const auto& t : predicted)
        for (const auto& row : t.rows)
            pred.emplace_back(cd(0.0, -1.0) * row.frequency, row.multiset.display());

    struct Cand {
        double dist;
        std::size_t pi, oi;
    };
    std::vector<Cand> cands;
    for (std::size_t pi = 0; pi < pred.size(); ++pi)
        for (std::size_t oi = 0; oi < oracle_vals.size(); ++oi) {
            double dist = std::abs(pred[pi].first - oracle_vals[oi]);
            if (dist <= tol) cands.push_back({dist, pi, oi});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.pi != b.pi) return a.pi < b.pi;
        return a.oi < b.oi;
    });
    std::vector<bool> pused(pred.size(), false), oused(oracle_vals.size(), false);

    SpectrumMatch out;
    for (const auto& c : cands) {
        if (pused[c.pi] || oused[c.oi]) continue;
        pused[c.pi] = true;
        oused[c.oi] = true;
        out.matched.push_back({pred[c.pi].first, oracle_vals[c.oi], c.dist, pred[c.pi].second});
        out.max_deviation = std::max(out.max_deviation, c.dist);
    }
    for (std::size_t pi = 0; pi < pred.size(); ++pi)
        if (!pused[pi]) out.unmatched_predicted.emplace_back(pred[pi].first, pred[pi].second);
    for (std::size_t oi = 0; oi < oracle_vals.size(); ++oi)
        if (!oused[oi]) out.unmatched_oracle.push_back(oracle_vals[oi]);
    out.all_oracle_matched = out.unmatched_oracle.empty();
    return out;
}

StationaryState stationary_state(const TruncatedLiouvillian& l) {
    const int n = static_cast<int>(l.superop.rows());
    const int d = l.dim;
    StationaryState out;

    // Inverse iteration about a tiny shift; vec(I) has full overlap with the
    // stationary component and is trace-one already.
    Sparse shifted = l.superop;
    Sparse id(n, n);
    id.setIdentity();
    const double sigma = 1e-9;
    shifted -= cd(sigma, 0.0) * id;
    shifted.makeCompressed();
    Eigen::SparseLU<Sparse> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        throw numerical_error("stationary_state: factorization failed");

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < d; ++i) x(i + d * i) = cd(1.0, 0.0);
    x.normalize();
    double rnorm = 1.0;
    for (int it = 0; it < 100; ++it) {
        x = lu.solve(x);
        x.normalize();
        rnorm = (l.superop * x).norm();
        if (rnorm < 1e-12) break;
    }
    if (rnorm > 1e-8)
        throw numerical_error("stationary_state: kernel iteration stalled (residual " +
                              std::to_string(rnorm) + ")");

    // Degeneracy probe: a second, deflated iteration converging to the kernel
    // as well means the stationary state is not unique.
    {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i < n; ++i) y(i) = cd(std::cos(0.7 * i), std::sin(0.3 * i));
        y -= x * (x.adjoint() * y);
        y.normalize();
        for (int it = 0; it < 30; ++it) {
            y = lu.solve(y);
            y -= x * (x.adjoint() * y);
            double nn = y.norm();
            if (nn < 1e-14) break;
            y /= nn;
        }
        double second = (l.superop * y).norm();
        if (second < 1e-10) {
            out.degenerate = true;
            out.kernel = {x, y};
        }
    }

    cd trace(0.0, 0.0);
    for (int i = 0; i < d; ++i) trace += x(i + d * i);
    if (std::abs(trace) < 1e-12) {
        out.degenerate = true;
        if (out.kernel.empty()) out.kernel = {x};
        out.rho_vec = x;
        return out;
    }
    x /= trace;
    out.rho_vec = x;

    double herm = 0.0;
    for (int idx = 0; idx < n; ++idx) {
        cd mirror = std::conj(x(l.hermiticity_map[static_cast<std::size_t>(idx)]));
        herm = std::max(herm, std::abs(x(idx) - mirror));
    }
    out.hermiticity_residual = herm;

    Eigen::MatrixXcd rho(d, d);
    for (int col = 0; col < d; ++col)
        for (int row = 0; row < d; ++row) rho(row, col) = x(row + d * col);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((rho + rho.adjoint()) / 2.0);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    return out;
}

double trace_preservation_residual(const TruncatedLiouvillian& l) {
    const int n = static_cast<int>(l.superop.rows());
    const int d = l.dim;
    Eigen::VectorXcd tr = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < d; ++i) tr(i + d * i) = cd(1.0, 0.0);
    Eigen::VectorXcd left = Eigen::VectorXcd(l.superop.transpose() * tr);
    return left.norm() / std::max(1.0, l.superop.norm());
}

ConvergedSpectrum converged_spectrum(const QuadraticSystem& system,
                                     const std::vector<int>& cutoffs_lo, int k, double tol,
                                     int max_super_dim) {
    std::vector<int> hi = cutoffs_lo;
    for (int& c : hi) c += 4;

    // Shift hints for the sparse path: sums of up to three dynamics-matrix
    // rapidities -i omega mark the slow sectors, including the oscillatory
    // ones invisible to the superoperator diagonal.
    std::vector<cd> hints{cd(0.0, 0.0)};
    {
        const auto s = eigendecompose(build_dynamics_matrix(system), 0.0);
        std::vector<cd> rap;
        for (Eigen::Index i = 0; i < s.omegas.size(); ++i)
            rap.push_back(cd(0.0, -1.0) * s.omegas(i));
        std::vector<cd> frontier{cd(0.0, 0.0)};
        for (int p = 1; p <= 3; ++p) {
            std::vector<cd> next;
            for (const cd& f : frontier)
                for (const cd& r : rap) next.push_back(f + r);
            frontier = std::move(next);
            hints.insert(hints.end(), frontier.begin(), frontier.end());
        }
    }

    // Both stages are padded well past k: the |Re|-sorted slice at k can land
    // inside a cluster of near-tied eigenvalues, and slicing the two cutoffs
    // differently there would pair unrelated sectors.
    std::int64_t dim_lo = 1;
    for (int c : cutoffs_lo) dim_lo *= c;
    const int pad = static_cast<int>(std::min<std::int64_t>(dim_lo * dim_lo, 2 * k + 6));

    TruncatedLiouvillian llo = build_fock_liouvillian(system, cutoffs_lo, max_super_dim);
    std::vector<cd> lo_vals = liouvillian_spectrum(llo, pad, hints);
    TruncatedLiouvillian lhi = build_fock_liouvillian(system, hi, max_super_dim);
    std::vector<cd> hi_vals = liouvillian_spectrum(lhi, pad, hints);

    ConvergedSpectrum out;
    out.eigenvalues = hi_vals;
    out.converged.resize(hi_vals.size(), false);
    out.movement.resize(hi_vals.size(),
                        std::numeric_limits<double>::infinity());
    // Globally greedy pairing: nearest pairs bind first, so a padded
    // boundary extra cannot steal the partner of a reported value.
    struct Cand {
        double d;
        std::size_t i, j;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < hi_vals.size(); ++i)
        for (std::size_t j = 0; j < lo_vals.size(); ++j)
            cands.push_back({std::abs(hi_vals[i] - lo_vals[j]), i, j});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<bool> hused(hi_vals.size(), false), lused(lo_vals.size(), false);
    for (const auto& c : cands) {
        if (hused[c.i] || lused[c.j]) continue;
        hused[c.i] = true;
        lused[c.j] = true;
        out.movement[c.i] = c.d;
        out.converged[c.i] = c.d < tol / 10.0;
    }
    out.eigenvalues.resize(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(hi_vals.size()))));
    out.converged.resize(out.eigenvalues.size());
    out.movement.resize(out.eigenvalues.size());
    return out;
}

} // namespace qef
