// Degeneracy detection and classification: matrix-level Jordan analysis,
// generative degeneracy-table bookkeeping, hidden-EP row scanning, EP-surface
// sampling, and provenance labeling.
#include "qef/eppoints.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include <json.hpp>

#include "qef/exports.hpp"
#include "qef/numerics/quartic.hpp"
#include "qef/numerics/schur.hpp"

namespace qef {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

std::vector<std::vector<int>> linkage_clusters(const std::vector<cd>& vals, double r) {
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
                if (std::abs(vals[static_cast<std::size_t>(u)] - vals[static_cast<std::size_t>(v)]) <= r) {
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

int rank_below(const Mat& m, double cut) {
    Eigen::JacobiSVD<Mat> svd(m);
    int nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) <= cut) ++nullity;
    return static_cast<int>(m.cols()) - nullity;
}

PointClass classify(int algebraic, int geometric) {
    if (algebraic <= 1) return PointClass::none;
    if (geometric == algebraic) return PointClass::qdp;
    if (geometric == 1) return PointClass::qep;
    return PointClass::qhp;
}

std::uint64_t pow2(int k) { return 1ull << k; }

std::uint64_t factorial(int n) {
    std::uint64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
    return r;
}

std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

const char* class_name(PointClass c) {
    switch (c) {
        case PointClass::none: return "none";
        case PointClass::qep: return "qep";
        case PointClass::qdp: return "qdp";
        case PointClass::qhp: return "qhp";
    }
    return "none";
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::inherited: return "inherited";
        case Provenance::genuine: return "genuine";
        case Provenance::induced: return "induced";
        case Provenance::na: return "na";
    }
    return "na";
}

} // namespace

QepResiduals qep_residuals(const TwoModeParams& p) {
    const double alpha = p.alpha();
    QepResiduals r;
    r.r_minus = p.epsilon * p.epsilon - (alpha - p.g) * (alpha - p.g);
    r.r_plus = p.epsilon * p.epsilon - (alpha + p.g) * (alpha + p.g);
    r.r_qhp = p.epsilon * p.epsilon - p.kappa * p.kappa - p.gamma_plus() * p.gamma_plus();
    return r;
}

DegeneracyReport detect_coalescence(const Eigen::MatrixXcd& m, double tol) {
    const Eigen::Index n = m.rows();
    if (n != m.cols() || n == 0) throw config_error("detect_coalescence: matrix must be square");
    if (!m.allFinite()) throw config_error("detect_coalescence: non-finite entries");
    if (!(tol > 0.0)) throw config_error("detect_coalescence: tol must be positive");

    const double scale = std::max(1.0, m.norm());
    const double radius = tol * scale;

    Vec lam(n);
    if (n == 4) {
        auto roots = numerics::quartic_eigenvalues(m);
        for (int i = 0; i < 4; ++i) lam(i) = roots[static_cast<std::size_t>(i)];
    } else if (n == 1) {
        lam(0) = m(0, 0);
    } else {
        lam = numerics::schur_eigenvalues(m);
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (lam(a).real() != lam(b).real()) return lam(a).real() > lam(b).real();
        if (lam(a).imag() != lam(b).imag()) return lam(a).imag() > lam(b).imag();
        return a < b;
    });
    std::vector<cd> sorted;
    sorted.reserve(static_cast<std::size_t>(n));
    for (int i : order) sorted.push_back(lam(i));

    DegeneracyReport rep;
    rep.tol = tol;
    auto clusters = linkage_clusters(sorted, radius);

    // Cluster separations decide confidence, not correctness.
    std::vector<cd> centers;
    for (const auto& c : clusters) {
        cd mean(0.0, 0.0);
        for (int idx : c) mean += sorted[static_cast<std::size_t>(idx)];
        centers.push_back(mean / static_cast<double>(c.size()));
    }

    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        DegeneracyCluster out;
        out.frequency = centers[ci];
        out.algebraic = static_cast<int>(clusters[ci].size());
        out.members = clusters[ci];

        if (out.algebraic == 1) {
            out.geometric = 1;
            out.qep_degeneracy = 1;
            out.qdp_multiplicity = 1;
            out.classification = PointClass::none;
        } else {
            // Weyr sequence from nullities of successive powers of the shift.
            Mat shifted = m - centers[ci] * Mat::Identity(n, n);
            Mat power = Mat::Identity(n, n);
            int prev_nullity = 0;
            int chain = 0;
            int geometric = 1;
            for (int k = 1; k <= out.algebraic; ++k) {
                power = power * shifted;
                double cut = tol * std::max(1.0, power.norm());
                int nullity = static_cast<int>(n) - rank_below(power, cut);
                nullity = std::min(nullity, out.algebraic);
                if (k == 1) geometric = std::max(1, nullity);
                if (nullity > prev_nullity) chain = k;
                prev_nullity = nullity;
                if (nullity >= out.algebraic) break;
            }
            out.geometric = geometric;
            out.qep_degeneracy = std::max(1, chain);
            out.qdp_multiplicity = geometric;
            out.classification = classify(out.algebraic, out.geometric);
        }

        double min_gap = -1.0;
        for (std::size_t cj = 0; cj < clusters.size(); ++cj) {
            if (cj == ci) continue;
            double gap = std::abs(centers[ci] - centers[cj]);
            if (min_gap < 0.0 || gap < min_gap) min_gap = gap;
        }
        out.low_confidence = min_gap >= 0.0 && min_gap < 10.0 * radius;
        if (out.low_confidence) rep.low_confidence = true;
        rep.clusters.push_back(std::move(out));
    }
    return rep;
}

DegeneracyReport moment_degeneracy_report(const BasicSpectrum& s, int p,
                                          bool include_redundant, double tol) {
    if (s.omegas.size() != 4)
        throw config_error("moment_degeneracy_report: requires a two-mode (4-slot) spectrum");
    if (p < 1) throw config_error("moment_degeneracy_report: order must be >= 1");
    if (!(tol > 0.0)) throw config_error("moment_degeneracy_report: tol must be positive");

    const double scale = std::max(1.0, s.omegas.norm());
    const double r = tol * scale;
    const cd mean1 = (s.omegas(0) + s.omegas(1)) / 2.0;
    const cd mean2 = (s.omegas(2) + s.omegas(3)) / 2.0;
    const bool co1 = std::abs(s.omegas(0) - s.omegas(1)) <= r;
    const bool co2 = std::abs(s.omegas(2) - s.omegas(3)) <= r;
    const bool merged = co1 && co2 && std::abs(mean1 - mean2) <= r;

    MomentFrequencyTable table = enumerate_frequencies(s, p);
    auto row_index = [&](const MomentIndex& mi) {
        for (std::size_t i = 0; i < table.rows.size(); ++i)
            if (table.rows[i].multiset == mi) return static_cast<int>(i);
        return -1;
    };

    DegeneracyReport rep;
    rep.tol = tol;

    auto push_cell = [&](cd freq, std::uint64_t qdp, std::uint64_t qep, bool hidden,
                         std::vector<int> members) {
        DegeneracyCluster c;
        c.frequency = freq;
        c.qdp_multiplicity = static_cast<int>(qdp);
        c.qep_degeneracy = static_cast<int>(qep);
        c.algebraic = static_cast<int>(qdp * qep);
        c.geometric = static_cast<int>(qdp);
        if (qep > 1 && qdp > 1) c.classification = PointClass::qhp;
        else if (qep > 1) c.classification = PointClass::qep;
        else if (qdp > 1) c.classification = PointClass::qdp;
        else c.classification = PointClass::none;
        c.hidden = hidden;
        std::sort(members.begin(), members.end());
        c.members = std::move(members);
        rep.clusters.push_back(std::move(c));
    };

    if (merged) {
        // Full coalescence (the g = 0 circle): group by the number of factors
        // j drawn from the mode-1 pair. With redundant orderings each group is
        // a QDP C(p,j) x QEP 2^p cell; without them one representative per
        // group survives and the chain length is p+1.
        for (int j = 0; j <= p; ++j) {
            std::vector<int> members;
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                const auto& q = table.rows[i].multiset.counts;
                if (q[0] + q[1] == j) members.push_back(static_cast<int>(i));
            }
            cd freq = static_cast<double>(j) * mean1 + static_cast<double>(p - j) * mean2;
            std::uint64_t qdp = include_redundant ? binom(p, j) : 1;
            std::uint64_t qep = include_redundant ? pow2(p) : static_cast<std::uint64_t>(p + 1);
            push_cell(freq, qdp, qep, p % 2 == 0, std::move(members));
        }
        return rep;
    }

    if (co1 != co2) {
        // One pair coalesces (single QEP, g != 0). Cells are indexed by the
        // count k >= 1 of coalescing-pair factors and the split (n, nd) of the
        // untouched pair; k = 0 rows keep their plain ordering degeneracy.
        const int cp = co1 ? 0 : 2;  // coalescing pair slots (cp, cp+1)
        const int op = co1 ? 2 : 0;
        const cd cmean = co1 ? mean1 : mean2;
        for (int k = p; k >= 1; --k) {
            for (int no = p - k; no >= 0; --no) {
                int nod = p - k - no;
                std::vector<int> members;
                for (std::size_t i = 0; i < table.rows.size(); ++i) {
                    const auto& q = table.rows[i].multiset.counts;
                    if (q[static_cast<std::size_t>(cp)] + q[static_cast<std::size_t>(cp + 1)] == k &&
                        q[static_cast<std::size_t>(op)] == no &&
                        q[static_cast<std::size_t>(op + 1)] == nod)
                        members.push_back(static_cast<int>(i));
                }
                cd freq = static_cast<double>(k) * cmean +
                          static_cast<double>(no) * s.omegas(op) +
                          static_cast<double>(nod) * s.omegas(op + 1);
                std::uint64_t qdp = include_redundant
                                        ? factorial(p) / (factorial(k) * factorial(no) * factorial(nod))
                                        : 1;
                std::uint64_t qep = include_redundant ? pow2(k) : static_cast<std::uint64_t>(k + 1);
                push_cell(freq, qdp, qep, k % 2 == 0, std::move(members));
            }
        }
        for (const auto& row : table.rows) {
            const auto& q = row.multiset.counts;
            if (q[static_cast<std::size_t>(cp)] + q[static_cast<std::size_t>(cp + 1)] != 0) continue;
            std::uint64_t qdp = include_redundant ? row.moment_degeneracy : 1;
            push_cell(row.frequency, qdp, 1, false, {row_index(row.multiset)});
        }
        return rep;
    }

    if (co1 && co2) {
        // Both pairs coalesce at distinct frequencies: cells (k1, k2 = p - k1).
        for (int k1 = p; k1 >= 0; --k1) {
            int k2 = p - k1;
            std::vector<int> members;
            for (std::size_t i = 0; i < table.rows.size(); ++i)
                if (table.rows[i].multiset.counts[0] + table.rows[i].multiset.counts[1] == k1)
                    members.push_back(static_cast<int>(i));
            cd freq = static_cast<double>(k1) * mean1 + static_cast<double>(k2) * mean2;
            std::uint64_t qdp = include_redundant ? binom(p, k1) : 1;
            std::uint64_t qep =
                include_redundant ? pow2(p) : static_cast<std::uint64_t>(k1 + k2 + 1);
            bool hide = (k1 % 2 == 0) && (k2 % 2 == 0);
            push_cell(freq, qdp, qep, hide, std::move(members));
        }
        return rep;
    }

    // No coalescence: clusters are plain frequency groups; degeneracy is the
    // ordering multiplicity (redundant) or the distinct-moment count.
    std::vector<cd> freqs;
    for (const auto& row : table.rows) freqs.push_back(row.frequency);
    auto groups = linkage_clusters(freqs, r);
    std::vector<std::pair<int, std::vector<int>>> ordered;
    for (auto& g : groups) ordered.emplace_back(g.front(), g);
    std::sort(ordered.begin(), ordered.end());
    for (auto& [first, g] : ordered) {
        (void)first;
        cd mean(0.0, 0.0);
        std::uint64_t osum = 0;
        for (int idx : g) {
            mean += freqs[static_cast<std::size_t>(idx)];
            osum += table.rows[static_cast<std::size_t>(idx)].moment_degeneracy;
        }
        mean /= static_cast<double>(g.size());
        std::uint64_t qdp = include_redundant ? osum : static_cast<std::uint64_t>(g.size());
        push_cell(mean, qdp, 1, false, std::move(g));
    }
    return rep;
}

std::vector<int> hidden_qep_scan(const MomentFrequencyTable& table, const BasicSpectrum& s,
                                 double tol) {
    if (!(tol > 0.0)) throw config_error("hidden_qep_scan: tol must be positive");
    const int n = static_cast<int>(s.omegas.size());
    const double r = tol * std::max(1.0, s.omegas.norm());

    std::vector<cd> vals(s.omegas.data(), s.omegas.data() + n);
    auto clusters = linkage_clusters(vals, r);

    // Defective candidate groups: clusters holding both slots of some pair.
    std::vector<std::vector<int>> groups;
    for (const auto& c : clusters) {
        bool has_pair = false;
        for (const auto& pr : s.pairing) {
            bool a = std::find(c.begin(), c.end(), pr.first) != c.end();
            bool b = std::find(c.begin(), c.end(), pr.second) != c.end();
            if (a && b) has_pair = true;
        }
        if (has_pair && c.size() >= 2) groups.push_back(c);
    }

    std::vector<int> hidden;
    if (groups.empty()) return hidden;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& counts = table.rows[i].multiset.counts;
        if (static_cast<int>(counts.size()) != n) continue;
        bool cancels = true;
        int involvement = 0;
        for (const auto& g : groups) {
            int net = 0;
            for (int slot : g) {
                int sign = (slot % 2 == 0) ? 1 : -1;
                net += sign * counts[static_cast<std::size_t>(slot)];
                involvement += counts[static_cast<std::size_t>(slot)];
            }
            if (net != 0) cancels = false;
        }
        if (cancels && involvement >= 1) hidden.push_back(static_cast<int>(i));
    }
    return hidden;
}

std::vector<SurfacePoint> sweep_surface(const SweepGrid& grid, double tol, int jobs) {
    if (grid.n_gamma < 2 || grid.n_kappa < 1 || grid.n_g < 1)
        throw config_error("sweep_surface: grid must have at least 2 gamma and 1 kappa/g samples");
    if (!(tol > 0.0)) throw config_error("sweep_surface: tol must be positive");
    if (jobs < 1) jobs = 1;

    const double gstep = grid.n_g > 1 ? 2.0 * grid.g_max / (grid.n_g - 1) : 0.0;
    const double kstep = grid.n_kappa > 1 ? grid.kappa_max / (grid.n_kappa - 1) : 0.0;
    const double gam_step = grid.gamma_max / (grid.n_gamma - 1);

    const int ncols = grid.n_kappa * grid.n_g;
    std::vector<std::vector<SurfacePoint>> per_col(static_cast<std::size_t>(ncols));

    auto refine = [&](auto&& f, double lo, double hi, double flo) {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = f(mid);
            if (std::abs(fm) <= 0.5 * tol || hi - lo < 1e-15) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    auto scan_column = [&](int col) {
        const int ik = col / grid.n_g;
        const int ig = col % grid.n_g;
        const double kap = ik * kstep;
        // Symmetric grid: the mirror index yields the exact negation, which
        // makes the swept point set bitwise invariant under g -> -g.
        const double g = (ig - (grid.n_g - 1) / 2.0) * gstep;
        auto& out = per_col[static_cast<std::size_t>(col)];

        auto scan_branch = [&](auto&& f, const char* name) {
            double prev = f(0.0);
            for (int i = 1; i < grid.n_gamma; ++i) {
                double gam = i * gam_step;
                double cur = f(gam);
                if (prev == 0.0) {
                    out.push_back({(i - 1) * gam_step, kap, g, name, 0.0});
                } else if (cur != 0.0 && (prev < 0.0) != (cur < 0.0)) {
                    double root = refine(f, (i - 1) * gam_step, gam, prev);
                    out.push_back({root, kap, g, name, f(root)});
                }
                prev = cur;
            }
            if (prev == 0.0)
                out.push_back({(grid.n_gamma - 1) * gam_step, kap, g, name, 0.0});
        };

        auto alpha = [&](double gam) { return std::sqrt(kap * kap + gam * gam); };
        scan_branch([&](double gam) {
            double d = alpha(gam) - g;
            return 1.0 - d * d;
        }, "minus");
        scan_branch([&](double gam) {
            double d = alpha(gam) + g;
            return 1.0 - d * d;
        }, "plus");
        if (g == 0.0)
            scan_branch([&](double gam) { return 1.0 - kap * kap - gam * gam; }, "circle");
    };

    if (jobs == 1) {
        for (int col = 0; col < ncols; ++col) scan_column(col);
    } else {
        std::vector<std::thread> threads;
        std::atomic<int> next{0};
        for (int t = 0; t < jobs; ++t)
            threads.emplace_back([&]() {
                int col;
                while ((col = next.fetch_add(1)) < ncols) scan_column(col);
            });
        for (auto& th : threads) th.join();
    }

    std::vector<SurfacePoint> out;
    for (auto& col : per_col)
        out.insert(out.end(), col.begin(), col.end());
    return out;
}

std::vector<DegeneracyReport> classify_qhp_provenance(
    std::vector<DegeneracyReport> with_redundant,
    const std::vector<DegeneracyReport>& without_redundant, bool balanced, double tol) {
    if (with_redundant.size() != without_redundant.size())
        throw config_error("classify_qhp_provenance: report lists must align per order");
    if (with_redundant.empty()) return with_redundant;

    double scale = 1.0;
    for (const auto& rep : with_redundant)
        for (const auto& c : rep.clusters) scale = std::max(scale, std::abs(c.frequency));
    const double r = tol * scale;

    // Basic-level QDP structure: order-1 clusters sharing a frequency, or an
    // order-1 cluster already carrying multiplicity without redundancy.
    bool basic_degenerate = false;
    {
        const auto& first = without_redundant.front();
        for (std::size_t i = 0; i < first.clusters.size(); ++i) {
            if (first.clusters[i].qdp_multiplicity > 1) basic_degenerate = true;
            for (std::size_t j = i + 1; j < first.clusters.size(); ++j)
                if (std::abs(first.clusters[i].frequency - first.clusters[j].frequency) <= r)
                    basic_degenerate = true;
        }
    }

    auto qdp_sum_at = [&](const DegeneracyReport& rep, cd freq) {
        std::uint64_t sum = 0;
        for (const auto& c : rep.clusters)
            if (std::abs(c.frequency - freq) <= r)
                sum += static_cast<std::uint64_t>(c.qdp_multiplicity);
        return sum;
    };

    for (std::size_t ord = 0; ord < with_redundant.size(); ++ord) {
        for (auto& c : with_redundant[ord].clusters) {
            c.provenance = Provenance::na;
            if (c.classification == PointClass::none) continue;

            bool genuine = false;
            if (balanced) {
                for (std::size_t other = 0; other < with_redundant.size() && !genuine; ++other) {
                    if (other == ord) continue;
                    for (const auto& oc : with_redundant[other].clusters)
                        if (std::abs(oc.frequency - c.frequency) <= r) {
                            genuine = true;
                            break;
                        }
                }
            }
            if (genuine) {
                c.provenance = Provenance::genuine;
                continue;
            }
            std::uint64_t with_qdp = qdp_sum_at(with_redundant[ord], c.frequency);
            std::uint64_t without_qdp = qdp_sum_at(without_redundant[ord], c.frequency);
            if (basic_degenerate && without_qdp > 1) {
                c.provenance = Provenance::inherited;
            } else if (with_qdp > without_qdp) {
                c.provenance = Provenance::induced;
            }
        }
    }
    return with_redundant;
}

std::string surface_to_csv(const std::vector<SurfacePoint>& points) {
    std::ostringstream out;
    out << "gamma_plus_over_eps,kappa_over_eps,g_over_eps,branch,residual\n";
    for (const auto& p : points) {
        out << format_double(p.gamma_plus_over_eps) << "," << format_double(p.kappa_over_eps)
            << "," << format_double(p.g_over_eps) << "," << p.branch << ","
            << format_double(p.residual) << "\n";
    }
    return out.str();
}

std::string report_to_json(const DegeneracyReport& r) {
    nlohmann::ordered_json j;
    j["tol"] = r.tol;
    j["low_confidence"] = r.low_confidence;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const auto& c : r.clusters) {
        nlohmann::ordered_json cj;
        cj["frequency"] = {c.frequency.real(), c.frequency.imag()};
        cj["algebraic"] = c.algebraic;
        cj["geometric"] = c.geometric;
        cj["classification"] = class_name(c.classification);
        cj["qep_degeneracy"] = c.qep_degeneracy;
        cj["qdp_multiplicity"] = c.qdp_multiplicity;
        cj["hidden"] = c.hidden;
        cj["provenance"] = provenance_name(c.provenance);
        cj["low_confidence"] = c.low_confidence;
        cj["members"] = c.members;
        j["clusters"].push_back(std::move(cj));
    }
    return j.dump(2);
}

} // namespace qef
