// Moment-hierarchy propagation: initial states (vacuum, coherent via Wick),
// first-order flows, the stacked block-triangular hierarchy exponential, the
// closed-form two-level solution, and frequency-content fitting.
#include "qef/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qef/exports.hpp"
#include "qef/numerics/expm.hpp"

namespace qef {

namespace {

// Palindromic position rank: creation of mode m (label 2m+1) sits at rank m,
// annihilation of mode m (label 2m) at rank 2M-1-m, so the word reads
// b_1^dag ... b_M^dag b_M ... b_1.
int palindromic_rank(int label, int num_modes) {
    int mode = label / 2;
    return (label % 2 == 1) ? mode : 2 * num_modes - 1 - mode;
}

// Multisets of the given order in canonical order, via the enumeration table
// built on a dummy spectrum of the right width.
std::vector<MomentIndex> multisets_of_order(int num_modes, int p) {
    BasicSpectrum dummy;
    dummy.omegas = Eigen::VectorXcd::Zero(2 * num_modes);
    MomentFrequencyTable t = enumerate_frequencies(dummy, p);
    std::vector<MomentIndex> out;
    out.reserve(t.rows.size());
    for (auto& r : t.rows) out.push_back(std::move(r.multiset));
    return out;
}

} // namespace

void MomentState::check_conjugation(double tol) const {
    for (const auto& [mi, v] : values) {
        auto it = values.find(mi.daggered());
        if (it == values.end())
            throw config_error("MomentState: daggered partner of " + mi.display() + " missing");
        double dev = std::abs(std::conj(v) - it->second);
        if (dev > tol * std::max(1.0, std::abs(v))) {
            std::ostringstream msg;
            msg << "MomentState: conjugation violated for " << mi.display() << " (deviation "
                << dev << ")";
            throw config_error(msg.str());
        }
    }
}

MomentState vacuum_state(int num_modes, int P) {
    if (num_modes < 1) throw config_error("vacuum_state: num_modes must be >= 1");
    if (P < 1) throw config_error("vacuum_state: order must be >= 1");
    MomentState st;
    st.order = P;
    for (int p = 1; p <= P; ++p)
        for (auto& mi : multisets_of_order(num_modes, p)) st.values[mi] = cd(0.0, 0.0);
    return st;
}

MomentState coherent_state(const BasicSpectrum& s, const Eigen::VectorXcd& alpha, int P) {
    const int n = static_cast<int>(s.omegas.size());
    const int m = n / 2;
    if (!s.diagonalizable || s.p_inverse.size() == 0)
        throw config_error("coherent_state: spectrum is not diagonalizable");
    if (alpha.size() != n)
        throw config_error("coherent_state: alpha must have one entry per stacked operator");
    if (P < 1) throw config_error("coherent_state: order must be >= 1");

    Eigen::VectorXcd b0 = s.p_inverse * alpha;
    // Ordered vacuum contractions in the a-basis: <da_m da_m^dag> = 1.
    Eigen::MatrixXcd va = Eigen::MatrixXcd::Zero(n, n);
    for (int mm = 0; mm < m; ++mm) va(2 * mm, 2 * mm + 1) = cd(1.0, 0.0);
    Eigen::MatrixXcd w = s.p_inverse * va * s.p_inverse.transpose();

    // Wick expansion over the palindromic word; every subword of a sorted word
    // is sorted, so memoizing on the count vector is sound.
    std::map<std::vector<int>, cd> memo;
    auto word_of = [&](const std::vector<int>& counts) {
        std::vector<int> word;
        for (int rank = 0; rank < n; ++rank)
            for (int l = 0; l < n; ++l)
                if (palindromic_rank(l, m) == rank)
                    for (int c = 0; c < counts[static_cast<std::size_t>(l)]; ++c)
                        word.push_back(l);
        return word;
    };
    auto wick = [&](auto&& self, const std::vector<int>& counts) -> cd {
        auto it = memo.find(counts);
        if (it != memo.end()) return it->second;
        std::vector<int> word = word_of(counts);
        if (word.empty()) return cd(1.0, 0.0);
        cd total(0.0, 0.0);
        int head = word.front();
        {
            std::vector<int> rest = counts;
            rest[static_cast<std::size_t>(head)]--;
            total += b0(head) * self(self, rest);
        }
        // Pair the head with each later position, once per distinct label.
        std::vector<bool> done(static_cast<std::size_t>(n), false);
        for (std::size_t j = 1; j < word.size(); ++j) {
            int lj = word[j];
            if (done[static_cast<std::size_t>(lj)]) continue;
            done[static_cast<std::size_t>(lj)] = true;
            int mult = counts[static_cast<std::size_t>(lj)] - (lj == head ? 1 : 0);
            if (mult <= 0) continue;
            std::vector<int> rest = counts;
            rest[static_cast<std::size_t>(head)]--;
            rest[static_cast<std::size_t>(lj)]--;
            total += static_cast<double>(mult) * w(head, lj) * self(self, rest);
        }
        memo[counts] = total;
        return total;
    };

    MomentState st;
    st.order = P;
    for (int p = 1; p <= P; ++p)
        for (auto& mi : multisets_of_order(m, p)) st.values[mi] = wick(wick, mi.counts);
    return st;
}

Eigen::VectorXcd propagate_first(const BasicSpectrum& s, const Eigen::VectorXcd& b0, double t) {
    if (!s.diagonalizable)
        throw numerical_error("propagate_first: spectrum is not diagonalizable; use the dynamics overload");
    if (b0.size() != s.omegas.size())
        throw config_error("propagate_first: b0 size must match the spectrum");
    Eigen::VectorXcd out(b0.size());
    for (Eigen::Index i = 0; i < b0.size(); ++i)
        out(i) = std::exp(cd(0.0, -1.0) * s.omegas(i) * t) * b0(i);
    return out;
}

Eigen::VectorXcd propagate_first(const DynamicsMatrix& d, const Eigen::VectorXcd& a0, double t) {
    if (a0.size() != d.m_omega.rows())
        throw config_error("propagate_first: a0 size must match the dynamics matrix");
    return numerics::expm(cd(0.0, -1.0) * t * d.m_omega) * a0;
}

MomentState propagate_hierarchy(const BasicSpectrum& s, const Eigen::MatrixXcd& k_tilde,
                                const MomentState& init, double t) {
    const int n = static_cast<int>(s.omegas.size());
    const int m = n / 2;
    const int P = init.order;
    if (P < 1) throw config_error("propagate_hierarchy: initial state must carry order >= 1");
    if (k_tilde.rows() != n || k_tilde.cols() != n)
        throw config_error("propagate_hierarchy: k_tilde must be 2M x 2M");

    // Stacked index: slot 0 is the constant (order-0) moment.
    std::vector<MomentIndex> slots;
    std::map<MomentIndex, int> index;
    for (int p = 1; p <= P; ++p)
        for (auto& mi : multisets_of_order(m, p)) {
            index[mi] = static_cast<int>(slots.size()) + 1;
            slots.push_back(mi);
        }
    const int dim = static_cast<int>(slots.size()) + 1;

    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t si = 0; si < slots.size(); ++si) {
        const auto& counts = slots[si].counts;
        const int row = static_cast<int>(si) + 1;
        cd freq(0.0, 0.0);
        for (int l = 0; l < n; ++l)
            freq += static_cast<double>(counts[static_cast<std::size_t>(l)]) * s.omegas(l);
        gen(row, row) = cd(0.0, -1.0) * freq;

        // Pair deletions couple order p to order p-2 with the noise
        // correlator of the (positionally earlier, later) label pair.
        for (int x = 0; x < n; ++x) {
            int qx = counts[static_cast<std::size_t>(x)];
            if (qx >= 2) {
                MomentIndex tgt = slots[si];
                tgt.counts[static_cast<std::size_t>(x)] -= 2;
                int col = tgt.order() == 0 ? 0 : index.at(tgt);
                gen(row, col) += static_cast<double>(qx * (qx - 1) / 2) * k_tilde(x, x);
            }
            for (int y = x + 1; y < n; ++y) {
                int qy = counts[static_cast<std::size_t>(y)];
                if (qx < 1 || qy < 1) continue;
                MomentIndex tgt = slots[si];
                tgt.counts[static_cast<std::size_t>(x)] -= 1;
                tgt.counts[static_cast<std::size_t>(y)] -= 1;
                int col = tgt.order() == 0 ? 0 : index.at(tgt);
                int first = palindromic_rank(x, m) < palindromic_rank(y, m) ? x : y;
                int second = first == x ? y : x;
                gen(row, col) += static_cast<double>(qx * qy) * k_tilde(first, second);
            }
        }
    }

    Eigen::VectorXcd m0 = Eigen::VectorXcd::Zero(dim);
    m0(0) = cd(1.0, 0.0);
    for (std::size_t si = 0; si < slots.size(); ++si) {
        auto it = init.values.find(slots[si]);
        if (it == init.values.end())
            throw config_error("propagate_hierarchy: initial state misses " + slots[si].display());
        m0(static_cast<Eigen::Index>(si) + 1) = it->second;
    }

    Eigen::VectorXcd mt = numerics::expm(gen * t) * m0;
    MomentState out;
    out.order = P;
    for (std::size_t si = 0; si < slots.size(); ++si)
        out.values[slots[si]] = mt(static_cast<Eigen::Index>(si) + 1);
    return out;
}

std::array<cd, 4> tla_evolution(double omega, double gamma_x, const std::array<cd, 4>& init,
                                double t) {
    if (!(gamma_x >= 0.0)) throw config_error("tla_evolution: gamma_x must be >= 0");
    const double g = gamma_x;
    const cd om_perp = std::sqrt(cd(omega * omega - g * g, 0.0));

    // cos(Omega t) and sin(Omega t)/Omega, series-expanded near the EP where
    // Omega -> 0 (sin(Omega t)/Omega -> t).
    cd z = om_perp * t;
    cd c, s_over;
    if (std::abs(z) < 1e-4) {
        cd z2 = z * z;
        c = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
        s_over = t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    } else {
        c = std::cos(z);
        s_over = std::sin(z) / om_perp;
    }

    const double eg = std::exp(-g * t);
    const double ch = std::cosh(g * t);
    const double sh = std::sinh(g * t);

    std::array<cd, 4> out;
    out[0] = eg * (ch * init[0] + sh * init[3]);
    out[3] = eg * (sh * init[0] + ch * init[3]);
    out[1] = eg * ((c + cd(0.0, 1.0) * omega * s_over) * init[1] + g * s_over * init[2]);
    out[2] = eg * (g * s_over * init[1] + (c - cd(0.0, 1.0) * omega * s_over) * init[2]);
    return out;
}

numerics::PencilResult frequency_content(const std::vector<cd>& samples, double dt,
                                         double rank_tol) {
    return numerics::exponential_fit(samples, dt, rank_tol);
}

std::string trajectory_to_csv(const std::vector<double>& times,
                              const std::vector<MomentState>& states) {
    if (times.size() != states.size())
        throw config_error("trajectory_to_csv: times and states must align");
    std::ostringstream out;
    out << "t,multiset,re,im\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (const auto& [mi, v] : states[i].values) {
            out << format_double(times[i]) << ",\"" << mi.display() << "\","
                << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
        }
    }
    return out.str();
}

} // namespace qef
