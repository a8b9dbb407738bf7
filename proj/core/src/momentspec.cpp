// Moment-frequency enumeration: multisets over the 2M basic labels and the
// combinatorial closed forms for their counts and degeneracies.
#include "qef/momentspec.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qef/exports.hpp"

namespace qef {

namespace {

// Display rank of a label: creation operators come first within a mode, modes
// ascend, so b1d b1 b2d b2. Label 2m is annihilation (rank 2m+1), label 2m+1
// is creation (rank 2m).
int display_rank(int label) { return (label % 2 == 0) ? label + 1 : label - 1; }

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a)
        throw config_error("moment count overflows 64 bits");
    return a * b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i is always integral at this point.
        std::uint64_t num = n - k + i;
        std::uint64_t g = std::gcd(r, i);
        std::uint64_t rr = r / g;
        std::uint64_t ii = i / g;
        g = std::gcd(num, ii);
        num /= g;
        ii /= g;
        if (ii != 1) throw numerical_error("binomial: non-integral intermediate");
        r = checked_mul(rr, num);
    }
    return r;
}

void append_term(std::string& out, long long coeff, const std::string& sym) {
    if (coeff == 0) return;
    if (out.empty()) {
        if (coeff == -1)
            out += "-";
        else if (coeff != 1)
            out += std::to_string(coeff);
    } else {
        out += (coeff < 0) ? " - " : " + ";
        long long a = coeff < 0 ? -coeff : coeff;
        if (a != 1) out += std::to_string(a);
    }
    out += sym;
}

} // namespace

int MomentIndex::order() const {
    int p = 0;
    for (int c : counts) p += c;
    return p;
}

MomentIndex MomentIndex::daggered() const {
    MomentIndex out;
    out.counts.resize(counts.size());
    for (std::size_t m = 0; 2 * m < counts.size(); ++m) {
        out.counts[2 * m] = counts[2 * m + 1];
        out.counts[2 * m + 1] = counts[2 * m];
    }
    return out;
}

std::string MomentIndex::display() const {
    std::string out;
    const int n = static_cast<int>(counts.size());
    for (int rank = 0; rank < n; ++rank) {
        int label = display_rank(rank); // rank -> label is its own inverse
        int mode = label / 2 + 1;
        for (int c = 0; c < counts[static_cast<std::size_t>(label)]; ++c) {
            if (!out.empty()) out += " ";
            out += "b" + std::to_string(mode);
            if (label % 2 == 1) out += "d";
        }
    }
    return out.empty() ? "1" : out;
}

bool MomentIndex::operator<(const MomentIndex& o) const {
    if (counts.size() != o.counts.size()) return counts.size() < o.counts.size();
    // Lexicographic on the expanded display-ordered label sequence.
    const int n = static_cast<int>(counts.size());
    int ra = 0, rb = 0, ca = 0, cb = 0;
    while (true) {
        while (ra < n && ca >= counts[static_cast<std::size_t>(display_rank(ra))]) {
            ++ra;
            ca = 0;
        }
        while (rb < n && cb >= o.counts[static_cast<std::size_t>(display_rank(rb))]) {
            ++rb;
            cb = 0;
        }
        if (ra == n || rb == n) return rb != n; // shorter word first
        if (ra != rb) return ra < rb;
        ++ca;
        ++cb;
    }
}

std::uint64_t count_frequencies(int num_modes, int p) {
    if (num_modes < 1) throw config_error("count_frequencies: num_modes must be >= 1");
    if (p < 1) throw config_error("count_frequencies: order must be >= 1");
    const std::uint64_t n = 2 * static_cast<std::uint64_t>(num_modes);
    switch (p) {
        case 1:
            return n;
        case 2:
            return n + binomial(n, 2);
        case 3:
            return n + 2 * binomial(n, 2) + binomial(n, 3);
        case 4:
            return n + 3 * binomial(n, 2) + 3 * binomial(n, 3) + binomial(n, 4);
        default:
            return binomial(n + static_cast<std::uint64_t>(p) - 1, static_cast<std::uint64_t>(p));
    }
}

std::uint64_t moment_degeneracy(const MomentIndex& m) {
    std::uint64_t total = 0;
    std::uint64_t result = 1;
    for (int c : m.counts) {
        if (c < 0) throw config_error("moment_degeneracy: negative count");
        for (int i = 1; i <= c; ++i) {
            ++total;
            result = checked_mul(result, total);
            result /= static_cast<std::uint64_t>(i);
        }
    }
    return result;
}

MomentFrequencyTable enumerate_frequencies(const BasicSpectrum& s, int p) {
    const int n = static_cast<int>(s.omegas.size());
    if (n == 0 || n % 2 != 0) throw config_error("enumerate_frequencies: empty spectrum");
    if (p < 1) throw config_error("enumerate_frequencies: order must be >= 1");
    const int m = n / 2;

    MomentFrequencyTable table;
    table.order = p;
    table.num_modes = m;

    // All count vectors over 2M labels summing to p, in canonical order:
    // recurse over display ranks so the output is already sorted.
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    auto emit = [&]() {
        MomentRow row;
        row.multiset.counts = counts;
        row.frequency = cd(0.0, 0.0);
        for (int l = 0; l < n; ++l)
            row.frequency += static_cast<double>(counts[static_cast<std::size_t>(l)]) * s.omegas(l);
        row.moment_degeneracy = moment_degeneracy(row.multiset);

        // Exact pair decomposition: for pair slots (a, b) = (2m, 2m+1),
        //   freq = sum_m c_m * (w_a - w_b)/2 - i k_m * (i (w_a + w_b)/2)
        // with c_m = n_a - n_b and k_m = n_a + n_b. For oscillatory pairs the
        // two factors are Re(Omega_m) and -Im(Omega_m) = Omega^i.
        std::vector<int> cvec(static_cast<std::size_t>(m));
        std::vector<int> kvec(static_cast<std::size_t>(m));
        for (int mm = 0; mm < m; ++mm) {
            cvec[static_cast<std::size_t>(mm)] =
                counts[static_cast<std::size_t>(2 * mm)] - counts[static_cast<std::size_t>(2 * mm + 1)];
            kvec[static_cast<std::size_t>(mm)] =
                counts[static_cast<std::size_t>(2 * mm)] + counts[static_cast<std::size_t>(2 * mm + 1)];
        }
        row.real_coeffs = cvec;

        std::string re_part;
        for (int mm = 0; mm < m; ++mm)
            append_term(re_part, cvec[static_cast<std::size_t>(mm)],
                        "Om" + std::to_string(mm + 1) + "r");
        if (re_part.empty()) re_part = "0";

        bool common_imag = true;
        for (int mm = 1; mm < m; ++mm) {
            cd mean0 = (s.omegas(0) + s.omegas(1)) / 2.0;
            cd meanm = (s.omegas(2 * mm) + s.omegas(2 * mm + 1)) / 2.0;
            if (std::abs(mean0 - meanm) > 1e-12 * std::max(1.0, s.omegas.norm()))
                common_imag = false;
        }
        std::string im_part;
        if (common_imag) {
            append_term(im_part, p, "Omi");
        } else {
            for (int mm = 0; mm < m; ++mm)
                append_term(im_part, kvec[static_cast<std::size_t>(mm)],
                            "Om" + std::to_string(mm + 1) + "i");
        }
        if (im_part.empty()) im_part = "0";
        row.symbolic = re_part + ", " + im_part;
        table.rows.push_back(std::move(row));
    };
    auto recurse = [&](auto&& self, int rank, int remaining) -> void {
        if (rank == n - 1) {
            counts[static_cast<std::size_t>(display_rank(rank))] = remaining;
            emit();
            counts[static_cast<std::size_t>(display_rank(rank))] = 0;
            return;
        }
        // More copies of the earlier display rank sort first, so descend.
        for (int c = remaining; c >= 0; --c) {
            counts[static_cast<std::size_t>(display_rank(rank))] = c;
            self(self, rank + 1, remaining - c);
        }
        counts[static_cast<std::size_t>(display_rank(rank))] = 0;
    };
    recurse(recurse, 0, p);

    if (table.rows.size() != count_frequencies(m, p))
        throw numerical_error("enumerate_frequencies: row count mismatch against closed form");
    return table;
}

std::vector<cd> nonhomogeneous_frequencies(const BasicSpectrum& s, int p) {
    if (p < 2) throw config_error("nonhomogeneous_frequencies: order must be >= 2");
    if (p == 2) return {cd(0.0, 0.0)};
    MomentFrequencyTable lower = enumerate_frequencies(s, p - 2);
    std::vector<cd> out;
    out.reserve(lower.rows.size());
    for (const auto& r : lower.rows) out.push_back(r.frequency);
    return out;
}

std::string table_to_csv(const MomentFrequencyTable& t) {
    std::ostringstream out;
    out << "order,symbolic,re,im,moment_degeneracy,multiset\n";
    for (const auto& r : t.rows) {
        out << t.order << ",\"" << r.symbolic << "\"," << format_double(r.frequency.real())
            << "," << format_double(r.frequency.imag()) << "," << r.moment_degeneracy << ",\""
            << r.multiset.display() << "\"\n";
    }
    return out.str();
}

} // namespace qef
