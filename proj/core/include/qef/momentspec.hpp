// momentspec.hpp: enumeration of p-th order field-operator-moment frequencies
// as sums over the basic set, with degeneracy counting.
#pragma once

#include <cstdint>
#include <complex>
#include <string>
#include <vector>

#include "qef/dynamics.hpp"

namespace qef {

// A multiset of p basis-operator labels. Label 2m is the annihilation-type
// operator of pair m (frequency omegas[2m]); label 2m+1 is its creation-type
// partner (frequency omegas[2m+1], the -conj pair slot). Stored as per-label
// counts, which is the unique canonical form; display strings order factors
// by mode and then creation before annihilation (b1d b1 b2d b2 ...).
struct MomentIndex {
    std::vector<int> counts; // size 2M, sum = p

    int order() const;
    int num_modes() const { return static_cast<int>(counts.size()) / 2; }
    // Swaps each label with its pair partner (the daggered multiset).
    MomentIndex daggered() const;
    std::string display() const; // e.g. "b1d b1 b2"
    bool operator==(const MomentIndex& o) const { return counts == o.counts; }
    bool operator<(const MomentIndex& o) const; // canonical (display) order
};

struct MomentRow {
    MomentIndex multiset;
    cd frequency;                 // sum of the multiset's basic eigenfrequencies
    std::uint64_t moment_degeneracy; // p! / prod(counts!)
    std::string symbolic;         // e.g. "Om2r - Om1r, 3Omi"
    std::vector<int> real_coeffs; // per pair m: counts[2m] - counts[2m+1]
};

struct MomentFrequencyTable {
    int order{0};
    int num_modes{0};
    std::vector<MomentRow> rows; // sorted by canonical multiset
};

// Number of distinct p-th order frequency sums: the closed formulas for
// p <= 4 (2M, 2M + C(2M,2), ...), the multiset count C(2M+p-1, p) beyond.
std::uint64_t count_frequencies(int num_modes, int p);

// One row per size-p multiset over the 2M labels, frequencies summed from s.
// Symbolic strings are built from the integer coefficient vectors so table
// comparisons stay exact-integer; zero-sum combinations such as Om1r - Om1r
// are retained as distinct rows (hidden-QEP detection needs them).
MomentFrequencyTable enumerate_frequencies(const BasicSpectrum& s, int p);

// Count of distinct operator orderings of the multiset: p! / prod(mult_i!).
std::uint64_t moment_degeneracy(const MomentIndex& m);

// Frequencies of the inhomogeneous part of the p-th order solution: the
// (p-2)-th order list; for p = 2 the single frequency 0 (constant source).
std::vector<cd> nonhomogeneous_frequencies(const BasicSpectrum& s, int p);

// CSV export, columns (order, symbolic, re, im, moment_degeneracy, multiset),
// byte-stable row order (canonical multiset order).
std::string table_to_csv(const MomentFrequencyTable& t);

} // namespace qef
