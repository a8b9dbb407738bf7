#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qef/dynamics.hpp"
#include "qef/errors.hpp"
#include "qef/model.hpp"
#include "qef/momentspec.hpp"
#include "qef/oracle.hpp"

using qef::cd;

namespace {

std::mt19937 rng(3141592u);

qef::QuadraticSystem single_mode(double omega, qef::RateKind kind, double gamma) {
    qef::QuadraticSystem sys;
    sys.num_modes = 1;
    sys.epsilon = Eigen::MatrixXcd::Constant(1, 1, cd(omega, 0.0));
    sys.kappa = Eigen::MatrixXcd::Zero(1, 1);
    sys.rates = {{kind, gamma}};
    return qef::validate(sys);
}

qef::TwoModeParams generic_params() {
    qef::TwoModeParams p;
    p.gamma1d = 0.8;
    p.gamma2a = 0.2;
    p.epsilon = 1.0;
    p.kappa = 0.1;
    p.g = 0.15;
    return p;
}

// Mode annihilation operators on the product Fock space, mixed-radix index
// with mode 1 fastest.
std::vector<Eigen::MatrixXcd> fock_annihilators(const std::vector<int>& cutoffs) {
    int dim = 1;
    for (int n : cutoffs) dim *= n;
    std::vector<Eigen::MatrixXcd> a;
    int stride = 1;
    for (std::size_t j = 0; j < cutoffs.size(); ++j) {
        Eigen::MatrixXcd aj = Eigen::MatrixXcd::Zero(dim, dim);
        for (int idx = 0; idx < dim; ++idx) {
            int nj = (idx / stride) % cutoffs[j];
            if (nj >= 1) aj(idx - stride, idx) = std::sqrt(static_cast<double>(nj));
        }
        a.push_back(aj);
        stride *= cutoffs[j];
    }
    return a;
}

// Random density matrix supported on Fock levels <= max_level per mode.
Eigen::MatrixXcd random_supported_rho(const std::vector<int>& cutoffs, int max_level) {
    int dim = 1;
    for (int n : cutoffs) dim *= n;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) {
        int idx = r, inside = 1;
        for (int n : cutoffs) {
            if (idx % n > max_level) inside = 0;
            idx /= n;
        }
        if (!inside) continue;
        for (int c = 0; c < dim; ++c) {
            int jdx = c, cin = 1;
            for (int n : cutoffs) {
                if (jdx % n > max_level) cin = 0;
                jdx /= n;
            }
            if (cin) g(r, c) = cd(u(rng), u(rng));
        }
    }
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

Eigen::MatrixXcd apply_liouvillian(const qef::TruncatedLiouvillian& l,
                                   const Eigen::MatrixXcd& rho) {
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    Eigen::VectorXcd dv = l.superop * v;
    return Eigen::Map<const Eigen::MatrixXcd>(dv.data(), rho.rows(), rho.cols());
}

double match_against(const std::vector<cd>& got, const std::vector<cd>& reference) {
    double worst = 0.0;
    for (cd v : got) {
        double best = 1e300;
        for (cd r : reference) best = std::min(best, std::abs(v - r));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_CASE("the two-level-atom Liouvillian has the textbook spectrum") {
    const double omega = 1.1, gx = 0.4;
    Eigen::Matrix4cd l = qef::build_tla_liouvillian(omega, gx);
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(l);
    std::vector<cd> vals(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    cd rabi = std::sqrt(cd(omega * omega - gx * gx, 0.0));
    std::vector<cd> expect = {cd(0.0, 0.0), cd(-2.0 * gx, 0.0),
                              cd(-gx, 0.0) + cd(0.0, 1.0) * rabi,
                              cd(-gx, 0.0) - cd(0.0, 1.0) * rabi};
    CHECK(match_against(vals, expect) < 1e-12);
    CHECK(match_against(expect, vals) < 1e-12);

    // Overdamped regime: sqrt turns real, spectrum stays real.
    Eigen::Matrix4cd lo = qef::build_tla_liouvillian(0.2, 0.9);
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> eso(lo);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(eso.eigenvalues()(i).imag()) < 1e-12);
}

TEST_CASE("truncated Liouvillians preserve the trace") {
    qef::DynamicsMatrix unused;
    auto l1 = qef::build_fock_liouvillian(single_mode(1.3, qef::RateKind::damped, 0.7), {12});
    CHECK(qef::trace_preservation_residual(l1) < 1e-10);
    auto l2 = qef::build_fock_liouvillian(qef::two_mode_system(generic_params()), {7, 7});
    CHECK(qef::trace_preservation_residual(l2) < 1e-10);
    CHECK(l1.dim == 12);
    CHECK(l2.dim == 49);
    CHECK_FALSE(l2.amplified_warning);
}

TEST_CASE("the Fock Liouvillian reproduces the moment equations of motion") {
    qef::QuadraticSystem sys = qef::two_mode_system(generic_params());
    qef::DynamicsMatrix d = qef::build_dynamics_matrix(sys);
    std::vector<int> cutoffs = {8, 8};
    auto l = qef::build_fock_liouvillian(sys, cutoffs);
    auto a = fock_annihilators(cutoffs);
    std::vector<Eigen::MatrixXcd> stacked = {a[0], a[0].adjoint(), a[1], a[1].adjoint()};

    Eigen::MatrixXcd rho = random_supported_rho(cutoffs, 3);
    Eigen::MatrixXcd drho = apply_liouvillian(l, rho);
    CHECK(std::abs(drho.trace()) < 1e-12);

    auto expect_of = [&](const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& state) {
        return (op * state).trace();
    };

    for (int i = 0; i < 4; ++i) {
        cd lhs = expect_of(stacked[static_cast<std::size_t>(i)], drho);
        cd rhs(0.0, 0.0);
        for (int k = 0; k < 4; ++k)
            rhs += cd(0.0, -1.0) * d.m_omega(i, k) *
                   expect_of(stacked[static_cast<std::size_t>(k)], rho);
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
    }

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Eigen::MatrixXcd pij = stacked[static_cast<std::size_t>(i)] *
                                   stacked[static_cast<std::size_t>(j)];
            cd lhs = expect_of(pij, drho);
            cd rhs = d.noise_corr(i, j);
            for (int k = 0; k < 4; ++k) {
                rhs += cd(0.0, -1.0) * d.m_omega(i, k) *
                       expect_of(stacked[static_cast<std::size_t>(k)] *
                                     stacked[static_cast<std::size_t>(j)],
                                 rho);
                rhs += cd(0.0, -1.0) * d.m_omega(j, k) *
                       expect_of(stacked[static_cast<std::size_t>(i)] *
                                     stacked[static_cast<std::size_t>(k)],
                                 rho);
            }
            CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
        }
}

TEST_CASE("the transformed noise matrix is the eigenbasis pair source") {
    qef::QuadraticSystem sys = qef::two_mode_system(generic_params());
    qef::DynamicsMatrix d = qef::build_dynamics_matrix(sys);
    qef::BasicSpectrum s = qef::eigendecompose(d);
    Eigen::MatrixXcd kt = qef::transform_noise(s, d);
    std::vector<int> cutoffs = {8, 8};
    auto l = qef::build_fock_liouvillian(sys, cutoffs);
    auto a = fock_annihilators(cutoffs);
    std::vector<Eigen::MatrixXcd> stacked = {a[0], a[0].adjoint(), a[1], a[1].adjoint()};

    std::vector<Eigen::MatrixXcd> b(4, Eigen::MatrixXcd::Zero(l.dim, l.dim));
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) b[static_cast<std::size_t>(i)] +=
            s.p_inverse(i, k) * stacked[static_cast<std::size_t>(k)];

    Eigen::MatrixXcd rho = random_supported_rho(cutoffs, 3);
    Eigen::MatrixXcd drho = apply_liouvillian(l, rho);

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Eigen::MatrixXcd pij = b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
            cd lhs = (pij * drho).trace();
            cd rhs = cd(0.0, -1.0) * (s.omegas(i) + s.omegas(j)) * (pij * rho).trace() +
                     kt(i, j);
            CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
        }
}

TEST_CASE("a closed mode has a purely imaginary Liouvillian spectrum") {
    auto l = qef::build_fock_liouvillian(single_mode(1.2, qef::RateKind::damped, 0.0), {6});
    auto vals = qef::liouvillian_spectrum(l, 10);
    REQUIRE(vals.size() == 10);
    for (cd v : vals) CHECK(std::abs(v.real()) < 1e-12);
}

TEST_CASE("the damped-mode spectrum matches the ladder formula on the dense path") {
    const double omega = 1.3, gamma = 0.7;
    auto l = qef::build_fock_liouvillian(single_mode(omega, qef::RateKind::damped, gamma), {10});
    auto vals = qef::liouvillian_spectrum(l, 8);
    REQUIRE(vals.size() == 8);
    std::vector<cd> ladder;
    for (int n = 0; n < 10; ++n)
        for (int m = 0; m < 10; ++m)
            ladder.push_back(cd(-gamma * (n + m) / 2.0, -omega * (n - m)));
    CHECK(match_against(vals, ladder) < 1e-10);
    double zero_dist = 1e300, pair_dist = 1e300;
    for (cd v : vals) {
        zero_dist = std::min(zero_dist, std::abs(v));
        pair_dist = std::min(pair_dist, std::abs(v - cd(-gamma / 2.0, -omega)));
    }
    CHECK(zero_dist < 1e-11);
    CHECK(pair_dist < 1e-11);
}

TEST_CASE("the sparse shift-invert path agrees with the ladder formula") {
    const double omega = 0.9, gamma = 0.6;
    auto l = qef::build_fock_liouvillian(single_mode(omega, qef::RateKind::damped, gamma), {32});
    auto plain = qef::liouvillian_spectrum(l, 8);
    REQUIRE(plain.size() == 8);
    std::vector<cd> ladder;
    for (int n = 0; n < 32; ++n)
        for (int m = 0; m < 32; ++m)
            ladder.push_back(cd(-gamma * (n + m) / 2.0, -omega * (n - m)));
    // The truncated superoperator is strongly non-normal, so a 1e-10
    // residual still permits a few-1e-6 eigenvalue scatter on higher rungs.
    CHECK(match_against(plain, ladder) < 2e-5);
    double zero_dist = 1e300, pair_dist = 1e300;
    for (cd v : plain) {
        zero_dist = std::min(zero_dist, std::abs(v));
        pair_dist = std::min(pair_dist, std::abs(v - cd(-gamma / 2.0, -omega)));
    }
    CHECK(zero_dist < 1e-9);
    CHECK(pair_dist < 1e-9);

    std::vector<cd> hints = {cd(0.0, 0.0), cd(-gamma / 2.0, -omega), cd(-gamma / 2.0, omega)};
    auto hinted = qef::liouvillian_spectrum(l, 8, hints);
    REQUIRE(hinted.size() == 8);
    CHECK(match_against(hinted, plain) < 1e-8);
    CHECK(match_against(plain, hinted) < 1e-8);
}

TEST_CASE("a damped mode relaxes to the vacuum") {
    auto l = qef::build_fock_liouvillian(single_mode(1.0, qef::RateKind::damped, 0.5), {10});
    auto st = qef::stationary_state(l);
    CHECK_FALSE(st.degenerate);
    CHECK(st.hermiticity_residual < 1e-10);
    CHECK(st.min_eigenvalue > -1e-8);
    CHECK(std::abs(st.rho_vec(0) - cd(1.0, 0.0)) < 1e-9);
    CHECK(st.rho_vec.tail(st.rho_vec.size() - 1).norm() < 1e-9);
}

TEST_CASE("the two-level atom relaxes to the maximally mixed state") {
    qef::TruncatedLiouvillian l;
    l.cutoffs = {2};
    l.dim = 2;
    Eigen::Matrix4cd dense = qef::build_tla_liouvillian(0.8, 0.3);
    l.superop = dense.sparseView();
    l.hermiticity_map = {0, 2, 1, 3};
    CHECK(qef::trace_preservation_residual(l) < 1e-10);
    auto st = qef::stationary_state(l);
    CHECK_FALSE(st.degenerate);
    CHECK(std::abs(st.rho_vec(0) - cd(0.5, 0.0)) < 1e-9);
    CHECK(std::abs(st.rho_vec(3) - cd(0.5, 0.0)) < 1e-9);
    CHECK(std::abs(st.rho_vec(1)) < 1e-9);
    CHECK(std::abs(st.rho_vec(2)) < 1e-9);
}

TEST_CASE("net amplification trips the truncation warning") {
    qef::TwoModeParams p = generic_params();
    p.gamma2a = p.gamma1d;
    auto l = qef::build_fock_liouvillian(qef::two_mode_system(p), {6, 6});
    CHECK(l.amplified_warning);
    auto amp = qef::build_fock_liouvillian(
        single_mode(1.0, qef::RateKind::amplified, 0.3), {6});
    CHECK(amp.amplified_warning);
}

TEST_CASE("compare_spectra pairs predictions with oracle values") {
    qef::BasicSpectrum s = qef::two_mode_closed_form(generic_params());
    std::vector<qef::MomentFrequencyTable> predicted = {qef::enumerate_frequencies(s, 1),
                                                        qef::enumerate_frequencies(s, 2)};
    std::vector<cd> oracle = {cd(0.0, 0.0)};
    for (const auto& table : predicted)
        for (const auto& row : table.rows) oracle.push_back(cd(0.0, -1.0) * row.frequency);

    auto match = qef::compare_spectra(predicted, oracle, 1e-8);
    CHECK(match.all_oracle_matched);
    CHECK(match.unmatched_predicted.empty());
    CHECK(match.unmatched_oracle.empty());
    CHECK(match.max_deviation < 1e-12);
    CHECK(match.matched.size() == oracle.size());
    bool saw_stationary = false;
    for (const auto& pr : match.matched)
        if (pr.label == "1") saw_stationary = true;
    CHECK(saw_stationary);

    // A stray oracle value beyond every prediction is flagged.
    oracle.push_back(cd(-9.0, 4.0));
    auto stray = qef::compare_spectra(predicted, oracle, 1e-8);
    CHECK_FALSE(stray.all_oracle_matched);
    REQUIRE(stray.unmatched_oracle.size() == 1);
    CHECK(std::abs(stray.unmatched_oracle[0] - cd(-9.0, 4.0)) < 1e-15);

    // Perturbing one oracle value beyond tol orphans its prediction.
    oracle.pop_back();
    oracle.back() += cd(1e-3, 0.0);
    auto off = qef::compare_spectra(predicted, oracle, 1e-8);
    CHECK_FALSE(off.unmatched_predicted.empty());
}

TEST_CASE("the superoperator dimension is capped") {
    CHECK_THROWS_AS(
        qef::build_fock_liouvillian(qef::two_mode_system(generic_params()), {100, 100}),
        qef::dimension_cap_error);
}

TEST_CASE("the convergence protocol accepts a cutoff-exact spectrum") {
    auto conv = qef::converged_spectrum(single_mode(1.3, qef::RateKind::damped, 0.7),
                                        {8}, 6, 1e-8);
    REQUIRE(conv.eigenvalues.size() == 6);
    REQUIRE(conv.converged.size() == 6);
    for (std::size_t i = 0; i < conv.converged.size(); ++i) {
        CHECK(conv.converged[i]);
        CHECK(conv.movement[i] < 1e-9);
    }
    std::vector<cd> ladder;
    for (int n = 0; n < 12; ++n)
        for (int m = 0; m < 12; ++m)
            ladder.push_back(cd(-0.7 * (n + m) / 2.0, -1.3 * (n - m)));
    CHECK(match_against(conv.eigenvalues, ladder) < 1e-9);
}
