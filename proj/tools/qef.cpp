// qef.cpp: command-line front end. Subcommands map onto the library modules:
//   spectrum  - basic eigenfrequencies of a configured system
//   moments   - moment-frequency tables up to a requested order
//   ep-scan   - EP surface sweep plus pointwise degeneracy reports
//   propagate - hierarchy time evolution and frequency-content fit
//   tla       - two-level-atom closed form vs its exact Liouvillian
//   oracle    - truncated-Liouvillian cross-validation report
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 dimension cap.
// Every output file embeds the config hash and the tool version; identical
// configs produce byte-identical outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qef/dynamics.hpp"
#include "qef/eppoints.hpp"
#include "qef/errors.hpp"
#include "qef/exports.hpp"
#include "qef/model.hpp"
#include "qef/momentspec.hpp"
#include "qef/numerics/expm.hpp"
#include "qef/oracle.hpp"
#include "qef/propagate.hpp"

namespace {

using json = nlohmann::ordered_json;
using qef::cd;

struct CommonOpts {
    std::string config_path;
    std::string out_dir{"."};
    std::string format{"csv"};
    double tol{0.0}; // 0 = module default
    int jobs{1};
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
    auto* c = cmd->add_option("--config", o.config_path, "JSON config file");
    if (config_required) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", o.tol, "tolerance override")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qef::config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path write_output(const CommonOpts& o, const std::string& name,
                                   const std::string& bytes) {
    std::filesystem::path dir(o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw qef::config_error("cannot create output directory: " + o.out_dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qef::config_error("cannot write output file: " + path.string());
    out << bytes;
    return path;
}

std::string csv_stamp(const std::string& hash) {
    return "# qef " + qef::tool_version() + " config " + hash + "\n";
}

void stamp(json& j, const std::string& hash) {
    j["tool_version"] = qef::tool_version();
    j["config_hash"] = hash;
}

json jcomplex(cd v) { return json::array({v.real(), v.imag()}); }

json jcvector(const Eigen::VectorXcd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jcomplex(v(i)));
    return a;
}

json jpairing(const std::vector<std::pair<int, int>>& pr) {
    json a = json::array();
    for (auto& [x, y] : pr) a.push_back(json::array({x, y}));
    return a;
}

double require_positive(const json& j, const char* field, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number()) throw qef::config_error(std::string("config: \"") + field + "\" must be a number");
    double v = j[field].get<double>();
    if (!(v > 0.0)) throw qef::config_error(std::string("config: \"") + field + "\" must be positive");
    return v;
}

int require_count(const json& j, const char* field, int fallback, int lo) {
    if (!j.contains(field)) return fallback;
    if (!j[field].is_number_integer())
        throw qef::config_error(std::string("config: \"") + field + "\" must be an integer");
    int v = j[field].get<int>();
    if (v < lo)
        throw qef::config_error(std::string("config: \"") + field + "\" must be >= " + std::to_string(lo));
    return v;
}

cd parse_complex_entry(const json& e, const char* field) {
    if (e.is_number()) return cd(e.get<double>(), 0.0);
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return cd(e[0].get<double>(), e[1].get<double>());
    throw qef::config_error(std::string("config: \"") + field + "\" entries must be numbers or [re,im]");
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(const CommonOpts& o) {
    const auto text = read_file(o.config_path);
    const auto hash = qef::config_hash_hex(text);
    const auto system = qef::system_from_json(text);
    const auto d = qef::build_dynamics_matrix(system);
    const auto s = qef::eigendecompose(d, o.tol);

    json j;
    stamp(j, hash);
    j["num_modes"] = system.num_modes;
    j["omegas"] = jcvector(s.omegas);
    j["pairing"] = jpairing(s.pairing);
    j["diagonalizable"] = s.diagonalizable;

    qef::TwoModeParams p;
    if (qef::two_mode_params_from_json(text, p)) {
        const auto closed = qef::two_mode_closed_form(p);
        std::vector<cd> pool(closed.omegas.data(), closed.omegas.data() + closed.omegas.size());
        double agreement = 0.0;
        for (Eigen::Index i = 0; i < s.omegas.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t q = 1; q < pool.size(); ++q)
                if (std::abs(pool[q] - s.omegas(i)) < std::abs(pool[best] - s.omegas(i))) best = q;
            agreement = std::max(agreement, std::abs(pool[best] - s.omegas(i)));
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        }
        json cf;
        cf["omegas"] = jcvector(closed.omegas);
        cf["diagonalizable"] = closed.diagonalizable;
        cf["agreement"] = agreement;
        cf["balanced"] = (p.gamma_minus() == 0.0);
        cf["phase_flipped"] = (p.g < 0.0);
        j["closed_form"] = cf;
    }

    std::filesystem::path path;
    if (o.format == "json") {
        path = write_output(o, "spectrum.json", j.dump(2) + "\n");
    } else {
        std::vector<int> partner(static_cast<std::size_t>(s.omegas.size()), -1);
        for (auto& [a, b] : s.pairing) {
            partner[static_cast<std::size_t>(a)] = b;
            partner[static_cast<std::size_t>(b)] = a;
        }
        std::string csv = csv_stamp(hash);
        csv += std::string("# diagonalizable ") + (s.diagonalizable ? "true" : "false") + "\n";
        csv += "slot,re,im,partner\n";
        for (Eigen::Index i = 0; i < s.omegas.size(); ++i) {
            csv += std::to_string(i) + "," + qef::format_double(s.omegas(i).real()) + "," +
                   qef::format_double(s.omegas(i).imag()) + "," +
                   std::to_string(partner[static_cast<std::size_t>(i)]) + "\n";
        }
        path = write_output(o, "spectrum.csv", csv);
    }
    std::cout << "spectrum: " << s.omegas.size() << " eigenfrequencies, diagonalizable="
              << (s.diagonalizable ? "true" : "false") << ", wrote " << path.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------- moments

int run_moments(const CommonOpts& o, int order) {
    if (order < 1) throw qef::config_error("--order must be >= 1");
    const auto text = read_file(o.config_path);
    const auto hash = qef::config_hash_hex(text);
    const auto system = qef::system_from_json(text);
    const auto d = qef::build_dynamics_matrix(system);
    const auto s = qef::eigendecompose(d, o.tol);

    for (int p = 1; p <= order; ++p) {
        const auto t = qef::enumerate_frequencies(s, p);
        const auto expected = qef::count_frequencies(system.num_modes, p);
        std::filesystem::path path;
        if (o.format == "json") {
            json j;
            stamp(j, hash);
            j["order"] = p;
            j["num_modes"] = system.num_modes;
            j["row_count"] = t.rows.size();
            json rows = json::array();
            for (auto& r : t.rows) {
                json row;
                row["multiset"] = r.multiset.display();
                row["symbolic"] = r.symbolic;
                row["frequency"] = jcomplex(r.frequency);
                row["moment_degeneracy"] = r.moment_degeneracy;
                row["real_coeffs"] = r.real_coeffs;
                rows.push_back(row);
            }
            j["rows"] = rows;
            path = write_output(o, "moments_p" + std::to_string(p) + ".json", j.dump(2) + "\n");
        } else {
            std::string csv = csv_stamp(hash);
            csv += "# rows " + std::to_string(t.rows.size()) + "\n";
            csv += qef::table_to_csv(t);
            path = write_output(o, "moments_p" + std::to_string(p) + ".csv", csv);
        }
        std::cout << "moments: order " << p << ": " << t.rows.size() << " rows (expected "
                  << expected << "), wrote " << path.string() << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- ep-scan

int run_ep_scan(const CommonOpts& o, int max_reports) {
    qef::SweepGrid grid;
    std::string text;
    if (!o.config_path.empty()) {
        text = read_file(o.config_path);
        const auto c = json::parse(text);
        if (!c.is_object()) throw qef::config_error("config: expected a JSON object");
        grid.gamma_max = require_positive(c, "gamma_max", grid.gamma_max);
        grid.kappa_max = require_positive(c, "kappa_max", grid.kappa_max);
        grid.g_max = require_positive(c, "g_max", grid.g_max);
        grid.n_gamma = require_count(c, "n_gamma", grid.n_gamma, 2);
        grid.n_kappa = require_count(c, "n_kappa", grid.n_kappa, 2);
        grid.n_g = require_count(c, "n_g", grid.n_g, 2);
    } else {
        json c;
        c["gamma_max"] = grid.gamma_max;
        c["kappa_max"] = grid.kappa_max;
        c["g_max"] = grid.g_max;
        c["n_gamma"] = grid.n_gamma;
        c["n_kappa"] = grid.n_kappa;
        c["n_g"] = grid.n_g;
        text = c.dump();
    }
    const auto hash = qef::config_hash_hex(text);
    const double tol = o.tol > 0.0 ? o.tol : 1e-6;

    const auto points = qef::sweep_surface(grid, tol, o.jobs);

    std::filesystem::path spath;
    if (o.format == "json") {
        json j;
        stamp(j, hash);
        j["tol"] = tol;
        j["point_count"] = points.size();
        json arr = json::array();
        for (auto& pt : points) {
            json e;
            e["gamma_plus_over_eps"] = pt.gamma_plus_over_eps;
            e["kappa_over_eps"] = pt.kappa_over_eps;
            e["g_over_eps"] = pt.g_over_eps;
            e["branch"] = pt.branch;
            e["residual"] = pt.residual;
            arr.push_back(e);
        }
        j["points"] = arr;
        spath = write_output(o, "ep_surface.json", j.dump(2) + "\n");
    } else {
        spath = write_output(o, "ep_surface.csv", csv_stamp(hash) + qef::surface_to_csv(points));
    }

    // Pointwise Jordan analyses on a decimated subset: each surface point is
    // realized as the net-damped representative gamma1d = 4 gamma_plus,
    // gamma2a = 0 (only gamma_plus enters the EP conditions). The cluster
    // radius tracks the sqrt-type eigenvalue splitting of a near-EP point.
    const std::size_t stride =
        points.empty() ? 1
                       : std::max<std::size_t>(1, (points.size() + static_cast<std::size_t>(max_reports) - 1) /
                                                      static_cast<std::size_t>(max_reports));
    const double detect_tol = 4.0 * std::sqrt(tol);
    json reports = json::array();
    for (std::size_t i = 0; i < points.size(); i += stride) {
        const auto& pt = points[i];
        qef::TwoModeParams tp;
        tp.epsilon = 1.0;
        tp.kappa = pt.kappa_over_eps;
        tp.g = pt.g_over_eps;
        tp.gamma1d = 4.0 * pt.gamma_plus_over_eps;
        tp.gamma2a = 0.0;
        const auto dm = qef::build_dynamics_matrix(qef::two_mode_system(tp));
        const auto rep = qef::detect_coalescence(dm.m_omega, detect_tol);
        json e;
        json pj;
        pj["gamma_plus_over_eps"] = pt.gamma_plus_over_eps;
        pj["kappa_over_eps"] = pt.kappa_over_eps;
        pj["g_over_eps"] = pt.g_over_eps;
        pj["branch"] = pt.branch;
        pj["residual"] = pt.residual;
        e["point"] = pj;
        e["report"] = json::parse(qef::report_to_json(rep));
        reports.push_back(e);
    }
    json jr;
    stamp(jr, hash);
    jr["tol"] = tol;
    jr["detect_tol"] = detect_tol;
    jr["surface_points"] = points.size();
    jr["reports"] = reports;
    const auto rpath = write_output(o, "ep_reports.json", jr.dump(2) + "\n");

    std::cout << "ep-scan: " << points.size() << " surface points, " << reports.size()
              << " degeneracy reports, wrote " << spath.string() << " and " << rpath.string()
              << "\n";
    return 0;
}

// --------------------------------------------------------------- propagate

int run_propagate(const CommonOpts& o, int order) {
    if (order < 1) throw qef::config_error("--order must be >= 1");
    const auto text = read_file(o.config_path);
    const auto hash = qef::config_hash_hex(text);
    const auto c = json::parse(text);
    const auto system = qef::system_from_json(text);
    const auto d = qef::build_dynamics_matrix(system);
    const auto s = qef::eigendecompose(d, 0.0);

    const double t_max = require_positive(c, "t_max", 10.0);
    const int samples = require_count(c, "samples", 256, 2);

    Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(2 * system.num_modes);
    if (c.contains("alpha")) {
        const auto& a = c["alpha"];
        if (!a.is_array() || static_cast<int>(a.size()) != 2 * system.num_modes)
            throw qef::config_error("config: \"alpha\" must list one entry per stacked operator");
        for (int i = 0; i < 2 * system.num_modes; ++i) alpha(i) = parse_complex_entry(a[i], "alpha");
        for (int m = 0; m < system.num_modes; ++m) {
            const cd lhs = alpha(2 * m + 1), rhs = std::conj(alpha(2 * m));
            if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs)))
                throw qef::config_error("config: \"alpha\" entries must come in conjugate pairs");
        }
    }

    const auto k_tilde = qef::transform_noise(s, d);
    const auto init = qef::coherent_state(s, alpha, order);
    init.check_conjugation();

    std::vector<double> times(static_cast<std::size_t>(samples));
    std::vector<qef::MomentState> states;
    states.reserve(times.size());
    const double dt = t_max / static_cast<double>(samples - 1);
    for (int i = 0; i < samples; ++i) {
        times[static_cast<std::size_t>(i)] = dt * static_cast<double>(i);
        states.push_back(qef::propagate_hierarchy(s, k_tilde, init, times[static_cast<std::size_t>(i)]));
    }

    std::filesystem::path tpath;
    if (o.format == "json") {
        json j;
        stamp(j, hash);
        j["order"] = order;
        j["t_max"] = t_max;
        j["samples"] = samples;
        json jt = json::array();
        for (double t : times) jt.push_back(t);
        j["times"] = jt;
        json series;
        for (auto& [mi, v0] : states.front().values) {
            (void)v0;
            json col = json::array();
            for (auto& st : states) col.push_back(jcomplex(st.values.at(mi)));
            series[mi.display()] = col;
        }
        j["series"] = series;
        tpath = write_output(o, "trajectory.json", j.dump(2) + "\n");
    } else {
        tpath = write_output(o, "trajectory.csv", csv_stamp(hash) + qef::trajectory_to_csv(times, states));
    }

    // Frequency-content fit per moment series (needs a long enough record).
    std::filesystem::path fpath;
    bool fitted = false;
    if (samples >= 64) {
        double scale = 0.0;
        for (auto& st : states)
            for (auto& [mi, v] : st.values) {
                (void)mi;
                scale = std::max(scale, std::abs(v));
            }
        const auto tables = [&] {
            std::map<qef::MomentIndex, cd> hom;
            for (int p = 1; p <= order; ++p)
                for (auto& r : qef::enumerate_frequencies(s, p).rows) hom[r.multiset] = r.frequency;
            return hom;
        }();
        json fits = json::array();
        for (auto& [mi, v0] : states.front().values) {
            (void)v0;
            std::vector<cd> series(times.size());
            double amp = 0.0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                series[i] = states[i].values.at(mi);
                amp = std::max(amp, std::abs(series[i]));
            }
            json e;
            e["multiset"] = mi.display();
            e["homogeneous_frequency"] = jcomplex(tables.at(mi));
            if (amp <= 1e-10 * std::max(1.0, scale)) {
                e["skipped"] = "amplitude below threshold";
            } else {
                const auto fit = qef::frequency_content(series, dt);
                json modes = json::array();
                for (auto& md : fit.modes) {
                    json m;
                    m["lambda"] = jcomplex(md.lambda);
                    m["multiplicity"] = md.multiplicity;
                    modes.push_back(m);
                }
                e["modes"] = modes;
                e["residual"] = fit.residual;
                e["rank_warning"] = fit.rank_warning;
            }
            fits.push_back(e);
        }
        json jf;
        stamp(jf, hash);
        jf["dt"] = dt;
        jf["fits"] = fits;
        fpath = write_output(o, "frequencies.json", jf.dump(2) + "\n");
        fitted = true;
    }

    std::cout << "propagate: order " << order << ", " << samples << " samples over [0,"
              << qef::format_double(t_max) << "], wrote " << tpath.string();
    if (fitted)
        std::cout << " and " << fpath.string();
    else
        std::cout << " (frequency fit skipped: needs >= 64 samples)";
    std::cout << "\n";
    return 0;
}

// --------------------------------------------------------------------- tla

int run_tla(const CommonOpts& o, double omega, double gamma_x, double t_max, int samples,
            const std::array<cd, 4>& init) {
    if (!(t_max > 0.0)) throw qef::config_error("--t-max must be positive");
    if (samples < 2) throw qef::config_error("--samples must be >= 2");
    if (!(gamma_x >= 0.0)) throw qef::config_error("--gamma-x must be nonnegative");

    json canonical;
    canonical["omega"] = omega;
    canonical["gamma_x"] = gamma_x;
    canonical["t_max"] = t_max;
    canonical["samples"] = samples;
    json ji = json::array();
    for (auto& v : init) ji.push_back(jcomplex(v));
    canonical["init"] = ji;
    const auto hash = qef::config_hash_hex(canonical.dump());

    const Eigen::Matrix4cd l = qef::build_tla_liouvillian(omega, gamma_x);
    Eigen::Vector4cd v0;
    for (int i = 0; i < 4; ++i) v0(i) = init[static_cast<std::size_t>(i)];

    const char* names[4] = {"sigma0", "sigma_plus", "sigma_minus", "sigma1"};
    std::string csv = csv_stamp(hash);
    csv += "t,component,re,im\n";
    double expm_max_error = 0.0;
    const double dt = t_max / static_cast<double>(samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double t = dt * static_cast<double>(i);
        const auto closed = qef::tla_evolution(omega, gamma_x, init, t);
        const Eigen::Vector4cd numeric = qef::numerics::expm(Eigen::MatrixXcd(l * t)) * v0;
        for (int k = 0; k < 4; ++k) {
            expm_max_error =
                std::max(expm_max_error, std::abs(closed[static_cast<std::size_t>(k)] - numeric(k)));
            csv += qef::format_double(t);
            csv += ",";
            csv += names[k];
            csv += ",";
            csv += qef::format_double(closed[static_cast<std::size_t>(k)].real());
            csv += ",";
            csv += qef::format_double(closed[static_cast<std::size_t>(k)].imag());
            csv += "\n";
        }
    }
    const auto tpath = write_output(o, "tla_trajectory.csv", csv);

    // A numerically computed double root scatters like sqrt(machine eps), so
    // the cluster radius at a defective point needs more slack than the
    // library default.
    const double detect_tol = o.tol > 0.0 ? o.tol : 1e-6;
    const auto rep = qef::detect_coalescence(Eigen::MatrixXcd(l), detect_tol);
    bool defective = false;
    for (auto& cl : rep.clusters) defective = defective || (cl.geometric < cl.algebraic);

    json j;
    stamp(j, hash);
    j["omega"] = omega;
    j["gamma_x"] = gamma_x;
    j["t_max"] = t_max;
    j["samples"] = samples;
    j["init"] = ji;
    json ev = json::array();
    const cd root = std::sqrt(cd(omega * omega - gamma_x * gamma_x, 0.0));
    ev.push_back(jcomplex(cd(0.0, 0.0)));
    ev.push_back(jcomplex(cd(-gamma_x, 0.0) + cd(0.0, 1.0) * root));
    ev.push_back(jcomplex(cd(-gamma_x, 0.0) - cd(0.0, 1.0) * root));
    ev.push_back(jcomplex(cd(-2.0 * gamma_x, 0.0)));
    j["eigenvalues"] = ev;
    j["expm_max_error"] = expm_max_error;
    j["detect_tol"] = detect_tol;
    j["defective"] = defective;
    j["report"] = json::parse(qef::report_to_json(rep));
    const auto rpath = write_output(o, "tla_report.json", j.dump(2) + "\n");

    std::cout << "tla: omega=" << qef::format_double(omega) << " gamma_x="
              << qef::format_double(gamma_x) << ", closed form vs expm max error "
              << qef::format_double(expm_max_error) << (defective ? " (defective point)" : "")
              << ", wrote " << tpath.string() << " and " << rpath.string() << "\n";
    return 0;
}

// ------------------------------------------------------------------ oracle

int run_oracle(const CommonOpts& o, int cutoff, int order, bool allow_amplified) {
    if (order < 1) throw qef::config_error("--order must be >= 1");
    if (cutoff < 2) throw qef::config_error("--cutoff must be >= 2");
    const auto text = read_file(o.config_path);
    const auto hash = qef::config_hash_hex(text);
    const auto c = json::parse(text);
    const auto system = qef::system_from_json(text);

    double total_damp = 0.0, total_amp = 0.0;
    for (auto& r : system.rates)
        (r.kind == qef::RateKind::damped ? total_damp : total_amp) += r.rate;
    if (total_amp >= total_damp && !allow_amplified)
        throw qef::config_error(
            "oracle: net amplification (truncated spectra may not converge); pass "
            "--allow-amplified to proceed");

    std::vector<int> cutoffs(static_cast<std::size_t>(system.num_modes), cutoff);
    if (c.contains("cutoffs")) {
        const auto& cj = c["cutoffs"];
        if (!cj.is_array() || static_cast<int>(cj.size()) != system.num_modes)
            throw qef::config_error("config: \"cutoffs\" must list one Fock dimension per mode");
        for (int m = 0; m < system.num_modes; ++m) {
            if (!cj[m].is_number_integer() || cj[m].get<int>() < 2)
                throw qef::config_error("config: \"cutoffs\" entries must be integers >= 2");
            cutoffs[static_cast<std::size_t>(m)] = cj[m].get<int>();
        }
    }

    const double tol = o.tol > 0.0 ? o.tol : 1e-3;

    const auto d = qef::build_dynamics_matrix(system);
    const auto s = qef::eigendecompose(d, 0.0);
    std::vector<qef::MomentFrequencyTable> predicted;
    std::size_t predicted_count = 1; // the stationary value
    for (int p = 1; p <= order; ++p) {
        predicted.push_back(qef::enumerate_frequencies(s, p));
        predicted_count += predicted.back().rows.size();
    }

    std::int64_t dim_lo = 1;
    for (int n : cutoffs) dim_lo *= n;
    const std::int64_t super_lo = dim_lo * dim_lo;
    int k = static_cast<int>(predicted_count + 4);
    if (static_cast<std::int64_t>(k) > super_lo) k = static_cast<int>(super_lo);

    const auto conv = qef::converged_spectrum(system, cutoffs, k, tol);
    const auto match = qef::compare_spectra(predicted, conv.eigenvalues, tol);

    json j;
    stamp(j, hash);
    j["params"] = json::parse(text);
    json jc = json::array(), jcr = json::array();
    for (int n : cutoffs) {
        jc.push_back(n);
        jcr.push_back(n + 4);
    }
    j["cutoffs"] = jc;
    j["cutoffs_refined"] = jcr;
    j["order"] = order;
    j["tol"] = tol;
    j["requested"] = k;
    json ev = json::array(), cv = json::array(), mv = json::array();
    for (std::size_t i = 0; i < conv.eigenvalues.size(); ++i) {
        ev.push_back(jcomplex(conv.eigenvalues[i]));
        cv.push_back(static_cast<bool>(conv.converged[i]));
        mv.push_back(conv.movement[i]);
    }
    j["eigenvalues"] = ev;
    j["converged"] = cv;
    j["movement"] = mv;
    json jm;
    json matched = json::array();
    for (auto& pr : match.matched) {
        json e;
        e["label"] = pr.label;
        e["predicted"] = jcomplex(pr.predicted);
        e["oracle"] = jcomplex(pr.oracle);
        e["deviation"] = pr.deviation;
        matched.push_back(e);
    }
    jm["matched"] = matched;
    json up = json::array();
    for (auto& [val, label] : match.unmatched_predicted) {
        json e;
        e["label"] = label;
        e["predicted"] = jcomplex(val);
        up.push_back(e);
    }
    jm["unmatched_predicted"] = up;
    json uo = json::array();
    for (auto& val : match.unmatched_oracle) uo.push_back(jcomplex(val));
    jm["unmatched_oracle"] = uo;
    jm["max_deviation"] = match.max_deviation;
    jm["all_oracle_matched"] = match.all_oracle_matched;
    j["match"] = jm;
    const auto rpath = write_output(o, "oracle_report.json", j.dump(2) + "\n");

    std::filesystem::path epath;
    bool wrote_csv = false;
    if (o.format == "csv") {
        std::string csv = csv_stamp(hash);
        csv += "slot,re,im,converged,movement\n";
        for (std::size_t i = 0; i < conv.eigenvalues.size(); ++i) {
            csv += std::to_string(i) + "," + qef::format_double(conv.eigenvalues[i].real()) + "," +
                   qef::format_double(conv.eigenvalues[i].imag()) + "," +
                   (conv.converged[i] ? "true" : "false") + "," +
                   qef::format_double(conv.movement[i]) + "\n";
        }
        epath = write_output(o, "oracle_eigenvalues.csv", csv);
        wrote_csv = true;
    }

    std::size_t unconverged = 0;
    for (bool b : conv.converged)
        if (!b) ++unconverged;
    std::cout << "oracle: " << conv.eigenvalues.size() << " eigenvalues (" << unconverged
              << " unconverged), matched " << match.matched.size() << "/" << predicted_count
              << " predictions, max deviation " << qef::format_double(match.max_deviation)
              << ", wrote " << rpath.string();
    if (wrote_csv) std::cout << " and " << epath.string();
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qef: eigenfrequency structure of quadratic open bosonic systems"};
    app.set_version_flag("--version", "qef " + qef::tool_version());
    app.require_subcommand(1);

    CommonOpts so, mo, eo, po, to, oo;

    auto* spectrum = app.add_subcommand("spectrum", "basic eigenfrequencies of a configured system");
    add_common(spectrum, so, true);

    int m_order = 4;
    auto* moments = app.add_subcommand("moments", "moment-frequency tables up to --order");
    add_common(moments, mo, true);
    moments->add_option("--order", m_order, "highest moment order")->check(CLI::Range(1, 16));

    int e_max_reports = 1000;
    auto* ep = app.add_subcommand("ep-scan", "EP surface sweep with pointwise degeneracy reports");
    add_common(ep, eo, false);
    ep->add_option("--max-reports", e_max_reports, "degeneracy report budget")
        ->check(CLI::Range(1, 1000000));

    int p_order = 2;
    auto* prop = app.add_subcommand("propagate", "moment-hierarchy time evolution");
    add_common(prop, po, true);
    prop->add_option("--order", p_order, "hierarchy order")->check(CLI::Range(1, 16));

    double t_omega = 1.0, t_gamma = 0.5, t_tmax = 12.0;
    int t_samples = 481;
    auto* tla = app.add_subcommand("tla", "two-level-atom closed form vs exact Liouvillian");
    add_common(tla, to, false);
    tla->add_option("--omega", t_omega, "transition frequency");
    tla->add_option("--gamma-x", t_gamma, "transverse rate")->check(CLI::NonNegativeNumber);
    tla->add_option("--t-max", t_tmax, "time horizon")->check(CLI::PositiveNumber);
    tla->add_option("--samples", t_samples, "sample count")->check(CLI::Range(2, 1000000));

    int o_cutoff = 6, o_order = 2;
    bool o_allow = false;
    auto* oracle = app.add_subcommand("oracle", "truncated-Liouvillian cross-validation");
    add_common(oracle, oo, true);
    oracle->add_option("--cutoff", o_cutoff, "Fock dimension per mode")->check(CLI::Range(2, 4096));
    oracle->add_option("--order", o_order, "highest predicted moment order")->check(CLI::Range(1, 8));
    oracle->add_flag("--allow-amplified", o_allow, "run despite net amplification");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(spectrum)) return run_spectrum(so);
        if (app.got_subcommand(moments)) return run_moments(mo, m_order);
        if (app.got_subcommand(ep)) return run_ep_scan(eo, e_max_reports);
        if (app.got_subcommand(prop)) return run_propagate(po, p_order);
        if (app.got_subcommand(tla)) {
            std::array<cd, 4> init{cd(0.7, 0.0), cd(0.3, 0.0), cd(0.3, 0.0), cd(0.3, 0.0)};
            if (!to.config_path.empty()) {
                const auto c = json::parse(read_file(to.config_path));
                if (!c.is_object()) throw qef::config_error("config: expected a JSON object");
                if (tla->count("--omega") == 0 && c.contains("omega"))
                    t_omega = c["omega"].get<double>();
                if (tla->count("--gamma-x") == 0 && c.contains("gamma_x"))
                    t_gamma = c["gamma_x"].get<double>();
                if (tla->count("--t-max") == 0) t_tmax = require_positive(c, "t_max", t_tmax);
                if (tla->count("--samples") == 0) t_samples = require_count(c, "samples", t_samples, 2);
                if (c.contains("init")) {
                    const auto& a = c["init"];
                    if (!a.is_array() || a.size() != 4)
                        throw qef::config_error("config: \"init\" must list the four mean values");
                    for (std::size_t i = 0; i < 4; ++i)
                        init[i] = parse_complex_entry(a[i], "init");
                }
            }
            return run_tla(to, t_omega, t_gamma, t_tmax, t_samples, init);
        }
        if (app.got_subcommand(oracle)) return run_oracle(oo, o_cutoff, o_order, o_allow);
    } catch (const qef::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qef::dimension_cap_error& e) {
        std::cerr << "dimension cap: " << e.what() << "\n";
        return 4;
    } catch (const qef::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
