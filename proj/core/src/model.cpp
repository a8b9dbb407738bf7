// System validation, the two-mode shorthand, and JSON config parsing.
#include "qef/model.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace qef {

namespace {

using nlohmann::json;

cd parse_complex_entry(const json& j, const char* field) {
    if (j.is_number()) return cd(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cd(j[0].get<double>(), j[1].get<double>());
    throw config_error(std::string(field) + ": matrix entries must be numbers or [re, im] pairs");
}

Eigen::MatrixXcd parse_matrix(const json& j, int m, const char* field) {
    if (!j.is_array() || static_cast<int>(j.size()) != m)
        throw config_error(std::string(field) + ": expected " + std::to_string(m) + " rows");
    Eigen::MatrixXcd out(m, m);
    for (int r = 0; r < m; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != m)
            throw config_error(std::string(field) + ": row " + std::to_string(r) + " must have " +
                               std::to_string(m) + " entries");
        for (int c = 0; c < m; ++c)
            out(r, c) = parse_complex_entry(row[static_cast<std::size_t>(c)], field);
    }
    return out;
}

double require_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw config_error(std::string("config: missing or non-numeric field \"") + field + "\"");
    return j[field].get<double>();
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw config_error("config: invalid JSON");
    if (!j.is_object()) throw config_error("config: top level must be an object");
    return j;
}

bool looks_like_shorthand(const json& j) {
    return j.contains("gamma1d") || j.contains("gamma2a") || j.contains("g");
}

} // namespace

QuadraticSystem validate(const QuadraticSystem& system, double tol) {
    if (system.num_modes < 1) throw config_error("validate: num_modes must be >= 1");
    const int m = system.num_modes;
    if (system.epsilon.rows() != m || system.epsilon.cols() != m)
        throw config_error("validate: epsilon must be num_modes x num_modes");
    if (system.kappa.rows() != m || system.kappa.cols() != m)
        throw config_error("validate: kappa must be num_modes x num_modes");
    if (static_cast<int>(system.rates.size()) != m)
        throw config_error("validate: rates must list one channel per mode");
    if (!system.epsilon.allFinite() || !system.kappa.allFinite())
        throw config_error("validate: non-finite matrix entries");

    QuadraticSystem out = system;
    double eps_scale = std::max(1.0, system.epsilon.norm());
    double kap_scale = std::max(1.0, system.kappa.norm());
    double herm_dev = (system.epsilon - system.epsilon.adjoint()).norm();
    double sym_dev = (system.kappa - system.kappa.transpose()).norm();
    if (herm_dev > tol * eps_scale) {
        std::ostringstream msg;
        msg << "validate: epsilon deviates from Hermitian by " << herm_dev;
        throw config_error(msg.str());
    }
    if (sym_dev > tol * kap_scale) {
        std::ostringstream msg;
        msg << "validate: kappa deviates from symmetric by " << sym_dev;
        throw config_error(msg.str());
    }
    out.epsilon = (system.epsilon + system.epsilon.adjoint()) / 2.0;
    out.kappa = (system.kappa + system.kappa.transpose()) / 2.0;
    for (int j = 0; j < m; ++j) {
        double r = system.rates[static_cast<std::size_t>(j)].rate;
        if (!(r >= 0.0))
            throw config_error("validate: rate for mode " + std::to_string(j + 1) +
                               " must be nonnegative");
    }
    return out;
}

QuadraticSystem two_mode_system(const TwoModeParams& p) {
    if (!(p.gamma1d >= 0.0)) throw config_error("two_mode_system: gamma1d must be >= 0");
    if (!(p.gamma2a >= 0.0)) throw config_error("two_mode_system: gamma2a must be >= 0");
    if (!std::isfinite(p.epsilon) || !std::isfinite(p.kappa) || !std::isfinite(p.g))
        throw config_error("two_mode_system: parameters must be finite");

    // Phase flip a_j -> i a_j maps (epsilon, kappa, g) -> (epsilon, -kappa, -g)
    // and leaves the spectrum invariant; apply it so the stored g is >= 0.
    bool flip = p.g < 0.0;
    double kap = flip ? -p.kappa : p.kappa;
    double g = flip ? -p.g : p.g;

    QuadraticSystem s;
    s.num_modes = 2;
    s.epsilon = Eigen::MatrixXcd::Zero(2, 2);
    s.epsilon(0, 1) = cd(p.epsilon, 0.0);
    s.epsilon(1, 0) = cd(p.epsilon, 0.0);
    s.kappa = Eigen::MatrixXcd::Zero(2, 2);
    s.kappa(0, 1) = cd(kap, 0.0);
    s.kappa(1, 0) = cd(kap, 0.0);
    s.kappa(0, 0) = cd(g / 2.0, 0.0);
    s.kappa(1, 1) = cd(g / 2.0, 0.0);
    s.rates = {{RateKind::damped, p.gamma1d}, {RateKind::amplified, p.gamma2a}};
    s.phase_flipped = flip;
    return validate(s);
}

QuadraticSystem system_from_json(const std::string& json_text) {
    json j = parse_text(json_text);
    if (looks_like_shorthand(j)) {
        TwoModeParams p;
        if (!two_mode_params_from_json(json_text, p))
            throw config_error("config: incomplete two-mode shorthand");
        return two_mode_system(p);
    }
    if (!j.contains("modes")) throw config_error("config: missing \"modes\"");
    if (!j["modes"].is_number_integer() || j["modes"].get<int>() < 1)
        throw config_error("config: \"modes\" must be a positive integer");
    int m = j["modes"].get<int>();

    QuadraticSystem s;
    s.num_modes = m;
    if (!j.contains("epsilon")) throw config_error("config: missing \"epsilon\"");
    if (!j.contains("kappa")) throw config_error("config: missing \"kappa\"");
    s.epsilon = parse_matrix(j["epsilon"], m, "epsilon");
    s.kappa = parse_matrix(j["kappa"], m, "kappa");

    if (!j.contains("rates") || !j["rates"].is_array() || static_cast<int>(j["rates"].size()) != m)
        throw config_error("config: \"rates\" must list one entry per mode");
    for (const auto& rj : j["rates"]) {
        if (!rj.is_object() || !rj.contains("kind") || !rj.contains("rate") ||
            !rj["kind"].is_string() || !rj["rate"].is_number())
            throw config_error("config: rate entries need {\"kind\": \"damped\"|\"amplified\", \"rate\": x}");
        std::string kind = rj["kind"].get<std::string>();
        ModeRate mr;
        if (kind == "damped") {
            mr.kind = RateKind::damped;
        } else if (kind == "amplified") {
            mr.kind = RateKind::amplified;
        } else {
            throw config_error("config: unknown rate kind \"" + kind + "\"");
        }
        mr.rate = rj["rate"].get<double>();
        s.rates.push_back(mr);
    }
    return validate(s);
}

bool two_mode_params_from_json(const std::string& json_text, TwoModeParams& out) {
    json j = parse_text(json_text);
    if (!looks_like_shorthand(j)) return false;
    TwoModeParams p;
    p.gamma1d = require_number(j, "gamma1d");
    p.gamma2a = require_number(j, "gamma2a");
    p.epsilon = require_number(j, "epsilon");
    p.kappa = require_number(j, "kappa");
    p.g = require_number(j, "g");
    out = p;
    return true;
}

} // namespace qef
