#pragma once

// CSV and JSON serialization. Doubles are written with 17 significant digits
// so a read-back reproduces them bit-exactly; files are written to a
// temporary path and renamed into place.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lawson/asymptotics.hpp"
#include "lawson/certify.hpp"
#include "lawson/foliation.hpp"
#include "lawson/integrand.hpp"
#include "lawson/ode.hpp"

namespace lawson {

inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << contents;
    }
    fs::rename(tmp, path);
}

// --- CSV ------------------------------------------------------------------

inline void write_table_csv(const std::filesystem::path& path, const ProfileTable& table) {
    std::string s;
    s.reserve(table.rows.size() * 64 + 16);
    s += "t,sigma,dsigma\n";
    for (const TableRow& r : table.rows) {
        s += fmt17(r.t);
        s += ',';
        s += fmt17(r.sigma);
        s += ',';
        s += fmt17(r.dsigma);
        s += '\n';
    }
    atomic_write(path, s);
}

inline ProfileTable read_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,sigma,dsigma", 0) != 0) {
        throw std::runtime_error(path.string() + ": missing t,sigma,dsigma header");
    }
    ProfileTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TableRow r{};
        const char* p = line.c_str();
        char* end = nullptr;
        r.t = std::strtod(p, &end);
        if (*end != ',') throw std::runtime_error(path.string() + ": malformed row");
        r.sigma = std::strtod(end + 1, &end);
        if (*end != ',') throw std::runtime_error(path.string() + ": malformed row");
        r.dsigma = std::strtod(end + 1, &end);
        table.rows.push_back(r);
    }
    return table;
}

inline void write_phase_csv(const std::filesystem::path& path, const PhaseTrajectory& traj) {
    std::string s;
    s.reserve(traj.samples.size() * 96 + 64);
    s += "tau,w,z,dist_gamma1,dist_gamma2,dist_gamma3\n";
    for (const PhaseSample& p : traj.samples) {
        s += fmt17(p.tau);
        s += ',';
        s += fmt17(p.w);
        s += ',';
        s += fmt17(p.z);
        s += ',';
        s += fmt17(p.d1);
        s += ',';
        s += fmt17(p.d2);
        s += ',';
        s += fmt17(p.d3);
        s += '\n';
    }
    atomic_write(path, s);
}

// --- JSON -----------------------------------------------------------------

inline nlohmann::json to_json(const CertificationReport& r) {
    return {{"one_jet_ok", r.one_jet_ok},
            {"kappa_estimate", r.kappa_estimate},
            {"second_deriv_margin", r.second_deriv_margin},
            {"convexity_margin", r.convexity_margin},
            {"monotonicity_margin", r.monotonicity_margin},
            {"p_inequalities_ok", r.p_inequalities_ok},
            {"first_order_ok", r.first_order_ok},
            {"second_order_ok", r.second_order_ok},
            {"sample_count", r.sample_count},
            {"verdict", r.verdict}};
}

inline const char* to_string(ProfileVariant v) {
    switch (v) {
        case ProfileVariant::power: return "power";
        case ProfileVariant::area: return "area";
        case ProfileVariant::reflected: return "reflected";
        case ProfileVariant::glued: return "glued";
        case ProfileVariant::fourier: return "fourier-derived";
        default: return "tabulated-custom";
    }
}

inline nlohmann::json to_json(const Integrand& I) {
    nlohmann::json j{{"variant", to_string(I.phi.variant())},
                     {"k", I.params.k},
                     {"l", I.params.l},
                     {"p", I.p},
                     {"q", I.q},
                     {"b_phi", I.b_phi},
                     {"b_psi", I.b_psi}};
    if (I.delta) j["delta"] = *I.delta;
    if (I.fourier) {
        j["fourier"] = {{"N", I.fourier->terms},
                        {"coeffs", I.fourier->coeffs},
                        {"correctors", {I.fourier->corr_a, I.fourier->corr_b, I.fourier->corr_c}},
                        {"cutoff", "exp-ratio smoothstep"}};
    }
    return j;
}

inline nlohmann::json to_json(const CalibrationReport& r) {
    return {{"grid",
             {{"u_min", r.grid.u_min},
              {"u_max", r.grid.u_max},
              {"v_min", r.grid.v_min},
              {"v_max", r.grid.v_max},
              {"h", r.grid.h}}},
            {"h_values", r.h_values},
            {"max_abs_divergence", r.max_abs_divergence},
            {"empirical_orders", r.empirical_orders},
            {"extrapolated_limit", r.extrapolated_limit},
            {"euler_identity_max_error", r.euler_identity_max_error},
            {"support_inequality_violations", r.support_inequality_violations}};
}

inline nlohmann::json to_json(const AsymptoticFit& f) {
    return {{"a_hat", f.a_hat},
            {"mu_hat", f.mu_hat},
            {"mu_theory", f.mu_theory},
            {"rel_err", f.rel_err},
            {"window", {f.t_min, f.t_max}},
            {"residual_norm", f.residual_norm},
            {"samples", f.samples}};
}

inline nlohmann::json to_json(const PerturbationReport& r) {
    nlohmann::json trials = nlohmann::json::array();
    for (const PerturbationTrial& t : r.trials) {
        trials.push_back({{"center", t.center},
                          {"width", t.width},
                          {"amplitude", t.amplitude},
                          {"min_delta_e", t.min_delta_e},
                          {"quad_coeff", t.quad_coeff}});
    }
    return {{"trials", trials},
            {"min_delta_e", r.min_delta_e},
            {"min_quad_coeff", r.min_quad_coeff},
            {"violations", r.violations},
            {"q_tol", r.q_tol}};
}

inline void write_json(const std::filesystem::path& path, nlohmann::json j) {
    j["schema"] = "v1";
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace lawson
