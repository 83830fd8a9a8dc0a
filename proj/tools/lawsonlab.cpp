// lawsonlab: construct anisotropic surface-energy integrands, certify the
// analytic hypotheses behind the cone foliation, solve foliation leaves,
// and verify calibration, minimality, and tail-decay claims.
//
// Exit codes: 0 all checks passed; 1 a mathematical check failed;
// 2 invalid input.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lawson/lawson.hpp"

using namespace lawson;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
    int k = 1, l = 1;
    double p = 6.0;
    std::optional<double> q;
    double b = 0.01;
    std::optional<double> b_psi;
    std::optional<double> delta;
    int fourier_terms = 0;
    bool area = false;
    bool both_sides = false;
    bool force = false;
    std::string grid = "0.2,0.8,1.2,2.0,1e-3";
    std::string window = "1e2,1e4";
    unsigned long seed = 0;
    int jobs = 1;
    int trials = 20;
    double eps = 0.01;
    int samples = 200;
    std::string out_dir;
    std::string format = "json";
    std::string solver_config;
    SolverOptions solver;
};

std::vector<double> parse_csv_doubles(const std::string& s, size_t expect) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.size() != expect) {
        throw CLI::ValidationError("expected " + std::to_string(expect) + " comma-separated values");
    }
    return out;
}

// "1..3" or "6,8,10" or "6"
std::vector<double> parse_range_list(const std::string& s) {
    std::vector<double> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const double lo = std::stod(s.substr(0, dots));
        const double hi = std::stod(s.substr(dots + 2));
        for (double v = lo; v <= hi + 1e-12; v += 1.0) out.push_back(v);
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void load_solver_config(RunConfig& cfg) {
    if (cfg.solver_config.empty()) return;
    std::ifstream in(cfg.solver_config);
    if (!in) throw CLI::ValidationError("cannot open solver config " + cfg.solver_config);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("bad config line: " + line);
        const std::string key = line.substr(0, eq);
        const double value = std::stod(line.substr(eq + 1));
        if (key == "t_switch") cfg.solver.t_switch = value;
        else if (key == "rk_tol") cfg.solver.rk_tol = value;
        else if (key == "converge_tol") cfg.solver.converge_tol = value;
        else if (key == "region_tol") cfg.solver.region_tol = value;
        else if (key == "tau_max") cfg.solver.tau_max = value;
        else throw CLI::ValidationError("unknown solver config key: " + key);
    }
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    fs::path dir = cfg.out_dir;
    fs::create_directories(dir);
    return dir / name;
}

double derived_b_psi(const RunConfig& cfg, double q) {
    if (cfg.b_psi) return *cfg.b_psi;
    // glued integrands need matched second-order jets across the diagonal:
    // b_psi (q-2) = b_phi (p-2)
    if (cfg.delta && q != cfg.p) return cfg.b * (cfg.p - 2.0) / (q - 2.0);
    return cfg.b;
}

Profile phi_profile(const RunConfig& cfg) {
    if (cfg.area) return area_profile();
    return power_profile({cfg.k, cfg.l}, ProfileSide::phi, cfg.p, cfg.b);
}

Profile psi_profile(const RunConfig& cfg, double q) {
    if (cfg.area) return area_profile();
    return power_profile({cfg.k, cfg.l}, ProfileSide::psi, q, derived_b_psi(cfg, q));
}

nlohmann::json params_json(const RunConfig& cfg, double q) {
    return {{"k", cfg.k},         {"l", cfg.l},           {"p", cfg.p},
            {"q", q},             {"b_phi", cfg.b},       {"b_psi", derived_b_psi(cfg, q)},
            {"area", cfg.area},   {"seed", cfg.seed}};
}

void write_report(const RunConfig& cfg, const std::string& stem, nlohmann::json j) {
    if (cfg.format == "csv") {
        // flatten top-level scalars into a single-row CSV
        std::string header, row;
        j["schema"] = "v1";
        for (auto& [key, value] : j.items()) {
            if (!value.is_primitive()) continue;
            if (!header.empty()) {
                header += ',';
                row += ',';
            }
            header += key;
            row += value.is_number() ? fmt17(value.get<double>()) : value.dump();
        }
        atomic_write(out_path(cfg, stem + ".csv"), header + "\n" + row + "\n");
    } else {
        write_json(out_path(cfg, stem + ".json"), std::move(j));
    }
}

double effective_q(const RunConfig& cfg) {
    if (cfg.q) return *cfg.q;
    if (cfg.area) return std::nan("");
    return compat_q({cfg.k, cfg.l}, cfg.p);
}

// ---------------------------------------------------------------------------

int cmd_certify(const RunConfig& cfg) {
    const ConeParams kl{cfg.k, cfg.l};
    const double q = effective_q(cfg);
    const CertificationReport phi_rep = certify_profile(phi_profile(cfg), kl);
    const CertificationReport psi_rep = certify_profile(psi_profile(cfg, q), kl.swapped());
    const bool overall = phi_rep.verdict && psi_rep.verdict;
    nlohmann::json j{{"params", params_json(cfg, q)},
                     {"phi", to_json(phi_rep)},
                     {"psi", to_json(psi_rep)},
                     {"overall", overall}};
    write_report(cfg, "certify", std::move(j));
    std::cout << "certify: phi verdict " << (phi_rep.verdict ? "true" : "false") << ", psi verdict "
              << (psi_rep.verdict ? "true" : "false") << "\n";
    return overall ? 0 : 1;
}

nlohmann::json solve_one_side(const RunConfig& cfg, const Profile& prof, const ConeParams& kl,
                              const std::string& tag, bool& ok) {
    SolverOptions opts = cfg.solver;
    opts.force = cfg.force;
    const LeafResult res = integrate_leaf(prof, kl, opts);
    write_table_csv(out_path(cfg, "leaf_" + tag + ".csv"), res.table);
    write_phase_csv(out_path(cfg, "phase_" + tag + ".csv"), res.trajectory);
    const double resid = el_residual_max(res.table, prof, kl);
    ok = res.converged && res.region_ok;
    return {{"termination", to_string(res.trajectory.termination)},
            {"final_distance", res.trajectory.final_distance},
            {"region_ok", res.region_ok},
            {"min_region_margin", res.trajectory.min_region_margin},
            {"residual_max", resid},
            {"rows", res.table.rows.size()},
            {"table", "leaf_" + tag + ".csv"},
            {"phase", "phase_" + tag + ".csv"}};
}

int cmd_solve(const RunConfig& cfg) {
    const ConeParams kl{cfg.k, cfg.l};
    const double q = effective_q(cfg);
    nlohmann::json j{{"params", params_json(cfg, q)}};
    bool all_ok = true;
    try {
        bool ok = false;
        j["phi"] = solve_one_side(cfg, phi_profile(cfg), kl, "phi", ok);
        all_ok = all_ok && ok;
        if (cfg.both_sides) {
            j["psi"] = solve_one_side(cfg, psi_profile(cfg, q), kl.swapped(), "psi", ok);
            all_ok = all_ok && ok;
        }
    } catch (const std::exception& e) {
        std::cerr << "solve: " << e.what() << "\n";
        j["error"] = e.what();
        write_report(cfg, "solve", std::move(j));
        return 1;
    }
    write_report(cfg, "solve", std::move(j));
    std::cout << "solve: " << (all_ok ? "converged" : "failed") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_foliate(const RunConfig& cfg) {
    const ConeParams kl{cfg.k, cfg.l};
    const Profile prof = phi_profile(cfg);
    SolverOptions opts = cfg.solver;
    opts.force = cfg.force;
    const LeafResult res = integrate_leaf(prof, kl, opts);
    const DenseLeaf dense = DenseLeaf::from_solution(res.table, prof, kl);
    const Leaf unit = make_unit_leaf(dense);

    // foliation checks: unique leaf through random points, lambda monotone in v
    bool foliation_ok = true;
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> us(0.0, 2.0), dv(0.1, 2.0);
        for (int i = 0; i < 1000 && foliation_ok; ++i) {
            const double u = us(rng);
            const double v1 = u + dv(rng), v2 = v1 + dv(rng);
            const double lam1 = leaf_through_point(unit, u, v1);
            const double lam2 = leaf_through_point(unit, u, v2);
            if (!(lam2 > lam1 && lam1 > 0)) foliation_ok = false;
        }
    }

    const auto window = parse_csv_doubles(cfg.window, 2);
    const double ta = std::max(0.1, dense.t_min()), tb = std::min(0.9, dense.t_max());
    const PerturbationReport pert =
        perturbation_test(prof, kl, dense, ta, tb, cfg.trials, cfg.eps, cfg.seed);
    const bool minimality_ok = pert.violations == 0 && pert.min_quad_coeff > 0;

    // leaf point export, log-spaced in u over the tabulated range
    {
        std::string csv = "u,v\n";
        const double lo = std::max(dense.t_min() + 1e-12, 1e-3), hi = dense.t_max();
        for (int i = 0; i < cfg.samples; ++i) {
            const double u = lo * std::pow(hi / lo, double(i) / (cfg.samples - 1));
            csv += fmt17(u) + "," + fmt17(dense.sigma(u)) + "\n";
        }
        atomic_write(out_path(cfg, "leaf_points.csv"), csv);
    }

    nlohmann::json j{{"params", params_json(cfg, effective_q(cfg))},
                     {"foliation_ok", foliation_ok},
                     {"perturbation", to_json(pert)},
                     {"window", {window[0], window[1]}},
                     {"points", "leaf_points.csv"}};
    write_report(cfg, "foliate", std::move(j));
    std::cout << "foliate: foliation " << (foliation_ok ? "ok" : "FAILED") << ", minimality "
              << (minimality_ok ? "ok" : "FAILED") << "\n";
    return (foliation_ok && minimality_ok) ? 0 : 1;
}

Integrand integrand_from(const RunConfig& cfg, double q) {
    if (cfg.area) return make_area_integrand({cfg.k, cfg.l});
    std::optional<GluingParams> gluing;
    if (cfg.delta) gluing = GluingParams(*cfg.delta);
    Integrand I = build_integrand({cfg.k, cfg.l}, cfg.p, q, cfg.b, derived_b_psi(cfg, q), gluing);
    if (cfg.fourier_terms > 0) I = fourier_approximate(I, cfg.fourier_terms);
    return I;
}

int cmd_calibrate(const RunConfig& cfg) {
    const ConeParams kl{cfg.k, cfg.l};
    const double q = effective_q(cfg);
    const fs::path leaf_path = out_path(cfg, "leaf_phi.csv");
    if (!fs::exists(leaf_path)) {
        std::cerr << "calibrate: " << leaf_path << " not found (run solve first)\n";
        return 2;
    }
    const Profile prof = phi_profile(cfg);
    ProfileTable table = read_table_csv(leaf_path);
    table.params = kl;
    const DenseLeaf dense = DenseLeaf::from_solution(table, prof, kl);
    const Leaf unit = make_unit_leaf(dense);
    const Integrand I = integrand_from(cfg, q);

    const auto g = parse_csv_doubles(cfg.grid, 5);
    const GridSpec grid{g[0], g[1], g[2], g[3], g[4]};
    const CalibrationReport rep = divergence_check(I, unit, grid, cfg.seed);

    const bool ok = rep.empirical_orders[0] >= 1.8 && rep.empirical_orders[1] >= 1.8 &&
                    rep.extrapolated_limit <= 1e-6 && rep.euler_identity_max_error <= 1e-10 &&
                    rep.support_inequality_violations == 0;
    nlohmann::json j = to_json(rep);
    j["params"] = params_json(cfg, q);
    j["pass"] = ok;
    write_report(cfg, "calibrate", std::move(j));
    std::cout << "calibrate: max|div| = [" << rep.max_abs_divergence[0] << ", "
              << rep.max_abs_divergence[1] << ", " << rep.max_abs_divergence[2] << "], orders ["
              << rep.empirical_orders[0] << ", " << rep.empirical_orders[1] << "] -> "
              << (ok ? "ok" : "FAILED") << "\n";
    return ok ? 0 : 1;
}

int cmd_asymptote(const RunConfig& cfg) {
    const ConeParams kl{cfg.k, cfg.l};
    const fs::path leaf_path = out_path(cfg, "leaf_phi.csv");
    if (!fs::exists(leaf_path)) {
        std::cerr << "asymptote: " << leaf_path << " not found (run solve first)\n";
        return 2;
    }
    const Profile prof = phi_profile(cfg);
    ProfileTable table = read_table_csv(leaf_path);
    table.params = kl;
    const DenseLeaf dense = DenseLeaf::from_solution(table, prof, kl);
    const auto w = parse_csv_doubles(cfg.window, 2);
    const AsymptoticFit fit = fit_tail(dense, w[0], w[1], mu_theory(prof, kl));
    nlohmann::json j = to_json(fit);
    j["params"] = params_json(cfg, effective_q(cfg));
    j["mu_max"] = mu_max(kl);
    write_report(cfg, "asymptote", std::move(j));
    std::cout << "asymptote: mu_hat = " << fit.mu_hat << ", mu_theory = " << fit.mu_theory
              << ", rel_err = " << fit.rel_err << "\n";
    return fit.rel_err <= 0.02 ? 0 : 1;
}

struct SweepCell {
    int k, l;
    double p;
    double q = std::nan("");
    double mu_th = std::nan(""), mu_hat = std::nan(""), rel = std::nan(""), mumax = std::nan("");
    bool verdict = false;
};

int cmd_sweep(const RunConfig& cfg, const std::string& ks, const std::string& ls,
              const std::string& ps) {
    std::vector<SweepCell> cells;
    for (double kk : parse_range_list(ks)) {
        for (double ll : parse_range_list(ls)) {
            for (double pp : parse_range_list(ps)) {
                cells.push_back({int(kk), int(ll), pp});
            }
        }
    }
    const auto window = parse_csv_doubles(cfg.window, 2);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            SweepCell& c = cells[i];
            const ConeParams kl{c.k, c.l};
            try {
                c.q = compat_q(kl, c.p);
            } catch (const std::exception&) {
            }
            c.mumax = mu_max(kl);
            const Profile prof = power_profile(kl, ProfileSide::phi, c.p, cfg.b);
            const CertificationReport rep = certify_profile(prof, kl);
            c.verdict = rep.verdict;
            if (!c.verdict) continue;
            c.mu_th = mu_theory(prof, kl);
            try {
                const LeafResult res = integrate_leaf(prof, kl, cfg.solver);
                const DenseLeaf dense = DenseLeaf::from_solution(res.table, prof, kl);
                const AsymptoticFit fit = fit_tail(dense, window[0], window[1], c.mu_th);
                c.mu_hat = fit.mu_hat;
                c.rel = fit.rel_err;
            } catch (const std::exception&) {
                c.verdict = false;
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, int(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs - 1; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::string csv = "k,l,p,q,mu_theory,mu_hat,rel_err,mu_max,verdict\n";
    bool all_ok = true;
    for (const SweepCell& c : cells) {
        csv += std::to_string(c.k) + "," + std::to_string(c.l) + "," + fmt17(c.p) + "," +
               fmt17(c.q) + "," + fmt17(c.mu_th) + "," + fmt17(c.mu_hat) + "," + fmt17(c.rel) +
               "," + fmt17(c.mumax) + "," + (c.verdict ? "true" : "false") + "\n";
        all_ok = all_ok && c.verdict;
    }
    atomic_write(out_path(cfg, "sweep.csv"), csv);
    std::cout << "sweep: " << cells.size() << " rows, " << (all_ok ? "all certified" : "failures")
              << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic minimal-cone foliation laboratory"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("LAWSONLAB_OUT")) cfg.out_dir = env;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";

    auto add_common = [&](CLI::App* sub, bool needs_profile = true) {
        sub->add_option("--k", cfg.k, "sphere dimension of the x block")->check(CLI::Range(1, 64));
        sub->add_option("--l", cfg.l, "sphere dimension of the y block")->check(CLI::Range(1, 64));
        if (needs_profile) {
            sub->add_option("--p", cfg.p, "phi-side exponent (> 2)");
            sub->add_option("--q", cfg.q, "psi-side exponent (default: compatibility value)");
            sub->add_option("--b", cfg.b, "quadratic regularization coefficient");
            sub->add_option("--b-psi", cfg.b_psi, "psi-side regularization (default: derived)");
            sub->add_option("--delta", cfg.delta, "gluing transition width in (0, 1/4)");
            sub->add_option("--fourier-N", cfg.fourier_terms, "harmonics of the analytic approximation");
            sub->add_flag("--area", cfg.area, "use the area integrand sqrt(1+s^2)");
        }
        sub->add_option("--seed", cfg.seed, "random seed for sampled checks");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--format", cfg.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--t_switch", cfg.solver.t_switch, "series/fixed-point start extent");
        sub->add_option("--rk_tol", cfg.solver.rk_tol, "embedded-pair relative tolerance");
        sub->add_option("--converge_tol", cfg.solver.converge_tol, "fixed-point distance target");
        sub->add_option("--region_tol", cfg.solver.region_tol, "trapping-region overshoot allowance");
        sub->add_option("--tau_max", cfg.solver.tau_max, "phase-time budget");
        sub->add_option("--config", cfg.solver_config, "key=value solver options file");
    };

    CLI::App* certify = app.add_subcommand("certify", "certify both profile sides");
    add_common(certify);

    CLI::App* solve = app.add_subcommand("solve", "integrate the foliation leaf");
    add_common(solve);
    solve->add_flag("--both-sides", cfg.both_sides, "solve the psi-side leaf as well");
    solve->add_flag("--force", cfg.force, "skip the certification gate");

    CLI::App* foliate = app.add_subcommand("foliate", "foliation and minimality checks");
    add_common(foliate);
    foliate->add_flag("--force", cfg.force, "skip the certification gate");
    foliate->add_option("--trials", cfg.trials, "perturbation trials");
    foliate->add_option("--eps", cfg.eps, "perturbation amplitude (<= 0.01)");
    foliate->add_option("--samples", cfg.samples, "leaf points to export (log-spaced)");
    foliate->add_option("--window", cfg.window, "tail window t_min,t_max");

    CLI::App* calibrate = app.add_subcommand("calibrate", "divergence check of grad F(nu)");
    add_common(calibrate);
    calibrate->add_option("--grid", cfg.grid, "u_min,u_max,v_min,v_max,h");

    CLI::App* asymptote = app.add_subcommand("asymptote", "fit the leaf tail decay");
    add_common(asymptote);
    asymptote->add_option("--window", cfg.window, "fit window t_min,t_max");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over (k, l, p)");
    std::string ks = "1..3", ls = "1..3", ps = "6";
    sweep->add_option("--k", ks, "k values: list or a..b range");
    sweep->add_option("--l", ls, "l values: list or a..b range");
    sweep->add_option("--p", ps, "p values: list or a..b range");
    sweep->add_option("--b", cfg.b, "regularization coefficient");
    sweep->add_option("--jobs", cfg.jobs, "parallel cells");
    sweep->add_option("--window", cfg.window, "fit window t_min,t_max");
    sweep->add_option("--seed", cfg.seed, "random seed");
    sweep->add_option("--out", cfg.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        load_solver_config(cfg);
        if (certify->parsed()) return cmd_certify(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (foliate->parsed()) return cmd_foliate(cfg);
        if (calibrate->parsed()) return cmd_calibrate(cfg);
        if (asymptote->parsed()) return cmd_asymptote(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, ks, ls, ps);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const construction_error& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 1;
    } catch (const solve_error& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
