// Command-line front end: solve / enumerate / branch / wfun / thresholds /
// gelfand / fields / reproduce-paper. All outputs are deterministic: numbers
// are printed with 17 significant digits and no part of the pipeline draws
// random numbers.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "isoshell/bvp.hpp"
#include "isoshell/continuation.hpp"
#include "isoshell/errors.hpp"
#include "isoshell/gelfand.hpp"
#include "isoshell/io.hpp"
#include "isoshell/ivp.hpp"
#include "isoshell/physics.hpp"
#include "isoshell/representation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace isoshell;

namespace {

struct GlobalOptions {
    double tol = 1e-8;
    int order = 6;
    std::string out_dir = ".";
    std::string format = "csv";
};

std::string round5(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5g", x);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string solution_csv(std::span<const double> eta, std::span<const double> y,
                         std::span<const double> yprime) {
    std::ostringstream os;
    os << "eta,y,yprime\n";
    for (std::size_t i = 0; i < eta.size(); ++i)
        os << g17(eta[i]) << ',' << g17(y[i]) << ',' << g17(yprime[i]) << "\n";
    return os.str();
}

AdaptConfig solver_config(const GlobalOptions& g) {
    AdaptConfig cfg;
    cfg.order = g.order;
    cfg.target_tol = g.tol;
    cfg.newton.tol = g.tol;
    return cfg;
}

UProfile quick_profile(double t_max = 1e3) {
    IvpConfig cfg;
    cfg.n = 3;
    cfg.t_max = t_max;
    return integrate_U(cfg);
}

json stats_json(const BvpSolution& sol) {
    json j;
    j["nodes"] = sol.stats.nodes;
    j["h_min"] = sol.stats.h_min;
    j["newton_iters"] = sol.stats.newton_iters;
    j["residual"] = sol.stats.residual;
    j["scaled_residual"] = sol.stats.scaled_residual;
    j["error_estimate"] = sol.stats.error_estimate;
    j["condition_estimate"] = condition_estimate(sol);
    return j;
}

BvpSolution solve_lower(double N, const GlobalOptions& g, GuessStrategy strategy) {
    const Mesh start = Mesh::uniform(0.0, 1.0, 20);
    const auto guess = initial_guess(N, strategy);
    std::vector<double> y(start.nodes.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = guess.value(start.nodes[i]);
    return solve_adaptive(start, y, RightBoundary::neumann(N), solver_config(g));
}

// ---- subcommand payloads ----------------------------------------------

int run_solve(const GlobalOptions& g, double N, const std::string& guess_name,
              std::string out_file, std::string stats_file) {
    const GuessStrategy strategy =
        guess_name == "a" ? GuessStrategy::IntegralMatch : GuessStrategy::Midpoint;
    const auto sol = solve_lower(N, g, strategy);

    fs::create_directories(g.out_dir);
    if (out_file.empty()) out_file = "solution.csv";
    if (stats_file.empty()) stats_file = "stats.json";
    write_text_file(fs::path(g.out_dir) / out_file,
                    solution_csv(sol.mesh.nodes, sol.y, sol.y_prime));
    json stats = stats_json(sol);
    stats["N"] = sol.N;
    stats["y0"] = sol.y0();
    stats["mass_residual"] = mass_residual(sol, CharacteristicNumbers{1.0, 1.0, sol.N});
    write_json_file(fs::path(g.out_dir) / stats_file, stats);
    std::cout << stats.dump(2) << "\n";
    return 0;
}

int run_enumerate(const GlobalOptions& g, double N, double delta0, int max_solves, double dn,
                  double profile_t_max) {
    const auto profile = quick_profile(profile_t_max);
    const auto th = critical_thresholds(profile);
    if (N > th.n2)
        throw DomainError("N exceeds N2 = " + g17(th.n2) + "; the problem has no solutions");

    HofidPath path(solver_config(g));
    ContinuationConfig cfg;
    cfg.solver = solver_config(g);
    cfg.delta0 = delta0;
    cfg.dN = dn;
    cfg.max_solves = max_solves;
    cfg.thresholds = th;
    const auto result = enumerate_solutions(path, N, cfg);

    fs::create_directories(g.out_dir);
    json summary;
    summary["N"] = N;
    summary["count"] = static_cast<int>(result.solution_ids.size());
    summary["stopped_reason"] = to_string(result.stopped_reason);
    summary["solve_count"] = result.branch.solve_count;
    summary["corrector_calls"] = result.branch.corrector_calls;

    json sols = json::array();
    for (std::size_t i = 0; i < result.solution_ids.size(); ++i) {
        const auto& sol = path.solution(result.solution_ids[i]);
        char name[32];
        std::snprintf(name, sizeof(name), "solution_%02zu.csv", i + 1);
        write_text_file(fs::path(g.out_dir) / name,
                        solution_csv(sol.mesh.nodes, sol.y, sol.y_prime));
        json js = stats_json(sol);
        js["file"] = name;
        js["y0"] = sol.y0();
        js["y0_rounded"] = round5(sol.y0());
        js["N"] = sol.N;
        js["mass_residual"] = mass_residual(sol, CharacteristicNumbers{1.0, 1.0, sol.N});
        sols.push_back(js);
    }
    summary["solutions"] = sols;

    json tps = json::array();
    for (int idx : result.branch.turning_points) {
        json t;
        t["index"] = idx;
        t["N"] = result.branch.points[idx].N;
        t["y0"] = result.branch.points[idx].y0;
        tps.push_back(t);
    }
    summary["turning_points"] = tps;
    summary["event_failures"] = result.event_failures;

    {
        std::ostringstream os;
        os << "N,y0\n";
        for (const auto& p : result.branch.points) os << g17(p.N) << ',' << g17(p.y0) << "\n";
        write_text_file(fs::path(g.out_dir) / "branch.csv", os.str());
    }
    write_json_file(fs::path(g.out_dir) / "summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_branch(const GlobalOptions& g, double from, int folds, bool refine, int max_solves) {
    HofidPath path(solver_config(g));
    ContinuationConfig cfg;
    cfg.solver = solver_config(g);
    cfg.max_folds = folds;
    cfg.max_solves = max_solves;
    const Branch branch = trace_branch(path, from, cfg);

    fs::create_directories(g.out_dir);
    {
        std::ostringstream os;
        os << "N,y0\n";
        for (const auto& p : branch.points) os << g17(p.N) << ',' << g17(p.y0) << "\n";
        write_text_file(fs::path(g.out_dir) / "branch.csv", os.str());
    }
    json j;
    j["from"] = from;
    j["points"] = static_cast<int>(branch.points.size());
    j["solve_count"] = branch.solve_count;
    json tps = json::array();
    for (int idx : branch.turning_points) {
        json t;
        t["index"] = idx;
        t["N"] = branch.points[idx].N;
        t["y0"] = branch.points[idx].y0;
        tps.push_back(t);
    }
    j["turning_points"] = tps;
    if (refine) {
        if (!branch.turning_points.empty()) j["N2_fold"] = find_fold(path, branch, 0);
        if (branch.turning_points.size() > 1) j["N1_fold"] = find_fold(path, branch, 1);
    }
    write_json_file(fs::path(g.out_dir) / "branch.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_wfun(const GlobalOptions& g, int n, double t_max, double rel_tol, double abs_tol,
             std::string out_file) {
    IvpConfig cfg;
    cfg.n = n;
    cfg.t_max = t_max;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    const auto profile = integrate_U(cfg);
    fs::create_directories(g.out_dir);
    if (out_file.empty()) out_file = "w.csv";
    std::ostringstream os;
    write_profile_csv(profile, os);
    write_text_file(fs::path(g.out_dir) / out_file, os.str());
    std::cout << "{\"nodes\": " << profile.nodes().size() << ", \"t_max\": " << g17(t_max)
              << "}\n";
    return 0;
}

int run_thresholds(const GlobalOptions& g, double t_max, std::string out_file) {
    const auto profile = quick_profile(t_max);
    const auto th = critical_thresholds(profile);
    json j;
    j["N1"] = th.n1;
    j["N2"] = th.n2;
    j["sigma_N2"] = th.sigma_n2;
    fs::create_directories(g.out_dir);
    if (out_file.empty()) out_file = "thresholds.json";
    write_json_file(fs::path(g.out_dir) / out_file, j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_gelfand(const GlobalOptions& g, int n, const std::string& kind_name, double level,
                double sigma_max, const std::string& curve_file, std::string out_file) {
    CountQuery q;
    q.kind = kind_name == "dirichlet" ? CountQuery::Kind::dirichlet : CountQuery::Kind::neumann;
    q.n = n;
    q.level = level;
    q.sigma_max = sigma_max;
    q.validate();

    IvpConfig cfg;
    cfg.n = n;
    cfg.t_max = sigma_max;
    const auto profile = integrate_U(cfg);
    const auto result = count_radial_solutions(q, profile);

    fs::create_directories(g.out_dir);
    if (!curve_file.empty()) {
        std::ostringstream os;
        os << "sigma,value\n";
        const int points = 2000;
        const double lo = std::log(q.sigma_min), hi = std::log(sigma_max);
        for (int i = 0; i < points; ++i) {
            const double s = std::min(std::exp(lo + (hi - lo) * i / (points - 1)), sigma_max);
            const double v = q.kind == CountQuery::Kind::neumann
                                 ? neumann_multiplier(profile, s)
                                 : dirichlet_multiplier(profile, s);
            os << g17(s) << ',' << g17(v) << "\n";
        }
        write_text_file(fs::path(g.out_dir) / curve_file, os.str());
    }
    json j;
    j["kind"] = kind_name;
    j["n"] = n;
    j["level"] = level;
    j["sigma_max"] = sigma_max;
    j["count"] = result.count;
    j["truncated"] = result.truncated;
    j["sigmas"] = result.sigmas;
    if (!out_file.empty()) write_json_file(fs::path(g.out_dir) / out_file, j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_fields(const GlobalOptions& g, const std::string& solution_file,
               const std::string& params_file, std::string out_file) {
    std::ifstream sol_in(solution_file);
    if (!sol_in) throw DomainError("cannot open solution CSV: " + solution_file);
    const CsvTable table = read_csv(sol_in);
    if (table.header != std::vector<std::string>{"eta", "y", "yprime"})
        throw DomainError("solution CSV must have header eta,y,yprime");

    std::ifstream par_in(params_file);
    if (!par_in) throw DomainError("cannot open params JSON: " + params_file);
    json pj = json::parse(par_in);
    PhysicalParams params;
    if (pj.contains("G")) params.G = pj["G"].get<double>();
    params.R = pj.at("R").get<double>();
    params.T = pj.at("T").get<double>();
    params.a = pj.at("a").get<double>();
    params.m_g = pj.at("m_g").get<double>();
    if (pj.contains("r_scale") && pj.contains("rho_scale")) {
        params.r_scale = pj["r_scale"].get<double>();
        params.rho_scale = pj["rho_scale"].get<double>();
    } else {
        params = with_unit_scales(params);
    }
    const auto cn = characteristic_numbers(params);

    // The stored solution solves the simplified problem on [0,1]; map it to
    // [0, Pi4] for general scale choices.
    const auto& eta1 = table.columns[0];
    const auto& y1 = table.columns[1];
    const auto& yp1 = table.columns[2];
    std::vector<double> eta(eta1.size()), y(y1.size()), yp(yp1.size());
    const double shift = std::log(cn.pi1 * cn.pi4 * cn.pi4);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta[i] = eta1[i] * cn.pi4;
        y[i] = y1[i] - shift;
        yp[i] = yp1[i] / cn.pi4;
    }
    const auto fields = fields_from_solution(eta, y, yp, params, cn);

    fs::create_directories(g.out_dir);
    if (out_file.empty()) out_file = "fields.csv";
    std::ostringstream os;
    os << "r,rho,p,g\n";
    for (std::size_t i = 0; i < fields.r.size(); ++i)
        os << g17(fields.r[i]) << ',' << g17(fields.rho[i]) << ',' << g17(fields.p[i]) << ','
           << g17(fields.g[i]) << "\n";
    write_text_file(fs::path(g.out_dir) / out_file, os.str());
    std::cout << "{\"rows\": " << fields.r.size() << ", \"N\": " << g17(cn.N) << "}\n";
    return 0;
}

int run_reproduce(const GlobalOptions& g, const std::string& only) {
    // Reference values the report compares against.
    const double ref_n2 = 2.51755148;
    const double ref_n1 = 1.8427;
    const std::vector<double> ref_test1 = {2.6618, 7.9906, 10.609};
    const std::vector<double> ref_test2 = {2.8082, 7.2495, 12.124, 16.832,
                                           21.618, 26.280, 31.263, 35.221};

    fs::create_directories(g.out_dir);
    json report;
    report["checks"] = json::array();
    bool all_pass = true;
    const auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        json r;
        r["name"] = name;
        r["pass"] = pass;
        r["detail"] = detail;
        report["checks"].push_back(r);
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        all_pass = all_pass && pass;
    };

    const auto run_test = [&](const std::string& label, double N,
                              const std::vector<double>& ref, double tol_abs, double tol_rel) {
        GlobalOptions sub = g;
        sub.out_dir = (fs::path(g.out_dir) / label).string();
        HofidPath path(solver_config(sub));
        ContinuationConfig cfg;
        cfg.solver = solver_config(sub);
        cfg.thresholds = critical_thresholds(quick_profile());
        const auto result = enumerate_solutions(path, N, cfg);
        fs::create_directories(sub.out_dir);
        json sols = json::array();
        for (std::size_t i = 0; i < result.solution_ids.size(); ++i) {
            const auto& sol = path.solution(result.solution_ids[i]);
            char name[32];
            std::snprintf(name, sizeof(name), "solution_%02zu.csv", i + 1);
            write_text_file(fs::path(sub.out_dir) / name,
                            solution_csv(sol.mesh.nodes, sol.y, sol.y_prime));
            json js;
            js["y0"] = sol.y0();
            js["y0_rounded"] = round5(sol.y0());
            js["nodes"] = sol.stats.nodes;
            js["h_min"] = sol.stats.h_min;
            sols.push_back(js);
        }
        report[label]["solutions"] = sols;
        report[label]["solve_count"] = result.branch.solve_count;

        bool pass = result.y0_values.size() == ref.size();
        std::string detail = "count " + std::to_string(result.y0_values.size()) + "/" +
                             std::to_string(ref.size());
        if (pass) {
            for (std::size_t i = 0; i < ref.size(); ++i) {
                const double err = std::abs(result.y0_values[i] - ref[i]);
                if (err > tol_abs && err > tol_rel * std::abs(ref[i])) {
                    pass = false;
                    detail += "; y0[" + std::to_string(i + 1) + "] = " +
                              round5(result.y0_values[i]) + " vs " + round5(ref[i]);
                }
            }
            if (pass) detail += "; central values match the reference table";
        }
        record(label, pass, detail);
    };

    if (only.empty() || only == "thresholds") {
        const auto profile = quick_profile();
        const auto th = critical_thresholds(profile);
        record("thresholds.N2", std::abs(th.n2 - ref_n2) <= 1e-5,
               "W route N2 = " + g17(th.n2));
        record("thresholds.N1", std::abs(th.n1 - ref_n1) <= 5e-4,
               "W route N1 = " + g17(th.n1));
        report["thresholds"]["N1"] = th.n1;
        report["thresholds"]["N2"] = th.n2;
        report["thresholds"]["sigma_N2"] = th.sigma_n2;
    }
    if (only.empty() || only == "test1") run_test("test1", 1.9, ref_test1, 5e-3, 0.0);
    if (only.empty() || only == "test2") run_test("test2", 2.0001, ref_test2, 0.0, 1e-2);

    report["all_pass"] = all_pass;
    write_json_file(fs::path(g.out_dir) / "report.json", report);
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shell gas equilibrium toolkit: multiplicity of the Neumann problem for the "
                 "isothermal sphere equation"};
    app.fallthrough();  // global flags may follow the subcommand
    app.set_config("--config", "", "key=value configuration file (flags override it)");

    GlobalOptions g;
    app.add_option("--tol", g.tol, "solver tolerance")->capture_default_str();
    app.add_option("--order", g.order, "finite-difference order (even, 2..8 for adaptive runs)")
        ->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--format", g.format, "output flavor: csv|json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve the shell problem at one N value");
    double solve_N = 1.0;
    std::string solve_guess = "b", solve_out, solve_stats;
    solve_cmd->add_option("--N", solve_N, "boundary parameter")->required();
    solve_cmd->add_option("--guess", solve_guess, "initial guess strategy: a|b")
        ->check(CLI::IsMember({"a", "b"}));
    solve_cmd->add_option("--out", solve_out, "solution CSV filename");
    solve_cmd->add_option("--stats", solve_stats, "stats JSON filename");

    // enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "find all solutions at a target N");
    double enum_N = 1.9, enum_delta0 = 0.2, enum_dn = 0.05, enum_tmax = 1e3;
    int enum_max_solves = 100000;
    enum_cmd->add_option("--N", enum_N, "target boundary parameter")->required();
    enum_cmd->add_option("--delta0", enum_delta0, "initial continuation stepsize")
        ->capture_default_str();
    enum_cmd->add_option("--max-solves", enum_max_solves, "solve budget")->capture_default_str();
    enum_cmd->add_option("--dn", enum_dn, "offset of the second starting point")
        ->capture_default_str();
    enum_cmd->add_option("--profile-t-max", enum_tmax, "integration range of the threshold check")
        ->capture_default_str();

    // branch
    auto* branch_cmd = app.add_subcommand("branch", "trace the bifurcation diagram");
    double branch_from = 1.0;
    int branch_folds = 2, branch_max_solves = 100000;
    bool branch_refine = false;
    branch_cmd->add_option("--from", branch_from, "starting N on the lower branch")->required();
    branch_cmd->add_option("--folds", branch_folds, "stop after this many turning points")
        ->capture_default_str();
    branch_cmd->add_flag("--refine-folds", branch_refine,
                         "locally refine the traced turning points");
    branch_cmd->add_option("--max-solves", branch_max_solves, "solve budget")
        ->capture_default_str();

    // wfun
    auto* wfun_cmd = app.add_subcommand("wfun", "export the canonical profile and W = t U'");
    int wfun_n = 3;
    double wfun_tmax = 1e5, wfun_rel = 1e-10, wfun_abs = 1e-10;
    std::string wfun_out;
    wfun_cmd->add_option("--n", wfun_n, "dimension")->capture_default_str();
    wfun_cmd->add_option("--t-max", wfun_tmax, "integration endpoint")->capture_default_str();
    wfun_cmd->add_option("--rel-tol", wfun_rel, "relative tolerance")->capture_default_str();
    wfun_cmd->add_option("--abs-tol", wfun_abs, "absolute tolerance")->capture_default_str();
    wfun_cmd->add_option("--out", wfun_out, "output CSV filename");

    // thresholds
    auto* th_cmd = app.add_subcommand("thresholds", "compute N1 and N2 from the W extrema");
    double th_tmax = 1e3;
    std::string th_out;
    th_cmd->add_option("--t-max", th_tmax, "integration endpoint")->capture_default_str();
    th_cmd->add_option("--out", th_out, "output JSON filename");

    // gelfand
    auto* gl_cmd = app.add_subcommand("gelfand", "count radial solutions in dimension n");
    int gl_n = 3;
    std::string gl_kind = "neumann", gl_curve, gl_out = "gelfand.json";
    double gl_level = -1.0, gl_sigma_max = 1e5;
    gl_cmd->add_option("--n", gl_n, "dimension")->required();
    gl_cmd->add_option("--kind", gl_kind, "boundary condition: neumann|dirichlet")
        ->check(CLI::IsMember({"neumann", "dirichlet"}))
        ->required();
    gl_cmd->add_option("--level", gl_level, "gamma (neumann, < 0) or lambda (dirichlet, > 0)")
        ->required();
    gl_cmd->add_option("--sigma-max", gl_sigma_max, "search horizon")->capture_default_str();
    gl_cmd->add_option("--curve", gl_curve, "also export the multiplier curve CSV");
    gl_cmd->add_option("--out", gl_out, "output JSON filename")->capture_default_str();

    // fields
    auto* f_cmd = app.add_subcommand("fields", "dimensional density/pressure/gravity profiles");
    std::string f_solution, f_params, f_out;
    f_cmd->add_option("--solution", f_solution, "solution CSV (eta,y,yprime)")->required();
    f_cmd->add_option("--params", f_params, "physical parameters JSON")->required();
    f_cmd->add_option("--out", f_out, "output CSV filename");

    // reproduce-paper
    auto* rp_cmd =
        app.add_subcommand("reproduce-paper", "run the published test cases end to end");
    std::string rp_only;
    rp_cmd->add_option("--only", rp_only, "restrict to: thresholds|test1|test2")
        ->check(CLI::IsMember({"thresholds", "test1", "test2"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve_cmd) return run_solve(g, solve_N, solve_guess, solve_out, solve_stats);
        if (*enum_cmd)
            return run_enumerate(g, enum_N, enum_delta0, enum_max_solves, enum_dn, enum_tmax);
        if (*branch_cmd)
            return run_branch(g, branch_from, branch_folds, branch_refine, branch_max_solves);
        if (*wfun_cmd) return run_wfun(g, wfun_n, wfun_tmax, wfun_rel, wfun_abs, wfun_out);
        if (*th_cmd) return run_thresholds(g, th_tmax, th_out);
        if (*gl_cmd)
            return run_gelfand(g, gl_n, gl_kind, gl_level, gl_sigma_max, gl_curve, gl_out);
        if (*f_cmd) return run_fields(g, f_solution, f_params, f_out);
        if (*rp_cmd) return run_reproduce(g, rp_only);
    } catch (const std::invalid_argument& e) {
        json diag;
        diag["error"] = "usage";
        diag["detail"] = e.what();
        std::cerr << diag.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json diag;
        diag["error"] = "domain";
        diag["detail"] = e.what();
        std::cerr << diag.dump() << "\n";
        return 2;
    }
    return 1;
}
