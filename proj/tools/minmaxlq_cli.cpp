// Command-line front-end for the min-max LQ solver pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>

#include "minmaxlq/minmaxlq.hpp"

namespace fs = std::filesystem;
using namespace minmaxlq;

namespace {

int log_level() {
    const char* env = std::getenv("MINMAXLQ_LOG");
    return env ? std::atoi(env) : 0;
}

void log(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << "[minmaxlq] " << msg << "\n";
}

struct CommonOpts {
    std::string input;
    std::string out_dir = "out";
};

MultiModelProblem load_with_overrides(const CommonOpts& common, double* epsilon, int* max_iter,
                                      const std::string* mu0, const std::string* convention) {
    MultiModelProblem p = load_problem_file(common.input);
    if (epsilon) p.params.epsilon_stop = *epsilon;
    if (max_iter) p.params.max_iter = *max_iter;
    if (convention && !convention->empty())
        p.params.cost_convention = detail::convention_from_string(*convention);
    if (mu0 && !mu0->empty()) {
        std::vector<double> vals;
        std::stringstream ss(*mu0);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        p.params.mu_init = Eigen::Map<const Vector>(vals.data(), static_cast<int>(vals.size()));
        auto bad = validate(p);
        if (!bad.empty()) throw ValidationError(std::move(bad));
    }
    return p;
}

void print_summary(const MultiModelProblem& problem, const ControlSolution& sol) {
    std::cout << std::setprecision(6);
    std::cout << "mu* = [";
    for (int i = 0; i < sol.mu_star.size(); ++i)
        std::cout << (i ? ", " : "") << sol.mu_star[i];
    std::cout << "]\n";
    for (int a = 0; a < sol.per_plant_costs.size(); ++a)
        std::cout << "J[" << problem.plants[a].label << "] = " << sol.per_plant_costs(a) << "\n";
    std::cout << "minmax cost = " << sol.minmax_cost << "\n";
    std::cout << "converged = " << (sol.converged ? "yes" : "no") << " ("
              << sol.trace.records.size() << " iterations)\n";
}

int cmd_solve(const CommonOpts& common, double* epsilon, int* max_iter, const std::string& mu0,
              const std::string& convention, bool dump_disc) {
    MultiModelProblem problem = load_with_overrides(common, epsilon, max_iter, &mu0, &convention);
    log(1, "discretizing " + std::to_string(problem.num_plants()) + " plants over " +
               std::to_string(problem.delta.intervals()) + " intervals");
    const auto plants = discretize_problem(problem);
    const auto sol = solve_minmax(problem, plants);

    fs::create_directories(common.out_dir);
    write_json_file(common.out_dir + "/solution.json", solution_to_json(problem, sol));
    write_json_file(common.out_dir + "/trace.json", trace_to_json(sol.trace));
    if (dump_disc)
        write_json_file(common.out_dir + "/discretization.json", discretization_to_json(plants));

    print_summary(problem, sol);
    return sol.converged ? 0 : 2;
}

int cmd_simulate(const CommonOpts& common, int refine) {
    MultiModelProblem problem = load_problem_file(common.input);
    const auto plants = discretize_problem(problem);

    std::vector<Vector> v;
    const std::string sol_path = common.out_dir + "/solution.json";
    if (fs::exists(sol_path)) {
        log(1, "using existing solution " + sol_path);
        std::ifstream in(sol_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed solution document: ") + e.what());
        }
        v = controls_from_solution_json(doc);
        if (static_cast<int>(v.size()) != problem.delta.intervals())
            throw ParseError("solution document does not match the problem's interval count");
    } else {
        log(1, "no solution document found; solving first");
        const auto sol = solve_minmax(problem, plants);
        fs::create_directories(common.out_dir);
        write_json_file(sol_path, solution_to_json(problem, sol));
        v = sol.v;
    }

    fs::create_directories(common.out_dir);
    for (const auto& d : plants) {
        const auto traj = simulate_plant(d, v, problem.x0, refine);
        const std::string path = common.out_dir + "/trajectory_" + d.label + ".csv";
        std::ofstream out(path);
        write_trajectory_csv(out, traj);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

int cmd_table(const CommonOpts& common) {
    MultiModelProblem problem = load_problem_file(common.input);
    const auto plants = discretize_problem(problem);
    const auto table = cross_cost_table(problem, plants);
    std::cout << format_cross_cost_table(table);
    fs::create_directories(common.out_dir);
    nlohmann::json doc;
    doc["labels"] = table.labels;
    doc["entries"] = detail::matrix_to_rowmajor(table.entries);
    write_json_file(common.out_dir + "/cross_cost_table.json", doc);
    return 0;
}

int cmd_check(const CommonOpts& common, int grid_res) {
    MultiModelProblem problem = load_problem_file(common.input);
    const auto plants = discretize_problem(problem);
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        all_ok = all_ok && ok;
    };

    if (problem.x0.norm() == 0.0)
        std::cout << "note: x0 = 0, objective is identically zero (degenerate case)\n";

    const auto sol = solve_minmax(problem, plants);
    report("solver converged", sol.converged);

    // Slackness at mu*, via independent cost evaluation.
    const auto rep = evaluate_costs(problem, plants, sol.v);
    const Vector res = slackness_residuals(sol.mu_star.mu, rep.per_plant, rep.minmax);
    report("slackness residuals < epsilon", res.maxCoeff() < problem.params.epsilon_stop,
           "max residual " + std::to_string(res.maxCoeff()));

    // Cost identity: 1/2 x0'P0 x0 == sum_a mu_a Jbar^a(v*(mu)).
    const double obj = objective(problem, plants, sol.mu_star.mu);
    const double combo = sol.mu_star.mu.dot(rep.per_plant);
    report("cost identity", std::abs(obj - combo) <= 1e-8 * std::max(std::abs(obj), 1.0),
           "objective " + std::to_string(obj) + " vs convex combination " +
               std::to_string(combo));

    // Grid-search oracle.
    const auto mu_grid = grid_search_mu(problem, plants, grid_res);
    const double obj_grid = objective(problem, plants, mu_grid.mu);
    report("grid-search oracle agreement",
           std::abs(obj - obj_grid) <= 1e-3 * std::max(std::abs(obj_grid), 1.0),
           "solver " + std::to_string(obj) + " vs grid " + std::to_string(obj_grid));

    // LP lemma spot checks on random vectors.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    bool lp_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        Vector z(problem.num_plants());
        for (int i = 0; i < z.size(); ++i) z(i) = unif(rng);
        const auto [value, mu] = simplex_lp_max(z);
        if (value != z.maxCoeff() || std::abs(mu.mu.dot(z) - value) > 1e-12) lp_ok = false;
    }
    report("simplex LP lemma spot checks", lp_ok);

    return all_ok ? 0 : 1;
}

int cmd_mpc(const CommonOpts& common, const std::string& true_plant, int resolve_every) {
    MultiModelProblem problem = load_problem_file(common.input);
    const auto plants = discretize_problem(problem);
    int idx = -1;
    for (std::size_t a = 0; a < plants.size(); ++a)
        if (plants[a].label == true_plant) idx = static_cast<int>(a);
    if (idx < 0) {
        std::cerr << "unknown plant label '" << true_plant << "'\n";
        return 1;
    }
    const auto result = receding_horizon(problem, plants, resolve_every, idx);
    if (!result.completed) {
        std::cerr << "inner solve failed to converge after " << result.solves
                  << " solves; partial trajectory only\n";
        return 2;
    }
    std::cout << std::setprecision(6);
    std::cout << "true plant = " << true_plant << ", resolves = " << result.solves
              << ", realized cost = " << result.realized_cost << "\n";
    fs::create_directories(common.out_dir);
    const std::string path = common.out_dir + "/mpc_trajectory_" + true_plant + ".csv";
    std::ofstream out(path);
    write_trajectory_csv(out, result.trajectory);
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon min-max LQ control for multi-model linear systems"};
    app.require_subcommand(1);

    CommonOpts common;
    double epsilon = 0.0;
    int max_iter = 0;
    bool have_epsilon = false, have_max_iter = false;
    std::string mu0, convention;
    bool dump_disc = false;
    int refine = 20;
    int grid_res = 200;
    std::string true_plant;
    int resolve_every = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", common.input, "problem file")->required();
        cmd->add_option("--out", common.out_dir, "output directory");
    };

    auto* solve = app.add_subcommand("solve", "solve the min-max problem");
    add_common(solve);
    solve->add_option("--epsilon", epsilon, "slackness stop threshold")
        ->each([&](const std::string&) { have_epsilon = true; });
    solve->add_option("--max-iter", max_iter, "iteration cap")
        ->each([&](const std::string&) { have_max_iter = true; });
    solve->add_option("--mu0", mu0, "initial weights, comma separated");
    solve->add_option("--convention", convention, "cost convention: half|full");
    solve->add_flag("--dump-discretization", dump_disc, "write per-interval matrices");

    auto* simulate = app.add_subcommand("simulate", "write per-plant trajectory CSVs");
    add_common(simulate);
    simulate->add_option("--refine", refine, "sub-samples per interval");

    auto* table = app.add_subcommand("table", "cross-cost table of single-model optima");
    add_common(table);

    auto* check = app.add_subcommand("check", "run the oracle suite on a problem");
    add_common(check);
    check->add_option("--grid-oracle", grid_res, "grid-search lattice resolution");

    auto* mpc = app.add_subcommand("mpc", "receding-horizon run against one true plant");
    add_common(mpc);
    mpc->add_option("--true-plant", true_plant, "label of the realized plant")->required();
    mpc->add_option("--resolve-every", resolve_every, "controls applied per re-solve");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(common, have_epsilon ? &epsilon : nullptr,
                             have_max_iter ? &max_iter : nullptr, mu0, convention, dump_disc);
        if (simulate->parsed()) return cmd_simulate(common, refine);
        if (table->parsed()) return cmd_table(common);
        if (check->parsed()) return cmd_check(common, grid_res);
        if (mpc->parsed()) return cmd_mpc(common, true_plant, resolve_every);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
