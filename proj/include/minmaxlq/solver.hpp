#pragma once

#include <string>
#include <vector>

#include "minmaxlq/simplex_opt.hpp"

namespace minmaxlq {

// Full result of the min-max solve: optimal weights, open-loop control,
// gains at mu*, and per-plant costs under the configured convention.
struct ControlSolution {
    SimplexVector mu_star;
    std::vector<Vector> v;  // open-loop values v_0..v_{N-1}
    RiccatiSolution gains;
    Vector per_plant_costs;
    double minmax_cost = 0.0;
    bool converged = false;
    IterationTrace trace;
};

inline ControlSolution solve_minmax(const MultiModelProblem& problem,
                                    const std::vector<DiscretizedPlant>& plants) {
    ControlSolution sol;
    auto mu_sol = solve_mu(problem, plants);
    sol.mu_star = std::move(mu_sol.mu);
    sol.trace = std::move(mu_sol.trace);
    sol.converged = sol.trace.converged;

    const auto ext = extend(plants, problem.cost.G, sol.mu_star.mu);
    sol.gains = backward_riccati(ext);
    sol.v = extract_control(sol.gains, ext, problem.x0);

    const auto rep = evaluate_costs(problem, plants, sol.v);
    sol.per_plant_costs = rep.per_plant;
    sol.minmax_cost = rep.minmax;
    return sol;
}

inline ControlSolution solve_minmax(const MultiModelProblem& problem) {
    return solve_minmax(problem, discretize_problem(problem));
}

// --- receding-horizon driver -----------------------------------------------

struct RecedingHorizonResult {
    Trajectory trajectory;     // realized trajectory of the true plant
    std::vector<Vector> v;     // applied control values over the full horizon
    double realized_cost = 0.0;
    int solves = 0;
    bool completed = false;  // false when an inner solve failed to converge
};

namespace detail {

inline std::vector<DiscretizedPlant> tail_plants(const std::vector<DiscretizedPlant>& plants,
                                                 int k0) {
    std::vector<DiscretizedPlant> out;
    out.reserve(plants.size());
    for (const auto& d : plants) {
        DiscretizedPlant t;
        t.label = d.label;
        t.A = d.A;
        t.B = d.B;
        t.times.assign(d.times.begin() + k0, d.times.end());
        t.Phi.assign(d.Phi.begin() + k0, d.Phi.end());
        t.Gamma.assign(d.Gamma.begin() + k0, d.Gamma.end());
        t.Pi.assign(d.Pi.begin() + k0, d.Pi.end());
        t.Theta.assign(d.Theta.begin() + k0, d.Theta.end());
        t.Psi.assign(d.Psi.begin() + k0, d.Psi.end());
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

// Shrinking-horizon MPC: re-solves the min-max problem on the remaining
// switching times with the true plant's measured state as the initial
// condition, applies the first `resolve_every` control values, and repeats.
inline RecedingHorizonResult receding_horizon(const MultiModelProblem& problem,
                                              const std::vector<DiscretizedPlant>& plants,
                                              int resolve_every, int true_plant) {
    if (resolve_every < 1) throw std::invalid_argument("resolve_every must be >= 1");
    const int N = plants.front().intervals();
    const DiscretizedPlant& truth = plants.at(true_plant);

    RecedingHorizonResult result;
    Vector x = problem.x0;
    int k = 0;
    while (k < N) {
        MultiModelProblem sub = problem;
        sub.x0 = x;
        sub.delta.times.assign(problem.delta.times.begin() + k, problem.delta.times.end());
        const auto sub_plants = detail::tail_plants(plants, k);
        const auto sol = solve_minmax(sub, sub_plants);
        ++result.solves;
        if (!sol.converged) {
            result.completed = false;
            break;
        }
        const int apply = std::min<int>(resolve_every, N - k);
        for (int s = 0; s < apply; ++s) {
            result.v.push_back(sol.v[s]);
            x = truth.Phi[k + s] * x + truth.Gamma[k + s] * sol.v[s];
        }
        k += apply;
        result.completed = (k == N);
    }
    // Partial trajectory on abort: simulate over the intervals actually covered.
    const int covered = static_cast<int>(result.v.size());
    if (covered > 0) {
        DiscretizedPlant head = truth;
        head.times.resize(covered + 1);
        head.Phi.resize(covered);
        head.Gamma.resize(covered);
        head.Pi.resize(covered);
        head.Theta.resize(covered);
        head.Psi.resize(covered);
        result.trajectory = simulate_plant(head, result.v, problem.x0, 1);
        if (result.completed)
            result.realized_cost = plant_cost(truth, problem.cost.G, problem.x0, result.v);
    }
    return result;
}

}  // namespace minmaxlq
