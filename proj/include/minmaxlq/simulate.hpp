#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "minmaxlq/discretize.hpp"
#include "minmaxlq/riccati.hpp"
#include "minmaxlq/types.hpp"

namespace minmaxlq {

// Sampled state trajectory of one plant under a stepwise control.
struct Trajectory {
    std::string label;
    std::vector<double> t;
    std::vector<Vector> x;  // state at each sample time
    std::vector<Vector> u;  // control value active at each sample time
};

// Discrete cost of one plant under the control sequence v, in the same
// convention the plant was discretized with.
inline double plant_cost(const DiscretizedPlant& d, const Matrix& terminal_G, const Vector& x0,
                         const std::vector<Vector>& v) {
    Vector x = x0;
    double J = 0.0;
    for (int k = 0; k < d.intervals(); ++k) {
        const Vector& vk = v[k];
        J += 0.5 * (x.dot(d.Pi[k] * x) + 2.0 * x.dot(d.Theta[k].transpose() * vk) +
                    vk.dot(d.Psi[k] * vk));
        x = d.Phi[k] * x + d.Gamma[k] * vk;
    }
    J += 0.5 * x.dot(terminal_G * x);
    return J;
}

// Exact propagation at the switching instants, with `refine` sub-samples per
// interval computed from sub-step transition matrices (refine = 1 samples
// only at the switching instants).
inline Trajectory simulate_plant(const DiscretizedPlant& d, const std::vector<Vector>& v,
                                 const Vector& x0, int refine = 1) {
    if (static_cast<int>(v.size()) != d.intervals())
        throw std::invalid_argument("control sequence length does not match interval count");
    refine = std::max(refine, 1);
    Trajectory traj;
    traj.label = d.label;
    Vector x = x0;
    for (int k = 0; k < d.intervals(); ++k) {
        traj.t.push_back(d.times[k]);
        traj.x.push_back(x);
        traj.u.push_back(v[k]);
        if (refine > 1) {
            const double h = d.dt(k) / refine;
            Matrix Phi_h, Gamma_h;
            detail::phi_gamma(d.A, d.B, h, Phi_h, Gamma_h);
            Vector xs = x;
            for (int s = 1; s < refine; ++s) {
                xs = Phi_h * xs + Gamma_h * v[k];
                traj.t.push_back(d.times[k] + s * h);
                traj.x.push_back(xs);
                traj.u.push_back(v[k]);
            }
        }
        x = d.Phi[k] * x + d.Gamma[k] * v[k];
    }
    traj.t.push_back(d.times.back());
    traj.x.push_back(x);
    traj.u.push_back(v.back());
    return traj;
}

struct CostReport {
    Vector per_plant;  // |A| entries
    double minmax = 0.0;
};

inline CostReport evaluate_costs(const MultiModelProblem& problem,
                                 const std::vector<DiscretizedPlant>& plants,
                                 const std::vector<Vector>& v) {
    CostReport rep;
    rep.per_plant.resize(static_cast<int>(plants.size()));
    for (std::size_t a = 0; a < plants.size(); ++a)
        rep.per_plant(static_cast<int>(a)) = plant_cost(plants[a], problem.cost.G, problem.x0, v);
    rep.minmax = rep.per_plant.maxCoeff();
    return rep;
}

// Classical discrete LQ solution for a single plant on the same switching
// sequence; returns the open-loop control values and the plant's own cost.
struct SingleModelSolution {
    std::vector<Vector> v;
    double cost = 0.0;
};

inline SingleModelSolution single_model_optimal(const MultiModelProblem& problem,
                                                const std::vector<DiscretizedPlant>& plants,
                                                int alpha) {
    std::vector<DiscretizedPlant> one = {plants.at(alpha)};
    Vector mu1 = Vector::Ones(1);
    const auto ext = extend(one, problem.cost.G, mu1);
    const auto sol = backward_riccati(ext);
    SingleModelSolution out;
    out.v = extract_control(sol, ext, problem.x0);
    out.cost = plant_cost(one[0], problem.cost.G, problem.x0, out.v);
    return out;
}

// Entry (i, j): cost plant j incurs under plant i's single-model optimal control.
struct CrossCostTable {
    Matrix entries;  // |A| x |A|
    std::vector<std::string> labels;
};

inline CrossCostTable cross_cost_table(const MultiModelProblem& problem,
                                       const std::vector<DiscretizedPlant>& plants) {
    const int nA = static_cast<int>(plants.size());
    CrossCostTable table;
    table.entries.resize(nA, nA);
    for (const auto& d : plants) table.labels.push_back(d.label);
    for (int i = 0; i < nA; ++i) {
        const auto opt = single_model_optimal(problem, plants, i);
        const auto rep = evaluate_costs(problem, plants, opt.v);
        table.entries.row(i) = rep.per_plant.transpose();
    }
    return table;
}

}  // namespace minmaxlq
