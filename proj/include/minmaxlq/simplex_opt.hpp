#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "minmaxlq/riccati.hpp"
#include "minmaxlq/simulate.hpp"
#include "minmaxlq/types.hpp"

namespace minmaxlq {

// Exact Euclidean projection onto the probability simplex
// (sort-based threshold construction).
inline SimplexVector project_simplex(const Vector& y) {
    const int k = static_cast<int>(y.size());
    std::vector<double> u(y.data(), y.data() + k);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0;
    double lambda = 0.0;
    for (int i = 0; i < k; ++i) {
        css += u[i];
        const double cand = (1.0 - css) / (i + 1);
        if (u[i] + cand > 0.0) lambda = cand;
    }
    Vector out = (y.array() + lambda).cwiseMax(0.0);
    out /= out.sum();  // renormalize so membership holds exactly
    SimplexVector s;
    s.mu = std::move(out);
    return s;
}

// Symmetric finite-difference gradient estimate from evaluations at
// mu +/- beta*e_i. If f signals a definiteness failure at a perturbed point,
// beta is halved, up to 8 times.
inline Vector kw_gradient(const std::function<double(const Vector&)>& f, const Vector& mu,
                          double beta) {
    const int k = static_cast<int>(mu.size());
    for (int attempt = 0; attempt < 9; ++attempt) {
        try {
            Vector grad(k);
            Vector p = mu;
            for (int i = 0; i < k; ++i) {
                p(i) = mu(i) + beta;
                const double fp = f(p);
                p(i) = mu(i) - beta;
                const double fm = f(p);
                p(i) = mu(i);
                grad(i) = (fp - fm) / (2.0 * beta);
            }
            return grad;
        } catch (const NotPositiveDefiniteError&) {
            beta *= 0.5;
        }
    }
    throw std::runtime_error("perturbation infeasible");
}

// residual_a = |mu_a * (J^a - max_b J^b)|
inline Vector slackness_residuals(const Vector& mu, const Vector& per_plant_costs,
                                  double max_cost) {
    return (mu.array() * (per_plant_costs.array() - max_cost)).abs();
}

struct IterationRecord {
    int j = 0;
    Vector mu;
    double objective = 0.0;
    Vector residuals;
    double gamma = 0.0;
    double beta = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
    std::string note;
};

namespace detail {

// Per-plant discrete costs of the closed loop at mu.
inline Vector per_plant_costs_at(const std::vector<DiscretizedPlant>& plants,
                                 const Matrix& terminal_G, const Vector& x0, const Vector& mu) {
    const auto ext = extend(plants, terminal_G, mu);
    const auto sol = backward_riccati(ext);
    const auto v = extract_control(sol, ext, x0);
    Vector costs(static_cast<int>(plants.size()));
    for (std::size_t a = 0; a < plants.size(); ++a)
        costs(static_cast<int>(a)) = plant_cost(plants[a], terminal_G, x0, v);
    return costs;
}

}  // namespace detail

struct MuSolution {
    SimplexVector mu;
    IterationTrace trace;
};

// Projected gradient ascent on mu -> 1/2 x0'P0(mu)x0 with the symmetric
// finite-difference gradient, stopping when every slackness residual falls
// below epsilon_stop. On non-convergence returns the best iterate by
// objective value, flagged in the trace.
inline MuSolution solve_mu(const MultiModelProblem& problem,
                           const std::vector<DiscretizedPlant>& plants) {
    const auto& prm = problem.params;
    const int nA = static_cast<int>(plants.size());
    const Matrix& G = problem.cost.G;
    const Vector& x0 = problem.x0;

    MuSolution out;
    if (nA == 1) {
        out.mu = SimplexVector::checked(Vector::Ones(1));
        out.trace.converged = true;
        out.trace.note = "single plant; simplex is a point";
        return out;
    }
    if (x0.norm() == 0.0) {
        out.mu = SimplexVector::uniform(nA);
        out.trace.converged = true;
        out.trace.note = "x0 = 0; objective identically zero, any mu is optimal";
        return out;
    }

    Vector mu = prm.mu_init ? *prm.mu_init : SimplexVector::uniform(nA).mu;
    // Minimization form: f = -objective; evaluated off-simplex without
    // projection so the difference quotient stays unbiased.
    auto f = [&](const Vector& m) { return -objective(plants, G, x0, m); };

    double gamma0 = prm.gamma0.value_or(0.0);
    Vector costs = Vector::Zero(nA);
    bool have_costs = false;

    double best_obj = -std::numeric_limits<double>::infinity();
    Vector best_mu = mu;

    for (int j = 1; j <= prm.max_iter; ++j) {
        const double beta = prm.beta0 / std::cbrt(1.0 + j);
        const Vector Y = kw_gradient(f, mu, beta);
        // default step scale: first projected step of length ~0.1 in weight
        // space, independent of the cost magnitude
        if (gamma0 == 0.0) gamma0 = 0.1 / (1e-12 + Y.norm());
        const double gamma = gamma0 / std::pow(1.0 + j, prm.gamma_decay);

        Vector prev_costs = costs;
        const bool had_prev = have_costs;
        mu = project_simplex(mu - gamma * Y).mu;

        costs = prm.stop_cost_mode == StopCostMode::riccati
                    ? Vector::Constant(nA, objective(plants, G, x0, mu))
                    : detail::per_plant_costs_at(plants, G, x0, mu);
        have_costs = true;
        const Vector& stop_costs =
            (prm.slackness_indexing == SlacknessIndexing::lagged && had_prev) ? prev_costs
                                                                              : costs;
        const Vector res = slackness_residuals(mu, stop_costs, stop_costs.maxCoeff());

        IterationRecord rec;
        rec.j = j;
        rec.mu = mu;
        rec.objective = objective(plants, G, x0, mu);
        rec.residuals = res;
        rec.gamma = gamma;
        rec.beta = beta;
        out.trace.records.push_back(rec);

        if (rec.objective > best_obj) {
            best_obj = rec.objective;
            best_mu = mu;
        }
        if (res.maxCoeff() < prm.epsilon_stop) {
            out.trace.converged = true;
            out.mu = SimplexVector::checked(mu);
            return out;
        }
    }
    out.trace.converged = false;
    out.trace.note = "max_iter reached; returning best iterate by objective";
    out.mu = SimplexVector::checked(best_mu);
    return out;
}

// Exhaustive lattice search over the simplex with spacing 1/resolution.
// Ties are broken toward the lexicographically smallest weight vector.
inline SimplexVector grid_search_mu(const MultiModelProblem& problem,
                                    const std::vector<DiscretizedPlant>& plants, int resolution) {
    if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
    const int nA = static_cast<int>(plants.size());
    Vector best;
    double best_val = -std::numeric_limits<double>::infinity();

    std::vector<int> counts(nA, 0);
    // Enumerate compositions of `resolution` into nA parts in lexicographic
    // order of the resulting mu vector; strict improvement keeps the first
    // (lex-smallest) maximizer.
    std::function<void(int, int)> recurse = [&](int idx, int remaining) {
        if (idx == nA - 1) {
            counts[idx] = remaining;
            Vector mu(nA);
            for (int i = 0; i < nA; ++i) mu(i) = static_cast<double>(counts[i]) / resolution;
            const double val = objective(problem, plants, mu);
            if (val > best_val) {
                best_val = val;
                best = mu;
            }
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[idx] = c;
            recurse(idx + 1, remaining - c);
        }
    };
    recurse(0, resolution);
    return SimplexVector::checked(best);
}

// max_a z_a as a linear program over the simplex; the returned weights are
// uniform over the argmax set.
inline std::pair<double, SimplexVector> simplex_lp_max(const Vector& z) {
    const double zmax = z.maxCoeff();
    Vector mu = Vector::Zero(z.size());
    int count = 0;
    for (int i = 0; i < z.size(); ++i)
        if (z(i) == zmax) ++count;
    for (int i = 0; i < z.size(); ++i)
        if (z(i) == zmax) mu(i) = 1.0 / count;
    return {zmax, SimplexVector::checked(mu)};
}

}  // namespace minmaxlq
