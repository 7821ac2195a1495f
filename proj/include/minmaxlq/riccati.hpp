#pragma once

#include <cmath>
#include <vector>

#include "minmaxlq/discretize.hpp"
#include "minmaxlq/types.hpp"

namespace minmaxlq {

// Convex weights over the plant set.
struct SimplexVector {
    Vector mu;

    static SimplexVector uniform(int k) {
        SimplexVector s;
        s.mu = Vector::Constant(k, 1.0 / k);
        return s;
    }

    // Checked constructor: components >= 0, sum 1 within 1e-12.
    static SimplexVector checked(Vector v) {
        if (v.size() < 1 || v.minCoeff() < 0.0 || std::abs(v.sum() - 1.0) > 1e-12)
            throw std::invalid_argument("vector is not in the simplex");
        SimplexVector s;
        s.mu = std::move(v);
        return s;
    }

    int size() const { return static_cast<int>(mu.size()); }
    double operator[](int i) const { return mu(i); }
};

// mu-parametrized aggregation of all plants into one block system sharing
// the control input. Block-diagonal in the states, coupled through v.
struct ExtendedMatrices {
    Matrix G;                    // n|A| x n|A| block diagonal, mu-weighted
    std::vector<Matrix> Phi;     // n|A| x n|A| block diagonal
    std::vector<Matrix> Gamma;   // n|A| x m vertical stack
    std::vector<Matrix> Pi;      // n|A| x n|A| block diagonal, mu-weighted
    std::vector<Matrix> Theta;   // m x n|A| horizontal blocks, mu-weighted
    std::vector<Matrix> Psi;     // m x m convex sum
    int num_plants = 0;
    int n = 0;  // single-plant state dimension
    int m = 0;

    int intervals() const { return static_cast<int>(Phi.size()); }
    int extended_dim() const { return n * num_plants; }
};

// Builds the extended matrices for a given weight vector. `mu` may sit
// slightly off the simplex (finite-difference perturbations); no membership
// check is performed here.
inline ExtendedMatrices extend(const std::vector<DiscretizedPlant>& plants,
                               const Matrix& terminal_G, const Vector& mu) {
    const int nA = static_cast<int>(plants.size());
    if (mu.size() != nA)
        throw std::invalid_argument("mu length does not match the number of plants");
    const int n = static_cast<int>(plants.front().A.rows());
    const int m = static_cast<int>(plants.front().B.cols());
    const int N = plants.front().intervals();
    const int nx = n * nA;

    ExtendedMatrices ext;
    ext.num_plants = nA;
    ext.n = n;
    ext.m = m;

    ext.G = Matrix::Zero(nx, nx);
    for (int a = 0; a < nA; ++a)
        ext.G.block(a * n, a * n, n, n) = mu(a) * terminal_G;

    ext.Phi.assign(N, Matrix::Zero(nx, nx));
    ext.Gamma.assign(N, Matrix::Zero(nx, m));
    ext.Pi.assign(N, Matrix::Zero(nx, nx));
    ext.Theta.assign(N, Matrix::Zero(m, nx));
    ext.Psi.assign(N, Matrix::Zero(m, m));
    for (int k = 0; k < N; ++k) {
        for (int a = 0; a < nA; ++a) {
            ext.Phi[k].block(a * n, a * n, n, n) = plants[a].Phi[k];
            ext.Gamma[k].block(a * n, 0, n, m) = plants[a].Gamma[k];
            ext.Pi[k].block(a * n, a * n, n, n) = mu(a) * plants[a].Pi[k];
            ext.Theta[k].block(0, a * n, m, n) = mu(a) * plants[a].Theta[k];
            ext.Psi[k] += mu(a) * plants[a].Psi[k];
        }
    }
    return ext;
}

// Backward Riccati pass: value matrices P_N..P_0 and gains with v_k = -K_k x_k.
struct RiccatiSolution {
    std::vector<Matrix> P;  // N+1 entries, P[k] is the value matrix at step k
    std::vector<Matrix> K;  // N gain matrices, m x n|A|
};

inline RiccatiSolution backward_riccati(const ExtendedMatrices& ext) {
    const int N = ext.intervals();
    RiccatiSolution sol;
    sol.P.resize(N + 1);
    sol.K.resize(N);
    sol.P[N] = ext.G;
    for (int k = N - 1; k >= 0; --k) {
        const Matrix& Pn = sol.P[k + 1];
        const Matrix S = ext.Psi[k] + ext.Gamma[k].transpose() * Pn * ext.Gamma[k];
        Eigen::LLT<Matrix> llt(symmetrized(S));
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefiniteError("inner matrix not positive definite at step " +
                                           std::to_string(k));
        const Matrix L = ext.Theta[k] + ext.Gamma[k].transpose() * Pn * ext.Phi[k];
        sol.K[k] = llt.solve(L);
        Matrix P = ext.Pi[k] + ext.Phi[k].transpose() * Pn * ext.Phi[k] -
                   L.transpose() * sol.K[k];
        sol.P[k] = symmetrized(P);
    }
    return sol;
}

// Stacks x0 once per plant.
inline Vector stacked_initial_state(const Vector& x0, int num_plants) {
    Vector bx(x0.size() * num_plants);
    for (int a = 0; a < num_plants; ++a) bx.segment(a * x0.size(), x0.size()) = x0;
    return bx;
}

// 1/2 x0' P_0(mu) x0 for the stacked initial state.
inline double objective(const std::vector<DiscretizedPlant>& plants, const Matrix& terminal_G,
                        const Vector& x0, const Vector& mu) {
    const auto ext = extend(plants, terminal_G, mu);
    const auto sol = backward_riccati(ext);
    const Vector bx0 = stacked_initial_state(x0, static_cast<int>(plants.size()));
    return 0.5 * bx0.dot(sol.P[0] * bx0);
}

inline double objective(const MultiModelProblem& problem,
                        const std::vector<DiscretizedPlant>& plants, const Vector& mu) {
    return objective(plants, problem.cost.G, problem.x0, mu);
}

// Forward pass of the extended closed loop; returns the open-loop control
// values realized by the feedback law.
inline std::vector<Vector> extract_control(const RiccatiSolution& gains,
                                           const ExtendedMatrices& ext, const Vector& x0) {
    const int N = ext.intervals();
    Vector bx = stacked_initial_state(x0, ext.num_plants);
    std::vector<Vector> v;
    v.reserve(N);
    for (int k = 0; k < N; ++k) {
        Vector vk = -(gains.K[k] * bx);
        bx = ext.Phi[k] * bx + ext.Gamma[k] * vk;
        v.push_back(std::move(vk));
    }
    return v;
}

}  // namespace minmaxlq
