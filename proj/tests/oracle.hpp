// Test-only oracles, independent of the library's computation paths:
// an adaptive Dormand-Prince integrator for transition matrices and
// continuous-time costs, a textbook discrete LQ recursion, and
// deterministic random-problem generators.
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "minmaxlq/model.hpp"
#include "minmaxlq/types.hpp"

namespace oracle {

using minmaxlq::Matrix;
using minmaxlq::Vector;

// Adaptive RK45 (Dormand-Prince) on y' = f(t, y).
inline Vector integrate_ode(const std::function<Vector(double, const Vector&)>& f, double t0,
                            double t1, Vector y, double rtol = 1e-12, double atol = 1e-14) {
    static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double b5[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0};
    static const double b4[7] = {5179.0 / 57600,    0,          7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    double t = t0;
    double h = (t1 - t0) / 16;
    Vector k[7];
    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        for (int s = 0; s < 7; ++s) {
            Vector ys = y;
            for (int q = 0; q < s; ++q) ys += h * a[s][q] * k[q];
            k[s] = f(t + c[s] * h, ys);
        }
        Vector y5 = y, err = Vector::Zero(y.size());
        for (int s = 0; s < 7; ++s) {
            y5 += h * b5[s] * k[s];
            err += h * (b5[s] - b4[s]) * k[s];
        }
        const double scale = atol + rtol * std::max(y.norm(), y5.norm());
        const double e = err.norm() / scale;
        if (e <= 1.0) {
            t += h;
            y = y5;
        }
        h *= std::clamp(0.9 * std::pow(std::max(e, 1e-16), -0.2), 0.2, 5.0);
    }
    return y;
}

// exp(A*dt) by integrating X' = A X column by column.
inline Matrix ode_transition(const Matrix& A, double dt, double rtol = 1e-12) {
    const int n = static_cast<int>(A.rows());
    Matrix X(n, n);
    for (int col = 0; col < n; ++col) {
        Vector e = Vector::Zero(n);
        e(col) = 1.0;
        X.col(col) = integrate_ode([&](double, const Vector& y) { return Vector(A * y); }, 0.0,
                                   dt, e, rtol, 1e-14 * std::max(1.0, A.norm()));
    }
    return X;
}

// int_0^dt exp(A tau) B dtau by integrating the augmented system.
inline Matrix ode_input(const Matrix& A, const Matrix& B, double dt, double rtol = 1e-12) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Matrix G(n, m);
    for (int col = 0; col < m; ++col) {
        Vector y = Vector::Zero(n);
        y = integrate_ode(
            [&](double, const Vector& g) { return Vector(A * g + B.col(col)); }, 0.0, dt, y,
            rtol, 1e-14);
        G.col(col) = y;
    }
    return G;
}

// Continuous cost of xdot = Ax + Bu under the zero-order-hold control v, by
// adaptive quadrature of the running cost alongside the state.
// half_factor = 0.5 for the half-integral convention, 1.0 for full.
inline double continuous_cost(const Matrix& A, const Matrix& B, const Matrix& G, const Matrix& Q,
                              const Matrix& R, const std::vector<double>& times,
                              const std::vector<Vector>& v, const Vector& x0,
                              double half_factor = 0.5, double rtol = 1e-10) {
    const int n = static_cast<int>(A.rows());
    Vector y(n + 1);
    y.head(n) = x0;
    y(n) = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const Vector& u = v[k];
        auto f = [&](double, const Vector& yy) {
            Vector dy(n + 1);
            const Vector x = yy.head(n);
            dy.head(n) = A * x + B * u;
            dy(n) = half_factor * (x.dot(Q * x) + u.dot(R * u));
            return dy;
        };
        y = integrate_ode(f, times[k], times[k + 1], y, rtol, 1e-12);
    }
    const Vector xN = y.head(n);
    return y(n) + 0.5 * xN.dot(G * xN);
}

// Textbook single-plant discrete LQ recursion, written with explicit
// inverses so it shares no code path with the library's solver.
struct LqResult {
    std::vector<Matrix> P;
    std::vector<Matrix> K;
};

inline LqResult classical_discrete_lq(const std::vector<Matrix>& Phi,
                                      const std::vector<Matrix>& Gamma,
                                      const std::vector<Matrix>& Pi,
                                      const std::vector<Matrix>& Theta,
                                      const std::vector<Matrix>& Psi, const Matrix& G) {
    const int N = static_cast<int>(Phi.size());
    LqResult r;
    r.P.resize(N + 1);
    r.K.resize(N);
    r.P[N] = G;
    for (int k = N - 1; k >= 0; --k) {
        const Matrix S = Psi[k] + Gamma[k].transpose() * r.P[k + 1] * Gamma[k];
        const Matrix L = Theta[k] + Gamma[k].transpose() * r.P[k + 1] * Phi[k];
        r.K[k] = S.inverse() * L;
        r.P[k] = Pi[k] + Phi[k].transpose() * r.P[k + 1] * Phi[k] -
                 L.transpose() * S.inverse() * L;
    }
    return r;
}

// --- deterministic random generators ---------------------------------------

inline Matrix random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = unif(rng);
    return M;
}

inline Matrix random_psd(std::mt19937& rng, int n, double scale = 1.0) {
    Matrix L = random_matrix(rng, n, n, scale);
    return Matrix(L * L.transpose());
}

inline Vector random_simplex_point(std::mt19937& rng, int k) {
    std::exponential_distribution<double> expd(1.0);
    Vector mu(k);
    for (int i = 0; i < k; ++i) mu(i) = expd(rng);
    mu /= mu.sum();
    return mu;
}

// Small well-conditioned multi-model problem: n <= 3, m <= 2, |A| <= 3.
inline minmaxlq::MultiModelProblem random_problem(std::mt19937& rng, int max_n = 3, int max_m = 2,
                                                  int max_plants = 3) {
    std::uniform_int_distribution<int> nd(1, max_n), md(1, max_m), ad(1, max_plants),
        Nd(2, 6);
    minmaxlq::MultiModelProblem p;
    const int n = nd(rng), m = md(rng), nA = ad(rng), N = Nd(rng);
    for (int a = 0; a < nA; ++a) {
        minmaxlq::PlantModel plant;
        plant.label = std::to_string(a + 1);
        plant.A = random_matrix(rng, n, n) - 0.5 * Matrix::Identity(n, n);
        plant.B = random_matrix(rng, n, m);
        p.plants.push_back(std::move(plant));
    }
    p.cost.G = random_psd(rng, n);
    p.cost.Q = random_psd(rng, n);
    p.cost.R = random_psd(rng, m) + 0.1 * Matrix::Identity(m, m);
    p.x0 = random_matrix(rng, n, 1).col(0);
    std::uniform_real_distribution<double> dtd(0.1, 0.9);
    double t = 0.0;
    p.delta.times.push_back(t);
    for (int k = 0; k < N; ++k) {
        t += dtd(rng);
        p.delta.times.push_back(t);
    }
    p.params.quad_tol = 1e-10;
    return p;
}

inline std::vector<Vector> random_controls(std::mt19937& rng, int N, int m, double scale = 1.0) {
    std::vector<Vector> v;
    for (int k = 0; k < N; ++k) v.push_back(random_matrix(rng, m, 1).col(0) * scale);
    return v;
}

}  // namespace oracle
