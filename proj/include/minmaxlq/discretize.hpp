#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "minmaxlq/model.hpp"
#include "minmaxlq/types.hpp"

namespace minmaxlq {

// Exact sampled-data representation of one plant over the switching
// sequence: state transition, input, and cost-weight matrices per interval.
struct DiscretizedPlant {
    std::string label;
    Matrix A;  // continuous-time matrices kept for intra-interval refinement
    Matrix B;
    std::vector<double> times;
    std::vector<Matrix> Phi;    // n x n
    std::vector<Matrix> Gamma;  // n x m
    std::vector<Matrix> Pi;     // n x n
    std::vector<Matrix> Theta;  // m x n
    std::vector<Matrix> Psi;    // m x m

    int intervals() const { return static_cast<int>(Phi.size()); }
    double dt(int k) const { return times[k + 1] - times[k]; }
};

// exp(A*dt) via scaling-and-squaring Pade.
inline Matrix transition_matrix(const Matrix& A, double dt) {
    Matrix E = (A * dt).exp();
    if (!E.allFinite())
        throw OverflowError("matrix exponential overflow (||A||*dt = " +
                            std::to_string(A.norm() * dt) + ")");
    return E;
}

namespace detail {

// Phi(tau) = exp(A*tau) and Gamma(tau) = int_0^tau exp(A s) B ds, read off
// the exponential of the augmented block matrix [[A, B], [0, 0]].
inline void phi_gamma(const Matrix& A, const Matrix& B, double tau, Matrix& Phi, Matrix& Gamma) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Matrix M = Matrix::Zero(n + m, n + m);
    M.topLeftCorner(n, n) = A;
    M.topRightCorner(n, m) = B;
    Matrix E = (M * tau).exp();
    if (!E.allFinite())
        throw OverflowError("matrix exponential overflow (||A||*tau = " +
                            std::to_string(A.norm() * tau) + ")");
    Phi = E.topLeftCorner(n, n);
    Gamma = E.topRightCorner(n, m);
}

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline const std::array<double, 10>& gl10_nodes() {
    static const std::array<double, 10> x = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
        -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
        0.8650633666889845,  0.9739065285171717};
    return x;
}
inline const std::array<double, 10>& gl10_weights() {
    static const std::array<double, 10> w = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
        0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
        0.1494513491505806, 0.0666713443086881};
    return w;
}

struct CostWeightTriple {
    Matrix Pi, Theta, Psi;
};

inline CostWeightTriple cost_weights_fixed(const Matrix& A, const Matrix& B, const Matrix& Q,
                                           const Matrix& R, double dt, int panels) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    CostWeightTriple out{Matrix::Zero(n, n), Matrix::Zero(m, n), Matrix::Zero(m, m)};
    const auto& xg = gl10_nodes();
    const auto& wg = gl10_weights();
    const double h = dt / panels;
    Matrix Phi, Gamma;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        for (std::size_t i = 0; i < xg.size(); ++i) {
            const double tau = a + 0.5 * h * (xg[i] + 1.0);
            const double w = 0.5 * h * wg[i];
            phi_gamma(A, B, tau, Phi, Gamma);
            const Matrix QPhi = Q * Phi;
            out.Pi.noalias() += w * Phi.transpose() * QPhi;
            out.Theta.noalias() += w * Gamma.transpose() * QPhi;
            out.Psi.noalias() += w * (Gamma.transpose() * Q * Gamma + R);
        }
    }
    return out;
}

}  // namespace detail

// int_0^dt exp(A tau) B dtau.
inline Matrix input_matrix(const Matrix& A, const Matrix& B, double dt) {
    Matrix Phi, Gamma;
    detail::phi_gamma(A, B, dt, Phi, Gamma);
    return Gamma;
}

// Interval cost weights: Pi = int Phi'QPhi, Theta = int Gamma'QPhi,
// Psi = int (Gamma'QGamma + R), each to quad_tol relative accuracy via
// adaptive composite Gauss-Legendre (panel doubling).
inline detail::CostWeightTriple cost_weights(const Matrix& A, const Matrix& B, const Matrix& Q,
                                             const Matrix& R, double dt,
                                             double quad_tol = 1e-10) {
    constexpr int kMaxPanels = 4096;
    detail::CostWeightTriple prev = detail::cost_weights_fixed(A, B, Q, R, dt, 1);
    for (int panels = 2; panels <= kMaxPanels; panels *= 2) {
        detail::CostWeightTriple cur = detail::cost_weights_fixed(A, B, Q, R, dt, panels);
        const double scale = std::max({cur.Pi.norm(), cur.Theta.norm(), cur.Psi.norm(), 1e-300});
        const double diff = std::max({(cur.Pi - prev.Pi).norm(), (cur.Theta - prev.Theta).norm(),
                                      (cur.Psi - prev.Psi).norm()});
        if (diff <= quad_tol * scale) {
            cur.Pi = symmetrized(cur.Pi);
            cur.Psi = symmetrized(cur.Psi);
            return cur;
        }
        prev = std::move(cur);
    }
    throw QuadratureError("cost-weight quadrature did not reach quad_tol within " +
                          std::to_string(kMaxPanels) + " panels (dt = " + std::to_string(dt) +
                          ")");
}

// Effective running-cost weights under the configured convention.
// full_integral drops the 1/2 on the integral of Eq-style costs, which is
// the same as doubling Q and R inside the half-integral discrete form.
inline std::pair<Matrix, Matrix> effective_weights(const CostSpec& cost, CostConvention conv) {
    if (conv == CostConvention::full_integral) return {2.0 * cost.Q, 2.0 * cost.R};
    return {cost.Q, cost.R};
}

inline DiscretizedPlant discretize_plant(const PlantModel& plant, const Matrix& Q, const Matrix& R,
                                         const std::vector<double>& times, double quad_tol) {
    DiscretizedPlant d;
    d.label = plant.label;
    d.A = plant.A;
    d.B = plant.B;
    d.times = times;
    const int N = static_cast<int>(times.size()) - 1;
    d.Phi.reserve(N);
    d.Gamma.reserve(N);
    d.Pi.reserve(N);
    d.Theta.reserve(N);
    d.Psi.reserve(N);
    for (int k = 0; k < N; ++k) {
        const double dt = times[k + 1] - times[k];
        Matrix Phi, Gamma;
        detail::phi_gamma(plant.A, plant.B, dt, Phi, Gamma);
        auto w = cost_weights(plant.A, plant.B, Q, R, dt, quad_tol);
        d.Phi.push_back(std::move(Phi));
        d.Gamma.push_back(std::move(Gamma));
        d.Pi.push_back(std::move(w.Pi));
        d.Theta.push_back(std::move(w.Theta));
        d.Psi.push_back(std::move(w.Psi));
    }
    return d;
}

// Discretizes every plant under the problem's cost convention.
inline std::vector<DiscretizedPlant> discretize_problem(const MultiModelProblem& p) {
    auto [Q, R] = effective_weights(p.cost, p.params.cost_convention);
    std::vector<DiscretizedPlant> out;
    out.reserve(p.plants.size());
    for (const auto& plant : p.plants)
        out.push_back(discretize_plant(plant, Q, R, p.delta.times, p.params.quad_tol));
    return out;
}

}  // namespace minmaxlq
