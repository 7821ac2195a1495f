#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minmaxlq/types.hpp"

namespace minmaxlq {

// One candidate realization of the uncertain plant: xdot = A x + B u.
struct PlantModel {
    std::string label;
    Matrix A;  // n x n
    Matrix B;  // n x m
};

// Quadratic cost weights shared by all plants.
struct CostSpec {
    Matrix G;  // terminal, n x n
    Matrix Q;  // state, n x n
    Matrix R;  // control, m x m (positive definite)
};

// Instants at which the piecewise-constant control may switch level.
// The last entry is the horizon end, not a switch.
struct SwitchingSequence {
    std::vector<double> times;  // t0 < t1 < ... < tN

    int intervals() const { return static_cast<int>(times.size()) - 1; }
    double t0() const { return times.front(); }
    double horizon_end() const { return times.back(); }
    double dt(int k) const { return times[k + 1] - times[k]; }
};

// Whether the running cost carries the 1/2 factor on the integral.
// half_integral: J = 1/2 x(T)'Gx(T) + 1/2 int(x'Qx + u'Ru);
// full_integral drops the 1/2 on the integral only.
enum class CostConvention { half_integral, full_integral };

// Where the stop criterion takes its per-plant costs from: exact discrete
// simulation of the closed loop, or the Riccati value as a fast proxy.
enum class StopCostMode { simulate, riccati };

// Whether slackness residuals are evaluated at the current iterate or
// against the costs of the previous one.
enum class SlacknessIndexing { current, lagged };

struct SolverParams {
    double epsilon_stop = 1e-4;
    std::optional<double> gamma0;  // auto-scaled from the first gradient when unset
    double gamma_decay = 1.0;      // step exponent: gamma_j = gamma0/(1+j)^gamma_decay
    double beta0 = 1e-4;
    int max_iter = 20000;
    std::optional<Vector> mu_init;
    double quad_tol = 1e-10;
    CostConvention cost_convention = CostConvention::half_integral;
    StopCostMode stop_cost_mode = StopCostMode::simulate;
    SlacknessIndexing slackness_indexing = SlacknessIndexing::current;
};

struct MultiModelProblem {
    std::vector<PlantModel> plants;
    CostSpec cost;
    Vector x0;
    SwitchingSequence delta;
    SolverParams params;

    int state_dim() const { return static_cast<int>(x0.size()); }
    int input_dim() const { return plants.empty() ? 0 : static_cast<int>(plants.front().B.cols()); }
    int num_plants() const { return static_cast<int>(plants.size()); }
};

namespace detail {

inline bool is_finite(const Matrix& M) { return M.allFinite(); }

// Symmetry within tol_sym = 1e-10 * ||M||; callers symmetrize on success.
inline bool nearly_symmetric(const Matrix& M) {
    const double tol = 1e-10 * std::max(M.norm(), 1e-300);
    return (M - M.transpose()).norm() <= tol;
}

}  // namespace detail

// Returns every violated invariant (empty when the problem is valid).
inline std::vector<std::string> validate(const MultiModelProblem& p) {
    std::vector<std::string> bad;

    if (p.plants.empty()) {
        bad.push_back("problem has no plants");
        return bad;
    }
    const int n = p.state_dim();
    const int m = static_cast<int>(p.plants.front().B.cols());
    if (n < 1) bad.push_back("x0 is empty");
    if (m < 1) bad.push_back("input dimension m must be >= 1");

    for (const auto& plant : p.plants) {
        const std::string who = "plant '" + plant.label + "'";
        if (plant.A.rows() != n || plant.A.cols() != n)
            bad.push_back(who + ": A is not " + std::to_string(n) + "x" + std::to_string(n));
        if (plant.B.rows() != n || plant.B.cols() != m)
            bad.push_back(who + ": B is not " + std::to_string(n) + "x" + std::to_string(m));
        if (!detail::is_finite(plant.A) || !detail::is_finite(plant.B))
            bad.push_back(who + ": non-finite entries");
    }

    auto check_weight = [&](const Matrix& M, const std::string& name, int dim) {
        if (M.rows() != dim || M.cols() != dim) {
            bad.push_back(name + " is not " + std::to_string(dim) + "x" + std::to_string(dim));
            return false;
        }
        if (!detail::is_finite(M)) {
            bad.push_back(name + " has non-finite entries");
            return false;
        }
        if (!detail::nearly_symmetric(M)) {
            bad.push_back(name + " not symmetric");
            return false;
        }
        return true;
    };

    if (check_weight(p.cost.G, "G", n)) {
        const double tol = 1e-10 * std::max(p.cost.G.norm(), 1e-300);
        if (min_eigenvalue_sym(p.cost.G) < -tol) bad.push_back("G not positive semidefinite");
    }
    if (check_weight(p.cost.Q, "Q", n)) {
        const double tol = 1e-10 * std::max(p.cost.Q.norm(), 1e-300);
        if (min_eigenvalue_sym(p.cost.Q) < -tol) bad.push_back("Q not positive semidefinite");
    }
    if (check_weight(p.cost.R, "R", m)) {
        const double eps_r = 1e-12 * std::max(p.cost.R.norm(), 1.0);
        if (min_eigenvalue_sym(p.cost.R) < eps_r) bad.push_back("R not positive definite");
    }

    if (!p.x0.allFinite()) bad.push_back("x0 has non-finite entries");

    const auto& t = p.delta.times;
    if (t.size() < 2) {
        bad.push_back("switching sequence needs at least two times (t0 and tN)");
    } else {
        bool increasing = true, finite = true;
        for (std::size_t k = 0; k + 1 < t.size(); ++k)
            if (!(t[k] < t[k + 1])) increasing = false;
        for (double v : t)
            if (!std::isfinite(v)) finite = false;
        if (!finite) bad.push_back("switching sequence has non-finite times");
        if (!increasing) bad.push_back("switching sequence not strictly increasing");
        if (finite && increasing) {
            const double span = t.back() - t.front();
            for (std::size_t k = 0; k + 1 < t.size(); ++k)
                if (t[k + 1] - t[k] < 1e-12 * span)
                    bad.push_back("degenerate interval at t=" + std::to_string(t[k]));
        }
    }

    const auto& s = p.params;
    if (s.epsilon_stop <= 0) bad.push_back("epsilon_stop must be positive");
    if (s.gamma0 && *s.gamma0 <= 0) bad.push_back("gamma0 must be positive");
    if (s.gamma_decay < 0) bad.push_back("gamma_decay must be nonnegative");
    if (s.beta0 <= 0) bad.push_back("beta0 must be positive");
    if (s.max_iter < 1) bad.push_back("max_iter must be >= 1");
    if (s.quad_tol <= 0) bad.push_back("quad_tol must be positive");
    if (s.mu_init) {
        const Vector& mu = *s.mu_init;
        if (mu.size() != p.num_plants()) {
            bad.push_back("mu_init length does not match the number of plants");
        } else if (mu.minCoeff() < 0 || std::abs(mu.sum() - 1.0) > 1e-12) {
            bad.push_back("mu_init is not in the simplex");
        }
    }

    return bad;
}

// --- (de)serialization ------------------------------------------------------

namespace detail {

inline Matrix matrix_from_rowmajor(const nlohmann::json& j, int rows, int cols,
                                   const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
        throw ParseError(name + ": expected a row-major list of " +
                         std::to_string(rows * cols) + " numbers");
    Matrix M(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) M(r, c) = j.at(r * cols + c).get<double>();
    return M;
}

inline nlohmann::json matrix_to_rowmajor(const Matrix& M) {
    nlohmann::json j = nlohmann::json::array();
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) j.push_back(M(r, c));
    return j;
}

inline CostConvention convention_from_string(const std::string& s) {
    if (s == "half_integral" || s == "half") return CostConvention::half_integral;
    if (s == "full_integral" || s == "full") return CostConvention::full_integral;
    throw ParseError("unknown cost_convention '" + s + "'");
}

inline std::string convention_to_string(CostConvention c) {
    return c == CostConvention::half_integral ? "half_integral" : "full_integral";
}

}  // namespace detail

inline MultiModelProblem problem_from_json(const nlohmann::json& doc) {
    MultiModelProblem p;
    try {
        const int n = doc.at("n").get<int>();
        const int m = doc.at("m").get<int>();
        for (const auto& jp : doc.at("plants")) {
            PlantModel plant;
            plant.label = jp.at("label").get<std::string>();
            plant.A = detail::matrix_from_rowmajor(jp.at("A"), n, n, "plant A");
            plant.B = detail::matrix_from_rowmajor(jp.at("B"), n, m, "plant B");
            p.plants.push_back(std::move(plant));
        }
        const auto& jc = doc.at("cost");
        p.cost.G = detail::matrix_from_rowmajor(jc.at("G"), n, n, "G");
        p.cost.Q = detail::matrix_from_rowmajor(jc.at("Q"), n, n, "Q");
        p.cost.R = detail::matrix_from_rowmajor(jc.at("R"), m, m, "R");
        const auto& jx = doc.at("x0");
        p.x0 = Vector(n);
        if (static_cast<int>(jx.size()) != n) throw ParseError("x0 has wrong length");
        for (int i = 0; i < n; ++i) p.x0(i) = jx.at(i).get<double>();
        p.delta.times = doc.at("times").get<std::vector<double>>();

        if (doc.contains("solver")) {
            const auto& js = doc.at("solver");
            auto& s = p.params;
            if (js.contains("epsilon_stop")) s.epsilon_stop = js.at("epsilon_stop").get<double>();
            if (js.contains("gamma0")) s.gamma0 = js.at("gamma0").get<double>();
            if (js.contains("gamma_decay")) s.gamma_decay = js.at("gamma_decay").get<double>();
            if (js.contains("beta0")) s.beta0 = js.at("beta0").get<double>();
            if (js.contains("max_iter")) s.max_iter = js.at("max_iter").get<int>();
            if (js.contains("quad_tol")) s.quad_tol = js.at("quad_tol").get<double>();
            if (js.contains("cost_convention"))
                s.cost_convention =
                    detail::convention_from_string(js.at("cost_convention").get<std::string>());
            if (js.contains("stop_cost_mode"))
                s.stop_cost_mode = js.at("stop_cost_mode").get<std::string>() == "riccati"
                                       ? StopCostMode::riccati
                                       : StopCostMode::simulate;
            if (js.contains("slackness_indexing"))
                s.slackness_indexing = js.at("slackness_indexing").get<std::string>() == "lagged"
                                           ? SlacknessIndexing::lagged
                                           : SlacknessIndexing::current;
            if (js.contains("mu_init")) {
                const auto v = js.at("mu_init").get<std::vector<double>>();
                s.mu_init = Eigen::Map<const Vector>(v.data(), static_cast<int>(v.size()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed problem document: ") + e.what());
    }
    return p;
}

inline nlohmann::json problem_to_json(const MultiModelProblem& p) {
    nlohmann::json doc;
    doc["n"] = p.state_dim();
    doc["m"] = p.input_dim();
    doc["plants"] = nlohmann::json::array();
    for (const auto& plant : p.plants) {
        doc["plants"].push_back({{"label", plant.label},
                                 {"A", detail::matrix_to_rowmajor(plant.A)},
                                 {"B", detail::matrix_to_rowmajor(plant.B)}});
    }
    doc["cost"] = {{"G", detail::matrix_to_rowmajor(p.cost.G)},
                   {"Q", detail::matrix_to_rowmajor(p.cost.Q)},
                   {"R", detail::matrix_to_rowmajor(p.cost.R)}};
    doc["x0"] = std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size());
    doc["times"] = p.delta.times;
    nlohmann::json js;
    js["epsilon_stop"] = p.params.epsilon_stop;
    if (p.params.gamma0) js["gamma0"] = *p.params.gamma0;
    js["gamma_decay"] = p.params.gamma_decay;
    js["beta0"] = p.params.beta0;
    js["max_iter"] = p.params.max_iter;
    js["quad_tol"] = p.params.quad_tol;
    js["cost_convention"] = detail::convention_to_string(p.params.cost_convention);
    js["stop_cost_mode"] =
        p.params.stop_cost_mode == StopCostMode::riccati ? "riccati" : "simulate";
    js["slackness_indexing"] =
        p.params.slackness_indexing == SlacknessIndexing::lagged ? "lagged" : "current";
    if (p.params.mu_init) {
        const Vector& mu = *p.params.mu_init;
        js["mu_init"] = std::vector<double>(mu.data(), mu.data() + mu.size());
    }
    doc["solver"] = js;
    return doc;
}

// Parses, validates, and symmetrizes the cost weights. Throws ParseError on
// malformed input and ValidationError listing every violated invariant.
inline MultiModelProblem load_problem(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed problem document: ") + e.what());
    }
    MultiModelProblem p = problem_from_json(doc);
    auto bad = validate(p);
    if (!bad.empty()) throw ValidationError(std::move(bad));
    p.cost.G = symmetrized(p.cost.G);
    p.cost.Q = symmetrized(p.cost.Q);
    p.cost.R = symmetrized(p.cost.R);
    return p;
}

inline MultiModelProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file: " + path);
    return load_problem(in);
}

inline MultiModelProblem load_problem_string(const std::string& text) {
    std::istringstream in(text);
    return load_problem(in);
}

}  // namespace minmaxlq
