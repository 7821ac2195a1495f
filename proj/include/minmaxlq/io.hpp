#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "minmaxlq/solver.hpp"

namespace minmaxlq {

namespace detail {

inline std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

// Solution document: mu*, per-interval control values with their time
// interval, per-plant costs, and convergence diagnostics.
inline nlohmann::json solution_to_json(const MultiModelProblem& problem,
                                       const ControlSolution& sol) {
    nlohmann::json doc;
    doc["mu_star"] = detail::to_std(sol.mu_star.mu);
    doc["controls"] = nlohmann::json::array();
    for (std::size_t k = 0; k < sol.v.size(); ++k) {
        doc["controls"].push_back({{"t_start", problem.delta.times[k]},
                                   {"t_end", problem.delta.times[k + 1]},
                                   {"v", detail::to_std(sol.v[k])}});
    }
    doc["per_plant_costs"] = detail::to_std(sol.per_plant_costs);
    doc["minmax_cost"] = sol.minmax_cost;
    doc["converged"] = sol.converged;
    doc["iterations"] = sol.trace.records.size();
    if (!sol.trace.note.empty()) doc["note"] = sol.trace.note;
    return doc;
}

inline std::vector<Vector> controls_from_solution_json(const nlohmann::json& doc) {
    std::vector<Vector> v;
    try {
        for (const auto& jc : doc.at("controls")) {
            const auto vals = jc.at("v").get<std::vector<double>>();
            v.push_back(Eigen::Map<const Vector>(vals.data(), static_cast<int>(vals.size())));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed solution document: ") + e.what());
    }
    return v;
}

// One record per iteration: j, mu, objective, residuals, gamma, beta.
inline nlohmann::json trace_to_json(const IterationTrace& trace) {
    nlohmann::json doc;
    doc["converged"] = trace.converged;
    if (!trace.note.empty()) doc["note"] = trace.note;
    doc["iterations"] = nlohmann::json::array();
    for (const auto& r : trace.records) {
        doc["iterations"].push_back({{"j", r.j},
                                     {"mu", detail::to_std(r.mu)},
                                     {"objective", r.objective},
                                     {"residuals", detail::to_std(r.residuals)},
                                     {"gamma", r.gamma},
                                     {"beta", r.beta}});
    }
    return doc;
}

// Per-interval discretization matrices, row-major, full precision.
inline nlohmann::json discretization_to_json(const std::vector<DiscretizedPlant>& plants) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& d : plants) {
        nlohmann::json jp;
        jp["label"] = d.label;
        jp["times"] = d.times;
        jp["intervals"] = nlohmann::json::array();
        for (int k = 0; k < d.intervals(); ++k) {
            jp["intervals"].push_back({{"Phi", detail::matrix_to_rowmajor(d.Phi[k])},
                                       {"Gamma", detail::matrix_to_rowmajor(d.Gamma[k])},
                                       {"Pi", detail::matrix_to_rowmajor(d.Pi[k])},
                                       {"Theta", detail::matrix_to_rowmajor(d.Theta[k])},
                                       {"Psi", detail::matrix_to_rowmajor(d.Psi[k])}});
        }
        doc.push_back(std::move(jp));
    }
    return doc;
}

// CSV with header "t, x1..xn, u1..um", full precision.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const int n = static_cast<int>(traj.x.front().size());
    const int m = static_cast<int>(traj.u.front().size());
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= m; ++i) out << ",u" << i;
    out << "\n";
    out << std::setprecision(17);
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        out << traj.t[s];
        for (int i = 0; i < n; ++i) out << "," << traj.x[s](i);
        for (int i = 0; i < m; ++i) out << "," << traj.u[s](i);
        out << "\n";
    }
}

// Aligned text rendering of the cross-cost table.
inline std::string format_cross_cost_table(const CrossCostTable& table) {
    const int nA = static_cast<int>(table.entries.rows());
    std::ostringstream out;
    auto cell = [](const std::string& s) {
        std::ostringstream c;
        c << std::setw(14) << s;
        return c.str();
    };
    out << cell("control \\ cost");
    for (int j = 0; j < nA; ++j) out << cell("J[" + table.labels[j] + "]");
    out << "\n";
    for (int i = 0; i < nA; ++i) {
        out << cell("u*[" + table.labels[i] + "]");
        for (int j = 0; j < nA; ++j) {
            std::ostringstream v;
            v << std::setprecision(6) << table.entries(i, j);
            out << cell(v.str());
        }
        out << "\n";
    }
    return out.str();
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace minmaxlq
