#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "minmaxlq/riccati.hpp"
#include "minmaxlq/simulate.hpp"
#include "oracle.hpp"

using namespace minmaxlq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

static std::string fixture(const std::string& name) {
    return std::string(MINMAXLQ_FIXTURE_DIR) + "/" + name;
}

namespace {

// Scalar one-step fixture: Phi = Gamma = Pi = Psi = 1, Theta = 0, G = 0.
DiscretizedPlant scalar_plant() {
    DiscretizedPlant d;
    d.label = "s";
    d.A = Matrix::Zero(1, 1);
    d.B = Matrix::Ones(1, 1);
    d.times = {0.0, 1.0};
    d.Phi = {Matrix::Ones(1, 1)};
    d.Gamma = {Matrix::Ones(1, 1)};
    d.Pi = {Matrix::Ones(1, 1)};
    d.Theta = {Matrix::Zero(1, 1)};
    d.Psi = {Matrix::Ones(1, 1)};
    return d;
}

}  // namespace

TEST_CASE("simplex vector construction checks membership") {
    Vector good(2);
    good << 0.3, 0.7;
    CHECK_NOTHROW(SimplexVector::checked(good));
    Vector bad(2);
    bad << 0.5, 0.6;
    CHECK_THROWS_AS(SimplexVector::checked(bad), std::invalid_argument);
    bad << -0.1, 1.1;
    CHECK_THROWS_AS(SimplexVector::checked(bad), std::invalid_argument);
}

TEST_CASE("singleton extension reproduces the plant matrices") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    auto plants = discretize_problem(p);
    plants.resize(1);
    const auto ext = extend(plants, p.cost.G, Vector::Ones(1));
    CHECK(ext.extended_dim() == 2);
    CHECK((ext.Phi[0] - plants[0].Phi[0]).norm() == 0.0);
    CHECK((ext.Psi[3] - plants[0].Psi[3]).norm() == 0.0);
    CHECK((ext.G - p.cost.G).norm() == 0.0);
}

TEST_CASE("equal weights over identical plants preserve Psi") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    auto plants = discretize_problem(p);
    plants[1] = plants[0];
    Vector mu(2);
    mu << 0.5, 0.5;
    const auto ext = extend(plants, p.cost.G, mu);
    CHECK((ext.Psi[0] - plants[0].Psi[0]).norm() < 1e-14 * plants[0].Psi[0].norm());
}

TEST_CASE("vertex weight zeroes the other plant's cost blocks") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    Vector mu(2);
    mu << 1.0, 0.0;
    const auto ext = extend(plants, p.cost.G, mu);
    CHECK(ext.Pi[0].block(2, 2, 2, 2).norm() == 0.0);
    CHECK((ext.Psi[0] - plants[0].Psi[0]).norm() == 0.0);
    // dynamics blocks are mu-independent
    CHECK((ext.Phi[0].block(2, 2, 2, 2) - plants[1].Phi[0]).norm() == 0.0);
}

TEST_CASE("one-step scalar recursion by hand") {
    std::vector<DiscretizedPlant> plants = {scalar_plant()};
    const auto ext = extend(plants, Matrix::Zero(1, 1), Vector::Ones(1));
    const auto sol = backward_riccati(ext);
    CHECK(sol.P[1](0, 0) == 0.0);
    CHECK(sol.K[0](0, 0) == 0.0);
    CHECK_THAT(sol.P[0](0, 0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("zero state and terminal weight give zero value and gains") {
    auto d = scalar_plant();
    d.Pi = {Matrix::Zero(1, 1)};
    std::vector<DiscretizedPlant> plants = {d};
    const auto ext = extend(plants, Matrix::Zero(1, 1), Vector::Ones(1));
    const auto sol = backward_riccati(ext);
    CHECK(sol.P[0].norm() == 0.0);
    CHECK(sol.K[0].norm() == 0.0);
}

TEST_CASE("singleton gains match the classical discrete LQ recursion") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    auto plants = discretize_problem(p);
    plants.resize(1);
    const auto ext = extend(plants, p.cost.G, Vector::Ones(1));
    const auto sol = backward_riccati(ext);
    const auto ref = oracle::classical_discrete_lq(plants[0].Phi, plants[0].Gamma, plants[0].Pi,
                                                   plants[0].Theta, plants[0].Psi, p.cost.G);
    for (int k = 0; k < plants[0].intervals(); ++k) {
        CHECK((sol.K[k] - ref.K[k]).norm() <= 1e-10 * (1.0 + ref.K[k].norm()));
        CHECK((sol.P[k] - ref.P[k]).norm() <= 1e-10 * ref.P[k].norm());
    }
}

TEST_CASE("objective is zero for zero initial state") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    Vector mu(2);
    mu << 0.3, 0.7;
    CHECK(objective(plants, p.cost.G, Vector::Zero(2), mu) == 0.0);
}

TEST_CASE("objective at the vertices of example 1") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    Vector e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    CHECK_THAT(objective(p, plants, e1), WithinRel(139.1381, 1e-4));

    // at [0,1] the objective equals plant 2's single-model optimal cost
    auto only2 = plants;
    only2.erase(only2.begin());
    const auto ref = oracle::classical_discrete_lq(only2[0].Phi, only2[0].Gamma, only2[0].Pi,
                                                   only2[0].Theta, only2[0].Psi, p.cost.G);
    const double expected = 0.5 * p.x0.dot(ref.P[0] * p.x0);
    CHECK_THAT(objective(p, plants, e2), WithinRel(expected, 1e-10));
}

TEST_CASE("P_k symmetric PSD across random simplex weights") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = oracle::random_problem(rng);
        const auto plants = discretize_problem(p);
        for (int rep = 0; rep < 5; ++rep) {
            const Vector mu = oracle::random_simplex_point(rng, p.num_plants());
            const auto sol = backward_riccati(extend(plants, p.cost.G, mu));
            for (const auto& P : sol.P) {
                CHECK((P - P.transpose()).norm() <= 1e-10 * std::max(P.norm(), 1.0));
                CHECK(min_eigenvalue_sym(P) >= -1e-9 * std::max(P.norm(), 1.0));
            }
        }
    }
}

TEST_CASE("cost-consistency: objective equals the convex combination of plant costs") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = oracle::random_problem(rng);
        const auto plants = discretize_problem(p);
        const Vector mu = oracle::random_simplex_point(rng, p.num_plants());
        const auto ext = extend(plants, p.cost.G, mu);
        const auto sol = backward_riccati(ext);
        const auto v = extract_control(sol, ext, p.x0);
        double combo = 0.0;
        for (int a = 0; a < p.num_plants(); ++a)
            combo += mu(a) * plant_cost(plants[a], p.cost.G, p.x0, v);
        const double obj = objective(p, plants, mu);
        CHECK(std::abs(obj - combo) <= 1e-8 * std::max(std::abs(obj), 1.0));
    }
}

TEST_CASE("objective is concave in mu") {
    std::mt19937 rng(31);
    const auto p = load_problem_file(fixture("ex2.prob"));
    const auto plants = discretize_problem(p);
    for (int trial = 0; trial < 30; ++trial) {
        const Vector a = oracle::random_simplex_point(rng, 4);
        const Vector b = oracle::random_simplex_point(rng, 4);
        const double mid = objective(p, plants, 0.5 * (a + b));
        const double avg = 0.5 * (objective(p, plants, a) + objective(p, plants, b));
        CHECK(mid >= avg - 1e-10 * std::max(std::abs(avg), 1.0));
    }
}

TEST_CASE("increasing G does not decrease the objective") {
    std::mt19937 rng(37);
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    auto grown = p;
    grown.cost.G = p.cost.G + 2.0 * Matrix::Identity(2, 2);
    const auto plants_grown = discretize_problem(grown);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector mu = oracle::random_simplex_point(rng, 2);
        CHECK(objective(grown, plants_grown, mu) >= objective(p, plants, mu) - 1e-9);
    }
}

TEST_CASE("extract_control returns zeros for zero initial state") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    Vector mu(2);
    mu << 0.5, 0.5;
    const auto ext = extend(plants, p.cost.G, mu);
    const auto sol = backward_riccati(ext);
    for (const auto& v : extract_control(sol, ext, Vector::Zero(2))) CHECK(v.norm() == 0.0);
}

TEST_CASE("mu dimension mismatch is rejected") {
    const auto p = load_problem_file(fixture("ex1.prob"));
    const auto plants = discretize_problem(p);
    CHECK_THROWS_AS(extend(plants, p.cost.G, Vector::Ones(3)), std::invalid_argument);
}
