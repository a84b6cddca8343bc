#include "l3svm/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace l3svm;

namespace {

BlockFeature bf(std::size_t k, std::size_t K, DenseVector block) { return BlockFeature{k, K, std::move(block)}; }

struct Problem {
    std::vector<BlockFeature> features;
    std::vector<int> labels;
};

Problem random_problem(std::uint64_t seed, std::size_t m, std::size_t K, std::size_t L) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Problem p;
    for (std::size_t i = 0; i < m; ++i) {
        DenseVector block(L);
        for (auto &v : block) {
            v = g(rng);
        }
        p.features.push_back(bf(rng() % K, K, block));
        p.labels.push_back(g(rng) + block[0] > 0.0 ? 1 : -1);
    }
    return p;
}

}  // namespace

TEST_CASE("two-point problem") {
    // phi = (1, 1) and (-1, 1): the optimum is w = (1, 0), margins exactly 1.
    const std::vector<BlockFeature> f{bf(0, 1, {1.0}), bf(0, 1, {-1.0})};
    const std::vector<int> y{1, -1};
    const auto sol = solve_primal_dcd(f, y, {1e4, 1e-12, 100000, 0});
    CHECK(sol.weights.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(sol.weights.b) < 1e-9);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(y[i] * sol.weights.score(f[i]) >= 1.0 - 1e-6);
    }
    CHECK(sol.stats.duality_gap < 1e-8);
    // Both multipliers equal 1/2 by symmetry: w = a*(1,1) + a*(1,-1) = (2a, 0).
    CHECK(sol.dual.alpha[0] == doctest::Approx(0.5));
    CHECK(sol.dual.alpha[1] == doctest::Approx(0.5));
}

TEST_CASE("tiny cost collapses the weights") {
    const auto p = random_problem(3, 50, 2, 3);
    const double c = 1e-9;
    const auto sol = solve_primal_dcd(p.features, p.labels, {c, 1e-12, 1000, 1});
    CHECK(std::sqrt(sol.weights.squared_norm()) <= std::sqrt(2.0 * c));
}

TEST_CASE("four-point XOR is separable with two clusters") {
    // Cluster by the sign of x1, identity landmarks.
    const DenseMatrix X{{1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
    const std::vector<int> y{1, 1, -1, -1};
    std::vector<BlockFeature> f;
    for (const auto &x : X) {
        f.push_back(bf(x[0] > 0 ? 1 : 0, 2, x));
    }
    const auto sol = solve_primal_dcd(f, y, {100.0, 1e-10, 10000, 0});
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(y[i] * sol.weights.score(f[i]) > 0.0);
    }
}

TEST_CASE("objectives at trivial points") {
    const auto p = random_problem(5, 30, 3, 2);
    const WeightVector zero(3, 2);
    CHECK(objective_primal(zero, p.features, p.labels, 2.5) == doctest::Approx(2.5));
    const auto gram = block_gram(p.features, true);
    CHECK(objective_dual(std::vector<double>(30, 0.0), gram, p.labels, 2.5) == 0.0);
    CHECK(hinge_loss(1, 0.5) == 0.5);
    CHECK(hinge_loss(-1, 0.5) == 1.5);
    CHECK(hinge_loss(1, 3.0) == 0.0);
}

TEST_CASE("duality and box constraints over random problems") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        std::mt19937_64 rng(seed);
        const std::size_t m = 10 + rng() % 90;
        const std::size_t K = 1 + rng() % 4;
        const std::size_t L = 1 + rng() % 5;
        const double c = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(rng() % 1000) / 1000.0);
        const auto p = random_problem(seed + 50, m, K, L);
        const SolverConfig cfg{c, 1e-8, 100000, seed};
        const auto sol = solve_primal_dcd(p.features, p.labels, cfg);
        CAPTURE(seed);
        CHECK(sol.stats.converged);
        const double C = c / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(sol.dual.alpha[i] >= 0.0);
            CHECK(sol.dual.alpha[i] <= C);
            CHECK(std::abs(sol.dual.r[i] - (C - sol.dual.alpha[i])) <= 1e-15);
        }
        const WeightVector w = weights_from_dual(sol.dual.alpha, p.features, p.labels);
        for (std::size_t j = 0; j < w.theta.size(); ++j) {
            CHECK(std::abs(w.theta[j] - sol.weights.theta[j]) <= 1e-9);
        }
        CHECK(std::abs(w.b - sol.weights.b) <= 1e-9);

        const double primal = objective_primal(sol.weights, p.features, p.labels, c);
        const auto gram = block_gram(p.features, true);
        const double dual = objective_dual(sol.dual.alpha, gram, p.labels, c);
        CHECK(primal >= dual - 1e-12);
        CHECK(primal - dual <= 1e-6 * std::max(1.0, primal));
        CHECK(primal - dual <= cfg.tol * static_cast<double>(m));
        CHECK(sol.stats.primal_objective == doctest::Approx(primal));
        CHECK(sol.weights.squared_norm() <= 2.0 * c * (1.0 + 1e-9));
    }
}

TEST_CASE("primal optimum matches an independent dense solve") {
    const auto p = random_problem(77, 60, 3, 3);
    const double c = 5.0;
    const auto sol = solve_primal_dcd(p.features, p.labels, {c, 1e-10, 100000, 4});
    oracle::Mat X;
    for (const auto &f : p.features) {
        auto row = f.dense();
        row.pop_back();
        X.push_back(row);
    }
    const auto [w, b] = oracle::linear_svm_augmented(X, p.labels, c);
    for (std::size_t i = 0; i < X.size(); ++i) {
        CHECK(std::abs(sol.weights.score(p.features[i]) - (oracle::dot(w, X[i]) + b)) <= 1e-6);
    }
}

TEST_CASE("solver input validation") {
    const auto p = random_problem(1, 5, 1, 1);
    CHECK_THROWS(solve_primal_dcd({}, {}, {}));
    CHECK_THROWS(solve_primal_dcd(p.features, std::vector<int>{1, -1, 1, 0, 1}, {}));
    CHECK_THROWS(solve_primal_dcd(p.features, std::vector<int>{1, -1}, {}));
    auto bad = p.features;
    bad[0].block[0] = NAN;
    CHECK_THROWS(solve_primal_dcd(bad, p.labels, {}));
    CHECK_THROWS(solve_primal_dcd(p.features, p.labels, {0.0, 1e-4, 10, 0}));
    CHECK_THROWS(solve_primal_dcd(p.features, p.labels, {1.0, 0.0, 10, 0}));
}

TEST_CASE("reference dual on a 2-point problem") {
    // mu = +1 and -1 in one cluster: alpha = 1/2 each, theta = 1, b = 0.
    const std::vector<BlockFeature> f{bf(0, 1, {1.0}), bf(0, 1, {-1.0})};
    const std::vector<int> y{1, -1};
    const double c = 100.0;
    const auto ref = solve_dual_reference(block_gram(f, false), y, {c, 1e-12, 100000, 0});
    CHECK(ref.dual.alpha[0] == doctest::Approx(0.5));
    CHECK(ref.dual.alpha[1] == doctest::Approx(0.5));
    CHECK(std::abs(ref.b) < 1e-12);
    const auto rec = reconstruct_theta(ref.dual, f, y, c);
    CHECK(rec.weights.at(0, 0) == doctest::Approx(1.0));
    CHECK(rec.free_support_vectors == 2);
}

TEST_CASE("reconstruction") {
    const std::vector<BlockFeature> f{bf(0, 3, {1.0, 2.0}), bf(2, 3, {-1.0, 0.5}), bf(1, 3, {3.0, 3.0})};
    const std::vector<int> y{1, -1, 1};
    DualSolution none{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 0.0};
    const auto zero = reconstruct_theta(none, f, y, 3.0);
    for (double v : zero.weights.theta) {
        CHECK(v == 0.0);
    }
    DualSolution one{{0.0, 0.4, 0.0}, {1.0, 0.6, 1.0}, 0.0};
    const auto r = reconstruct_theta(one, f, y, 3.0);
    CHECK(r.weights.at(0, 0) == 0.0);
    CHECK(r.weights.at(1, 1) == 0.0);
    CHECK(r.weights.at(2, 0) == doctest::Approx(0.4));
    CHECK(r.weights.at(2, 1) == doctest::Approx(-0.2));
    CHECK(r.support_vectors == 1);
}

TEST_CASE("reference dual KKT conditions") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(seed + 900, 40, 2, 3);
        const double c = 3.0;
        const double C = c / 40.0;
        const SolverConfig cfg{c, 1e-10, 100000, 0};
        const auto ref = solve_dual_reference(block_gram(p.features, false), p.labels, cfg);
        CAPTURE(seed);
        CHECK(ref.converged);
        double balance = 0.0;
        for (std::size_t i = 0; i < 40; ++i) {
            balance += ref.dual.alpha[i] * p.labels[i];
        }
        CHECK(std::abs(balance) <= 1e-12);
        const auto rec = reconstruct_theta(ref.dual, p.features, p.labels, c);
        for (std::size_t i = 0; i < 40; ++i) {
            const double yf = p.labels[i] * rec.weights.score(p.features[i]);
            const double xi = std::max(0.0, 1.0 - yf);
            CHECK(std::abs(ref.dual.alpha[i] * (yf - 1.0 + xi)) <= 1e-6);
            CHECK(std::abs((C - ref.dual.alpha[i]) * xi) <= 1e-6);
        }
    }
}

TEST_CASE("reference dual rejects bad inputs") {
    CHECK_THROWS(solve_dual_reference({{1.0, 0.5}, {0.4, 1.0}}, std::vector<int>{1, -1}, {}));
    CHECK_THROWS(solve_dual_reference({{1.0}}, std::vector<int>{1, -1}, {}));
    const auto p = random_problem(2, 30, 1, 2);
    CHECK_THROWS(solve_dual_reference(block_gram(p.features, false), p.labels, {}, 10));
}
