#include "l3svm/clustering.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace l3svm;

TEST_CASE("K = 1 gives the mean") {
    const auto pts = oracle::random_points(57, 3, 4, -5.0, 5.0);
    const ClusterModel cm = kmeans_fit(pts, {1, 0, 300, 1e-6});
    REQUIRE(cm.K() == 1);
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (const auto &p : pts) {
            mean += p[j];
        }
        mean /= 57.0;
        CHECK(std::abs(cm.centroids[0][j] - mean) <= 1e-12);
    }
    for (const auto &p : pts) {
        CHECK(assign(cm, p) == 0);
    }
}

TEST_CASE("two separated blobs against the exhaustive split") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    DenseMatrix pts;
    for (int i = 0; i < 20; ++i) {
        const double cx = i % 2 == 0 ? 10.0 : -10.0;
        pts.push_back({cx + noise(rng), noise(rng)});
    }
    oracle::Vec c0, c1;
    const double best = oracle::best_two_partition_inertia(pts, &c0, &c1);
    const ClusterModel cm = kmeans_fit(pts, {2, 3, 300, 1e-9});
    CHECK(cm.inertia == doctest::Approx(best).epsilon(1e-9));
    for (const auto &c : cm.centroids) {
        const double near = std::min(std::hypot(c[0] - 10.0, c[1]), std::hypot(c[0] + 10.0, c[1]));
        CHECK(near < 0.2);
        CHECK(std::min(oracle::sqdist(c, c0), oracle::sqdist(c, c1)) < 1e-18);
    }
}

TEST_CASE("K equal to the number of points") {
    const auto pts = oracle::random_points(12, 2, 8);
    const ClusterModel cm = kmeans_fit(pts, {12, 5, 300, 1e-9});
    CHECK(cm.K() == 12);
    CHECK(cm.inertia == doctest::Approx(0.0));
    CHECK(inertia(cm, pts) == doctest::Approx(0.0));
}

TEST_CASE("assignment") {
    ClusterModel cm;
    cm.centroids = {{0.0, 0.0}, {2.0, 0.0}, {0.0, 5.0}, {7.0, 7.0}};
    CHECK(assign(cm, {7.0, 7.0}) == 3);
    CHECK(assign(cm, {1.0, 0.0}) == 0);
    CHECK(assign(cm, {1.9, 0.1}) == 1);
    ClusterModel one;
    one.centroids = {{1.0, 1.0}};
    CHECK(assign(one, {100.0, -3.0}) == 0);
}

TEST_CASE("inertia") {
    ClusterModel cm;
    cm.centroids = {{0.0, 0.0}, {5.0, 5.0}};
    CHECK(inertia(cm, cm.centroids) == 0.0);
    CHECK(inertia(cm, {{2.0, 0.0}}) == doctest::Approx(4.0));
    CHECK(squared_distance({1.0, 2.0}, {4.0, 6.0}) == doctest::Approx(25.0));

    const auto pts = oracle::random_points(200, 4, 2);
    const ClusterModel fit = kmeans_fit(pts, {6, 1, 300, 1e-6});
    CHECK(std::abs(inertia(fit, pts) - fit.inertia) <= 1e-9);
}

TEST_CASE("properties over random inputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        const std::size_t m = 5 + rng() % 80;
        const std::size_t K = 1 + rng() % std::min<std::size_t>(m, 8);
        const auto pts = oracle::random_points(m, 1 + rng() % 4, seed + 100);
        std::vector<double> trace;
        const ClusterModel cm = kmeans_fit(pts, {K, seed, 300, 1e-9}, trace);
        CAPTURE(seed);
        CHECK(cm.K() == K);
        CHECK(cm.dim() == pts.front().size());
        // Lloyd never increases the objective.
        for (std::size_t t = 1; t < trace.size(); ++t) {
            CHECK(trace[t] <= trace[t - 1] + 1e-9);
        }
        // Same seed, same model.
        const ClusterModel again = kmeans_fit(pts, {K, seed, 300, 1e-9});
        CHECK(again.centroids == cm.centroids);
        // No empty clusters when the points are distinct.
        std::vector<std::size_t> counts(K, 0);
        for (const auto &p : pts) {
            ++counts[assign(cm, p)];
        }
        for (auto c : counts) {
            CHECK(c > 0);
        }
    }
}

TEST_CASE("duplicate points") {
    DenseMatrix pts(10, DenseVector{1.0, 1.0});
    pts.push_back({3.0, 3.0});
    const ClusterModel cm = kmeans_fit(pts, {2, 0, 300, 1e-9});
    CHECK(cm.K() == 2);
    CHECK(cm.inertia == doctest::Approx(0.0));
}

TEST_CASE("invalid parameters") {
    const auto pts = oracle::random_points(5, 2, 1);
    CHECK_THROWS(kmeans_fit(pts, {0, 0, 300, 1e-6}));
    CHECK_THROWS(kmeans_fit(pts, {6, 0, 300, 1e-6}));
    CHECK_THROWS(kmeans_fit({}, {1, 0, 300, 1e-6}));
}
