#pragma once

#include "l3svm/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace l3svm {

/// K centroids in the (standardized) input space plus the inertia reached at fit time.
struct ClusterModel {
    DenseMatrix centroids;
    double inertia = 0.0;

    [[nodiscard]] std::size_t K() const noexcept { return centroids.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return centroids.empty() ? 0 : centroids.front().size(); }
};

struct KMeansParams {
    std::size_t K = 1;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    double tol = 1e-6;
};

/**
 * Lloyd's algorithm with k-means++ seeding.
 *
 * Stops once the largest coordinate-wise centroid move falls below `tol`, or after
 * `max_iter` iterations. A cluster left empty by an assignment step is re-seeded
 * with the point farthest from its own centroid, so the model always has exactly K
 * centroids. The stored inertia is the one of the returned centroids under
 * nearest-centroid assignment.
 */
ClusterModel kmeans_fit(const DenseMatrix &points, const KMeansParams &params);

/// Same as above; also records the inertia after every assignment step.
ClusterModel kmeans_fit(const DenseMatrix &points, const KMeansParams &params, std::vector<double> &inertia_trace);

/// Index of the nearest centroid (Euclidean), lowest index on ties.
std::size_t assign(const ClusterModel &cm, const DenseVector &x);

/// Sum of squared distances of every point to its nearest centroid.
double inertia(const ClusterModel &cm, const DenseMatrix &points);

double squared_distance(const DenseVector &a, const DenseVector &b);

}  // namespace l3svm
