#include "l3svm/clustering.hpp"

#include "l3svm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace l3svm {

double squared_distance(const DenseVector &a, const DenseVector &b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

namespace {

void check_points(const DenseMatrix &points) {
    if (points.empty()) {
        throw invalid_argument_error("k-means needs at least one point");
    }
    const std::size_t n = points.front().size();
    for (const auto &p : points) {
        if (p.size() != n) {
            throw dimension_error("ragged point matrix");
        }
        for (double v : p) {
            if (!std::isfinite(v)) {
                throw invalid_argument_error("non-finite input to k-means");
            }
        }
    }
}

std::pair<std::size_t, double> nearest(const DenseMatrix &centroids, const DenseVector &x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        const double d = squared_distance(centroids[k], x);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return {best, best_d};
}

DenseMatrix seed_plus_plus(const DenseMatrix &points, std::size_t K, std::mt19937_64 &rng) {
    const std::size_t m = points.size();
    DenseMatrix centroids;
    centroids.reserve(K);
    std::vector<bool> chosen(m, false);

    std::uniform_int_distribution<std::size_t> first(0, m - 1);
    const std::size_t i0 = first(rng);
    centroids.push_back(points[i0]);
    chosen[i0] = true;

    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) {
        d2[i] = squared_distance(points[i], centroids.front());
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centroids.size() < K) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            total += d2[i];
        }
        std::size_t pick = m;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && acc >= target) {
                    pick = i;
                    break;
                }
            }
            if (pick == m) {
                // Rounding left the target past the last positive weight.
                for (std::size_t i = m; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // Every remaining point coincides with a centroid: pick uniformly among unchosen ones.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < m; ++i) {
                if (!chosen[i]) {
                    free.push_back(i);
                }
            }
            std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
            pick = free[any(rng)];
        }
        chosen[pick] = true;
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < m; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

ClusterModel fit_impl(const DenseMatrix &points, const KMeansParams &params, std::vector<double> *trace) {
    check_points(points);
    const std::size_t m = points.size();
    const std::size_t n = points.front().size();
    const std::size_t K = params.K;
    if (K < 1 || K > m) {
        throw invalid_argument_error("k-means needs 1 <= K <= " + std::to_string(m) + ", got " + std::to_string(K));
    }
    if (params.max_iter < 1) {
        throw invalid_argument_error("k-means max_iter must be >= 1");
    }
    if (!(params.tol >= 0.0)) {
        throw invalid_argument_error("k-means tol must be >= 0");
    }

    std::mt19937_64 rng(params.seed);
    DenseMatrix centroids = seed_plus_plus(points, K, rng);
    std::vector<std::size_t> labels(m);
    std::vector<double> dist(m);

    for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
        std::vector<std::size_t> counts(K, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto [k, d] = nearest(centroids, points[i]);
            labels[i] = k;
            dist[i] = d;
            ++counts[k];
        }
        // Empty-cluster repair: move each empty centroid onto the point farthest from its own centroid.
        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] != 0) {
                continue;
            }
            std::size_t far = m;
            double far_d = -1.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (counts[labels[i]] > 1 && dist[i] > far_d) {
                    far_d = dist[i];
                    far = i;
                }
            }
            if (far == m) {
                break;
            }
            --counts[labels[far]];
            centroids[k] = points[far];
            labels[far] = k;
            dist[far] = 0.0;
            counts[k] = 1;
        }
        if (trace != nullptr) {
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                total += dist[i];
            }
            trace->push_back(total);
        }

        DenseMatrix updated(K, DenseVector(n, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            auto &c = updated[labels[i]];
            for (std::size_t j = 0; j < n; ++j) {
                c[j] += points[i][j];
            }
        }
        double shift = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] == 0) {
                updated[k] = centroids[k];
                continue;
            }
            const double inv = 1.0 / static_cast<double>(counts[k]);
            for (std::size_t j = 0; j < n; ++j) {
                updated[k][j] *= inv;
                shift = std::max(shift, std::abs(updated[k][j] - centroids[k][j]));
            }
        }
        centroids = std::move(updated);
        if (shift < params.tol) {
            break;
        }
    }

    ClusterModel cm;
    cm.centroids = std::move(centroids);
    cm.inertia = inertia(cm, points);
    if (trace != nullptr) {
        trace->push_back(cm.inertia);
    }
    return cm;
}

}  // namespace

ClusterModel kmeans_fit(const DenseMatrix &points, const KMeansParams &params) {
    return fit_impl(points, params, nullptr);
}

ClusterModel kmeans_fit(const DenseMatrix &points, const KMeansParams &params, std::vector<double> &inertia_trace) {
    return fit_impl(points, params, &inertia_trace);
}

std::size_t assign(const ClusterModel &cm, const DenseVector &x) {
    if (cm.K() == 0) {
        throw invalid_argument_error("cluster model has no centroids");
    }
    if (x.size() != cm.dim()) {
        throw dimension_error("point has " + std::to_string(x.size()) + " dims, centroids have " +
                              std::to_string(cm.dim()));
    }
    return nearest(cm.centroids, x).first;
}

double inertia(const ClusterModel &cm, const DenseMatrix &points) {
    double total = 0.0;
    for (const auto &p : points) {
        const std::size_t k = assign(cm, p);
        total += squared_distance(cm.centroids[k], p);
    }
    return total;
}

}  // namespace l3svm
