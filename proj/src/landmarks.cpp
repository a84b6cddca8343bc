#include "l3svm/landmarks.hpp"

#include "l3svm/clustering.hpp"
#include "l3svm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace l3svm {

const char *to_string(ProjectionKind kind) { return kind == ProjectionKind::Linear ? "linear" : "rbf"; }

LandmarkSet::LandmarkSet(DenseMatrix landmarks, Projection projection)
    : landmarks_(std::move(landmarks)), projection_(projection) {
    if (landmarks_.empty()) {
        throw invalid_argument_error("landmark set needs at least one landmark");
    }
    const std::size_t n = landmarks_.front().size();
    if (n == 0) {
        throw invalid_argument_error("landmarks must have at least one dimension");
    }
    for (const auto &l : landmarks_) {
        if (l.size() != n) {
            throw dimension_error("landmarks differ in dimension");
        }
        for (double v : l) {
            if (!std::isfinite(v)) {
                throw invalid_argument_error("non-finite landmark coordinate");
            }
        }
    }
    if (projection_.kind == ProjectionKind::Rbf && !(projection_.gamma > 0.0 && std::isfinite(projection_.gamma))) {
        throw invalid_argument_error("RBF gamma must be positive");
    }
}

LandmarkSet select_random(const DenseMatrix &points, std::size_t L, std::uint64_t seed, Projection projection) {
    const std::size_t m = points.size();
    if (L < 1 || L > m) {
        throw invalid_argument_error("random landmarks need 1 <= L <= " + std::to_string(m) + ", got " +
                                     std::to_string(L));
    }
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first L slots are a uniform sample without replacement.
    for (std::size_t i = 0; i < L; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    DenseMatrix chosen;
    chosen.reserve(L);
    for (std::size_t i = 0; i < L; ++i) {
        chosen.push_back(points[idx[i]]);
    }
    return LandmarkSet(std::move(chosen), projection);
}

PrincipalAxes principal_axes(const DenseMatrix &points, std::size_t L) {
    if (points.empty()) {
        throw invalid_argument_error("PCA needs at least one point");
    }
    const std::size_t m = points.size();
    const std::size_t n = points.front().size();
    if (L < 1 || L > n) {
        throw invalid_argument_error("PCA landmarks need 1 <= L <= n = " + std::to_string(n) + ", got " +
                                     std::to_string(L));
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        if (points[i].size() != n) {
            throw dimension_error("ragged point matrix");
        }
        for (std::size_t j = 0; j < n; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i][j];
        }
    }
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;
    const Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(m);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw l3svm_error("covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues; walk from the top.
    PrincipalAxes out;
    for (std::size_t p = 0; p < L; ++p) {
        const auto col = static_cast<Eigen::Index>(n - 1 - p);
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        out.axes.emplace_back(v.data(), v.data() + v.size());
        out.eigenvalues.push_back(solver.eigenvalues()(col));
    }
    return out;
}

LandmarkSet select_pca(const DenseMatrix &points, std::size_t L, Projection projection) {
    return LandmarkSet(principal_axes(points, L).axes, projection);
}

LandmarkSet standard_basis(std::size_t n) {
    DenseMatrix basis(n, DenseVector(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        basis[j][j] = 1.0;
    }
    return LandmarkSet(std::move(basis), Projection::linear());
}

DenseVector project(const LandmarkSet &ls, const DenseVector &x) {
    if (x.size() != ls.dim()) {
        throw dimension_error("point has " + std::to_string(x.size()) + " dims, landmarks have " +
                              std::to_string(ls.dim()));
    }
    DenseVector out(ls.L());
    const auto &lm = ls.landmarks();
    if (ls.projection().kind == ProjectionKind::Linear) {
        for (std::size_t p = 0; p < lm.size(); ++p) {
            out[p] = std::inner_product(x.begin(), x.end(), lm[p].begin(), 0.0);
        }
    } else {
        const double gamma = ls.projection().gamma;
        for (std::size_t p = 0; p < lm.size(); ++p) {
            out[p] = std::exp(-gamma * squared_distance(x, lm[p]));
        }
    }
    return out;
}

double BlockFeature::squared_norm() const noexcept {
    return std::inner_product(block.begin(), block.end(), block.begin(), 0.0) + 1.0;
}

DenseVector BlockFeature::dense() const {
    DenseVector out(dimension(), 0.0);
    std::copy(block.begin(), block.end(), out.begin() + static_cast<std::ptrdiff_t>(offset()));
    out.back() = 1.0;
    return out;
}

BlockFeature feature_map(const LandmarkSet &ls, std::size_t K, std::size_t k, const DenseVector &x) {
    if (K == 0 || k >= K) {
        throw invalid_argument_error("cluster index " + std::to_string(k) + " out of range for K = " +
                                     std::to_string(K));
    }
    return BlockFeature{k, K, project(ls, x)};
}

double block_dot(const BlockFeature &a, const BlockFeature &b) {
    double s = 1.0;
    if (a.cluster == b.cluster) {
        s += std::inner_product(a.block.begin(), a.block.end(), b.block.begin(), 0.0);
    }
    return s;
}

}  // namespace l3svm
