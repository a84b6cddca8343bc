#pragma once

#include "l3svm/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace l3svm {

enum class ProjectionKind { Linear, Rbf };

/// Similarity used to project a point onto one landmark.
struct Projection {
    ProjectionKind kind = ProjectionKind::Linear;
    double gamma = 1.0;  // RBF only: exp(-gamma * |x - l|^2)

    static Projection linear() { return {ProjectionKind::Linear, 1.0}; }
    static Projection rbf(double gamma) { return {ProjectionKind::Rbf, gamma}; }

    friend bool operator==(const Projection &, const Projection &) = default;
};

const char *to_string(ProjectionKind kind);

/// L landmark vectors shared by every cluster, plus the similarity used to project onto them.
class LandmarkSet {
  public:
    LandmarkSet(DenseMatrix landmarks, Projection projection);

    [[nodiscard]] const DenseMatrix &landmarks() const noexcept { return landmarks_; }
    [[nodiscard]] const Projection &projection() const noexcept { return projection_; }
    [[nodiscard]] std::size_t L() const noexcept { return landmarks_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return landmarks_.front().size(); }

  private:
    DenseMatrix landmarks_;
    Projection projection_;
};

/// L distinct training inputs drawn uniformly without replacement (labels ignored).
LandmarkSet select_random(const DenseMatrix &points, std::size_t L, std::uint64_t seed,
                          Projection projection = Projection::linear());

struct PrincipalAxes {
    DenseMatrix axes;                  // unit vectors, decreasing eigenvalue
    std::vector<double> eigenvalues;   // of the mean-centered population covariance
};

/// Top-L eigenvectors of the covariance of `points`. Each axis has its largest-magnitude entry positive.
PrincipalAxes principal_axes(const DenseMatrix &points, std::size_t L);

LandmarkSet select_pca(const DenseMatrix &points, std::size_t L, Projection projection = Projection::linear());

/// Landmarks e_1..e_n; with a linear projection this maps x to itself.
LandmarkSet standard_basis(std::size_t n);

/// [mu(x, l_1), ..., mu(x, l_L)].
DenseVector project(const LandmarkSet &ls, const DenseVector &x);

/**
 * Block feature of dimension K*L + 1: the projected point sits in block `cluster`,
 * every other block is zero, and the last coordinate is a constant 1 for the bias.
 */
struct BlockFeature {
    std::size_t cluster = 0;
    std::size_t K = 1;
    DenseVector block;

    [[nodiscard]] std::size_t L() const noexcept { return block.size(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return K * block.size() + 1; }
    [[nodiscard]] std::size_t offset() const noexcept { return cluster * block.size(); }
    [[nodiscard]] double squared_norm() const noexcept;
    [[nodiscard]] DenseVector dense() const;
};

BlockFeature feature_map(const LandmarkSet &ls, std::size_t K, std::size_t k, const DenseVector &x);

/// <phi_a, phi_b> including the bias slot.
double block_dot(const BlockFeature &a, const BlockFeature &b);

}  // namespace l3svm
