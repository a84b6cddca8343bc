#pragma once

#include "l3svm/clustering.hpp"
#include "l3svm/dataset.hpp"
#include "l3svm/landmarks.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace l3svm {

struct SolverConfig {
    double c = 1.0;      // total hinge weight; each instance is charged c/m
    double tol = 1e-4;   // stop once the largest projected-gradient violation drops below this
    std::size_t max_epochs = 1000;
    std::uint64_t shuffle_seed = 0;

    void validate() const;
};

/// Per-cluster landmark weights (row-major K x L) and the shared bias.
struct WeightVector {
    std::size_t K = 0;
    std::size_t L = 0;
    std::vector<double> theta;
    double b = 0.0;

    WeightVector() = default;
    WeightVector(std::size_t K_, std::size_t L_) : K(K_), L(L_), theta(K_ * L_, 0.0) {}

    [[nodiscard]] double &at(std::size_t k, std::size_t p) { return theta[k * L + p]; }
    [[nodiscard]] double at(std::size_t k, std::size_t p) const { return theta[k * L + p]; }
    [[nodiscard]] std::span<const double> row(std::size_t k) const { return {theta.data() + k * L, L}; }

    /// theta_k . block, without the bias.
    [[nodiscard]] double margin(const BlockFeature &phi) const;
    /// theta_k . block + b.
    [[nodiscard]] double score(const BlockFeature &phi) const { return margin(phi) + b; }
    [[nodiscard]] double theta_squared_norm() const;
    /// |theta|^2 + b^2, the norm regularized by the primal solver.
    [[nodiscard]] double squared_norm() const { return theta_squared_norm() + b * b; }

    friend bool operator==(const WeightVector &, const WeightVector &) = default;
};

/// Dual multipliers with their slack counterparts r_i = c/m - alpha_i.
struct DualSolution {
    std::vector<double> alpha;
    std::vector<double> r;
    double objective_dual = 0.0;
};

struct SolveStats {
    std::size_t epochs = 0;
    double final_violation = 0.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double duality_gap = 0.0;
    std::size_t support_vectors = 0;
    bool converged = false;
};

struct PrimalSolution {
    WeightVector weights;
    DualSolution dual;
    SolveStats stats;
};

/**
 * Dual coordinate descent for
 *
 *     min_w  1/2 |w|^2 + (c/m) sum_i max(0, 1 - y_i <w, phi_i>)
 *
 * where phi_i is the block feature of instance i with its constant bias slot, so the
 * bias is regularized together with theta. Works on the box-constrained dual
 * 0 <= alpha_i <= c/m; w = sum_i alpha_i y_i phi_i is maintained incrementally.
 * Instances are visited in a freshly shuffled order each epoch.
 */
PrimalSolution solve_primal_dcd(std::span<const BlockFeature> features, std::span<const int> labels,
                                const SolverConfig &cfg);

struct ReferenceSolution {
    DualSolution dual;
    double b = 0.0;
    std::size_t iterations = 0;
    std::size_t free_support_vectors = 0;
    bool converged = false;
};

inline constexpr std::size_t default_reference_cap = 2000;

/**
 * Pairwise (SMO) solver for the dual with an unregularized bias:
 *
 *     max_alpha  sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j G_ij
 *     s.t.       0 <= alpha_i <= c/m,  sum_i alpha_i y_i = 0
 *
 * `gram` is any symmetric PSD matrix over the projected points (no bias slot). The
 * bias is the average of y_a - sum_j alpha_j y_j G_aj over free support vectors,
 * or the midpoint of the feasible interval when none is free.
 */
ReferenceSolution solve_dual_reference(const DenseMatrix &gram, std::span<const int> labels, const SolverConfig &cfg,
                                       std::size_t max_instances = default_reference_cap);

struct ThetaReconstruction {
    WeightVector weights;      // b recovered from free support vectors
    double b_all_sv_average;   // (1/A) sum over all support vectors of (y_a - theta_{k_a} . mu(x_a))
    std::size_t support_vectors = 0;
    std::size_t free_support_vectors = 0;
};

/// theta_kp = sum over support vectors a in cluster k of alpha_a y_a mu(x_a, l_p).
ThetaReconstruction reconstruct_theta(const DualSolution &ds, std::span<const BlockFeature> features,
                                      std::span<const int> labels, double c);

ThetaReconstruction reconstruct_theta(const DualSolution &ds, const DenseMatrix &points, std::span<const int> labels,
                                      const ClusterModel &cm, const LandmarkSet &ls, double c);

/// Block features for `points` using nearest-centroid cluster assignment.
std::vector<BlockFeature> build_features(const DenseMatrix &points, const ClusterModel &cm, const LandmarkSet &ls);

/// Gram matrix <phi_i, phi_j>; with include_bias = false the constant slot is left out.
DenseMatrix block_gram(std::span<const BlockFeature> features, bool include_bias);

/// w = sum_i alpha_i y_i phi_i, evaluated from scratch.
WeightVector weights_from_dual(std::span<const double> alpha, std::span<const BlockFeature> features,
                               std::span<const int> labels);

double hinge_loss(double y, double score);

double objective_primal(const WeightVector &w, std::span<const BlockFeature> features, std::span<const int> labels,
                        double c);

/// sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j gram_ij.
double objective_dual(std::span<const double> alpha, const DenseMatrix &gram, std::span<const int> labels, double c);

}  // namespace l3svm
