#pragma once

#include "l3svm/dataset.hpp"
#include "l3svm/landmarks.hpp"
#include "l3svm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace l3svm {

/// Quantities entering the stability and generalization bounds.
struct BoundInputs {
    double c = 1.0;
    std::size_t L = 1;
    std::size_t m = 1;
    double delta = 0.05;
    ProjectionKind projection = ProjectionKind::Linear;
    double R_x = 1.0;  // max |x| over the standardized sample

    void validate() const;
};

struct BoundReport {
    BoundInputs inputs;
    double M = 0.0;
    double stability = 0.0;  // c L M^2 / m
    double E = 0.0;          // loss bound 1 + 2c sqrt(L) M
    double empirical_risk = 0.0;
    double bound = 0.0;
};

/// Bound on max_l |mu(x, l)|: max(R_x^2, 1) for the dot product, 1 for RBF.
double compute_M(ProjectionKind projection, double R_x);

/// c L M^2 / m.
double stability_constant(double c, std::size_t L, double M, std::size_t m);

/// 1 + 2c sqrt(L) M.
double loss_bound_E(double c, std::size_t L, double M);

/// 1 + sqrt(2c) sqrt(L) M: what |theta|^2 <= 2c actually implies for the hinge loss at the optimum.
double hinge_loss_cap(double c, std::size_t L, double M);

/// emp + cLM^2/m + (2cLM^2/m + 1 + 2c sqrt(L) M) sqrt(ln(1/delta) / (2m)).
double generalization_bound(double emp_risk, double c, std::size_t L, double M, std::size_t m, double delta);

BoundReport bound_report(const BoundInputs &in, double emp_risk);

/// Largest Euclidean norm among the standardized inputs of `d`.
double max_input_norm(const Dataset &d, const ScalingParams &scaling);

struct ClassBound {
    int label = 0;
    BoundReport report;
};

/// Bound for every binary problem of `model` evaluated on its training sample `d`, trained with cost `c`.
std::vector<ClassBound> model_bounds(const L3Model &model, const Dataset &d, double c, double delta);
/// Same, with the cost stored in the model.
std::vector<ClassBound> model_bounds(const L3Model &model, const Dataset &d, double delta);

/// Key/value text in the same layout as model documents.
std::string format_bound_document(const std::vector<ClassBound> &bounds);
std::string format_bound_table(const std::vector<ClassBound> &bounds);

/// Where replacement points and probe points of a stability audit come from.
struct AuditSource {
    /// `count` fresh labeled points; must be deterministic in `seed`.
    std::function<Dataset(std::size_t count, std::uint64_t seed)> draw;
    /// Optional override for the point substituted at `index`.
    std::function<Instance(const Dataset &train, std::size_t index, std::uint64_t seed)> replace;

    /// Points from a synthetic generator such as gen_xor.
    static AuditSource generator(std::function<Dataset(std::size_t, std::uint64_t)> gen);
    /// Points sampled with replacement from a held-out pool.
    static AuditSource pool(Dataset held_out);
};

struct AuditReport {
    double max_loss_difference = 0.0;
    double cap = 0.0;  // c L M^2 / m
    double M = 0.0;
    double R_x = 0.0;
    double max_weight_squared_norm = 0.0;  // |theta|^2 + b^2 over every solve
    double max_training_hinge = 0.0;
    double hinge_cap = 0.0;
    std::size_t trials = 0;
    std::size_t probes = 0;
};

/**
 * Empirical uniform-stability check. Scaling, clusters and landmarks are fit once on
 * `d` and frozen; each trial swaps one uniformly chosen training point for a fresh
 * one, re-solves, and measures the hinge-loss change on the probe points.
 */
AuditReport stability_audit(const Dataset &d, const L3Config &cfg, const AuditSource &source, std::size_t trials,
                            std::size_t probes, std::uint64_t seed);

}  // namespace l3svm
