#pragma once

#include "l3svm/clustering.hpp"
#include "l3svm/dataset.hpp"
#include "l3svm/landmarks.hpp"
#include "l3svm/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace l3svm {

/// StandardBasis uses e_1..e_n (L = n); with K = 1 and a linear projection the model is a plain linear SVM.
enum class LandmarkMethod { Random, Pca, StandardBasis };

const char *to_string(LandmarkMethod method);

struct L3Config {
    std::size_t K = 1;
    std::size_t L = 0;  // 0 selects the input dimension
    LandmarkMethod landmark_method = LandmarkMethod::Random;
    Projection projection = Projection::linear();
    double c = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-4;
    std::size_t max_epochs = 1000;
    std::size_t kmeans_max_iter = 300;
    double kmeans_tol = 1e-6;
    bool standardize = true;

    void validate() const;
    [[nodiscard]] std::size_t resolved_L(std::size_t n_features) const { return L == 0 ? n_features : L; }
    [[nodiscard]] SolverConfig solver() const { return SolverConfig{c, tol, max_epochs, seed}; }
};

/// Everything needed to turn a raw input into a block feature: scaling, partition, landmarks.
struct Representation {
    ScalingParams scaling;
    ClusterModel clusters;
    LandmarkSet landmarks;

    [[nodiscard]] DenseVector standardize(const DenseVector &raw) const { return apply_scaling(raw, scaling); }
    [[nodiscard]] BlockFeature encode(const DenseVector &raw) const;
    [[nodiscard]] std::vector<BlockFeature> encode(const Dataset &d) const;
};

struct ClassWeights {
    int label = 0;
    WeightVector weights;
};

/**
 * A trained model. Binary problems hold one weight vector scored for the larger
 * class label (the smaller one is predicted on negative scores); multiclass
 * problems hold one one-vs-all weight vector per class, sharing the clustering and
 * the landmarks.
 */
struct L3Model {
    static constexpr int current_format_version = 1;

    int format_version = current_format_version;
    std::size_t n_features = 0;
    double cost = 1.0;  // training c, kept so bounds can be computed from the model alone
    Representation representation;
    std::vector<int> classes;
    std::vector<ClassWeights> per_class;

    [[nodiscard]] std::size_t K() const noexcept { return representation.clusters.K(); }
    [[nodiscard]] std::size_t L() const noexcept { return representation.landmarks.L(); }
    [[nodiscard]] bool is_binary() const noexcept { return classes.size() == 2; }
};

struct TrainResult {
    L3Model model;
    std::vector<SolveStats> stats;  // one per entry of model.per_class
};

/// Scaling, k-means and landmark selection on the training inputs.
Representation fit_representation(const Dataset &d, const L3Config &cfg);

/// {+1 for `positive`, -1 otherwise}.
std::vector<int> one_vs_all_labels(const Dataset &d, int positive);

TrainResult train_detailed(const Dataset &d, const L3Config &cfg);

/// Trains with a fixed representation (scaling, clusters and landmarks are not refit).
TrainResult train_on_representation(const Dataset &d, const L3Config &cfg, Representation rep);

/// Fits scaling and clusters as usual but uses the given landmarks (expressed in the standardized space).
TrainResult train_with_landmarks(const Dataset &d, const L3Config &cfg, const LandmarkSet &landmarks);

L3Model train(const Dataset &d, const L3Config &cfg);

/// Per-class scores theta_k . mu(x) + b for a raw (unscaled) input.
std::vector<double> decision(const L3Model &model, const DenseVector &x);

int predict(const L3Model &model, const DenseVector &x);

double evaluate(const L3Model &model, const Dataset &d);

struct CvGrid {
    std::vector<double> costs;
    std::vector<double> gammas;  // used only with the RBF projection

    static CvGrid standard();
};

struct CvPoint {
    double c = 0.0;
    double gamma = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> fold_accuracy;
};

struct CVReport {
    std::vector<CvPoint> points;
    std::size_t selected = 0;
    std::string selection_rule;
};

struct CvResult {
    L3Config best;
    CVReport report;
};

/// Grid search on k-fold accuracy. Clustering and landmarks are refit on every fold's training part.
CvResult cross_validate(const Dataset &d, const L3Config &base, std::size_t folds, const CvGrid &grid);

// Model documents: versioned key/value text with 17 significant digits per real.
std::string save_model(const L3Model &model);
L3Model load_model(std::string_view document);
void save_model_file(const std::string &path, const L3Model &model);
L3Model load_model_file(const std::string &path);

}  // namespace l3svm
