#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace l3svm {

using DenseVector = std::vector<double>;
using DenseMatrix = std::vector<DenseVector>;

/// One (index, value) entry of a sparse row. Indices are 0-based.
struct FeatureEntry {
    std::uint32_t index;
    double value;

    friend bool operator==(const FeatureEntry &, const FeatureEntry &) = default;
};

/// A labeled sparse instance. Entries are sorted by strictly increasing index.
struct Instance {
    std::vector<FeatureEntry> features;
    int label = 0;
    std::optional<std::size_t> cluster;

    friend bool operator==(const Instance &, const Instance &) = default;
};

/**
 * A labeled sample of sparse instances.
 *
 * Invariants (checked by the constructor): at least one instance, every
 * feature index below n_features, all values finite. The class list is
 * derived from the labels and kept sorted.
 */
class Dataset {
  public:
    Dataset(std::vector<Instance> instances, std::size_t n_features);

    [[nodiscard]] const std::vector<Instance> &instances() const noexcept { return instances_; }
    [[nodiscard]] const Instance &operator[](std::size_t i) const { return instances_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return instances_.size(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }
    [[nodiscard]] const std::vector<int> &classes() const noexcept { return classes_; }

    [[nodiscard]] DenseVector dense(std::size_t i) const;
    [[nodiscard]] DenseMatrix dense_matrix() const;
    [[nodiscard]] std::vector<int> labels() const;

    /// Instances at the given positions, in that order.
    [[nodiscard]] Dataset subset(const std::vector<std::size_t> &indices) const;

    friend bool operator==(const Dataset &a, const Dataset &b) {
        return a.n_features_ == b.n_features_ && a.instances_ == b.instances_;
    }

  private:
    std::vector<Instance> instances_;
    std::size_t n_features_;
    std::vector<int> classes_;
};

/// Build a dataset from dense rows; zero entries are not stored.
Dataset dataset_from_dense(const DenseMatrix &points, const std::vector<int> &labels);

DenseVector to_dense(const Instance &inst, std::size_t n_features);

// LIBSVM text format: `label idx:val idx:val ...`, 1-based strictly increasing indices.
Dataset parse_libsvm(std::istream &in, std::optional<std::size_t> n_features = std::nullopt);
Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> n_features = std::nullopt);
Dataset read_libsvm_file(const std::string &path, std::optional<std::size_t> n_features = std::nullopt);

void write_libsvm(std::ostream &out, const Dataset &d);
std::string write_libsvm(const Dataset &d);
void write_libsvm_file(const std::string &path, const Dataset &d);

/// Per-feature population standard deviations (absent sparse entries count as 0).
struct ScalingParams {
    std::vector<double> per_feature_std;

    friend bool operator==(const ScalingParams &, const ScalingParams &) = default;
};

ScalingParams fit_scaling(const Dataset &d);
ScalingParams identity_scaling(std::size_t n_features);
Dataset apply_scaling(const Dataset &d, const ScalingParams &p);
DenseVector apply_scaling(const DenseVector &x, const ScalingParams &p);

/// Deterministic k-fold partition. Stratified by class when every class has at least k members.
std::vector<std::pair<Dataset, Dataset>> kfold_split(const Dataset &d, std::size_t k, std::uint64_t seed);

/// Validation index sets of kfold_split, each sorted ascending.
std::vector<std::vector<std::size_t>> kfold_indices(const Dataset &d, std::size_t k, std::uint64_t seed);

/// Uniform points on [-1,1]^2, label +1 iff both coordinates share a sign.
Dataset gen_xor(std::size_t m, std::uint64_t seed);

/// Noisy spiral (+1) against a uniform square (-1), balanced classes.
Dataset gen_swissroll(std::size_t m, std::uint64_t seed);

int xor_label(double x1, double x2);

namespace swissroll {
inline constexpr double t_min_turns = 1.5;  // in units of pi
inline constexpr double t_max_turns = 4.5;
inline constexpr double noise_sigma = 0.02;

/// Noiseless spiral point for parameter t.
std::pair<double, double> spiral_point(double t);
}  // namespace swissroll

}  // namespace l3svm
