#pragma once

#include "l3svm/dataset.hpp"
#include "l3svm/landmarks.hpp"
#include "l3svm/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace l3svm {

/// One train/test run of the benchmark harness.
struct BenchResult {
    std::string dataset;
    std::uint64_t seed = 0;
    std::size_t K = 1;
    std::size_t L = 1;
    std::string projection = "linear";
    double cost = 1.0;
    double accuracy = 0.0;
    double train_s = 0.0;
    double test_s = 0.0;
    std::size_t model_bytes = 0;

    friend bool operator==(const BenchResult &, const BenchResult &) = default;
};

struct BenchOptions {
    std::string name = "dataset";
    std::size_t K = 1;
    std::vector<std::size_t> landmarks;  // empty: L = n
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::optional<double> cost;          // unset: pick c by cross-validation on the training set
    std::size_t folds = 5;
    Projection projection = Projection::linear();
    LandmarkMethod landmark_method = LandmarkMethod::Random;
    bool baseline = true;                // also run K = 1 with standard-basis landmarks
    double tol = 1e-4;
};

/// Name suffix that marks the linear-SVM baseline rows.
inline constexpr const char *baseline_suffix = "/linear-svm";

std::vector<BenchResult> run_bench(const Dataset &train_set, const Dataset &test_set, const BenchOptions &opts);

inline constexpr const char *bench_csv_header = "dataset,seed,K,L,projection,cost,accuracy,train_s,test_s";

void write_bench_csv(std::ostream &out, const std::vector<BenchResult> &results);
/// Reads what write_bench_csv wrote; model_bytes is not part of the CSV and comes back as 0.
std::vector<BenchResult> parse_bench_csv(std::istream &in);

struct BenchSummary {
    std::string dataset;
    std::size_t K = 1;
    std::size_t L = 1;
    std::size_t runs = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    double mean_train_s = 0.0;
    double mean_test_s = 0.0;
};

/// Mean and population std of accuracy per (dataset, K, L), in first-seen order.
std::vector<BenchSummary> summarize(const std::vector<BenchResult> &results);

std::string format_bench_table(const std::vector<BenchResult> &results);

}  // namespace l3svm
