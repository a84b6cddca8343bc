#include "l3svm/dataset.hpp"

#include "l3svm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace l3svm {

Dataset::Dataset(std::vector<Instance> instances, std::size_t n_features)
    : instances_(std::move(instances)), n_features_(n_features) {
    if (instances_.empty()) {
        throw invalid_argument_error("empty dataset");
    }
    if (n_features_ == 0) {
        throw invalid_argument_error("dataset must have at least one feature");
    }
    std::set<int> classes;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        const auto &feats = instances_[i].features;
        for (std::size_t j = 0; j < feats.size(); ++j) {
            if (feats[j].index >= n_features_) {
                throw dimension_error("instance " + std::to_string(i) + ": feature index " +
                                      std::to_string(feats[j].index) + " out of range");
            }
            if (j > 0 && feats[j].index <= feats[j - 1].index) {
                throw invalid_argument_error("instance " + std::to_string(i) + ": feature indices not increasing");
            }
            if (!std::isfinite(feats[j].value)) {
                throw invalid_argument_error("instance " + std::to_string(i) + ": non-finite feature value");
            }
        }
        classes.insert(instances_[i].label);
    }
    classes_.assign(classes.begin(), classes.end());
}

DenseVector Dataset::dense(std::size_t i) const { return to_dense(instances_.at(i), n_features_); }

DenseMatrix Dataset::dense_matrix() const {
    DenseMatrix out;
    out.reserve(instances_.size());
    for (const auto &inst : instances_) {
        out.push_back(to_dense(inst, n_features_));
    }
    return out;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(instances_.size());
    for (const auto &inst : instances_) {
        out.push_back(inst.label);
    }
    return out;
}

Dataset Dataset::subset(const std::vector<std::size_t> &indices) const {
    std::vector<Instance> out;
    out.reserve(indices.size());
    for (auto i : indices) {
        out.push_back(instances_.at(i));
    }
    return Dataset(std::move(out), n_features_);
}

DenseVector to_dense(const Instance &inst, std::size_t n_features) {
    DenseVector x(n_features, 0.0);
    for (const auto &e : inst.features) {
        if (e.index >= n_features) {
            throw dimension_error("feature index out of range");
        }
        x[e.index] = e.value;
    }
    return x;
}

Dataset dataset_from_dense(const DenseMatrix &points, const std::vector<int> &labels) {
    if (points.size() != labels.size()) {
        throw dimension_error("points and labels differ in length");
    }
    if (points.empty()) {
        throw invalid_argument_error("empty dataset");
    }
    const std::size_t n = points.front().size();
    std::vector<Instance> instances(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != n) {
            throw dimension_error("ragged point matrix");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (points[i][j] != 0.0) {
                instances[i].features.push_back({static_cast<std::uint32_t>(j), points[i][j]});
            }
        }
        instances[i].label = labels[i];
    }
    return Dataset(std::move(instances), n);
}

// ---------------------------------------------------------------------------
// LIBSVM text

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && is_blank(line[pos])) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < line.size() && !is_blank(line[pos])) {
            ++pos;
        }
        if (pos > start) {
            tokens.push_back(line.substr(start, pos - start));
        }
    }
    return tokens;
}

int parse_label(std::string_view tok, std::size_t line_no) {
    if (!tok.empty() && tok.front() == '+') {
        tok.remove_prefix(1);
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec == std::errc() && ptr == tok.data() + tok.size() && !tok.empty()) {
        return value;
    }
    // Accept integral reals such as "1.0".
    double real = 0.0;
    const auto [rptr, rec] = std::from_chars(tok.data(), tok.data() + tok.size(), real);
    if (rec == std::errc() && rptr == tok.data() + tok.size() && std::isfinite(real) && real == std::floor(real) &&
        std::abs(real) < 2e9) {
        return static_cast<int>(real);
    }
    throw parse_error(line_no, "invalid label '" + std::string(tok) + "'");
}

}  // namespace

Dataset parse_libsvm(std::istream &in, std::optional<std::size_t> n_features) {
    std::vector<Instance> instances;
    std::size_t max_index = 0;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find('#') != std::string_view::npos) {
            throw parse_error(line_no, "comments are not supported");
        }
        const auto tokens = split_tokens(line);
        if (tokens.empty()) {
            continue;
        }
        Instance inst;
        inst.label = parse_label(tokens.front(), line_no);
        std::size_t previous = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto tok = tokens[t];
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos || colon == 0 || colon + 1 == tok.size()) {
                throw parse_error(line_no, "malformed feature '" + std::string(tok) + "'");
            }
            std::size_t index = 0;
            const auto idx_part = tok.substr(0, colon);
            const auto [iptr, iec] = std::from_chars(idx_part.data(), idx_part.data() + idx_part.size(), index);
            if (iec != std::errc() || iptr != idx_part.data() + idx_part.size()) {
                throw parse_error(line_no, "invalid feature index '" + std::string(idx_part) + "'");
            }
            if (index == 0) {
                throw parse_error(line_no, "feature indices are 1-based");
            }
            if (index > std::numeric_limits<std::uint32_t>::max()) {
                throw parse_error(line_no, "feature index too large");
            }
            if (index <= previous) {
                throw parse_error(line_no, "non-increasing index " + std::to_string(index));
            }
            previous = index;
            auto val_part = tok.substr(colon + 1);
            if (val_part.size() > 1 && val_part.front() == '+') {
                val_part.remove_prefix(1);
            }
            double value = 0.0;
            const auto [vptr, vec] = std::from_chars(val_part.data(), val_part.data() + val_part.size(), value);
            if (vec != std::errc() || vptr != val_part.data() + val_part.size()) {
                throw parse_error(line_no, "non-numeric value '" + std::string(val_part) + "'");
            }
            if (!std::isfinite(value)) {
                throw parse_error(line_no, "non-finite value");
            }
            inst.features.push_back({static_cast<std::uint32_t>(index - 1), value});
            max_index = std::max(max_index, index);
        }
        instances.push_back(std::move(inst));
    }
    if (instances.empty()) {
        throw parse_error(0, "empty dataset");
    }
    std::size_t n = std::max<std::size_t>(max_index, 1);
    if (n_features) {
        if (*n_features < max_index) {
            throw parse_error(0, "feature index " + std::to_string(max_index) + " exceeds n_features " +
                                     std::to_string(*n_features));
        }
        n = *n_features;
    }
    return Dataset(std::move(instances), n);
}

Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> n_features) {
    std::istringstream in{std::string(text)};
    return parse_libsvm(in, n_features);
}

Dataset read_libsvm_file(const std::string &path, std::optional<std::size_t> n_features) {
    std::ifstream in(path);
    if (!in) {
        throw l3svm_error("cannot open " + path);
    }
    return parse_libsvm(in, n_features);
}

void write_libsvm(std::ostream &out, const Dataset &d) {
    char buf[64];
    for (const auto &inst : d.instances()) {
        out << inst.label;
        for (const auto &e : inst.features) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g", e.value);
            out << ' ' << (e.index + 1) << ':' << std::string_view(buf, static_cast<std::size_t>(len));
        }
        out << '\n';
    }
}

std::string write_libsvm(const Dataset &d) {
    std::ostringstream out;
    write_libsvm(out, d);
    return out.str();
}

void write_libsvm_file(const std::string &path, const Dataset &d) {
    std::ofstream out(path);
    if (!out) {
        throw l3svm_error("cannot write " + path);
    }
    write_libsvm(out, d);
    if (!out) {
        throw l3svm_error("write failed for " + path);
    }
}

// ---------------------------------------------------------------------------
// Scaling

ScalingParams fit_scaling(const Dataset &d) {
    const std::size_t m = d.size();
    if (m < 2) {
        throw invalid_argument_error("fit_scaling needs at least two instances");
    }
    const std::size_t n = d.n_features();
    std::vector<double> sum(n, 0.0);
    for (const auto &inst : d.instances()) {
        for (const auto &e : inst.features) {
            sum[e.index] += e.value;
        }
    }
    std::vector<double> mean(n);
    for (std::size_t j = 0; j < n; ++j) {
        mean[j] = sum[j] / static_cast<double>(m);
    }
    // Two-pass: absent entries contribute (0 - mean)^2.
    std::vector<double> sq(n, 0.0);
    std::vector<std::size_t> present(n, 0);
    for (const auto &inst : d.instances()) {
        for (const auto &e : inst.features) {
            const double dev = e.value - mean[e.index];
            sq[e.index] += dev * dev;
            ++present[e.index];
        }
    }
    ScalingParams p;
    p.per_feature_std.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double absent = static_cast<double>(m - present[j]);
        sq[j] += absent * mean[j] * mean[j];
        p.per_feature_std[j] = std::sqrt(sq[j] / static_cast<double>(m));
    }
    return p;
}

ScalingParams identity_scaling(std::size_t n_features) { return ScalingParams{std::vector<double>(n_features, 1.0)}; }

Dataset apply_scaling(const Dataset &d, const ScalingParams &p) {
    if (p.per_feature_std.size() != d.n_features()) {
        throw dimension_error("scaling has " + std::to_string(p.per_feature_std.size()) + " features, dataset has " +
                              std::to_string(d.n_features()));
    }
    std::vector<Instance> out = d.instances();
    for (auto &inst : out) {
        for (auto &e : inst.features) {
            const double s = p.per_feature_std[e.index];
            if (s > 0.0) {
                e.value /= s;
            }
        }
    }
    return Dataset(std::move(out), d.n_features());
}

DenseVector apply_scaling(const DenseVector &x, const ScalingParams &p) {
    if (p.per_feature_std.size() != x.size()) {
        throw dimension_error("scaling has " + std::to_string(p.per_feature_std.size()) + " features, vector has " +
                              std::to_string(x.size()));
    }
    DenseVector out(x);
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (p.per_feature_std[j] > 0.0) {
            out[j] /= p.per_feature_std[j];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Folds

std::vector<std::vector<std::size_t>> kfold_indices(const Dataset &d, std::size_t k, std::uint64_t seed) {
    const std::size_t m = d.size();
    if (k < 2 || k > m) {
        throw invalid_argument_error("fold count " + std::to_string(k) + " outside [2, " + std::to_string(m) + "]");
    }
    std::mt19937_64 rng(seed);
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < m; ++i) {
        by_class[d[i].label].push_back(i);
    }
    const bool stratified =
        std::all_of(by_class.begin(), by_class.end(), [k](const auto &kv) { return kv.second.size() >= k; });

    std::vector<std::size_t> order;
    order.reserve(m);
    if (stratified) {
        for (auto &[label, members] : by_class) {
            std::shuffle(members.begin(), members.end(), rng);
            order.insert(order.end(), members.begin(), members.end());
        }
    } else {
        order.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            order[i] = i;
        }
        std::shuffle(order.begin(), order.end(), rng);
    }
    // Dealing round-robin keeps fold sizes within one of each other and spreads each class evenly.
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t pos = 0; pos < m; ++pos) {
        folds[pos % k].push_back(order[pos]);
    }
    for (auto &f : folds) {
        std::sort(f.begin(), f.end());
    }
    return folds;
}

std::vector<std::pair<Dataset, Dataset>> kfold_split(const Dataset &d, std::size_t k, std::uint64_t seed) {
    const auto folds = kfold_indices(d, k, seed);
    std::vector<std::pair<Dataset, Dataset>> out;
    out.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<bool> in_val(d.size(), false);
        for (auto i : folds[f]) {
            in_val[i] = true;
        }
        std::vector<std::size_t> train;
        train.reserve(d.size() - folds[f].size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!in_val[i]) {
                train.push_back(i);
            }
        }
        out.emplace_back(d.subset(train), d.subset(folds[f]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic distributions

int xor_label(double x1, double x2) { return x1 * x2 > 0.0 ? 1 : -1; }

Dataset gen_xor(std::size_t m, std::uint64_t seed) {
    if (m == 0) {
        throw invalid_argument_error("gen_xor needs m >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    DenseMatrix points;
    std::vector<int> labels;
    points.reserve(m);
    labels.reserve(m);
    while (points.size() < m) {
        const double x1 = coord(rng);
        const double x2 = coord(rng);
        if (std::abs(x1 * x2) < 1e-9) {
            continue;
        }
        points.push_back({x1, x2});
        labels.push_back(xor_label(x1, x2));
    }
    return dataset_from_dense(points, labels);
}

namespace swissroll {
std::pair<double, double> spiral_point(double t) {
    const double scale = t_max_turns * std::numbers::pi;
    return {t * std::cos(t) / scale, t * std::sin(t) / scale};
}
}  // namespace swissroll

Dataset gen_swissroll(std::size_t m, std::uint64_t seed) {
    if (m < 2) {
        throw invalid_argument_error("gen_swissroll needs m >= 2");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> param(swissroll::t_min_turns * std::numbers::pi,
                                                 swissroll::t_max_turns * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, swissroll::noise_sigma);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    DenseMatrix points;
    std::vector<int> labels;
    points.reserve(m);
    labels.reserve(m);
    // Alternating classes gives ceil(m/2) spiral points and floor(m/2) uniform ones.
    for (std::size_t i = 0; i < m; ++i) {
        if (i % 2 == 0) {
            const auto [px, py] = swissroll::spiral_point(param(rng));
            const double nx = noise(rng);
            const double ny = noise(rng);
            points.push_back({px + nx, py + ny});
            labels.push_back(1);
        } else {
            const double x1 = coord(rng);
            const double x2 = coord(rng);
            points.push_back({x1, x2});
            labels.push_back(-1);
        }
    }
    return dataset_from_dense(points, labels);
}

}  // namespace l3svm
