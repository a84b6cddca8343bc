#include "l3svm/model.hpp"

#include "l3svm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace l3svm {

const char *to_string(LandmarkMethod method) {
    switch (method) {
    case LandmarkMethod::Random:
        return "random";
    case LandmarkMethod::Pca:
        return "pca";
    case LandmarkMethod::StandardBasis:
        return "basis";
    }
    return "unknown";
}

void L3Config::validate() const {
    if (K < 1) {
        throw invalid_argument_error("number of clusters must be >= 1");
    }
    if (projection.kind == ProjectionKind::Rbf && !(projection.gamma > 0.0)) {
        throw invalid_argument_error("RBF gamma must be positive");
    }
    solver().validate();
}

BlockFeature Representation::encode(const DenseVector &raw) const {
    const DenseVector x = standardize(raw);
    return feature_map(landmarks, clusters.K(), assign(clusters, x), x);
}

std::vector<BlockFeature> Representation::encode(const Dataset &d) const {
    std::vector<BlockFeature> out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        out.push_back(encode(d.dense(i)));
    }
    return out;
}

namespace {

constexpr std::uint64_t landmark_seed_salt = 0x9E3779B97F4A7C15ULL;

struct Standardized {
    ScalingParams scaling;
    DenseMatrix points;
};

Standardized standardize_inputs(const Dataset &d, const L3Config &cfg) {
    Standardized s{cfg.standardize ? fit_scaling(d) : identity_scaling(d.n_features()), {}};
    s.points.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        s.points.push_back(apply_scaling(d.dense(i), s.scaling));
    }
    return s;
}

ClusterModel fit_clusters(const DenseMatrix &points, const L3Config &cfg) {
    return kmeans_fit(points, KMeansParams{cfg.K, cfg.seed, cfg.kmeans_max_iter, cfg.kmeans_tol});
}

}  // namespace

Representation fit_representation(const Dataset &d, const L3Config &cfg) {
    cfg.validate();
    auto s = standardize_inputs(d, cfg);
    auto clusters = fit_clusters(s.points, cfg);
    const std::size_t L = cfg.resolved_L(d.n_features());
    auto landmarks = [&]() -> LandmarkSet {
        switch (cfg.landmark_method) {
        case LandmarkMethod::Random:
            return select_random(s.points, L, cfg.seed ^ landmark_seed_salt, cfg.projection);
        case LandmarkMethod::Pca:
            return select_pca(s.points, L, cfg.projection);
        case LandmarkMethod::StandardBasis:
            if (L != d.n_features()) {
                throw invalid_argument_error("standard-basis landmarks need L = n");
            }
            return LandmarkSet(standard_basis(d.n_features()).landmarks(), cfg.projection);
        }
        throw invalid_argument_error("unknown landmark method");
    }();
    return Representation{std::move(s.scaling), std::move(clusters), std::move(landmarks)};
}

std::vector<int> one_vs_all_labels(const Dataset &d, int positive) {
    std::vector<int> y;
    y.reserve(d.size());
    for (const auto &inst : d.instances()) {
        y.push_back(inst.label == positive ? 1 : -1);
    }
    return y;
}

TrainResult train_on_representation(const Dataset &d, const L3Config &cfg, Representation rep) {
    cfg.validate();
    if (d.classes().size() < 2) {
        throw invalid_argument_error("training needs at least two classes");
    }
    if (rep.scaling.per_feature_std.size() != d.n_features() || rep.clusters.dim() != d.n_features() ||
        rep.landmarks.dim() != d.n_features()) {
        throw dimension_error("representation does not match the dataset dimension");
    }
    const auto features = rep.encode(d);
    const SolverConfig scfg = cfg.solver();

    // Binary problems score the larger label; multiclass trains one-vs-all for every class.
    std::vector<int> targets;
    if (d.classes().size() == 2) {
        targets.push_back(d.classes().back());
    } else {
        targets = d.classes();
    }
    std::vector<ClassWeights> per_class;
    std::vector<SolveStats> stats;
    for (int label : targets) {
        const auto y = one_vs_all_labels(d, label);
        auto sol = solve_primal_dcd(features, y, scfg);
        per_class.push_back({label, std::move(sol.weights)});
        stats.push_back(sol.stats);
    }
    return TrainResult{L3Model{L3Model::current_format_version, d.n_features(), cfg.c, std::move(rep), d.classes(),
                               std::move(per_class)},
                       std::move(stats)};
}

TrainResult train_detailed(const Dataset &d, const L3Config &cfg) {
    return train_on_representation(d, cfg, fit_representation(d, cfg));
}

TrainResult train_with_landmarks(const Dataset &d, const L3Config &cfg, const LandmarkSet &landmarks) {
    cfg.validate();
    auto s = standardize_inputs(d, cfg);
    auto clusters = fit_clusters(s.points, cfg);
    return train_on_representation(d, cfg, Representation{std::move(s.scaling), std::move(clusters), landmarks});
}

L3Model train(const Dataset &d, const L3Config &cfg) { return train_detailed(d, cfg).model; }

std::vector<double> decision(const L3Model &model, const DenseVector &x) {
    if (x.size() != model.n_features) {
        throw dimension_error("input has " + std::to_string(x.size()) + " features, model expects " +
                              std::to_string(model.n_features));
    }
    const BlockFeature phi = model.representation.encode(x);
    std::vector<double> scores;
    scores.reserve(model.per_class.size());
    for (const auto &cw : model.per_class) {
        scores.push_back(cw.weights.score(phi));
    }
    return scores;
}

int predict(const L3Model &model, const DenseVector &x) {
    const auto scores = decision(model, x);
    if (model.is_binary()) {
        return scores.front() >= 0.0 ? model.classes.back() : model.classes.front();
    }
    // per_class is ordered by ascending label, so the first maximum is the lowest label.
    const auto best = std::max_element(scores.begin(), scores.end());
    return model.per_class[static_cast<std::size_t>(best - scores.begin())].label;
}

double evaluate(const L3Model &model, const Dataset &d) {
    if (d.n_features() != model.n_features) {
        throw dimension_error("dataset has " + std::to_string(d.n_features()) + " features, model expects " +
                              std::to_string(model.n_features));
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (predict(model, d.dense(i)) == d[i].label) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(d.size());
}

// ---------------------------------------------------------------------------
// Cross-validation

CvGrid CvGrid::standard() {
    const std::vector<double> values{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
    return CvGrid{values, values};
}

CvResult cross_validate(const Dataset &d, const L3Config &base, std::size_t folds, const CvGrid &grid) {
    base.validate();
    if (folds < 2) {
        throw invalid_argument_error("cross-validation needs at least 2 folds");
    }
    if (grid.costs.empty()) {
        throw invalid_argument_error("empty cost grid");
    }
    const bool rbf = base.projection.kind == ProjectionKind::Rbf;
    std::vector<double> gammas = rbf ? grid.gammas : std::vector<double>{base.projection.gamma};
    if (gammas.empty()) {
        throw invalid_argument_error("empty gamma grid");
    }
    std::vector<double> costs = grid.costs;
    std::sort(costs.begin(), costs.end());
    std::sort(gammas.begin(), gammas.end());

    const auto splits = kfold_split(d, folds, base.seed);
    CvResult out{base, {}};
    out.report.selection_rule = "max mean accuracy; ties -> smaller c, then smaller gamma";
    for (double c : costs) {
        for (double gamma : gammas) {
            L3Config cfg = base;
            cfg.c = c;
            if (rbf) {
                cfg.projection.gamma = gamma;
            }
            CvPoint point{c, rbf ? gamma : 0.0, 0.0, 0.0, {}};
            for (const auto &[train_part, val_part] : splits) {
                const auto model = train(train_part, cfg);
                point.fold_accuracy.push_back(evaluate(model, val_part));
            }
            const double n = static_cast<double>(point.fold_accuracy.size());
            point.mean_accuracy = std::accumulate(point.fold_accuracy.begin(), point.fold_accuracy.end(), 0.0) / n;
            double var = 0.0;
            for (double a : point.fold_accuracy) {
                var += (a - point.mean_accuracy) * (a - point.mean_accuracy);
            }
            point.std_accuracy = std::sqrt(var / n);
            out.report.points.push_back(std::move(point));
        }
    }
    // Points are visited in ascending (c, gamma) order, so a strict comparison keeps the tie-break.
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.report.points.size(); ++i) {
        if (out.report.points[i].mean_accuracy > out.report.points[best].mean_accuracy) {
            best = i;
        }
    }
    out.report.selected = best;
    out.best.c = out.report.points[best].c;
    if (rbf) {
        out.best.projection.gamma = out.report.points[best].gamma;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view model_magic = "l3svm-model";

std::string fmt_real(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_row(std::ostringstream &out, const std::vector<double> &row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        out << (j == 0 ? "" : " ") << fmt_real(row[j]);
    }
    out << '\n';
}

class Reader {
  public:
    explicit Reader(std::string_view doc) : doc_(doc) {}

    std::string_view token() {
        while (pos_ < doc_.size() && std::isspace(static_cast<unsigned char>(doc_[pos_]))) {
            ++pos_;
        }
        const std::size_t start = pos_;
        while (pos_ < doc_.size() && !std::isspace(static_cast<unsigned char>(doc_[pos_]))) {
            ++pos_;
        }
        if (start == pos_) {
            throw model_format_error("unexpected end of model document");
        }
        return doc_.substr(start, pos_ - start);
    }

    void expect(std::string_view key) {
        const auto tok = token();
        if (tok != key) {
            throw model_format_error("expected '" + std::string(key) + "', found '" + std::string(tok) + "'");
        }
    }

    double real() {
        const auto tok = token();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw model_format_error("invalid real '" + std::string(tok) + "'");
        }
        if (!std::isfinite(v)) {
            throw model_format_error("non-finite value in model document");
        }
        return v;
    }

    long long integer() {
        const auto tok = token();
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw model_format_error("invalid integer '" + std::string(tok) + "'");
        }
        return v;
    }

    std::size_t count(std::string_view what) {
        const long long v = integer();
        if (v < 1 || v > 100'000'000) {
            throw model_format_error("invalid " + std::string(what) + " " + std::to_string(v));
        }
        return static_cast<std::size_t>(v);
    }

    std::vector<double> reals(std::size_t n) {
        std::vector<double> out(n);
        for (auto &v : out) {
            v = real();
        }
        return out;
    }

    [[nodiscard]] bool at_end() {
        while (pos_ < doc_.size() && std::isspace(static_cast<unsigned char>(doc_[pos_]))) {
            ++pos_;
        }
        return pos_ == doc_.size();
    }

  private:
    std::string_view doc_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string save_model(const L3Model &model) {
    const auto &rep = model.representation;
    std::ostringstream out;
    out << model_magic << '\n';
    out << "format_version " << model.format_version << '\n';
    out << "n_features " << model.n_features << '\n';
    out << "K " << model.K() << '\n';
    out << "L " << model.L() << '\n';
    out << "projection " << to_string(rep.landmarks.projection().kind) << ' '
        << fmt_real(rep.landmarks.projection().gamma) << '\n';
    out << "cost " << fmt_real(model.cost) << '\n';
    out << "per_feature_std ";
    write_row(out, rep.scaling.per_feature_std);
    out << "centroids\n";
    for (const auto &c : rep.clusters.centroids) {
        write_row(out, c);
    }
    out << "inertia " << fmt_real(rep.clusters.inertia) << '\n';
    out << "landmarks\n";
    for (const auto &l : rep.landmarks.landmarks()) {
        write_row(out, l);
    }
    out << "classes " << model.classes.size();
    for (int c : model.classes) {
        out << ' ' << c;
    }
    out << '\n';
    out << "per_class " << model.per_class.size() << '\n';
    for (const auto &cw : model.per_class) {
        out << "class " << cw.label << '\n';
        out << "b " << fmt_real(cw.weights.b) << '\n';
        out << "theta\n";
        for (std::size_t k = 0; k < cw.weights.K; ++k) {
            const auto row = cw.weights.row(k);
            write_row(out, std::vector<double>(row.begin(), row.end()));
        }
    }
    out << "end\n";
    return out.str();
}

L3Model load_model(std::string_view document) {
    Reader r(document);
    r.expect(model_magic);
    r.expect("format_version");
    const long long version = r.integer();
    if (version != L3Model::current_format_version) {
        throw unsupported_version_error("unsupported model format_version " + std::to_string(version) +
                                        " (this build reads version " +
                                        std::to_string(L3Model::current_format_version) + ")");
    }
    r.expect("n_features");
    const std::size_t n = r.count("n_features");
    r.expect("K");
    const std::size_t K = r.count("K");
    r.expect("L");
    const std::size_t L = r.count("L");
    r.expect("projection");
    const auto kind_tok = r.token();
    Projection projection;
    if (kind_tok == "linear") {
        projection.kind = ProjectionKind::Linear;
    } else if (kind_tok == "rbf") {
        projection.kind = ProjectionKind::Rbf;
    } else {
        throw model_format_error("unknown projection '" + std::string(kind_tok) + "'");
    }
    projection.gamma = r.real();
    r.expect("cost");
    const double cost = r.real();
    if (!(cost > 0.0)) {
        throw model_format_error("cost must be positive");
    }

    r.expect("per_feature_std");
    ScalingParams scaling{r.reals(n)};
    for (double s : scaling.per_feature_std) {
        if (s < 0.0) {
            throw model_format_error("negative standard deviation");
        }
    }
    r.expect("centroids");
    ClusterModel clusters;
    for (std::size_t k = 0; k < K; ++k) {
        clusters.centroids.push_back(r.reals(n));
    }
    // A centroid matrix with the wrong row count shows up as a misplaced keyword here.
    r.expect("inertia");
    clusters.inertia = r.real();
    r.expect("landmarks");
    DenseMatrix landmarks;
    for (std::size_t p = 0; p < L; ++p) {
        landmarks.push_back(r.reals(n));
    }
    r.expect("classes");
    const std::size_t n_classes = r.count("class count");
    std::vector<int> classes;
    for (std::size_t i = 0; i < n_classes; ++i) {
        classes.push_back(static_cast<int>(r.integer()));
    }
    if (n_classes < 2 || !std::is_sorted(classes.begin(), classes.end()) ||
        std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
        throw model_format_error("class list must hold at least two distinct sorted labels");
    }
    r.expect("per_class");
    const std::size_t n_entries = r.count("per_class count");
    if (n_entries != (n_classes == 2 ? 1 : n_classes)) {
        throw model_format_error("per_class count does not match the class list");
    }
    std::vector<ClassWeights> per_class;
    for (std::size_t e = 0; e < n_entries; ++e) {
        r.expect("class");
        ClassWeights cw;
        cw.label = static_cast<int>(r.integer());
        r.expect("b");
        cw.weights = WeightVector(K, L);
        cw.weights.b = r.real();
        r.expect("theta");
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t p = 0; p < L; ++p) {
                cw.weights.at(k, p) = r.real();
            }
        }
        per_class.push_back(std::move(cw));
    }
    const auto trailer = r.token();
    if (trailer != "end") {
        throw model_format_error("shape mismatch: unexpected '" + std::string(trailer) +
                                 "' where the document should end (theta has more rows than K?)");
    }
    if (!r.at_end()) {
        throw model_format_error("trailing content after 'end'");
    }
    const int expected_first = n_classes == 2 ? classes.back() : classes.front();
    if (per_class.front().label != expected_first) {
        throw model_format_error("per_class labels do not match the class list");
    }
    for (std::size_t e = 1; e < per_class.size(); ++e) {
        if (per_class[e].label != classes[e]) {
            throw model_format_error("per_class labels do not match the class list");
        }
    }
    try {
        LandmarkSet ls(std::move(landmarks), projection);
        return L3Model{static_cast<int>(version), n, cost, Representation{std::move(scaling), std::move(clusters), std::move(ls)},
                       std::move(classes), std::move(per_class)};
    } catch (const l3svm_error &e) {
        throw model_format_error(std::string("invalid landmarks: ") + e.what());
    }
}

void save_model_file(const std::string &path, const L3Model &model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw l3svm_error("cannot write " + path);
    }
    out << save_model(model);
    if (!out) {
        throw l3svm_error("write failed for " + path);
    }
}

L3Model load_model_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw l3svm_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

}  // namespace l3svm
