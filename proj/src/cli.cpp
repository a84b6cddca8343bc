#include "l3svm/cli.hpp"

#include "l3svm/bench.hpp"
#include "l3svm/bounds.hpp"
#include "l3svm/dataset.hpp"
#include "l3svm/errors.hpp"
#include "l3svm/model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace l3svm {

namespace {

/// Thrown for flag combinations CLI11 cannot check on its own.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(const char *format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

const std::map<std::string, LandmarkMethod> landmark_methods{{"random", LandmarkMethod::Random},
                                                              {"pca", LandmarkMethod::Pca}};
const std::map<std::string, ProjectionKind> projections{{"linear", ProjectionKind::Linear},
                                                         {"rbf", ProjectionKind::Rbf}};

const auto open_interval_01 = CLI::Validator(
    [](std::string &s) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (const std::exception &) {
            return "not a number: " + s;
        }
        if (!(v > 0.0 && v < 1.0)) {
            return "value must lie strictly between 0 and 1";
        }
        return {};
    },
    "(0,1)");

const auto positive_real = CLI::Validator(
    [](std::string &s) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (const std::exception &) {
            return "not a number: " + s;
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
            return "value must be positive";
        }
        return {};
    },
    "POSITIVE");

/// Options shared by train, cv and bench.
struct ModelFlags {
    std::size_t K = 1;
    std::size_t L = 0;
    std::string landmark_method = "random";
    std::string projection = "linear";
    double gamma = 1.0;
    double cost = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-4;
    std::size_t max_epochs = 1000;
    bool no_standardize = false;

    void add_shape(CLI::App &app) {
        app.add_option("--clusters,-K", K, "number of k-means clusters")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
        app.add_option("--landmarks,-L", L, "number of landmarks (default: input dimension)")
            ->check(CLI::Range(std::size_t{1}, SIZE_MAX));
        app.add_option("--landmark-method", landmark_method, "random|pca")
            ->check(CLI::IsMember({"random", "pca"}));
        app.add_option("--projection", projection, "linear|rbf")->check(CLI::IsMember({"linear", "rbf"}));
        app.add_option("--gamma", gamma, "RBF width")->check(positive_real);
        app.add_option("--seed", seed, "random seed");
        app.add_option("--tol", tol, "solver tolerance")->check(positive_real);
        app.add_option("--max-epochs", max_epochs, "solver epoch limit")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
        app.add_flag("--no-standardize", no_standardize, "skip per-feature std rescaling");
    }

    [[nodiscard]] L3Config config() const {
        L3Config cfg;
        cfg.K = K;
        cfg.L = L;
        cfg.landmark_method = landmark_methods.at(landmark_method);
        cfg.projection = projections.at(projection) == ProjectionKind::Rbf ? Projection::rbf(gamma) : Projection::linear();
        cfg.c = cost;
        cfg.seed = seed;
        cfg.tol = tol;
        cfg.max_epochs = max_epochs;
        cfg.standardize = !no_standardize;
        return cfg;
    }
};

std::vector<double> parse_real_list(const std::string &text, const char *what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception &) {
            throw usage_error(std::string("bad value '") + cell + "' in " + what);
        }
        if (used != cell.size() || !(v > 0.0) || !std::isfinite(v)) {
            throw usage_error(std::string("bad value '") + cell + "' in " + what);
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw usage_error(std::string("empty ") + what);
    }
    return out;
}

/// Reads `path` and widens it to `n` features when it has fewer; more is a dimension error.
Dataset read_for_model(const std::string &path, std::size_t n) {
    Dataset d = read_libsvm_file(path);
    if (d.n_features() > n) {
        throw dimension_error("data has " + std::to_string(d.n_features()) + " features, model expects " +
                              std::to_string(n));
    }
    if (d.n_features() < n) {
        return Dataset(d.instances(), n);
    }
    return d;
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw l3svm_error("cannot write " + path);
    }
    f << text;
    if (!f) {
        throw l3svm_error("write failed for " + path);
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_cv_report(std::ostream &out, const CVReport &report, bool rbf) {
    char line[256];
    if (rbf) {
        std::snprintf(line, sizeof line, "%12s %12s %12s %12s\n", "cost", "gamma", "mean_acc", "std_acc");
    } else {
        std::snprintf(line, sizeof line, "%12s %12s %12s\n", "cost", "mean_acc", "std_acc");
    }
    out << line;
    for (const auto &p : report.points) {
        if (rbf) {
            std::snprintf(line, sizeof line, "%12g %12g %12.6f %12.6f\n", p.c, p.gamma, p.mean_accuracy,
                          p.std_accuracy);
        } else {
            std::snprintf(line, sizeof line, "%12g %12.6f %12.6f\n", p.c, p.mean_accuracy, p.std_accuracy);
        }
        out << line;
    }
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Locally linear landmark SVMs: training, evaluation and bounds", "l3svm"};
    app.require_subcommand(1);

    // train
    auto *train_cmd = app.add_subcommand("train", "train a model");
    ModelFlags train_flags;
    std::string train_data;
    std::string train_model;
    train_cmd->add_option("--data", train_data, "training data (LIBSVM format)")->required();
    train_cmd->add_option("--model", train_model, "output model path")->required();
    train_cmd->add_option("--cost,-c", train_flags.cost, "SVM cost c")->check(positive_real);
    train_flags.add_shape(*train_cmd);

    // predict / eval
    std::string pred_model, pred_data, pred_out;
    auto *predict_cmd = app.add_subcommand("predict", "write one predicted label per line");
    predict_cmd->add_option("--model", pred_model)->required();
    predict_cmd->add_option("--data", pred_data)->required();
    predict_cmd->add_option("--out", pred_out, "output path (default: standard output)");
    auto *eval_cmd = app.add_subcommand("eval", "print the accuracy of a model on labeled data");
    eval_cmd->add_option("--model", pred_model)->required();
    eval_cmd->add_option("--data", pred_data)->required();

    // cv
    auto *cv_cmd = app.add_subcommand("cv", "grid-search c (and gamma) by k-fold cross-validation");
    ModelFlags cv_flags;
    std::string cv_data, cv_model, cv_grid, cv_gamma_grid;
    std::size_t cv_folds = 5;
    cv_cmd->add_option("--data", cv_data)->required();
    cv_cmd->add_option("--folds", cv_folds, "number of folds")->check(CLI::Range(std::size_t{2}, SIZE_MAX));
    cv_cmd->add_option("--grid", cv_grid, "comma-separated cost values");
    cv_cmd->add_option("--gamma-grid", cv_gamma_grid, "comma-separated gamma values (rbf)");
    cv_cmd->add_option("--model", cv_model, "retrain on all data with the selected values and save here");
    cv_flags.add_shape(*cv_cmd);

    // synth
    auto *synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string synth_kind, synth_out;
    std::size_t synth_n = 400;
    std::uint64_t synth_seed = 0;
    synth_cmd->add_option("distribution", synth_kind, "xor|swissroll")
        ->required()
        ->check(CLI::IsMember({"xor", "swissroll"}));
    synth_cmd->add_option("--n", synth_n, "number of points")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--out", synth_out)->required();

    // bound
    auto *bound_cmd = app.add_subcommand("bound", "stability and generalization bound of a trained model");
    std::string bound_model, bound_data, bound_out;
    double bound_delta = 0.05;
    std::optional<double> bound_cost;
    bound_cmd->add_option("--model", bound_model)->required();
    bound_cmd->add_option("--data", bound_data, "the training sample")->required();
    bound_cmd->add_option("--delta", bound_delta, "confidence parameter")->check(open_interval_01);
    bound_cmd->add_option("--cost,-c", bound_cost, "override the cost stored in the model")->check(positive_real);
    bound_cmd->add_option("--out", bound_out, "also write a key/value report here");

    // bench
    auto *bench_cmd = app.add_subcommand("bench", "train/test runs over several seeds with a linear baseline");
    std::string bench_train, bench_test, bench_name = "dataset", bench_csv, bench_projection = "linear",
                                        bench_method = "random";
    std::size_t bench_K = 1, bench_folds = 5;
    std::vector<std::size_t> bench_L;
    std::vector<std::uint64_t> bench_seeds{1, 2, 3, 4, 5};
    std::optional<double> bench_cost;
    double bench_gamma = 1.0, bench_tol = 1e-4;
    bool bench_no_baseline = false;
    bench_cmd->add_option("--data-train", bench_train)->required();
    bench_cmd->add_option("--data-test", bench_test)->required();
    bench_cmd->add_option("--name", bench_name, "dataset name for the report");
    bench_cmd->add_option("--clusters,-K", bench_K)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    bench_cmd->add_option("--landmarks,-L", bench_L, "one or more landmark counts (default: input dimension)")
        ->delimiter(',')
        ->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    bench_cmd->add_option("--landmark-method", bench_method)->check(CLI::IsMember({"random", "pca"}));
    bench_cmd->add_option("--seeds", bench_seeds, "seeds, comma-separated")->delimiter(',');
    bench_cmd->add_option("--cost,-c", bench_cost, "fixed cost (default: chosen by cross-validation)")
        ->check(positive_real);
    bench_cmd->add_option("--folds", bench_folds)->check(CLI::Range(std::size_t{2}, SIZE_MAX));
    bench_cmd->add_option("--projection", bench_projection)->check(CLI::IsMember({"linear", "rbf"}));
    bench_cmd->add_option("--gamma", bench_gamma)->check(positive_real);
    bench_cmd->add_option("--tol", bench_tol)->check(positive_real);
    bench_cmd->add_option("--out", bench_csv, "CSV output path");
    bench_cmd->add_flag("--no-baseline", bench_no_baseline, "skip the linear-SVM baseline");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*train_cmd) {
            const L3Config cfg = train_flags.config();
            const Dataset d = read_libsvm_file(train_data);
            const auto t0 = std::chrono::steady_clock::now();
            const TrainResult result = train_detailed(d, cfg);
            const double secs = seconds_since(t0);
            save_model_file(train_model, result.model);
            std::size_t sv = 0;
            double objective = 0.0;
            for (const auto &s : result.stats) {
                sv += s.support_vectors;
                objective += s.primal_objective;
            }
            out << "m=" << d.size() << '\n';
            out << "n=" << d.n_features() << '\n';
            out << "K=" << result.model.K() << '\n';
            out << "L=" << result.model.L() << '\n';
            out << "support_vectors=" << sv << '\n';
            out << "objective=" << fmt("%.10g", objective) << '\n';
            out << "train_seconds=" << fmt("%.6f", secs) << '\n';
            return exit_ok;
        }
        if (*predict_cmd || *eval_cmd) {
            const L3Model model = load_model_file(pred_model);
            const Dataset d = read_for_model(pred_data, model.n_features);
            if (*eval_cmd) {
                out << "accuracy=" << fmt("%.6f", evaluate(model, d)) << '\n';
                return exit_ok;
            }
            std::ostringstream labels;
            for (std::size_t i = 0; i < d.size(); ++i) {
                labels << predict(model, d.dense(i)) << '\n';
            }
            if (pred_out.empty()) {
                out << labels.str();
            } else {
                write_text(pred_out, labels.str());
            }
            return exit_ok;
        }
        if (*cv_cmd) {
            CvGrid grid = CvGrid::standard();
            if (!cv_grid.empty()) {
                grid.costs = parse_real_list(cv_grid, "--grid");
            }
            if (!cv_gamma_grid.empty()) {
                grid.gammas = parse_real_list(cv_gamma_grid, "--gamma-grid");
            }
            const L3Config base = cv_flags.config();
            const Dataset d = read_libsvm_file(cv_data);
            const CvResult res = cross_validate(d, base, cv_folds, grid);
            const bool rbf = base.projection.kind == ProjectionKind::Rbf;
            print_cv_report(out, res.report, rbf);
            const auto &best = res.report.points.at(res.report.selected);
            out << "selected cost=" << fmt("%g", best.c);
            if (rbf) {
                out << " gamma=" << fmt("%g", best.gamma);
            }
            out << " mean_accuracy=" << fmt("%.6f", best.mean_accuracy) << " (" << res.report.selection_rule << ")\n";
            if (!cv_model.empty()) {
                save_model_file(cv_model, train(d, res.best));
            }
            return exit_ok;
        }
        if (*synth_cmd) {
            const Dataset d = synth_kind == "xor" ? gen_xor(synth_n, synth_seed) : gen_swissroll(synth_n, synth_seed);
            write_libsvm_file(synth_out, d);
            out << "wrote " << d.size() << " points to " << synth_out << '\n';
            return exit_ok;
        }
        if (*bound_cmd) {
            const L3Model model = load_model_file(bound_model);
            const Dataset d = read_for_model(bound_data, model.n_features);
            const auto bounds = bound_cost ? model_bounds(model, d, *bound_cost, bound_delta)
                                           : model_bounds(model, d, bound_delta);
            for (const auto &cb : bounds) {
                const auto &r = cb.report;
                out << "class=" << cb.label << '\n';
                out << "M=" << fmt("%.10g", r.M) << '\n';
                out << "stability=" << fmt("%.10g", r.stability) << '\n';
                out << "E=" << fmt("%.10g", r.E) << '\n';
                out << "empirical_risk=" << fmt("%.10g", r.empirical_risk) << '\n';
                out << "bound=" << fmt("%.10g", r.bound) << '\n';
            }
            if (!bound_out.empty()) {
                write_text(bound_out, format_bound_document(bounds));
            }
            return exit_ok;
        }
        if (*bench_cmd) {
            Dataset tr = read_libsvm_file(bench_train);
            Dataset te = read_libsvm_file(bench_test);
            const std::size_t n = std::max(tr.n_features(), te.n_features());
            if (tr.n_features() < n) {
                tr = Dataset(tr.instances(), n);
            }
            if (te.n_features() < n) {
                te = Dataset(te.instances(), n);
            }
            BenchOptions opts;
            opts.name = bench_name;
            opts.K = bench_K;
            opts.landmarks = bench_L;
            opts.seeds = bench_seeds;
            opts.cost = bench_cost;
            opts.folds = bench_folds;
            opts.projection = bench_projection == "rbf" ? Projection::rbf(bench_gamma) : Projection::linear();
            opts.landmark_method = landmark_methods.at(bench_method);
            opts.baseline = !bench_no_baseline;
            opts.tol = bench_tol;
            const auto results = run_bench(tr, te, opts);
            out << format_bench_table(results);
            if (!bench_csv.empty()) {
                std::ostringstream csv;
                write_bench_csv(csv, results);
                write_text(bench_csv, csv.str());
            }
            return exit_ok;
        }
    } catch (const usage_error &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

}  // namespace l3svm
