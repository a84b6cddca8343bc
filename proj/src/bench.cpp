#include "l3svm/bench.hpp"

#include "l3svm/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace l3svm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

BenchResult run_once(const Dataset &train_set, const Dataset &test_set, L3Config cfg, const BenchOptions &opts,
                     const std::string &name) {
    if (opts.cost) {
        cfg.c = *opts.cost;
    } else {
        cfg = cross_validate(train_set, cfg, opts.folds, CvGrid::standard()).best;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const L3Model model = train(train_set, cfg);
    const double train_s = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const double acc = evaluate(model, test_set);
    const double test_s = seconds_since(t1);

    BenchResult r;
    r.dataset = name;
    r.seed = cfg.seed;
    r.K = model.K();
    r.L = model.L();
    r.projection = to_string(cfg.projection.kind);
    r.cost = cfg.c;
    r.accuracy = acc;
    r.train_s = train_s;
    r.test_s = test_s;
    r.model_bytes = save_model(model).size();
    return r;
}

}  // namespace

std::vector<BenchResult> run_bench(const Dataset &train_set, const Dataset &test_set, const BenchOptions &opts) {
    if (test_set.n_features() != train_set.n_features()) {
        throw dimension_error("training and test sets differ in dimension");
    }
    if (opts.seeds.empty()) {
        throw invalid_argument_error("bench needs at least one seed");
    }
    std::vector<std::size_t> landmark_counts = opts.landmarks;
    if (landmark_counts.empty()) {
        landmark_counts.push_back(train_set.n_features());
    }
    std::vector<BenchResult> out;
    for (const std::size_t L : landmark_counts) {
        for (const auto seed : opts.seeds) {
            L3Config cfg;
            cfg.K = opts.K;
            cfg.L = L;
            cfg.landmark_method = opts.landmark_method;
            cfg.projection = opts.projection;
            cfg.seed = seed;
            cfg.tol = opts.tol;
            out.push_back(run_once(train_set, test_set, cfg, opts, opts.name));
        }
    }
    if (opts.baseline) {
        for (const auto seed : opts.seeds) {
            L3Config cfg;
            cfg.K = 1;
            cfg.landmark_method = LandmarkMethod::StandardBasis;
            cfg.seed = seed;
            cfg.tol = opts.tol;
            out.push_back(run_once(train_set, test_set, cfg, opts, opts.name + baseline_suffix));
        }
    }
    return out;
}

void write_bench_csv(std::ostream &out, const std::vector<BenchResult> &results) {
    out << bench_csv_header << '\n';
    char buf[512];
    for (const auto &r : results) {
        std::snprintf(buf, sizeof buf, "%s,%llu,%zu,%zu,%s,%.17g,%.17g,%.17g,%.17g\n", r.dataset.c_str(),
                      static_cast<unsigned long long>(r.seed), r.K, r.L, r.projection.c_str(), r.cost, r.accuracy,
                      r.train_s, r.test_s);
        out << buf;
    }
}

std::vector<BenchResult> parse_bench_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw parse_error(1, "missing bench CSV header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != bench_csv_header) {
        throw parse_error(1, "unexpected bench CSV header");
    }
    std::vector<BenchResult> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 9) {
            throw parse_error(line_no, "expected 9 columns");
        }
        try {
            BenchResult r;
            r.dataset = cells[0];
            r.seed = std::stoull(cells[1]);
            r.K = std::stoul(cells[2]);
            r.L = std::stoul(cells[3]);
            r.projection = cells[4];
            r.cost = std::stod(cells[5]);
            r.accuracy = std::stod(cells[6]);
            r.train_s = std::stod(cells[7]);
            r.test_s = std::stod(cells[8]);
            out.push_back(std::move(r));
        } catch (const std::logic_error &) {
            throw parse_error(line_no, "non-numeric cell");
        }
    }
    return out;
}

std::vector<BenchSummary> summarize(const std::vector<BenchResult> &results) {
    std::vector<BenchSummary> out;
    std::vector<std::vector<const BenchResult *>> groups;
    for (const auto &r : results) {
        std::size_t g = 0;
        for (; g < out.size(); ++g) {
            if (out[g].dataset == r.dataset && out[g].K == r.K && out[g].L == r.L) {
                break;
            }
        }
        if (g == out.size()) {
            out.push_back(BenchSummary{r.dataset, r.K, r.L, 0, 0.0, 0.0, 0.0, 0.0});
            groups.emplace_back();
        }
        groups[g].push_back(&r);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        auto &s = out[g];
        s.runs = groups[g].size();
        const double n = static_cast<double>(s.runs);
        for (const auto *r : groups[g]) {
            s.mean_accuracy += r->accuracy / n;
            s.mean_train_s += r->train_s / n;
            s.mean_test_s += r->test_s / n;
        }
        double var = 0.0;
        for (const auto *r : groups[g]) {
            var += (r->accuracy - s.mean_accuracy) * (r->accuracy - s.mean_accuracy);
        }
        s.std_accuracy = std::sqrt(var / n);
    }
    return out;
}

std::string format_bench_table(const std::vector<BenchResult> &results) {
    std::ostringstream out;
    char line[512];
    std::snprintf(line, sizeof line, "%-28s %6s %5s %5s %10s %10s %10s %10s %12s\n", "dataset", "seed", "K", "L",
                  "cost", "acc(%)", "train_s", "test_s", "model_bytes");
    out << line;
    for (const auto &r : results) {
        std::snprintf(line, sizeof line, "%-28s %6llu %5zu %5zu %10g %10.2f %10.4f %10.4f %12zu\n",
                      r.dataset.c_str(), static_cast<unsigned long long>(r.seed), r.K, r.L, r.cost,
                      100.0 * r.accuracy, r.train_s, r.test_s, r.model_bytes);
        out << line;
    }
    out << '\n';
    std::snprintf(line, sizeof line, "%-28s %5s %5s %5s %18s %10s %10s\n", "summary", "K", "L", "runs",
                  "acc(%) mean+-std", "train_s", "test_s");
    out << line;
    for (const auto &s : summarize(results)) {
        std::snprintf(line, sizeof line, "%-28s %5zu %5zu %5zu %10.2f +- %5.2f %10.4f %10.4f\n", s.dataset.c_str(),
                      s.K, s.L, s.runs, 100.0 * s.mean_accuracy, 100.0 * s.std_accuracy, s.mean_train_s,
                      s.mean_test_s);
        out << line;
    }
    return out.str();
}

}  // namespace l3svm
