#include "l3svm/bounds.hpp"

#include "l3svm/errors.hpp"
#include "l3svm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>

namespace l3svm {

void BoundInputs::validate() const {
    if (!(c > 0.0) || L == 0 || m == 0 || !(R_x > 0.0)) {
        throw invalid_argument_error("bound inputs must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw invalid_argument_error("delta must lie in (0, 1)");
    }
}

double compute_M(ProjectionKind projection, double R_x) {
    if (projection == ProjectionKind::Rbf) {
        return 1.0;
    }
    return std::max(R_x * R_x, 1.0);
}

double stability_constant(double c, std::size_t L, double M, std::size_t m) {
    return c * static_cast<double>(L) * M * M / static_cast<double>(m);
}

double loss_bound_E(double c, std::size_t L, double M) { return 1.0 + 2.0 * c * std::sqrt(static_cast<double>(L)) * M; }

double hinge_loss_cap(double c, std::size_t L, double M) {
    return 1.0 + std::sqrt(2.0 * c) * std::sqrt(static_cast<double>(L)) * M;
}

double generalization_bound(double emp_risk, double c, std::size_t L, double M, std::size_t m, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw invalid_argument_error("delta must lie in (0, 1)");
    }
    if (m == 0) {
        throw invalid_argument_error("m must be positive");
    }
    const double md = static_cast<double>(m);
    const double stab = stability_constant(c, L, M, m);
    const double slack = (2.0 * c * static_cast<double>(L) * M * M / md + loss_bound_E(c, L, M)) *
                         std::sqrt(std::log(1.0 / delta) / (2.0 * md));
    return emp_risk + stab + slack;
}

BoundReport bound_report(const BoundInputs &in, double emp_risk) {
    in.validate();
    BoundReport r;
    r.inputs = in;
    r.M = compute_M(in.projection, in.R_x);
    r.stability = stability_constant(in.c, in.L, r.M, in.m);
    r.E = loss_bound_E(in.c, in.L, r.M);
    r.empirical_risk = emp_risk;
    r.bound = generalization_bound(emp_risk, in.c, in.L, r.M, in.m, in.delta);
    return r;
}

double max_input_norm(const Dataset &d, const ScalingParams &scaling) {
    double best = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = apply_scaling(d.dense(i), scaling);
        double s = 0.0;
        for (double v : x) {
            s += v * v;
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

std::vector<ClassBound> model_bounds(const L3Model &model, const Dataset &d, double c, double delta) {
    if (d.n_features() != model.n_features) {
        throw dimension_error("dataset has " + std::to_string(d.n_features()) + " features, model expects " +
                              std::to_string(model.n_features));
    }
    const auto &rep = model.representation;
    const auto features = rep.encode(d);
    BoundInputs in;
    in.c = c;
    in.L = model.L();
    in.m = d.size();
    in.delta = delta;
    in.projection = rep.landmarks.projection().kind;
    // A zero norm bound would make the linear M degenerate; max(R^2, 1) is unaffected below 1.
    in.R_x = std::max(max_input_norm(d, rep.scaling), 1e-300);

    std::vector<ClassBound> out;
    for (const auto &cw : model.per_class) {
        const auto y = one_vs_all_labels(d, cw.label);
        double risk = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            risk += hinge_loss(y[i], cw.weights.score(features[i]));
        }
        risk /= static_cast<double>(features.size());
        out.push_back({cw.label, bound_report(in, risk)});
    }
    return out;
}

std::vector<ClassBound> model_bounds(const L3Model &model, const Dataset &d, double delta) {
    return model_bounds(model, d, model.cost, delta);
}

namespace {

std::string fmt_real(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::string format_bound_document(const std::vector<ClassBound> &bounds) {
    std::ostringstream out;
    out << "l3svm-bound\n";
    out << "format_version 1\n";
    out << "entries " << bounds.size() << '\n';
    for (const auto &cb : bounds) {
        const auto &r = cb.report;
        out << "class " << cb.label << '\n';
        out << "c " << fmt_real(r.inputs.c) << '\n';
        out << "L " << r.inputs.L << '\n';
        out << "m " << r.inputs.m << '\n';
        out << "delta " << fmt_real(r.inputs.delta) << '\n';
        out << "projection " << to_string(r.inputs.projection) << '\n';
        out << "R_x " << fmt_real(r.inputs.R_x) << '\n';
        out << "M " << fmt_real(r.M) << '\n';
        out << "stability " << fmt_real(r.stability) << '\n';
        out << "E " << fmt_real(r.E) << '\n';
        out << "empirical_risk " << fmt_real(r.empirical_risk) << '\n';
        out << "bound " << fmt_real(r.bound) << '\n';
    }
    out << "end\n";
    return out.str();
}

std::string format_bound_table(const std::vector<ClassBound> &bounds) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%8s %10s %12s %14s %14s %14s %14s\n", "class", "R_x", "M", "stability", "E",
                  "emp_risk", "bound");
    out << line;
    for (const auto &cb : bounds) {
        const auto &r = cb.report;
        std::snprintf(line, sizeof line, "%8d %10.4g %12.6g %14.6g %14.6g %14.6g %14.6g\n", cb.label, r.inputs.R_x,
                      r.M, r.stability, r.E, r.empirical_risk, r.bound);
        out << line;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Stability audit

AuditSource AuditSource::generator(std::function<Dataset(std::size_t, std::uint64_t)> gen) {
    return AuditSource{std::move(gen), {}};
}

AuditSource AuditSource::pool(Dataset held_out) {
    auto shared = std::make_shared<const Dataset>(std::move(held_out));
    auto draw = [shared](std::size_t count, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, shared->size() - 1);
        std::vector<std::size_t> idx(count);
        for (auto &i : idx) {
            i = pick(rng);
        }
        return shared->subset(idx);
    };
    return AuditSource{std::move(draw), {}};
}

namespace {

double norm_of(const DenseVector &x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

}  // namespace

AuditReport stability_audit(const Dataset &d, const L3Config &cfg, const AuditSource &source, std::size_t trials,
                            std::size_t probes, std::uint64_t seed) {
    if (!source.draw) {
        throw invalid_argument_error("stability audit on real data needs a held-out pool");
    }
    if (d.classes().size() != 2) {
        throw invalid_argument_error("stability audit expects a binary problem");
    }
    if (probes == 0) {
        throw invalid_argument_error("stability audit needs at least one probe point");
    }
    const int positive = d.classes().back();
    const auto to_pm = [positive](int label) { return label == positive ? 1 : -1; };

    const Representation rep = fit_representation(d, cfg);
    const SolverConfig scfg = cfg.solver();
    const std::size_t m = d.size();

    auto features = rep.encode(d);
    auto labels = one_vs_all_labels(d, positive);
    double R_x = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        R_x = std::max(R_x, norm_of(rep.standardize(d.dense(i))));
    }

    std::mt19937_64 rng(seed);
    const Dataset probe_set = source.draw(probes, rng());
    if (probe_set.n_features() != d.n_features()) {
        throw dimension_error("probe points do not match the training dimension");
    }
    std::vector<BlockFeature> probe_features;
    std::vector<int> probe_labels;
    for (std::size_t q = 0; q < probe_set.size(); ++q) {
        const auto raw = probe_set.dense(q);
        R_x = std::max(R_x, norm_of(rep.standardize(raw)));
        probe_features.push_back(rep.encode(raw));
        probe_labels.push_back(to_pm(probe_set[q].label));
    }

    AuditReport report;
    report.trials = trials;
    report.probes = probe_set.size();

    const auto record_solution = [&](const WeightVector &w, std::span<const BlockFeature> feats,
                                     std::span<const int> ys) {
        report.max_weight_squared_norm = std::max(report.max_weight_squared_norm, w.squared_norm());
        for (std::size_t i = 0; i < feats.size(); ++i) {
            report.max_training_hinge = std::max(report.max_training_hinge, hinge_loss(ys[i], w.score(feats[i])));
        }
    };

    const auto base = solve_primal_dcd(features, labels, scfg);
    record_solution(base.weights, features, labels);
    std::vector<double> base_loss(probe_features.size());
    for (std::size_t q = 0; q < probe_features.size(); ++q) {
        base_loss[q] = hinge_loss(probe_labels[q], base.weights.score(probe_features[q]));
    }

    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t i = pick(rng);
        const std::uint64_t trial_seed = rng();
        Instance fresh;
        std::size_t fresh_dim = d.n_features();
        if (source.replace) {
            fresh = source.replace(d, i, trial_seed);
        } else {
            const Dataset one = source.draw(1, trial_seed);
            fresh = one[0];
            fresh_dim = one.n_features();
        }
        if (fresh_dim != d.n_features()) {
            throw dimension_error("replacement point does not match the training dimension");
        }
        const auto raw = to_dense(fresh, d.n_features());
        R_x = std::max(R_x, norm_of(rep.standardize(raw)));

        auto perturbed = features;
        auto perturbed_labels = labels;
        perturbed[i] = rep.encode(raw);
        perturbed_labels[i] = to_pm(fresh.label);
        const auto sol = solve_primal_dcd(perturbed, perturbed_labels, scfg);
        record_solution(sol.weights, perturbed, perturbed_labels);
        for (std::size_t q = 0; q < probe_features.size(); ++q) {
            const double loss = hinge_loss(probe_labels[q], sol.weights.score(probe_features[q]));
            report.max_loss_difference = std::max(report.max_loss_difference, std::abs(loss - base_loss[q]));
        }
    }

    report.R_x = R_x;
    report.M = compute_M(rep.landmarks.projection().kind, R_x);
    report.cap = stability_constant(cfg.c, rep.landmarks.L(), report.M, m);
    report.hinge_cap = hinge_loss_cap(cfg.c, rep.landmarks.L(), report.M);
    return report;
}

}  // namespace l3svm
