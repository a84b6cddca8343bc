#include "l3svm/solver.hpp"

#include "l3svm/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace l3svm {

void SolverConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw invalid_argument_error("cost c must be positive");
    }
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw invalid_argument_error("solver tolerance must be positive");
    }
    if (max_epochs < 1) {
        throw invalid_argument_error("max_epochs must be >= 1");
    }
}

double WeightVector::margin(const BlockFeature &phi) const {
    assert(phi.cluster < K && phi.block.size() == L);
    const double *row_ptr = theta.data() + phi.cluster * L;
    double s = 0.0;
    for (std::size_t p = 0; p < L; ++p) {
        s += row_ptr[p] * phi.block[p];
    }
    return s;
}

double WeightVector::theta_squared_norm() const {
    return std::inner_product(theta.begin(), theta.end(), theta.begin(), 0.0);
}

double hinge_loss(double y, double score) { return std::max(0.0, 1.0 - y * score); }

namespace {

void check_problem(std::span<const BlockFeature> features, std::span<const int> labels) {
    if (features.empty()) {
        throw invalid_argument_error("solver needs at least one instance");
    }
    if (features.size() != labels.size()) {
        throw dimension_error("features and labels differ in length");
    }
    const std::size_t K = features.front().K;
    const std::size_t L = features.front().L();
    if (K == 0 || L == 0) {
        throw dimension_error("empty block feature");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto &phi = features[i];
        if (phi.K != K || phi.L() != L || phi.cluster >= K) {
            throw dimension_error("inconsistent block feature shape at instance " + std::to_string(i));
        }
        for (double v : phi.block) {
            if (!std::isfinite(v)) {
                throw invalid_argument_error("non-finite feature at instance " + std::to_string(i));
            }
        }
        if (labels[i] != 1 && labels[i] != -1) {
            throw invalid_argument_error("labels must be +1 or -1");
        }
    }
}

/// Bias from the KKT conditions given the bias-free outputs s_i = theta_{k_i} . mu(x_i).
/// Averages over free multipliers; otherwise takes the midpoint of the feasible interval.
double recover_bias(std::span<const double> alpha, std::span<const double> s, std::span<const int> labels,
                    double upper, std::size_t &free_count) {
    // With G_i = y_i s_i - 1 (gradient of the minimization form), y_i G_i = s_i - y_i and b = -rho.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    free_count = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double yG = s[i] - labels[i];
        const bool at_upper = alpha[i] >= upper;
        const bool at_lower = alpha[i] <= 0.0;
        if (at_upper) {
            if (labels[i] == -1) {
                ub = std::min(ub, yG);
            } else {
                lb = std::max(lb, yG);
            }
        } else if (at_lower) {
            if (labels[i] == 1) {
                ub = std::min(ub, yG);
            } else {
                lb = std::max(lb, yG);
            }
        } else {
            ++free_count;
            sum_free += yG;
        }
    }
    double rho = 0.0;
    if (free_count > 0) {
        rho = sum_free / static_cast<double>(free_count);
    } else if (std::isfinite(ub) && std::isfinite(lb)) {
        rho = (ub + lb) / 2.0;
    } else if (std::isfinite(ub)) {
        rho = ub;
    } else if (std::isfinite(lb)) {
        rho = lb;
    }
    return -rho;
}

}  // namespace

PrimalSolution solve_primal_dcd(std::span<const BlockFeature> features, std::span<const int> labels,
                                const SolverConfig &cfg) {
    cfg.validate();
    check_problem(features, labels);
    const std::size_t m = features.size();
    const std::size_t K = features.front().K;
    const std::size_t L = features.front().L();
    const double upper = cfg.c / static_cast<double>(m);

    WeightVector w(K, L);
    std::vector<double> alpha(m, 0.0);
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] = features[i].squared_norm();  // >= 1 thanks to the bias slot
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.shuffle_seed);

    SolveStats stats;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_violation = 0.0;
        for (const std::size_t i : order) {
            const auto &phi = features[i];
            const double y = labels[i];
            const double G = y * w.score(phi) - 1.0;
            double pg = G;
            if (alpha[i] <= 0.0) {
                pg = std::min(G, 0.0);
            } else if (alpha[i] >= upper) {
                pg = std::max(G, 0.0);
            }
            max_violation = std::max(max_violation, std::abs(pg));
            if (pg == 0.0) {
                continue;
            }
            const double old = alpha[i];
            alpha[i] = std::clamp(old - G / diag[i], 0.0, upper);
            assert(alpha[i] >= 0.0 && alpha[i] <= upper);
            const double step = (alpha[i] - old) * y;
            if (step != 0.0) {
                double *row_ptr = w.theta.data() + phi.offset();
                for (std::size_t p = 0; p < L; ++p) {
                    row_ptr[p] += step * phi.block[p];
                }
                w.b += step;
            }
        }
        stats.epochs = epoch + 1;
        stats.final_violation = max_violation;
        if (max_violation < cfg.tol) {
            stats.converged = true;
            break;
        }
    }

    PrimalSolution out;
    out.dual.alpha = alpha;
    out.dual.r.resize(m);
    double sum_alpha = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out.dual.r[i] = upper - alpha[i];
        sum_alpha += alpha[i];
        if (alpha[i] > 0.0) {
            ++stats.support_vectors;
        }
    }
    out.dual.objective_dual = sum_alpha - 0.5 * w.squared_norm();
    stats.dual_objective = out.dual.objective_dual;
    stats.primal_objective = objective_primal(w, features, labels, cfg.c);
    stats.duality_gap = stats.primal_objective - stats.dual_objective;
    out.weights = std::move(w);
    out.stats = stats;
    return out;
}

ReferenceSolution solve_dual_reference(const DenseMatrix &gram, std::span<const int> labels, const SolverConfig &cfg,
                                       std::size_t max_instances) {
    cfg.validate();
    const std::size_t m = labels.size();
    if (m == 0) {
        throw invalid_argument_error("solver needs at least one instance");
    }
    if (m > max_instances) {
        throw invalid_argument_error("reference dual solver is capped at " + std::to_string(max_instances) +
                                     " instances, got " + std::to_string(m));
    }
    if (gram.size() != m) {
        throw dimension_error("Gram matrix has " + std::to_string(gram.size()) + " rows for " + std::to_string(m) +
                              " labels");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (gram[i].size() != m) {
            throw dimension_error("Gram matrix is not square");
        }
        if (labels[i] != 1 && labels[i] != -1) {
            throw invalid_argument_error("labels must be +1 or -1");
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double scale = std::max({1.0, std::abs(gram[i][j]), std::abs(gram[j][i])});
            if (!std::isfinite(gram[i][j]) || std::abs(gram[i][j] - gram[j][i]) > 1e-12 * scale) {
                throw invalid_argument_error("Gram matrix is not symmetric");
            }
        }
    }

    const double upper = cfg.c / static_cast<double>(m);
    constexpr double tau = 1e-12;
    std::vector<double> alpha(m, 0.0);
    std::vector<double> grad(m, -1.0);  // gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j G_ij
    const auto y = [&](std::size_t t) { return static_cast<double>(labels[t]); };
    const auto in_up = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] < upper : alpha[t] > 0.0; };
    const auto in_low = [&](std::size_t t) { return labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < upper; };

    ReferenceSolution out;
    const std::size_t max_iter = std::max<std::size_t>(10'000'000, cfg.max_epochs * m);
    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
        // Working-set selection with second-order information for the second index.
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = m;
        for (std::size_t t = 0; t < m; ++t) {
            if (in_up(t) && -y(t) * grad[t] >= gmax) {
                gmax = -y(t) * grad[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double obj_min = std::numeric_limits<double>::infinity();
        std::size_t j = m;
        for (std::size_t t = 0; t < m; ++t) {
            if (!in_low(t)) {
                continue;
            }
            gmax2 = std::max(gmax2, y(t) * grad[t]);
            if (i == m) {
                continue;
            }
            const double grad_diff = gmax + y(t) * grad[t];
            if (grad_diff > 0.0) {
                double quad = gram[i][i] + gram[t][t] - 2.0 * gram[i][t];
                if (quad <= 0.0) {
                    quad = tau;
                }
                const double obj = -(grad_diff * grad_diff) / quad;
                if (obj <= obj_min) {
                    obj_min = obj;
                    j = t;
                }
            }
        }
        if (i == m || j == m || gmax + gmax2 < cfg.tol) {
            out.converged = true;
            break;
        }

        const double old_ai = alpha[i];
        const double old_aj = alpha[j];
        const double Kij = gram[i][j];
        double quad = gram[i][i] + gram[j][j] - 2.0 * Kij;
        if (quad <= 0.0) {
            quad = tau;
        }
        if (labels[i] != labels[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > upper) {
                    alpha[i] = upper;
                    alpha[j] = upper - diff;
                }
            } else if (alpha[j] > upper) {
                alpha[j] = upper;
                alpha[i] = upper + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > upper) {
                if (alpha[i] > upper) {
                    alpha[i] = upper;
                    alpha[j] = sum - upper;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > upper) {
                if (alpha[j] > upper) {
                    alpha[j] = upper;
                    alpha[i] = sum - upper;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < m; ++t) {
            grad[t] += y(t) * (y(i) * gram[t][i] * dai + y(j) * gram[t][j] * daj);
        }
    }
    out.iterations = iter;

    // s_i = sum_j alpha_j y_j G_ij = y_i (grad_i + 1)
    std::vector<double> s(m);
    double objective = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
        s[t] = y(t) * (grad[t] + 1.0);
        objective += alpha[t] * (1.0 - 0.5 * (grad[t] + 1.0));
    }
    out.b = recover_bias(alpha, s, labels, upper, out.free_support_vectors);
    out.dual.alpha = std::move(alpha);
    out.dual.r.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        out.dual.r[t] = upper - out.dual.alpha[t];
    }
    out.dual.objective_dual = objective;
    return out;
}

WeightVector weights_from_dual(std::span<const double> alpha, std::span<const BlockFeature> features,
                               std::span<const int> labels) {
    check_problem(features, labels);
    if (alpha.size() != features.size()) {
        throw dimension_error("alpha and features differ in length");
    }
    WeightVector w(features.front().K, features.front().L());
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (alpha[i] == 0.0) {
            continue;
        }
        const double coef = alpha[i] * labels[i];
        const auto &phi = features[i];
        for (std::size_t p = 0; p < w.L; ++p) {
            w.at(phi.cluster, p) += coef * phi.block[p];
        }
        w.b += coef;
    }
    return w;
}

ThetaReconstruction reconstruct_theta(const DualSolution &ds, std::span<const BlockFeature> features,
                                      std::span<const int> labels, double c) {
    check_problem(features, labels);
    const std::size_t m = features.size();
    if (ds.alpha.size() != m) {
        throw dimension_error("dual solution has " + std::to_string(ds.alpha.size()) + " multipliers for " +
                              std::to_string(m) + " instances");
    }
    ThetaReconstruction out;
    out.weights = weights_from_dual(ds.alpha, features, labels);
    out.weights.b = 0.0;

    const double upper = c / static_cast<double>(m);
    std::vector<double> s(m);
    double sum_all = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = out.weights.margin(features[i]);
        if (ds.alpha[i] > 0.0) {
            ++out.support_vectors;
            sum_all += labels[i] - s[i];
        }
    }
    out.b_all_sv_average = out.support_vectors > 0 ? sum_all / static_cast<double>(out.support_vectors) : 0.0;
    out.weights.b = recover_bias(ds.alpha, s, labels, upper, out.free_support_vectors);
    return out;
}

std::vector<BlockFeature> build_features(const DenseMatrix &points, const ClusterModel &cm, const LandmarkSet &ls) {
    std::vector<BlockFeature> out;
    out.reserve(points.size());
    for (const auto &x : points) {
        out.push_back(feature_map(ls, cm.K(), assign(cm, x), x));
    }
    return out;
}

ThetaReconstruction reconstruct_theta(const DualSolution &ds, const DenseMatrix &points, std::span<const int> labels,
                                      const ClusterModel &cm, const LandmarkSet &ls, double c) {
    const auto features = build_features(points, cm, ls);
    return reconstruct_theta(ds, features, labels, c);
}

DenseMatrix block_gram(std::span<const BlockFeature> features, bool include_bias) {
    const std::size_t m = features.size();
    DenseMatrix g(m, DenseVector(m, 0.0));
    const double bias = include_bias ? 1.0 : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = bias;
            if (features[i].cluster == features[j].cluster) {
                v += std::inner_product(features[i].block.begin(), features[i].block.end(),
                                        features[j].block.begin(), 0.0);
            }
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    return g;
}

double objective_primal(const WeightVector &w, std::span<const BlockFeature> features, std::span<const int> labels,
                        double c) {
    if (features.size() != labels.size() || features.empty()) {
        throw dimension_error("features and labels differ in length or are empty");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].K != w.K || features[i].L() != w.L || features[i].cluster >= w.K) {
            throw dimension_error("feature shape does not match the weight vector");
        }
        loss += hinge_loss(labels[i], w.score(features[i]));
    }
    return 0.5 * w.squared_norm() + c / static_cast<double>(features.size()) * loss;
}

double objective_dual(std::span<const double> alpha, const DenseMatrix &gram, std::span<const int> labels, double c) {
    const std::size_t m = alpha.size();
    if (labels.size() != m || gram.size() != m) {
        throw dimension_error("alpha, labels and Gram matrix disagree in size");
    }
    assert(std::all_of(alpha.begin(), alpha.end(),
                       [&](double a) { return a >= 0.0 && a <= c / static_cast<double>(m) * (1 + 1e-12); }));
    (void)c;
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (gram[i].size() != m) {
            throw dimension_error("Gram matrix is not square");
        }
        linear += alpha[i];
        if (alpha[i] == 0.0) {
            continue;
        }
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            row += alpha[j] * labels[j] * gram[i][j];
        }
        quad += alpha[i] * labels[i] * row;
    }
    return linear - 0.5 * quad;
}

}  // namespace l3svm
