#pragma once

// Reference computations written directly from the definitions, without going
// through the library. Dense, slow, and only meant for small inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline double dot(const Vec &a, const Vec &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double sqdist(const Vec &a, const Vec &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

/**
 * min_w 1/2|w|^2 + (c/m) sum_i max(0, t_i - y_i <w, x_i>) by cyclic dual coordinate
 * ascent in natural order. With t = 1 this is the ordinary hinge SVM on rows of X.
 */
inline Vec hinge_dcd(const Mat &X, const std::vector<int> &y, const Vec &t, double c, double tol = 1e-12,
                     std::size_t max_sweeps = 200000) {
    const std::size_t m = X.size();
    const std::size_t d = X.front().size();
    const double C = c / static_cast<double>(m);
    Vec w(d, 0.0), alpha(m, 0.0), q(m);
    for (std::size_t i = 0; i < m; ++i) {
        q[i] = dot(X[i], X[i]);
    }
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (q[i] == 0.0) {
                continue;
            }
            const double g = y[i] * dot(w, X[i]) - t[i];
            double pg = g;
            if (alpha[i] <= 0.0) {
                pg = std::min(g, 0.0);
            } else if (alpha[i] >= C) {
                pg = std::max(g, 0.0);
            }
            worst = std::max(worst, std::abs(pg));
            const double next = std::clamp(alpha[i] - g / q[i], 0.0, C);
            const double delta = (next - alpha[i]) * y[i];
            alpha[i] = next;
            for (std::size_t j = 0; j < d; ++j) {
                w[j] += delta * X[i][j];
            }
        }
        if (worst < tol) {
            break;
        }
    }
    return w;
}

/// Bias-augmented linear SVM (bias regularized): returns (w, b).
inline std::pair<Vec, double> linear_svm_augmented(const Mat &X, const std::vector<int> &y, double c) {
    Mat Z = X;
    for (auto &z : Z) {
        z.push_back(1.0);
    }
    Vec w = hinge_dcd(Z, y, Vec(X.size(), 1.0), c);
    const double b = w.back();
    w.pop_back();
    return {w, b};
}

/// 1/2|theta|^2 + (c/m) sum hinge(y_i (theta.x_i + b)), with theta optimal for this b.
struct FixedBias {
    Vec theta;
    double objective;
};

inline FixedBias solve_for_bias(const Mat &X, const std::vector<int> &y, double c, double b) {
    Vec t(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        t[i] = 1.0 - y[i] * b;
    }
    FixedBias r{hinge_dcd(X, y, t, c), 0.0};
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        loss += std::max(0.0, 1.0 - y[i] * (dot(r.theta, X[i]) + b));
    }
    r.objective = 0.5 * dot(r.theta, r.theta) + c / static_cast<double>(X.size()) * loss;
    return r;
}

/**
 * SVM with an unregularized bias. The objective minimized over theta is convex in b,
 * so golden-section search over b brackets the optimum.
 */
inline std::pair<Vec, double> linear_svm_free_bias(const Mat &X, const std::vector<int> &y, double c,
                                                   double lo = -20.0, double hi = 20.0) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, bnd = hi;
    double x1 = bnd - phi * (bnd - a), x2 = a + phi * (bnd - a);
    double f1 = solve_for_bias(X, y, c, x1).objective, f2 = solve_for_bias(X, y, c, x2).objective;
    while (bnd - a > 1e-10) {
        if (f1 < f2) {
            bnd = x2;
            x2 = x1;
            f2 = f1;
            x1 = bnd - phi * (bnd - a);
            f1 = solve_for_bias(X, y, c, x1).objective;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (bnd - a);
            f2 = solve_for_bias(X, y, c, x2).objective;
        }
    }
    const double b = 0.5 * (a + bnd);
    return {solve_for_bias(X, y, c, b).theta, b};
}

/// Smallest inertia over every split of the points into two non-empty groups.
inline double best_two_partition_inertia(const Mat &pts, Vec *c0 = nullptr, Vec *c1 = nullptr) {
    const std::size_t n = pts.size();
    const std::size_t d = pts.front().size();
    double best = std::numeric_limits<double>::infinity();
    // Point 0 always sits in group 0, so each split is visited once.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        Vec m0(d, 0.0), m1(d, 0.0);
        double n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool g1 = i > 0 && ((mask >> (i - 1)) & 1U);
            auto &mm = g1 ? m1 : m0;
            (g1 ? n1 : n0) += 1;
            for (std::size_t j = 0; j < d; ++j) {
                mm[j] += pts[i][j];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            m0[j] /= n0;
            m1[j] /= n1;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool g1 = i > 0 && ((mask >> (i - 1)) & 1U);
            s += sqdist(pts[i], g1 ? m1 : m0);
        }
        if (s < best) {
            best = s;
            if (c0 != nullptr) {
                *c0 = m0;
                *c1 = m1;
            }
        }
    }
    return best;
}

inline Mat random_points(std::size_t m, std::size_t d, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Mat out(m, Vec(d));
    for (auto &row : out) {
        for (auto &v : row) {
            v = u(rng);
        }
    }
    return out;
}

}  // namespace oracle
