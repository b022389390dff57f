#pragma once
// Cox proportional hazards with Breslow tie handling, L2 penalty, and
// univariate-score feature screening. Fitted by damped Newton iterations on
// the negative partial log-likelihood.

#include <Eigen/Core>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "releap/errors.hpp"

namespace releap {

struct CoxModel {
    Eigen::VectorXd weights;  // full design dimension, screened-out columns stay 0
    double l2 = 0.0;
    bool converged = false;
    int n_iter = 0;
    std::vector<int> screened_columns;
};

namespace detail {

// Indices sorted by descending time so the sweep grows the risk set as it
// walks forward. Ties stay adjacent.
inline std::vector<int> descending_time_order(const Eigen::VectorXd& t) {
    std::vector<int> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return t[a] > t[b]; });
    return order;
}

}  // namespace detail

// Breslow negative partial log-likelihood plus (l2/2)*||w||^2. The linear
// predictor is centered first; the partial likelihood is shift-invariant so
// this only guards the exponentials.
inline double cox_penalized_nll(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                const Eigen::VectorXi& event, const Eigen::VectorXd& w,
                                double l2) {
    const Eigen::Index n = x.rows();
    if (t.size() != n || event.size() != n) throw ShapeError("cox nll: row counts disagree");
    Eigen::VectorXd z = x * w;
    z.array() -= z.mean();
    const std::vector<int> order = detail::descending_time_order(t);
    double nll = 0.0;
    double s0 = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t g = k;
        while (g < order.size() && t[order[g]] == t[order[k]]) {
            s0 += std::exp(z[order[g]]);
            ++g;
        }
        for (std::size_t j = k; j < g; ++j) {
            const int i = order[j];
            if (event[i] == 1) nll -= z[i] - std::log(s0);
        }
        k = g;
    }
    return nll + 0.5 * l2 * w.squaredNorm();
}

inline Eigen::VectorXd cox_penalized_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                              const Eigen::VectorXi& event,
                                              const Eigen::VectorXd& w, double l2) {
    const Eigen::Index n = x.rows(), d = x.cols();
    Eigen::VectorXd z = x * w;
    z.array() -= z.mean();
    const std::vector<int> order = detail::descending_time_order(t);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t g = k;
        while (g < order.size() && t[order[g]] == t[order[k]]) {
            const int i = order[g];
            const double e = std::exp(z[i]);
            s0 += e;
            s1 += e * x.row(i).transpose();
            ++g;
        }
        for (std::size_t j = k; j < g; ++j) {
            const int i = order[j];
            if (event[i] == 1) grad -= x.row(i).transpose() - s1 / s0;
        }
        k = g;
    }
    return grad + l2 * w;
}

// Univariate score statistics |U_j| at w=0; one sweep covers all columns.
inline Eigen::VectorXd cox_univariate_scores(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                             const Eigen::VectorXi& event) {
    const Eigen::Index d = x.cols();
    const std::vector<int> order = detail::descending_time_order(t);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
    double s0 = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t g = k;
        while (g < order.size() && t[order[g]] == t[order[k]]) {
            s0 += 1.0;
            s1 += x.row(order[g]).transpose();
            ++g;
        }
        for (std::size_t j = k; j < g; ++j) {
            const int i = order[j];
            if (event[i] == 1) u += x.row(i).transpose() - s1 / s0;
        }
        k = g;
    }
    return u.cwiseAbs();
}

// Keeps column 0 (the phenotype) always, drops zero-variance columns, ranks
// the rest by univariate score, and returns at most keep_max sorted indices.
inline std::vector<int> feature_screen(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                       const Eigen::VectorXi& event, int keep_max) {
    if (keep_max < 1) throw PreconditionError("feature_screen: keep_max must be >= 1");
    const Eigen::Index d = x.cols();
    if (d == 0) throw ShapeError("feature_screen: empty design");
    const Eigen::VectorXd scores = cox_univariate_scores(x, t, event);

    std::vector<int> candidates;
    for (Eigen::Index j = 1; j < d; ++j) {
        const double var =
            (x.col(j).array() - x.col(j).mean()).square().sum() / static_cast<double>(x.rows());
        if (var > 0.0) candidates.push_back(static_cast<int>(j));
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });

    std::vector<int> kept{0};
    for (int j : candidates) {
        if (static_cast<int>(kept.size()) >= keep_max) break;
        kept.push_back(j);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

// keep_max 0 means no screening cap (all usable columns retained).
inline CoxModel fit_cox(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                        const Eigen::VectorXi& event, double l2 = 0.0, double tol = 1e-8,
                        int max_iter = 100, int keep_max = 0) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (t.size() != n || event.size() != n) throw ShapeError("fit_cox: row counts disagree");
    if (l2 < 0.0) throw PreconditionError("fit_cox: l2 must be >= 0");
    if (event.sum() == 0) throw PreconditionError("fit_cox: no events in the training set");

    CoxModel model;
    model.l2 = l2;
    model.weights = Eigen::VectorXd::Zero(d);
    model.screened_columns =
        feature_screen(x, t, event, keep_max > 0 ? keep_max : static_cast<int>(d));

    const auto ds = static_cast<Eigen::Index>(model.screened_columns.size());
    Eigen::MatrixXd xs(n, ds);
    for (Eigen::Index j = 0; j < ds; ++j) xs.col(j) = x.col(model.screened_columns[j]);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(ds);
    double loss = cox_penalized_nll(xs, t, event, w, l2);
    for (int iter = 0; iter < max_iter; ++iter) {
        model.n_iter = iter + 1;
        const Eigen::VectorXd g = cox_penalized_gradient(xs, t, event, w, l2);
        if (g.cwiseAbs().maxCoeff() <= tol) {
            model.converged = true;
            model.n_iter = iter;
            break;
        }

        // Hessian sweep: S2/S0 - (S1/S0)(S1/S0)^T summed over events
        Eigen::VectorXd z = xs * w;
        z.array() -= z.mean();
        const std::vector<int> order = detail::descending_time_order(t);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ds, ds);
        double s0 = 0.0;
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(ds);
        Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(ds, ds);
        std::size_t k = 0;
        while (k < order.size()) {
            std::size_t gi = k;
            while (gi < order.size() && t[order[gi]] == t[order[k]]) {
                const int i = order[gi];
                const double e = std::exp(z[i]);
                s0 += e;
                s1 += e * xs.row(i).transpose();
                s2.noalias() += e * xs.row(i).transpose() * xs.row(i);
                ++gi;
            }
            for (std::size_t j = k; j < gi; ++j) {
                const int i = order[j];
                if (event[i] == 1) {
                    const Eigen::VectorXd m = s1 / s0;
                    h.noalias() += s2 / s0 - m * m.transpose();
                }
            }
            k = gi;
        }
        h.diagonal().array() += l2 + 1e-10;

        const Eigen::VectorXd step = h.ldlt().solve(g);
        double scale = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
            const Eigen::VectorXd w_try = w - scale * step;
            const double loss_try = cox_penalized_nll(xs, t, event, w_try, l2);
            if (loss_try <= loss) {
                w = w_try;
                loss = loss_try;
                break;
            }
            scale *= 0.5;
        }
    }
    if (!model.converged) {
        const Eigen::VectorXd g = cox_penalized_gradient(xs, t, event, w, l2);
        model.converged = g.cwiseAbs().maxCoeff() <= tol;
    }
    for (Eigen::Index j = 0; j < ds; ++j) model.weights[model.screened_columns[j]] = w[j];
    return model;
}

inline Eigen::VectorXd cox_risk_score(const CoxModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.weights.size())
        throw ShapeError("cox_risk_score: feature count differs from model dimension");
    return x * model.weights;
}

}  // namespace releap
