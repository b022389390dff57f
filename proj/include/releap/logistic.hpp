#pragma once
// L2-regularized logistic regression fitted by damped Newton iterations.
// Objective: mean negative log-likelihood + (l2/2)*||w||^2, intercept free.

#include <Eigen/Core>
#include <Eigen/Dense>
#include <cmath>

#include "releap/cohort.hpp"
#include "releap/errors.hpp"

namespace releap {

struct LogisticModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double l2 = 0.0;
    bool converged = false;
    bool degenerate = false;  // single-class training set, constant output
    int n_iter = 0;
};

inline double log1p_exp(double z) {
    // log(1 + e^z) without overflow
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                            const Eigen::VectorXd& w, double intercept, double l2) {
    const Eigen::VectorXd z = (x * w).array() + intercept;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) nll += log1p_exp(z[i]) - y[i] * z[i];
    return nll / static_cast<double>(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

// Gradient with respect to [w, intercept]; last entry is the intercept part.
inline Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                                         const Eigen::VectorXd& w, double intercept, double l2) {
    const Eigen::Index n = x.rows(), d = x.cols();
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i)
        resid[i] = sigmoid(x.row(i).dot(w) + intercept) - y[i];
    Eigen::VectorXd g(d + 1);
    g.head(d) = x.transpose() * resid / static_cast<double>(n) + l2 * w;
    g[d] = resid.sum() / static_cast<double>(n);
    return g;
}

inline LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                                  double l2 = 0.0, double tol = 1e-8, int max_iter = 100) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (n < 1 || y.size() != n) throw ShapeError("fit_logistic: x and y rows disagree");
    if (l2 < 0.0) throw PreconditionError("fit_logistic: l2 must be >= 0");

    LogisticModel model;
    model.l2 = l2;
    model.weights = Eigen::VectorXd::Zero(d);

    const int n_pos = y.sum();
    if (n_pos == 0 || n_pos == static_cast<int>(n)) {
        const double rate = clamp_prob(static_cast<double>(n_pos) / static_cast<double>(n));
        model.intercept = std::log(rate / (1.0 - rate));
        model.degenerate = true;
        return model;
    }

    double loss = logistic_loss(x, y, model.weights, model.intercept, l2);
    for (int iter = 0; iter < max_iter; ++iter) {
        model.n_iter = iter + 1;
        const Eigen::VectorXd g = logistic_gradient(x, y, model.weights, model.intercept, l2);
        if (g.cwiseAbs().maxCoeff() <= tol) {
            model.converged = true;
            model.n_iter = iter;
            break;
        }

        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i)
            p[i] = sigmoid(x.row(i).dot(model.weights) + model.intercept);
        const Eigen::VectorXd wgt = p.array() * (1.0 - p.array());
        Eigen::MatrixXd h(d + 1, d + 1);
        h.topLeftCorner(d, d) = x.transpose() * wgt.asDiagonal() * x / static_cast<double>(n);
        const Eigen::VectorXd cross = x.transpose() * wgt / static_cast<double>(n);
        h.block(0, d, d, 1) = cross;
        h.block(d, 0, 1, d) = cross.transpose();
        h(d, d) = wgt.sum() / static_cast<double>(n);
        h.topLeftCorner(d, d).diagonal().array() += l2;
        h.diagonal().array() += 1e-10;

        const Eigen::VectorXd step = h.ldlt().solve(g);
        double scale = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
            const Eigen::VectorXd w_try = model.weights - scale * step.head(d);
            const double b_try = model.intercept - scale * step[d];
            const double loss_try = logistic_loss(x, y, w_try, b_try, l2);
            if (loss_try <= loss) {
                model.weights = w_try;
                model.intercept = b_try;
                loss = loss_try;
                break;
            }
            scale *= 0.5;
        }
    }
    if (!model.converged) {
        const Eigen::VectorXd g = logistic_gradient(x, y, model.weights, model.intercept, l2);
        model.converged = g.cwiseAbs().maxCoeff() <= tol;
    }
    return model;
}

inline Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.weights.size())
        throw ShapeError("predict_proba: feature count differs from model dimension");
    Eigen::VectorXd p(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        p[i] = clamp_prob(sigmoid(x.row(i).dot(model.weights) + model.intercept));
    return p;
}

}  // namespace releap
