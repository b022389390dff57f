#pragma once
// Digamma and trigamma plus Dirichlet density helpers. The policy gradient
// needs exact derivatives of the Dirichlet log-density and entropy, which
// these provide in closed form.

#include <Eigen/Core>
#include <cmath>

#include "releap/errors.hpp"

namespace releap {

// Recurrence up to x >= 10, then the asymptotic expansion.
inline double digamma(double x) {
    if (!(x > 0.0)) throw PreconditionError("digamma: x must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

inline double trigamma(double x) {
    if (!(x > 0.0)) throw PreconditionError("trigamma: x must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += inv * (1.0 + 0.5 * inv +
                     inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0))));
    return result;
}

inline double dirichlet_log_pdf(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    if (alpha.size() != w.size()) throw ShapeError("dirichlet_log_pdf: sizes disagree");
    double logp = std::lgamma(alpha.sum());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0)) throw PreconditionError("dirichlet_log_pdf: alpha must be positive");
        if (!(w[i] > 0.0)) throw PreconditionError("dirichlet_log_pdf: w must be positive");
        logp += (alpha[i] - 1.0) * std::log(w[i]) - std::lgamma(alpha[i]);
    }
    return logp;
}

// d log pdf / d alpha_i = log w_i + digamma(alpha0) - digamma(alpha_i)
inline Eigen::VectorXd dirichlet_log_pdf_grad_alpha(const Eigen::VectorXd& alpha,
                                                    const Eigen::VectorXd& w) {
    const double psi0 = digamma(alpha.sum());
    Eigen::VectorXd g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        g[i] = std::log(w[i]) + psi0 - digamma(alpha[i]);
    return g;
}

inline double dirichlet_entropy(const Eigen::VectorXd& alpha) {
    const double a0 = alpha.sum();
    const auto k = static_cast<double>(alpha.size());
    double log_beta = -std::lgamma(a0);
    double h = (a0 - k) * digamma(a0);
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        log_beta += std::lgamma(alpha[i]);
        h -= (alpha[i] - 1.0) * digamma(alpha[i]);
    }
    return log_beta + h;
}

// dH / d alpha_i = (alpha0 - K) trigamma(alpha0) - (alpha_i - 1) trigamma(alpha_i)
inline Eigen::VectorXd dirichlet_entropy_grad_alpha(const Eigen::VectorXd& alpha) {
    const double a0 = alpha.sum();
    const auto k = static_cast<double>(alpha.size());
    const double common = (a0 - k) * trigamma(a0);
    Eigen::VectorXd g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        g[i] = common - (alpha[i] - 1.0) * trigamma(alpha[i]);
    return g;
}

}  // namespace releap
