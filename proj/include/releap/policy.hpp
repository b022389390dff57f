#pragma once
// Two-layer policy/value network with hand-rolled backprop and Adam. The
// three concentration heads parameterize a Dirichlet over strategy weights
// (softplus + 1 keeps every alpha above 1); the fourth head is the critic.

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "releap/errors.hpp"
#include "releap/rng.hpp"

namespace releap {

inline constexpr int kStateDim = 13;
inline constexpr int kHiddenDim = 32;
inline constexpr int kActionDim = 3;
inline constexpr int kHeadDim = kActionDim + 1;

inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct PolicyForward {
    Eigen::VectorXd alpha;   // kActionDim, each > 1
    double value = 0.0;
    Eigen::VectorXd hidden;  // tanh activations, cached for backprop
    Eigen::VectorXd out;     // raw head outputs, cached for backprop
};

class PolicyNet {
  public:
    explicit PolicyNet(std::uint64_t seed = 0) {
        Rng rng(derive_seed(seed, 0xB0D1ULL));
        w1_.resize(kHiddenDim, kStateDim);
        const double scale1 = 1.0 / std::sqrt(static_cast<double>(kStateDim));
        for (int i = 0; i < kHiddenDim; ++i)
            for (int j = 0; j < kStateDim; ++j) w1_(i, j) = rng.normal() * scale1;
        b1_ = Eigen::VectorXd::Zero(kHiddenDim);
        w2_.resize(kHeadDim, kHiddenDim);
        // small head weights start the Dirichlet near symmetric
        for (int i = 0; i < kHeadDim; ++i)
            for (int j = 0; j < kHiddenDim; ++j) w2_(i, j) = rng.normal() * 0.01;
        b2_ = Eigen::VectorXd::Zero(kHeadDim);
        reset_optimizer();
    }

    PolicyForward forward(const Eigen::VectorXd& state) const {
        if (state.size() != kStateDim) throw ShapeError("PolicyNet: state dimension mismatch");
        PolicyForward f;
        f.hidden = (w1_ * state + b1_).array().tanh();
        f.out = w2_ * f.hidden + b2_;
        f.alpha.resize(kActionDim);
        for (int i = 0; i < kActionDim; ++i) f.alpha[i] = softplus(f.out[i]) + 1.0;
        f.value = f.out[kActionDim];
        if (!f.alpha.allFinite() || !std::isfinite(f.value))
            throw NumericError("PolicyNet: non-finite forward pass");
        return f;
    }

    // Backprop for one state given head gradients; accumulates into grad,
    // a flat vector laid out like parameters().
    void accumulate_gradient(const Eigen::VectorXd& state, const PolicyForward& f,
                             const Eigen::VectorXd& dl_dalpha, double dl_dvalue,
                             Eigen::VectorXd& grad) const {
        Eigen::VectorXd dl_dout(kHeadDim);
        for (int i = 0; i < kActionDim; ++i)
            dl_dout[i] = dl_dalpha[i] * sigmoid(f.out[i]);  // softplus' = sigmoid
        dl_dout[kActionDim] = dl_dvalue;

        const Eigen::VectorXd dl_dhidden = w2_.transpose() * dl_dout;
        const Eigen::VectorXd dl_dpre =
            dl_dhidden.array() * (1.0 - f.hidden.array().square());

        auto seg = grad_segments(grad);
        seg.w1.noalias() += dl_dpre * state.transpose();
        seg.b1 += dl_dpre;
        seg.w2.noalias() += dl_dout * f.hidden.transpose();
        seg.b2 += dl_dout;
    }

    int parameter_count() const {
        return kHiddenDim * kStateDim + kHiddenDim + kHeadDim * kHiddenDim + kHeadDim;
    }

    Eigen::VectorXd parameters() const {
        Eigen::VectorXd p(parameter_count());
        int at = 0;
        for (int i = 0; i < kHiddenDim; ++i)
            for (int j = 0; j < kStateDim; ++j) p[at++] = w1_(i, j);
        for (int i = 0; i < kHiddenDim; ++i) p[at++] = b1_[i];
        for (int i = 0; i < kHeadDim; ++i)
            for (int j = 0; j < kHiddenDim; ++j) p[at++] = w2_(i, j);
        for (int i = 0; i < kHeadDim; ++i) p[at++] = b2_[i];
        return p;
    }

    void set_parameters(const Eigen::VectorXd& p) {
        if (p.size() != parameter_count()) throw ShapeError("PolicyNet: parameter vector size");
        int at = 0;
        for (int i = 0; i < kHiddenDim; ++i)
            for (int j = 0; j < kStateDim; ++j) w1_(i, j) = p[at++];
        for (int i = 0; i < kHiddenDim; ++i) b1_[i] = p[at++];
        for (int i = 0; i < kHeadDim; ++i)
            for (int j = 0; j < kHiddenDim; ++j) w2_(i, j) = p[at++];
        for (int i = 0; i < kHeadDim; ++i) b2_[i] = p[at++];
    }

    void reset_optimizer() {
        adam_m_ = Eigen::VectorXd::Zero(parameter_count());
        adam_v_ = Eigen::VectorXd::Zero(parameter_count());
        adam_t_ = 0;
    }

    void adam_step(const Eigen::VectorXd& grad, double lr) {
        if (grad.size() != parameter_count()) throw ShapeError("PolicyNet: gradient size");
        if (!grad.allFinite()) throw NumericError("PolicyNet: non-finite gradient");
        ++adam_t_;
        adam_m_ = 0.9 * adam_m_ + 0.1 * grad;
        adam_v_ = 0.999 * adam_v_.array() + 0.001 * grad.array().square();
        const double mc = 1.0 - std::pow(0.9, adam_t_);
        const double vc = 1.0 - std::pow(0.999, adam_t_);
        Eigen::VectorXd p = parameters();
        p.array() -=
            lr * (adam_m_.array() / mc) / ((adam_v_.array() / vc).sqrt() + 1e-8);
        set_parameters(p);
    }

    const Eigen::MatrixXd& w2() const { return w2_; }
    const Eigen::VectorXd& b2() const { return b2_; }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("PolicyNet: cannot open for writing: " + path);
        const Eigen::VectorXd p = parameters();
        out << p.size() << "\n";
        char buf[40];
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
            out << buf << "\n";
        }
        if (!out) throw Error("PolicyNet: write failed: " + path);
    }

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("PolicyNet: cannot open for reading: " + path);
        Eigen::Index n = 0;
        in >> n;
        if (n != parameter_count()) throw ShapeError("PolicyNet: checkpoint size mismatch");
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(in >> p[i])) throw Error("PolicyNet: truncated checkpoint: " + path);
        }
        set_parameters(p);
        reset_optimizer();
    }

  private:
    struct Segments {
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1;
        Eigen::Map<Eigen::VectorXd> b1;
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w2;
        Eigen::Map<Eigen::VectorXd> b2;
    };

    Segments grad_segments(Eigen::VectorXd& grad) const {
        if (grad.size() != parameter_count()) throw ShapeError("PolicyNet: gradient buffer size");
        double* p = grad.data();
        return Segments{
            {p, kHiddenDim, kStateDim},
            {p + kHiddenDim * kStateDim, kHiddenDim},
            {p + kHiddenDim * kStateDim + kHiddenDim, kHeadDim, kHiddenDim},
            {p + kHiddenDim * kStateDim + kHiddenDim + kHeadDim * kHiddenDim, kHeadDim}};
    }

    Eigen::MatrixXd w1_, w2_;
    Eigen::VectorXd b1_, b2_;
    Eigen::VectorXd adam_m_, adam_v_;
    long long adam_t_ = 0;
};

}  // namespace releap
