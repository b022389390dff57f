#pragma once
// Design matrix assembly for the downstream models. Column 0 is always the
// phenotype (current working label), followed by the outcome features x2.

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "releap/cohort.hpp"
#include "releap/errors.hpp"

namespace releap {

struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<std::string> names;
};

// Column-wise centering and scaling with population sd. Columns with zero
// spread get sd 1 so transform leaves them at zero after centering.
class Standardizer {
  public:
    void fit(const Eigen::MatrixXd& x) {
        if (x.rows() == 0) throw PreconditionError("Standardizer::fit: empty matrix");
        mean_ = x.colwise().mean();
        sd_.resize(x.cols());
        const double n = static_cast<double>(x.rows());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double var = (x.col(j).array() - mean_[j]).square().sum() / n;
            const double sd = std::sqrt(var);
            sd_[j] = sd > 0.0 ? sd : 1.0;
        }
        fitted_ = true;
    }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
        if (!fitted_) throw PreconditionError("Standardizer::transform before fit");
        if (x.cols() != mean_.size())
            throw ShapeError("Standardizer::transform: column count mismatch");
        return (x.rowwise() - mean_.transpose()).array().rowwise() / sd_.transpose().array();
    }

    Eigen::MatrixXd fit_transform(const Eigen::MatrixXd& x) {
        fit(x);
        return transform(x);
    }

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::VectorXd& sd() const { return sd_; }
    bool fitted() const { return fitted_; }

  private:
    Eigen::VectorXd mean_;
    Eigen::VectorXd sd_;
    bool fitted_ = false;
};

// Assembles [s, x2] rows for the given patient ids using the supplied
// phenotype column (working labels during the loop, s_true for the oracle).
inline DesignMatrix build_design(const Cohort& cohort, const Eigen::VectorXd& phenotype,
                                 const std::vector<int>& ids) {
    if (phenotype.size() != cohort.n())
        throw ShapeError("build_design: phenotype length differs from cohort size");
    DesignMatrix d;
    const int d2 = static_cast<int>(cohort.x2.cols());
    d.x.resize(static_cast<Eigen::Index>(ids.size()), 1 + d2);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const int i = ids[r];
        if (i < 0 || i >= cohort.n()) throw PreconditionError("build_design: id out of range");
        d.x(static_cast<Eigen::Index>(r), 0) = phenotype[i];
        d.x.row(static_cast<Eigen::Index>(r)).tail(d2) = cohort.x2.row(i);
    }
    d.names.push_back("s");
    for (int j = 0; j < d2; ++j) d.names.push_back("x2_" + std::to_string(j));
    return d;
}

}  // namespace releap
