#pragma once
// Query scoring strategies: predictive-entropy uncertainty, cosine-distance
// diversity, bootstrap-committee disagreement, and the random baseline.
// Raw scores are min-max normalized per iteration and blended by simplex
// weights to rank the unlabeled pool.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "releap/errors.hpp"
#include "releap/logistic.hpp"
#include "releap/rng.hpp"

namespace releap {

enum class QueryStrategy { Uncertainty = 0, Diversity = 1, Qbc = 2 };
inline constexpr int kNumQueryStrategies = 3;

struct ActionWeights {
    double unc = 1.0 / 3.0;
    double div = 1.0 / 3.0;
    double qbc = 1.0 / 3.0;

    double operator[](int a) const { return a == 0 ? unc : (a == 1 ? div : qbc); }

    void validate() const {
        const double sum = unc + div + qbc;
        if (unc < 0.0 || div < 0.0 || qbc < 0.0 || std::abs(sum - 1.0) > 1e-6)
            throw PreconditionError("ActionWeights: not on the simplex");
    }
};

struct StrategyScoreTable {
    std::vector<int> pool_ids;
    std::array<Eigen::VectorXd, kNumQueryStrategies> raw;
    std::array<Eigen::VectorXd, kNumQueryStrategies> normalized;
    int iteration = 0;
};

inline double binary_entropy(double p) {
    p = clamp_prob(p);
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

inline Eigen::VectorXd uncertainty_scores(const LogisticModel& model, const Eigen::MatrixXd& pool) {
    const Eigen::VectorXd p = predict_proba(model, pool);
    Eigen::VectorXd h(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) h[i] = binary_entropy(p[i]);
    return h;
}

// Cosine distance to the k nearest labeled rows; score is mean plus
// lambda times the population std of those k distances. Zero-norm rows get
// similarity 0, so their distance to anything is 1.
inline Eigen::VectorXd diversity_scores(const Eigen::MatrixXd& pool_feats,
                                        const Eigen::MatrixXd& labeled_feats, int k = 10,
                                        double lambda = 0.5) {
    if (labeled_feats.rows() == 0)
        throw PreconditionError("diversity_scores: labeled set is empty");
    if (pool_feats.cols() != labeled_feats.cols())
        throw ShapeError("diversity_scores: feature widths disagree");

    auto normalize_rows = [](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd out = m;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double norm = m.row(i).norm();
            if (norm > 0.0)
                out.row(i) /= norm;
            else
                out.row(i).setZero();
        }
        return out;
    };
    const Eigen::MatrixXd pn = normalize_rows(pool_feats);
    const Eigen::MatrixXd ln = normalize_rows(labeled_feats);
    const int k_eff = std::min<int>(k, static_cast<int>(labeled_feats.rows()));

    Eigen::VectorXd scores(pool_feats.rows());
    std::vector<double> dist(static_cast<std::size_t>(labeled_feats.rows()));
    for (Eigen::Index i = 0; i < pn.rows(); ++i) {
        const Eigen::VectorXd sims = ln * pn.row(i).transpose();
        for (Eigen::Index j = 0; j < sims.size(); ++j) dist[static_cast<std::size_t>(j)] = 1.0 - sims[j];
        std::nth_element(dist.begin(), dist.begin() + (k_eff - 1), dist.end());
        double mean = 0.0;
        for (int j = 0; j < k_eff; ++j) mean += dist[j];
        mean /= k_eff;
        double var = 0.0;
        for (int j = 0; j < k_eff; ++j) var += (dist[j] - mean) * (dist[j] - mean);
        var /= k_eff;
        scores[i] = mean + lambda * std::sqrt(var);
    }
    return scores;
}

struct CommitteeConfig {
    int m = 7;
    double dropout_p = 0.1;
    double l2_jitter = 0.7;      // members draw l2 = base_l2 * exp(U(-l2_jitter, +l2_jitter))
    double entropy_weight = 0.1;

    void validate() const {
        if (m < 2) throw ConfigError("CommitteeConfig: m must be >= 2");
        if (dropout_p < 0.0 || dropout_p >= 1.0)
            throw ConfigError("CommitteeConfig: dropout_p must be in [0, 1)");
        if (l2_jitter < 0.0) throw ConfigError("CommitteeConfig: l2_jitter must be >= 0");
        if (entropy_weight < 0.0) throw ConfigError("CommitteeConfig: entropy_weight must be >= 0");
    }
};

struct CommitteeMember {
    LogisticModel model;
    std::vector<int> columns;  // features the member saw (after dropout)
};

struct Committee {
    std::vector<CommitteeMember> members;
};

// Each member gets its own stream derived from one draw on the caller's rng,
// so training order (or parallel scheduling) cannot change the result.
// Per-member draws: bootstrap rows, l2 jitter, then the dropout mask; if the
// mask would drop every column, the column with the largest mask draw stays.
inline Committee train_committee(const Eigen::MatrixXd& labeled_x, const Eigen::VectorXi& labeled_y,
                                 double base_l2, const CommitteeConfig& cfg, Rng& rng) {
    cfg.validate();
    const Eigen::Index n = labeled_x.rows(), d = labeled_x.cols();
    if (n == 0) throw PreconditionError("train_committee: labeled set is empty");
    if (labeled_y.size() != n) throw ShapeError("train_committee: x and y rows disagree");

    const std::uint64_t base = rng.next_u64();
    Committee committee;
    committee.members.resize(cfg.m);
    for (int m = 0; m < cfg.m; ++m) {
        Rng member_rng(derive_seed(base, static_cast<std::uint64_t>(m) + 1));
        std::vector<int> rows(n);
        for (Eigen::Index i = 0; i < n; ++i)
            rows[i] = static_cast<int>(member_rng.uniform_int(static_cast<std::uint64_t>(n)));
        const double l2 = base_l2 * std::exp(member_rng.uniform(-cfg.l2_jitter, cfg.l2_jitter));

        std::vector<double> mask(d);
        std::vector<int> cols;
        for (Eigen::Index j = 0; j < d; ++j) {
            mask[j] = member_rng.uniform();
            if (mask[j] >= cfg.dropout_p) cols.push_back(static_cast<int>(j));
        }
        if (cols.empty()) {
            const auto best = std::max_element(mask.begin(), mask.end()) - mask.begin();
            cols.push_back(static_cast<int>(best));
        }

        Eigen::MatrixXd xm(n, static_cast<Eigen::Index>(cols.size()));
        Eigen::VectorXi ym(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ym[i] = labeled_y[rows[i]];
            for (std::size_t j = 0; j < cols.size(); ++j)
                xm(i, static_cast<Eigen::Index>(j)) = labeled_x(rows[i], cols[j]);
        }
        committee.members[m].model = fit_logistic(xm, ym, l2);
        committee.members[m].columns = std::move(cols);
    }
    return committee;
}

// Row m holds member m's probabilities over the pool.
inline Eigen::MatrixXd committee_probs(const Committee& committee, const Eigen::MatrixXd& pool) {
    Eigen::MatrixXd probs(static_cast<Eigen::Index>(committee.members.size()), pool.rows());
    for (std::size_t m = 0; m < committee.members.size(); ++m) {
        const auto& member = committee.members[m];
        Eigen::MatrixXd xm(pool.rows(), static_cast<Eigen::Index>(member.columns.size()));
        for (std::size_t j = 0; j < member.columns.size(); ++j)
            xm.col(static_cast<Eigen::Index>(j)) = pool.col(member.columns[j]);
        probs.row(static_cast<Eigen::Index>(m)) = predict_proba(member.model, xm).transpose();
    }
    return probs;
}

// Population variance of member probabilities plus the entropy stabilizer on
// the committee mean.
inline Eigen::VectorXd qbc_combine(const Eigen::MatrixXd& member_probs, double entropy_weight) {
    if (member_probs.rows() < 2) throw PreconditionError("qbc_combine: need at least 2 members");
    const double m = static_cast<double>(member_probs.rows());
    Eigen::VectorXd scores(member_probs.cols());
    for (Eigen::Index i = 0; i < member_probs.cols(); ++i) {
        const double mean = member_probs.col(i).mean();
        const double var = (member_probs.col(i).array() - mean).square().sum() / m;
        scores[i] = var + entropy_weight * binary_entropy(mean);
    }
    return scores;
}

inline Eigen::VectorXd qbc_scores(const Eigen::MatrixXd& labeled_x, const Eigen::VectorXi& labeled_y,
                                  const Eigen::MatrixXd& pool, double base_l2,
                                  const CommitteeConfig& cfg, Rng& rng) {
    const Committee committee = train_committee(labeled_x, labeled_y, base_l2, cfg, rng);
    return qbc_combine(committee_probs(committee, pool), cfg.entropy_weight);
}

inline Eigen::VectorXd random_scores(int pool_size, Rng& rng) {
    if (pool_size < 0) throw PreconditionError("random_scores: negative pool size");
    Eigen::VectorXd s(pool_size);
    for (int i = 0; i < pool_size; ++i) s[i] = rng.uniform();
    return s;
}

inline Eigen::VectorXd normalize_scores(const Eigen::VectorXd& raw) {
    if (raw.size() == 0) throw PreconditionError("normalize_scores: empty input");
    const double lo = raw.minCoeff(), hi = raw.maxCoeff();
    if (hi == lo) return Eigen::VectorXd::Constant(raw.size(), 0.5);
    return (raw.array() - lo) / (hi - lo);
}

// Blends the normalized columns with the given weights, adds a tiny uniform
// jitter to break exact ties, and returns the top-batch pool ids by combined
// score. Strategies with weight 0 are never read, so fixed baselines can
// leave the other columns empty.
inline std::vector<int> combine_and_rank(const StrategyScoreTable& table,
                                         const ActionWeights& weights, int batch, Rng& rng) {
    weights.validate();
    const auto pool_size = static_cast<Eigen::Index>(table.pool_ids.size());
    if (pool_size == 0) return {};
    if (batch < 0) throw PreconditionError("combine_and_rank: negative batch");

    Eigen::VectorXd combined = Eigen::VectorXd::Zero(pool_size);
    for (int a = 0; a < kNumQueryStrategies; ++a) {
        if (weights[a] == 0.0) continue;
        const Eigen::VectorXd& col = table.normalized[a];
        if (col.size() != pool_size)
            throw InvariantError("combine_and_rank: active strategy scores missing or misaligned");
        combined += weights[a] * col;
    }
    for (Eigen::Index i = 0; i < pool_size; ++i) combined[i] += rng.uniform() * 1e-6;

    std::vector<int> order(pool_size);
    std::iota(order.begin(), order.end(), 0);
    const int take = std::min<int>(batch, static_cast<int>(pool_size));
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](int a, int b) { return combined[a] > combined[b]; });
    std::vector<int> chosen(take);
    for (int i = 0; i < take; ++i) chosen[i] = table.pool_ids[order[i]];
    return chosen;
}

}  // namespace releap
