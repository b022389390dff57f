#pragma once
// Discrimination, threshold, and calibration metrics. AUC uses the
// average-rank Mann-Whitney form; the C-index uses a Fenwick-tree sweep.
// Both have quadratic pair-loop oracles in the test suite.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "releap/errors.hpp"

namespace releap {

struct MetricsReport {
    std::optional<double> auc;
    std::optional<double> f1;
    std::optional<double> tpr;
    std::optional<double> ppv;
    std::optional<double> prob_mse;
    std::optional<double> c_index;
    std::optional<double> threshold_used;
    int n_eval = 0;
};

struct StratifiedReport {
    MetricsReport group0;
    MetricsReport group1;
};

inline double auc(const Eigen::VectorXd& scores, const Eigen::VectorXi& labels) {
    const Eigen::Index n = scores.size();
    if (labels.size() != n) throw ShapeError("auc: scores and labels disagree");
    const int n_pos = labels.sum();
    const int n_neg = static_cast<int>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw MetricError("auc: needs both classes");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });

    // average ranks over tied score runs, 1-based
    double rank_sum_pos = 0.0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
        for (Eigen::Index k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

struct ThresholdMetrics {
    double threshold = 0.0;
    double tpr = 0.0;
    double ppv = 0.0;
    double f1 = 0.0;
};

// Smallest cut with FPR <= target_fpr, predicting positive at score >= cut.
// TPR and FPR both fall as the cut rises, so this cut also maximizes TPR
// among the feasible ones. A sentinel above the top score (zero positives,
// FPR 0) keeps the scan total.
inline ThresholdMetrics threshold_metrics(const Eigen::VectorXd& scores,
                                          const Eigen::VectorXi& labels, double target_fpr) {
    const Eigen::Index n = scores.size();
    if (labels.size() != n) throw ShapeError("threshold_metrics: scores and labels disagree");
    if (!(target_fpr > 0.0 && target_fpr < 1.0))
        throw PreconditionError("threshold_metrics: target_fpr must be in (0, 1)");
    const int n_pos = labels.sum();
    const int n_neg = static_cast<int>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw MetricError("threshold_metrics: needs both classes");

    std::vector<double> cuts(scores.data(), scores.data() + n);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(cuts.back() + 1.0);

    for (const double cut : cuts) {
        int tp = 0, fp = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (scores[k] >= cut) {
                if (labels[k] == 1)
                    ++tp;
                else
                    ++fp;
            }
        }
        const double fpr = static_cast<double>(fp) / n_neg;
        if (fpr <= target_fpr) {
            ThresholdMetrics out;
            out.threshold = cut;
            out.tpr = static_cast<double>(tp) / n_pos;
            out.ppv = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
            out.f1 = (out.tpr + out.ppv) > 0.0 ? 2.0 * out.tpr * out.ppv / (out.tpr + out.ppv)
                                               : 0.0;
            return out;
        }
    }
    throw InvariantError("threshold_metrics: sentinel cut should always be feasible");
}

inline double prob_mse(const Eigen::VectorXd& probs, const Eigen::VectorXi& labels) {
    const Eigen::Index n = probs.size();
    if (labels.size() != n) throw ShapeError("prob_mse: probs and labels disagree");
    if (n == 0) throw PreconditionError("prob_mse: empty input");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
            throw PreconditionError("prob_mse: probabilities must lie in [0, 1]");
        const double d = probs[i] - labels[i];
        sum += d * d;
    }
    return sum / static_cast<double>(n);
}

namespace detail {

class Fenwick {
  public:
    explicit Fenwick(int n) : tree_(n + 1, 0) {}
    void add(int idx) {
        for (int i = idx + 1; i < static_cast<int>(tree_.size()); i += i & (-i)) ++tree_[i];
    }
    // count of inserted values with index <= idx
    int prefix(int idx) const {
        int s = 0;
        for (int i = idx + 1; i > 0; i -= i & (-i)) s += tree_[i];
        return s;
    }

  private:
    std::vector<int> tree_;
};

}  // namespace detail

// Harrell's C: pairs (i, j) with t_i < t_j and event_i = 1 are comparable;
// risk ties earn half credit; time ties are never comparable.
inline double c_index(const Eigen::VectorXd& risk, const Eigen::VectorXd& t,
                      const Eigen::VectorXi& event) {
    const Eigen::Index n = risk.size();
    if (t.size() != n || event.size() != n) throw ShapeError("c_index: input sizes disagree");

    std::vector<double> sorted_risk(risk.data(), risk.data() + n);
    std::sort(sorted_risk.begin(), sorted_risk.end());
    sorted_risk.erase(std::unique(sorted_risk.begin(), sorted_risk.end()), sorted_risk.end());
    auto rank_of = [&](double r) {
        return static_cast<int>(std::lower_bound(sorted_risk.begin(), sorted_risk.end(), r) -
                                sorted_risk.begin());
    };

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return t[a] > t[b]; });

    detail::Fenwick tree(static_cast<int>(sorted_risk.size()));
    long long inserted = 0;
    double credit = 0.0;
    long long comparable = 0;
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t g = k;
        while (g < order.size() && t[order[g]] == t[order[k]]) ++g;
        // everyone already in the tree has strictly larger t
        for (std::size_t j = k; j < g; ++j) {
            const int i = order[j];
            if (event[i] != 1 || inserted == 0) continue;
            const int r = rank_of(risk[i]);
            const int leq = tree.prefix(r);
            const int lt = r > 0 ? tree.prefix(r - 1) : 0;
            credit += lt + 0.5 * (leq - lt);
            comparable += inserted;
        }
        for (std::size_t j = k; j < g; ++j) tree.add(rank_of(risk[order[j]]));
        inserted += static_cast<long long>(g - k);
        k = g;
    }
    if (comparable == 0) throw MetricError("c_index: no comparable pairs");
    return credit / static_cast<double>(comparable);
}

inline MetricsReport classification_report(const Eigen::VectorXd& probs,
                                           const Eigen::VectorXi& labels,
                                           double target_fpr = 0.1) {
    MetricsReport r;
    r.n_eval = static_cast<int>(labels.size());
    const int n_pos = labels.size() > 0 ? labels.sum() : 0;
    if (n_pos == 0 || n_pos == static_cast<int>(labels.size())) return r;  // metrics absent
    r.auc = auc(probs, labels);
    const ThresholdMetrics tm = threshold_metrics(probs, labels, target_fpr);
    r.f1 = tm.f1;
    r.tpr = tm.tpr;
    r.ppv = tm.ppv;
    r.threshold_used = tm.threshold;
    r.prob_mse = prob_mse(probs, labels);
    return r;
}

inline MetricsReport survival_report(const Eigen::VectorXd& risk, const Eigen::VectorXd& t,
                                     const Eigen::VectorXi& event) {
    MetricsReport r;
    r.n_eval = static_cast<int>(risk.size());
    try {
        r.c_index = c_index(risk, t, event);
    } catch (const MetricError&) {
        // no comparable pairs in this stratum, leave absent
    }
    return r;
}

namespace detail {

template <typename Vec>
Vec subset(const Vec& v, const std::vector<int>& ids) {
    Vec out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[ids[k]];
    return out;
}

inline std::pair<std::vector<int>, std::vector<int>> split_by_group(const Eigen::VectorXi& group) {
    std::vector<int> g0, g1;
    for (Eigen::Index i = 0; i < group.size(); ++i) {
        if (group[i] == 1)
            g1.push_back(static_cast<int>(i));
        else
            g0.push_back(static_cast<int>(i));
    }
    return {g0, g1};
}

}  // namespace detail

inline StratifiedReport stratified_classification_report(const Eigen::VectorXd& probs,
                                                         const Eigen::VectorXi& labels,
                                                         const Eigen::VectorXi& group,
                                                         double target_fpr = 0.1) {
    if (group.size() != labels.size())
        throw ShapeError("stratified report: group and labels disagree");
    const auto [g0, g1] = detail::split_by_group(group);
    StratifiedReport out;
    if (!g0.empty())
        out.group0 = classification_report(detail::subset<Eigen::VectorXd>(probs, g0),
                                           detail::subset<Eigen::VectorXi>(labels, g0), target_fpr);
    if (!g1.empty())
        out.group1 = classification_report(detail::subset<Eigen::VectorXd>(probs, g1),
                                           detail::subset<Eigen::VectorXi>(labels, g1), target_fpr);
    return out;
}

inline StratifiedReport stratified_survival_report(const Eigen::VectorXd& risk,
                                                   const Eigen::VectorXd& t,
                                                   const Eigen::VectorXi& event,
                                                   const Eigen::VectorXi& group) {
    if (group.size() != risk.size()) throw ShapeError("stratified report: group and risk disagree");
    const auto [g0, g1] = detail::split_by_group(group);
    StratifiedReport out;
    if (!g0.empty())
        out.group0 = survival_report(detail::subset<Eigen::VectorXd>(risk, g0),
                                     detail::subset<Eigen::VectorXd>(t, g0),
                                     detail::subset<Eigen::VectorXi>(event, g0));
    if (!g1.empty())
        out.group1 = survival_report(detail::subset<Eigen::VectorXd>(risk, g1),
                                     detail::subset<Eigen::VectorXd>(t, g1),
                                     detail::subset<Eigen::VectorXi>(event, g1));
    return out;
}

}  // namespace releap
