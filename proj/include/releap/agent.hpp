#pragma once
// The adaptive policy layer: observation vector construction, Dirichlet
// action sampling, shaped and lookahead rewards, and PPO with generalized
// advantage estimation. Gradients are exact (hand backprop), so the whole
// update is finite-difference checkable.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "releap/errors.hpp"
#include "releap/ledger.hpp"
#include "releap/policy.hpp"
#include "releap/rng.hpp"
#include "releap/special.hpp"
#include "releap/strategies.hpp"

namespace releap {

struct AgentState {
    double m_t = 0.0;
    double unc_median = 0.0, unc_p80 = 0.0;
    double div_median = 0.0, div_p80 = 0.0;
    double qbc_median = 0.0, qbc_p80 = 0.0;
    double mu_s = 0.0, sigma_s = 0.0, p_pos_lab = 0.0;
    double slope_m = 0.0, var_m = 0.0;
    double b_t = 0.0;

    Eigen::VectorXd to_vector() const {
        Eigen::VectorXd v(kStateDim);
        v << m_t, unc_median, unc_p80, div_median, div_p80, qbc_median, qbc_p80, mu_s, sigma_s,
            p_pos_lab, slope_m, var_m, b_t;
        return v;
    }
};

// nearest-rank percentile on a sorted copy: element ceil(q*n) (1-based)
inline double percentile_nearest_rank(const Eigen::VectorXd& values, double q) {
    if (values.size() == 0) throw PreconditionError("percentile: empty input");
    if (!(q > 0.0 && q <= 1.0)) throw PreconditionError("percentile: q must be in (0, 1]");
    std::vector<double> sorted(values.data(), values.data() + values.size());
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[rank - 1];
}

inline double window_slope(const std::vector<double>& window) {
    const auto k = static_cast<int>(window.size());
    if (k < 2) return 0.0;
    const double x_mean = 0.5 * (k - 1);
    double y_mean = 0.0;
    for (double y : window) y_mean += y;
    y_mean /= k;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < k; ++i) {
        num += (i - x_mean) * (window[i] - y_mean);
        den += (i - x_mean) * (i - x_mean);
    }
    return num / den;
}

inline double window_variance(const std::vector<double>& window) {
    const auto k = static_cast<int>(window.size());
    if (k == 0) return 0.0;
    double mean = 0.0;
    for (double y : window) mean += y;
    mean /= k;
    double var = 0.0;
    for (double y : window) var += (y - mean) * (y - mean);
    return var / k;
}

inline std::vector<double> metric_window(const std::vector<double>& history, int h) {
    const auto take = std::min<std::size_t>(history.size(), static_cast<std::size_t>(h));
    return {history.end() - static_cast<std::ptrdiff_t>(take), history.end()};
}

inline AgentState build_state(const std::vector<double>& metric_history,
                              const StrategyScoreTable& table, const LabelLedger& ledger,
                              double budget_remaining_frac, int h = 5) {
    if (metric_history.empty()) throw PreconditionError("build_state: no metric observed yet");
    if (ledger.n_labeled() < 1) throw PreconditionError("build_state: no labeled patients");
    if (!(budget_remaining_frac >= 0.0 && budget_remaining_frac <= 1.0))
        throw PreconditionError("build_state: budget fraction outside [0, 1]");

    AgentState s;
    s.m_t = metric_history.back();

    double medians[kNumQueryStrategies] = {0.0, 0.0, 0.0};
    double p80s[kNumQueryStrategies] = {0.0, 0.0, 0.0};
    for (int a = 0; a < kNumQueryStrategies; ++a) {
        if (table.normalized[a].size() == 0) continue;  // empty pool: summaries stay 0
        medians[a] = percentile_nearest_rank(table.normalized[a], 0.5);
        p80s[a] = percentile_nearest_rank(table.normalized[a], 0.8);
    }
    s.unc_median = medians[0];
    s.unc_p80 = p80s[0];
    s.div_median = medians[1];
    s.div_p80 = p80s[1];
    s.qbc_median = medians[2];
    s.qbc_p80 = p80s[2];

    const std::vector<int> labeled = ledger.labeled_ids();
    double mu = 0.0;
    int pos = 0;
    for (int id : labeled) {
        mu += ledger.s_current()[id];
        if (ledger.s_current()[id] >= 0.5) ++pos;
    }
    mu /= static_cast<double>(labeled.size());
    double var = 0.0;
    for (int id : labeled) {
        const double d = ledger.s_current()[id] - mu;
        var += d * d;
    }
    var /= static_cast<double>(labeled.size());
    s.mu_s = mu;
    s.sigma_s = std::sqrt(var);
    s.p_pos_lab = static_cast<double>(pos) / static_cast<double>(labeled.size());

    const std::vector<double> window = metric_window(metric_history, h);
    s.slope_m = window_slope(window);
    s.var_m = window_variance(window);
    s.b_t = budget_remaining_frac;

    if (!s.to_vector().allFinite()) throw NumericError("build_state: non-finite state");
    return s;
}

struct ActionSample {
    ActionWeights weights;
    double log_prob = 0.0;
    double value = 0.0;
};

inline ActionSample sample_action(const PolicyNet& policy, const Eigen::VectorXd& state, Rng& rng,
                                  bool deterministic = false) {
    const PolicyForward f = policy.forward(state);
    Eigen::VectorXd w(kActionDim);
    if (deterministic) {
        w = f.alpha / f.alpha.sum();
    } else {
        for (int i = 0; i < kActionDim; ++i) w[i] = rng.gamma(f.alpha[i]);
        w /= w.sum();
    }
    for (int i = 0; i < kActionDim; ++i) w[i] = std::max(w[i], 1e-10);
    w /= w.sum();

    ActionSample out;
    out.weights = ActionWeights{w[0], w[1], w[2]};
    out.weights.validate();
    out.log_prob = dirichlet_log_pdf(f.alpha, w);
    out.value = f.value;
    return out;
}

class RewardTracker {
  public:
    explicit RewardTracker(int window_len = 5) : h_(window_len) {
        if (window_len < 1) throw ConfigError("RewardTracker: window must be >= 1");
    }

    void push_metric(double m) {
        window_.push_back(m);
        while (static_cast<int>(window_.size()) > h_) window_.pop_front();
    }

    double window_mean() const {
        if (window_.empty()) throw PreconditionError("RewardTracker: empty window");
        double sum = 0.0;
        for (double m : window_) sum += m;
        return sum / static_cast<double>(window_.size());
    }

    bool window_empty() const { return window_.empty(); }
    int window_size() const { return static_cast<int>(window_.size()); }
    double run_mean() const { return mean_; }
    double run_std() const { return count_ > 0 ? std::sqrt(m2_ / static_cast<double>(count_)) : 0.0; }
    long long reward_count() const { return count_; }

    void observe_raw(double raw) {
        ++count_;
        const double delta = raw - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (raw - mean_);
    }

  private:
    std::deque<double> window_;
    int h_ = 5;
    double mean_ = 0.0;
    double m2_ = 0.0;
    long long count_ = 0;
};

struct RewardParts {
    double raw = 0.0;
    double normalized = 0.0;
};

// Relative gain against the recent-window baseline, scaled by progress and a
// trend bonus, then normalized by running reward moments. Moments update
// before normalizing, so the very first reward normalizes to zero.
inline RewardParts shaped_reward(RewardTracker& tracker, double m_t, double progress_frac,
                                 bool improving) {
    if (!std::isfinite(m_t)) throw PreconditionError("shaped_reward: metric not finite");
    if (!(progress_frac >= 0.0 && progress_frac <= 1.0))
        throw PreconditionError("shaped_reward: progress_frac outside [0, 1]");
    // the gain guard only matters at a perfect-metric plateau and must not
    // perturb hand arithmetic at saner baselines
    constexpr double gain_eps = 1e-15;
    constexpr double eps = 1e-8;

    const double baseline = tracker.window_empty() ? m_t : tracker.window_mean();
    const double gain = (m_t - baseline) / (1.0 - baseline + gain_eps);
    const double tau = improving ? 1.2 : 1.0;

    RewardParts parts;
    parts.raw = gain * (1.0 + 2.0 * progress_frac) * tau;
    tracker.observe_raw(parts.raw);
    parts.normalized = (parts.raw - tracker.run_mean()) / (tracker.run_std() + eps);
    tracker.push_metric(m_t);
    return parts;
}

// S4-style delayed credit: a blend of the one-step gain at t and the
// discounted gains over the following K steps, truncated at the end of the
// metric sequence.
inline double compute_lookahead_return(const std::vector<double>& metric_seq, int t, double alpha,
                                       double gamma, int k_steps) {
    const auto len = static_cast<int>(metric_seq.size());
    if (len < 2) throw PreconditionError("lookahead: need at least two metrics");
    if (t < 1 || t >= len) throw PreconditionError("lookahead: t outside the sequence");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw PreconditionError("lookahead: alpha outside [0, 1]");
    if (k_steps < 1) throw PreconditionError("lookahead: K must be >= 1");
    if (gamma < 0.0) throw PreconditionError("lookahead: gamma must be >= 0");

    const double immediate = metric_seq[t] - metric_seq[t - 1];
    double look = 0.0;
    double discount = 1.0;
    for (int k = 1; k <= k_steps; ++k) {
        const int idx = t + k - 1;
        if (idx >= len) break;
        look += discount * (metric_seq[idx] - metric_seq[idx - 1]);
        discount *= gamma;
    }
    return alpha * immediate + (1.0 - alpha) * look;
}

struct Transition {
    Eigen::VectorXd state;
    ActionWeights action;
    double log_prob = 0.0;
    double value = 0.0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool done = false;
};

struct PpoHyper {
    double clip = 0.2;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    int epochs = 4;
    double lr = 3e-4;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
};

struct AdvantageEstimate {
    Eigen::VectorXd advantages;  // standardized within the buffer
    Eigen::VectorXd returns;     // raw advantage + collection value
};

inline AdvantageEstimate prepare_advantages(const std::vector<Transition>& buffer, double gamma,
                                            double lambda) {
    const auto n = static_cast<Eigen::Index>(buffer.size());
    if (n == 0) throw PreconditionError("prepare_advantages: empty buffer");
    if (!buffer.back().done)
        throw PreconditionError("prepare_advantages: buffer must end a complete episode");

    AdvantageEstimate est;
    est.advantages.resize(n);
    est.returns.resize(n);
    double next_adv = 0.0;
    for (Eigen::Index t = n - 1; t >= 0; --t) {
        const bool terminal = buffer[t].done;
        const double next_value = (terminal || t == n - 1) ? 0.0 : buffer[t + 1].value;
        const double delta = buffer[t].reward + gamma * next_value - buffer[t].value;
        next_adv = delta + gamma * lambda * (terminal ? 0.0 : next_adv);
        est.advantages[t] = next_adv;
        est.returns[t] = next_adv + buffer[t].value;
    }
    const double mean = est.advantages.mean();
    const double sd =
        std::sqrt((est.advantages.array() - mean).square().sum() / static_cast<double>(n));
    est.advantages = (est.advantages.array() - mean) / (sd + 1e-8);
    return est;
}

struct PpoLossReport {
    double total = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double mean_ratio = 0.0;
};

// One full-batch evaluation of the clipped-surrogate objective and its exact
// parameter gradient at the policy's current parameters.
inline PpoLossReport ppo_loss_and_gradient(const PolicyNet& policy,
                                           const std::vector<Transition>& buffer,
                                           const AdvantageEstimate& est, const PpoHyper& hyper,
                                           Eigen::VectorXd& grad) {
    const auto n = static_cast<Eigen::Index>(buffer.size());
    grad = Eigen::VectorXd::Zero(policy.parameter_count());
    PpoLossReport report;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (Eigen::Index t = 0; t < n; ++t) {
        const Transition& tr = buffer[t];
        const PolicyForward f = policy.forward(tr.state);
        Eigen::VectorXd w(kActionDim);
        w << tr.action.unc, tr.action.div, tr.action.qbc;

        const double logp = dirichlet_log_pdf(f.alpha, w);
        const double ratio = std::exp(logp - tr.log_prob);
        const double adv = est.advantages[t];
        const double surr1 = ratio * adv;
        const double clipped = std::clamp(ratio, 1.0 - hyper.clip, 1.0 + hyper.clip);
        const double surr2 = clipped * adv;

        const double value_err = f.value - est.returns[t];
        const double entropy = dirichlet_entropy(f.alpha);

        report.policy_loss += -std::min(surr1, surr2) * inv_n;
        report.value_loss += value_err * value_err * inv_n;
        report.entropy += entropy * inv_n;
        report.mean_ratio += ratio * inv_n;

        // d loss / d logp is zero whenever the clipped branch is active
        const double dl_dlogp = surr1 <= surr2 ? -adv * ratio : 0.0;
        Eigen::VectorXd dl_dalpha =
            dl_dlogp * dirichlet_log_pdf_grad_alpha(f.alpha, w) -
            hyper.entropy_coef * dirichlet_entropy_grad_alpha(f.alpha);
        dl_dalpha *= inv_n;
        const double dl_dvalue = 2.0 * hyper.value_coef * value_err * inv_n;
        policy.accumulate_gradient(tr.state, f, dl_dalpha, dl_dvalue, grad);
    }
    report.total = report.policy_loss + hyper.value_coef * report.value_loss -
                   hyper.entropy_coef * report.entropy;
    return report;
}

struct UpdateStats {
    int n_transitions = 0;
    int epochs_run = 0;
    double first_mean_ratio = 0.0;
    double first_loss = 0.0;
    double last_loss = 0.0;
    double last_policy_loss = 0.0;
    double last_value_loss = 0.0;
    double last_entropy = 0.0;
};

inline UpdateStats ppo_update(PolicyNet& policy, const std::vector<Transition>& buffer,
                              const PpoHyper& hyper = {}) {
    if (buffer.empty()) throw PreconditionError("ppo_update: empty buffer");
    const AdvantageEstimate est = prepare_advantages(buffer, hyper.gamma, hyper.gae_lambda);

    UpdateStats stats;
    stats.n_transitions = static_cast<int>(buffer.size());
    Eigen::VectorXd grad;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        const PpoLossReport report = ppo_loss_and_gradient(policy, buffer, est, hyper, grad);
        if (!std::isfinite(report.total)) throw NumericError("ppo_update: non-finite loss");
        if (epoch == 0) {
            stats.first_mean_ratio = report.mean_ratio;
            stats.first_loss = report.total;
        }
        policy.adam_step(grad, hyper.lr);
        stats.last_loss = report.total;
        stats.last_policy_loss = report.policy_loss;
        stats.last_value_loss = report.value_loss;
        stats.last_entropy = report.entropy;
        stats.epochs_run = epoch + 1;
    }
    return stats;
}

}  // namespace releap
