#pragma once
// The active-learning environment: one budgeted episode over a cohort, with
// strategy scoring, weighted acquisition, validation mirroring, downstream
// retraining, and reward bookkeeping. Fixed baselines run through the same
// cycle with basis weights; proxy_only and oracle degenerate to a single
// evaluation replicated across iterations.

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "releap/agent.hpp"
#include "releap/cohort.hpp"
#include "releap/cox.hpp"
#include "releap/design.hpp"
#include "releap/errors.hpp"
#include "releap/ledger.hpp"
#include "releap/logistic.hpp"
#include "releap/metrics.hpp"
#include "releap/policy.hpp"
#include "releap/rng.hpp"
#include "releap/strategies.hpp"

namespace releap {

enum class Mode { logistic, survival };
enum class Strategy { releap, uncertainty, diversity, qbc, random, proxy_only, oracle };
enum class RewardMode { shaped, lookahead };

inline const char* to_string(Mode m) { return m == Mode::logistic ? "logistic" : "survival"; }

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::releap: return "releap";
        case Strategy::uncertainty: return "uncertainty";
        case Strategy::diversity: return "diversity";
        case Strategy::qbc: return "qbc";
        case Strategy::random: return "random";
        case Strategy::proxy_only: return "proxy_only";
        case Strategy::oracle: return "oracle";
    }
    throw InvariantError("to_string: unknown strategy");
}

inline const char* to_string(RewardMode r) { return r == RewardMode::shaped ? "shaped" : "lookahead"; }

inline Mode parse_mode(const std::string& s) {
    if (s == "logistic") return Mode::logistic;
    if (s == "survival") return Mode::survival;
    throw ConfigError("unknown mode: " + s);
}

inline Strategy parse_strategy(const std::string& s) {
    if (s == "releap") return Strategy::releap;
    if (s == "uncertainty") return Strategy::uncertainty;
    if (s == "diversity") return Strategy::diversity;
    if (s == "qbc") return Strategy::qbc;
    if (s == "random") return Strategy::random;
    if (s == "proxy_only") return Strategy::proxy_only;
    if (s == "oracle") return Strategy::oracle;
    throw ConfigError("unknown strategy: " + s);
}

inline RewardMode parse_reward_mode(const std::string& s) {
    if (s == "shaped") return RewardMode::shaped;
    if (s == "lookahead") return RewardMode::lookahead;
    throw ConfigError("unknown reward mode: " + s);
}

// proxy_only and oracle never query, so the budget/seed arithmetic does not
// apply to them
inline bool is_querying_strategy(Strategy s) {
    return s != Strategy::proxy_only && s != Strategy::oracle;
}

struct LoopConfig {
    Mode mode = Mode::logistic;
    int seed_size = 40;
    int batch_size = 40;
    int n_iterations = 10;
    Strategy strategy = Strategy::releap;
    RewardMode reward_mode = RewardMode::shaped;
    bool mirror_validation = true;

    double strategy_l2 = 0.1;    // scoring model and committee base penalty
    double downstream_l2 = 0.01;
    double target_fpr = 0.1;
    CommitteeConfig committee;
    int diversity_k = 10;
    double diversity_lambda = 0.5;

    int state_window = 5;
    double lookahead_alpha = 0.5;
    double lookahead_gamma = 0.9;
    int lookahead_k = 2;

    PpoHyper ppo;
    bool deterministic_policy = false;
    bool train_policy = true;
    int subgroup_column = -1;  // X2 column for stratified final reporting; -1 disables

    void validate(int train_pool) const {
        std::string problems;
        auto add = [&](const std::string& p) {
            if (!problems.empty()) problems += "; ";
            problems += p;
        };
        if (batch_size < 1) add("batch_size must be >= 1");
        if (n_iterations < 0) add("n_iterations must be >= 0");
        if (is_querying_strategy(strategy)) {
            if (seed_size < 1) add("seed_size must be >= 1");
            const long long need =
                static_cast<long long>(seed_size) +
                static_cast<long long>(batch_size) * static_cast<long long>(n_iterations);
            if (need > train_pool)
                add("seed plus total batch demand exceeds the training pool");
        }
        if (state_window < 1) add("state_window must be >= 1");
        if (!(lookahead_alpha >= 0.0 && lookahead_alpha <= 1.0))
            add("lookahead_alpha must lie in [0, 1]");
        if (lookahead_gamma < 0.0) add("lookahead_gamma must be >= 0");
        if (lookahead_k < 1) add("lookahead_k must be >= 1");
        if (strategy_l2 < 0.0 || downstream_l2 < 0.0) add("penalties must be >= 0");
        if (!(target_fpr > 0.0 && target_fpr < 1.0)) add("target_fpr must lie in (0, 1)");
        if (subgroup_column < -1) add("subgroup_column must be -1 or a column index");
        if (!problems.empty()) throw ConfigError("LoopConfig: " + problems);
    }
};

struct IterationLog {
    int iteration = 0;
    int n_labeled = 0;
    ActionWeights weights{0.0, 0.0, 0.0};
    double reward_raw = 0.0;
    double reward_norm = 0.0;
    MetricsReport report;
    double wall_ms = 0.0;
};

struct RunResult {
    Strategy strategy = Strategy::releap;
    Mode mode = Mode::logistic;
    std::vector<IterationLog> logs;  // n_iterations + 1 entries, iteration 0 is the seed stage
    int seed_imbalance = 0;
    int final_train_labeled = 0;
    int final_valid_labeled = 0;
    bool labels_match_truth = false;  // every labeled patient carries its reference label
    bool policy_updated = false;
    UpdateStats update;
    bool has_subgroups = false;
    StratifiedReport final_subgroups;  // validation split by an X2 column sign
};

inline bool ledger_labels_match_truth(const Cohort& cohort, const LabelLedger& ledger) {
    for (int id : ledger.labeled_ids())
        if (ledger.s_current()[id] != static_cast<double>(cohort.s_true[id])) return false;
    return true;
}

// raw per-patient feature rows [x1, x2] for strategy scoring
inline Eigen::MatrixXd patient_features(const Cohort& cohort, const std::vector<int>& ids) {
    const Eigen::Index d1 = cohort.x1.cols(), d2 = cohort.x2.cols();
    Eigen::MatrixXd f(static_cast<Eigen::Index>(ids.size()), d1 + d2);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        f.row(static_cast<Eigen::Index>(r)).head(d1) = cohort.x1.row(ids[r]);
        f.row(static_cast<Eigen::Index>(r)).tail(d2) = cohort.x2.row(ids[r]);
    }
    return f;
}

struct DownstreamResult {
    LogisticModel logistic;
    CoxModel cox;
    MetricsReport report;
};

inline DownstreamResult retrain_downstream(const Cohort& cohort, const SplitIndex& split,
                                           const LabelLedger& train_ledger,
                                           const LabelLedger& valid_ledger, Mode mode,
                                           double l2 = 0.01, double target_fpr = 0.1) {
    const DesignMatrix train_d = build_design(cohort, train_ledger.s_current(), split.train_ids);
    const DesignMatrix valid_d = build_design(cohort, valid_ledger.s_current(), split.valid_ids);

    DownstreamResult out;
    if (mode == Mode::logistic) {
        const Eigen::VectorXi y_train = detail::subset<Eigen::VectorXi>(cohort.y, split.train_ids);
        const Eigen::VectorXi y_valid = detail::subset<Eigen::VectorXi>(cohort.y, split.valid_ids);
        out.logistic = fit_logistic(train_d.x, y_train, l2);
        out.report = classification_report(predict_proba(out.logistic, valid_d.x), y_valid,
                                           target_fpr);
    } else {
        if (cohort.t.size() != cohort.n())
            throw PreconditionError("retrain_downstream: cohort lacks survival outcomes");
        const Eigen::VectorXd t_train = detail::subset<Eigen::VectorXd>(cohort.t, split.train_ids);
        const Eigen::VectorXi e_train =
            detail::subset<Eigen::VectorXi>(cohort.event, split.train_ids);
        const Eigen::VectorXd t_valid = detail::subset<Eigen::VectorXd>(cohort.t, split.valid_ids);
        const Eigen::VectorXi e_valid =
            detail::subset<Eigen::VectorXi>(cohort.event, split.valid_ids);
        out.cox = fit_cox(train_d.x, t_train, e_train, l2);
        out.report = survival_report(cox_risk_score(out.cox, valid_d.x), t_valid, e_valid);
    }
    return out;
}

// the trajectory metric: AUC for classification, C-index for survival;
// falls back when a degenerate evaluation leaves the metric absent
inline double primary_metric(const MetricsReport& report, Mode mode, double fallback) {
    const std::optional<double>& m = mode == Mode::logistic ? report.auc : report.c_index;
    return m.value_or(fallback);
}

// group flag from the sign of one X2 column (the synthetic stand-in for a
// demographic stratifier)
inline Eigen::VectorXi subgroup_mask(const Cohort& cohort, const std::vector<int>& ids,
                                     int column) {
    if (column < 0 || column >= cohort.x2.cols())
        throw ConfigError("subgroup_mask: column outside X2");
    Eigen::VectorXi group(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        group[static_cast<Eigen::Index>(i)] = cohort.x2(ids[i], column) >= 0.0 ? 1 : 0;
    return group;
}

inline StratifiedReport final_subgroup_report(const Cohort& cohort, const SplitIndex& split,
                                              const LabelLedger& train_ledger,
                                              const LabelLedger& valid_ledger,
                                              const LoopConfig& cfg) {
    const DownstreamResult down = retrain_downstream(cohort, split, train_ledger, valid_ledger,
                                                     cfg.mode, cfg.downstream_l2, cfg.target_fpr);
    const DesignMatrix valid_d = build_design(cohort, valid_ledger.s_current(), split.valid_ids);
    const Eigen::VectorXi group = subgroup_mask(cohort, split.valid_ids, cfg.subgroup_column);
    if (cfg.mode == Mode::logistic) {
        const Eigen::VectorXi y_valid = detail::subset<Eigen::VectorXi>(cohort.y, split.valid_ids);
        return stratified_classification_report(predict_proba(down.logistic, valid_d.x), y_valid,
                                                group, cfg.target_fpr);
    }
    const Eigen::VectorXd t_valid = detail::subset<Eigen::VectorXd>(cohort.t, split.valid_ids);
    const Eigen::VectorXi e_valid = detail::subset<Eigen::VectorXi>(cohort.event, split.valid_ids);
    return stratified_survival_report(cox_risk_score(down.cox, valid_d.x), t_valid, e_valid,
                                      group);
}

// Per-iteration scoring state: standardizer and models fit once on the
// labeled training set, then applied to any pool (training or validation, for
// mirroring). Consumes rng only for the committee, and only when QBC is
// needed.
class IterationScorer {
  public:
    IterationScorer(const Cohort& cohort, const LabelLedger& train_ledger, const LoopConfig& cfg,
                    bool need_unc, bool need_div, bool need_qbc, Rng& rng)
        : cohort_(cohort), cfg_(cfg), need_unc_(need_unc), need_div_(need_div),
          need_qbc_(need_qbc) {
        const std::vector<int> labeled = train_ledger.labeled_ids();
        if (labeled.empty()) throw PreconditionError("IterationScorer: no labeled patients");
        labeled_feats_ = scaler_.fit_transform(patient_features(cohort, labeled));
        const Eigen::VectorXi labeled_y = detail::subset<Eigen::VectorXi>(cohort.s_true, labeled);
        if (need_unc_) model_ = fit_logistic(labeled_feats_, labeled_y, cfg.strategy_l2);
        if (need_qbc_)
            committee_ = train_committee(labeled_feats_, labeled_y, cfg.strategy_l2,
                                         cfg.committee, rng);
    }

    StrategyScoreTable score_table(const std::vector<int>& pool_ids, int iteration) const {
        StrategyScoreTable table;
        table.pool_ids = pool_ids;
        table.iteration = iteration;
        if (pool_ids.empty()) return table;
        const Eigen::MatrixXd pool_feats =
            scaler_.transform(patient_features(cohort_, pool_ids));
        if (need_unc_) {
            table.raw[0] = uncertainty_scores(model_, pool_feats);
            table.normalized[0] = normalize_scores(table.raw[0]);
        }
        if (need_div_) {
            table.raw[1] = diversity_scores(pool_feats, labeled_feats_, cfg_.diversity_k,
                                            cfg_.diversity_lambda);
            table.normalized[1] = normalize_scores(table.raw[1]);
        }
        if (need_qbc_) {
            table.raw[2] = qbc_combine(committee_probs(committee_, pool_feats),
                                       cfg_.committee.entropy_weight);
            table.normalized[2] = normalize_scores(table.raw[2]);
        }
        return table;
    }

  private:
    const Cohort& cohort_;
    const LoopConfig& cfg_;
    bool need_unc_, need_div_, need_qbc_;
    Standardizer scaler_;
    Eigen::MatrixXd labeled_feats_;
    LogisticModel model_;
    Committee committee_;
};

namespace detail {

inline ActionWeights basis_weights(Strategy s) {
    switch (s) {
        case Strategy::uncertainty: return {1.0, 0.0, 0.0};
        case Strategy::diversity: return {0.0, 1.0, 0.0};
        case Strategy::qbc: return {0.0, 0.0, 1.0};
        default: return {0.0, 0.0, 0.0};
    }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

}  // namespace detail

inline RunResult run_episode(const Cohort& cohort, const SplitIndex& split, const LoopConfig& cfg,
                             PolicyNet* policy, Rng& rng) {
    cfg.validate(static_cast<int>(split.train_ids.size()));
    const bool is_releap = cfg.strategy == Strategy::releap;
    if (is_releap && policy == nullptr)
        throw PreconditionError("run_episode: releap strategy needs a policy network");

    RunResult result;
    result.strategy = cfg.strategy;
    result.mode = cfg.mode;

    LabelLedger valid_ledger(cohort, split.valid_ids);
    valid_ledger.set_budget(static_cast<int>(split.valid_ids.size()));

    LabelLedger train_ledger = [&] {
        if (!is_querying_strategy(cfg.strategy)) return LabelLedger(cohort, split.train_ids);
        return init_seed(cohort, split.train_ids, cfg.seed_size, rng);
    }();
    train_ledger.set_budget(cfg.batch_size * cfg.n_iterations);
    if (cfg.strategy == Strategy::oracle) {
        train_ledger.reveal_all(cohort);
        valid_ledger.reveal_all(cohort);
    }
    result.seed_imbalance = train_ledger.seed_imbalance();

    const auto t0 = std::chrono::steady_clock::now();
    const MetricsReport seed_report =
        retrain_downstream(cohort, split, train_ledger, valid_ledger, cfg.mode,
                           cfg.downstream_l2, cfg.target_fpr)
            .report;
    IterationLog seed_log;
    seed_log.iteration = 0;
    seed_log.n_labeled = train_ledger.n_labeled();
    seed_log.report = seed_report;
    seed_log.wall_ms = detail::elapsed_ms(t0);
    result.logs.push_back(seed_log);

    std::vector<double> history{primary_metric(seed_report, cfg.mode, 0.5)};

    if (!is_querying_strategy(cfg.strategy)) {
        // nothing changes between iterations, so evaluate once and replicate
        for (int t = 1; t <= cfg.n_iterations; ++t) {
            IterationLog log = seed_log;
            log.iteration = t;
            log.wall_ms = 0.0;
            result.logs.push_back(log);
        }
        result.final_train_labeled = train_ledger.n_labeled();
        result.final_valid_labeled = valid_ledger.n_labeled();
        result.labels_match_truth = ledger_labels_match_truth(cohort, train_ledger) &&
                                    ledger_labels_match_truth(cohort, valid_ledger);
        if (cfg.subgroup_column >= 0) {
            result.final_subgroups =
                final_subgroup_report(cohort, split, train_ledger, valid_ledger, cfg);
            result.has_subgroups = true;
        }
        return result;
    }

    RewardTracker tracker(cfg.state_window);
    tracker.push_metric(history[0]);
    std::vector<Transition> buffer;
    StrategyScoreTable last_table;

    for (int t = 1; t <= cfg.n_iterations; ++t) {
        const auto iter_start = std::chrono::steady_clock::now();
        if (train_ledger.remaining_budget() == 0) break;
        const std::vector<int> pool = train_ledger.unlabeled_ids();
        if (pool.empty()) break;

        const bool need_unc = is_releap || cfg.strategy == Strategy::uncertainty;
        const bool need_div = is_releap || cfg.strategy == Strategy::diversity;
        const bool need_qbc = is_releap || cfg.strategy == Strategy::qbc;
        const bool is_random = cfg.strategy == Strategy::random;

        ActionWeights weights = detail::basis_weights(cfg.strategy);
        AgentState state;
        ActionSample action;
        StrategyScoreTable table;
        IterationScorer scorer(cohort, train_ledger, cfg, need_unc, need_div, need_qbc, rng);
        if (!is_random) {
            table = scorer.score_table(pool, t);
            last_table = table;
        }
        if (is_releap) {
            state = build_state(history, table, train_ledger,
                                train_ledger.budget_frac_remaining(), cfg.state_window);
            if (!buffer.empty()) buffer.back().next_state = state.to_vector();
            action = sample_action(*policy, state.to_vector(), rng, cfg.deterministic_policy);
            weights = action.weights;
        }

        std::vector<int> selected;
        if (is_random) {
            StrategyScoreTable rt;
            rt.pool_ids = pool;
            rt.iteration = t;
            rt.normalized[0] = normalize_scores(random_scores(static_cast<int>(pool.size()), rng));
            selected = combine_and_rank(rt, {1.0, 0.0, 0.0}, cfg.batch_size, rng);
        } else {
            selected = combine_and_rank(table, weights, cfg.batch_size, rng);
        }
        const auto train_unlabeled_before = pool.size();
        acquire_batch(train_ledger, selected, cohort);

        if (cfg.mirror_validation && !selected.empty()) {
            const std::vector<int> valid_pool = valid_ledger.unlabeled_ids();
            if (!valid_pool.empty()) {
                const double pool_ratio = static_cast<double>(valid_pool.size()) /
                                          static_cast<double>(train_unlabeled_before);
                const int mirror_n = static_cast<int>(
                    std::ceil(static_cast<double>(selected.size()) * pool_ratio));
                std::vector<int> mirrored;
                if (is_random) {
                    StrategyScoreTable rt;
                    rt.pool_ids = valid_pool;
                    rt.iteration = t;
                    rt.normalized[0] = normalize_scores(
                        random_scores(static_cast<int>(valid_pool.size()), rng));
                    mirrored = combine_and_rank(rt, {1.0, 0.0, 0.0}, mirror_n, rng);
                } else {
                    mirrored = combine_and_rank(scorer.score_table(valid_pool, t), weights,
                                                mirror_n, rng);
                }
                acquire_batch(valid_ledger, mirrored, cohort);
            }
        }

        const MetricsReport report =
            retrain_downstream(cohort, split, train_ledger, valid_ledger, cfg.mode,
                               cfg.downstream_l2, cfg.target_fpr)
                .report;
        const double m_t = primary_metric(report, cfg.mode, history.back());
        const double progress = 1.0 - train_ledger.budget_frac_remaining();
        const bool improving = window_slope(metric_window(history, cfg.state_window)) > 0.0;
        const RewardParts parts = shaped_reward(tracker, m_t, progress, improving);
        history.push_back(m_t);

        if (is_releap) {
            Transition tr;
            tr.state = state.to_vector();
            tr.action = weights;
            tr.log_prob = action.log_prob;
            tr.value = action.value;
            tr.reward = parts.normalized;
            tr.done = t == cfg.n_iterations || train_ledger.remaining_budget() == 0;
            buffer.push_back(tr);
        }

        IterationLog log;
        log.iteration = t;
        log.n_labeled = train_ledger.n_labeled();
        log.weights = weights;
        log.reward_raw = parts.raw;
        log.reward_norm = parts.normalized;
        log.report = report;
        log.wall_ms = detail::elapsed_ms(iter_start);
        result.logs.push_back(log);
    }

    if (cfg.reward_mode == RewardMode::lookahead && history.size() >= 2) {
        RewardTracker look(cfg.state_window);
        for (std::size_t t = 1; t < history.size(); ++t) {
            const double raw = compute_lookahead_return(history, static_cast<int>(t),
                                                        cfg.lookahead_alpha, cfg.lookahead_gamma,
                                                        cfg.lookahead_k);
            look.observe_raw(raw);
            const double norm = (raw - look.run_mean()) / (look.run_std() + 1e-8);
            result.logs[t].reward_raw = raw;
            result.logs[t].reward_norm = norm;
            if (is_releap && t - 1 < buffer.size()) buffer[t - 1].reward = norm;
        }
    }

    if (is_releap && !buffer.empty()) {
        buffer.back().done = true;
        buffer.back().next_state =
            build_state(history, last_table, train_ledger, train_ledger.budget_frac_remaining(),
                        cfg.state_window)
                .to_vector();
        if (cfg.train_policy) {
            result.update = ppo_update(*policy, buffer, cfg.ppo);
            result.policy_updated = true;
        }
    }
    result.final_train_labeled = train_ledger.n_labeled();
    result.final_valid_labeled = valid_ledger.n_labeled();
    result.labels_match_truth = ledger_labels_match_truth(cohort, train_ledger) &&
                                ledger_labels_match_truth(cohort, valid_ledger);
    if (cfg.subgroup_column >= 0) {
        result.final_subgroups =
            final_subgroup_report(cohort, split, train_ledger, valid_ledger, cfg);
        result.has_subgroups = true;
    }
    return result;
}

}  // namespace releap
