#pragma once
// Experiment orchestration: flat key=value configuration, paired replications
// across strategies (same cohort, split, and seed set per replication), a
// deterministic worker pool, CI summaries, and CSV/SVG export.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "releap/cohort.hpp"
#include "releap/csv.hpp"
#include "releap/errors.hpp"
#include "releap/loop.hpp"
#include "releap/policy.hpp"
#include "releap/rng.hpp"
#include "releap/svg.hpp"

namespace releap {

struct ExperimentConfig {
    CohortConfig cohort;
    SurvivalConfig survival_params;  // attached to the cohort in survival mode
    LoopConfig loop;
    std::vector<Strategy> strategies{Strategy::releap,    Strategy::uncertainty,
                                     Strategy::diversity, Strategy::qbc,
                                     Strategy::random,    Strategy::proxy_only,
                                     Strategy::oracle};
    int n_replications = 100;
    std::uint64_t master_seed = 6;
    double valid_frac = 0.2;
    std::string output_dir = "releap_out";

    // the cohort the generator actually receives: survival outcomes are
    // produced only when the downstream mode needs them
    CohortConfig effective_cohort() const {
        CohortConfig c = cohort;
        if (loop.mode == Mode::survival) c.survival = survival_params;
        return c;
    }

    void validate() const {
        std::string problems;
        auto add = [&](const std::string& p) {
            if (!problems.empty()) problems += "; ";
            problems += p;
        };
        if (n_replications < 1) add("n_replications must be >= 1");
        if (strategies.empty()) add("strategies must be nonempty");
        for (std::size_t i = 0; i < strategies.size(); ++i)
            for (std::size_t j = i + 1; j < strategies.size(); ++j)
                if (strategies[i] == strategies[j]) add("duplicate strategy in sweep");
        if (!(valid_frac > 0.0 && valid_frac < 1.0)) add("valid_frac must lie in (0, 1)");
        if (output_dir.empty()) add("output_dir must be nonempty");
        if (loop.subgroup_column >= cohort.d_x2) add("subgroup_column outside X2");
        if (!problems.empty()) throw ConfigError("ExperimentConfig: " + problems);
        effective_cohort().validate();
        const int train_pool =
            cohort.n - static_cast<int>(std::llround(valid_frac * cohort.n));
        loop.validate(train_pool);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline long long parse_ll(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const long long out = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
    return out;
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: " + key + " expects an unsigned integer, got '" + v + "'");
    return out;
}

inline double parse_real(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    return out;
}

inline bool parse_flag(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ConfigError("config: " + key + " expects a flag (0/1/true/false), got '" + v + "'");
}

inline std::vector<Strategy> parse_strategy_list(const std::string& v) {
    std::vector<Strategy> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_strategy(item));
    }
    if (out.empty()) throw ConfigError("config: strategies list is empty");
    return out;
}

}  // namespace detail

inline void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
    using detail::parse_flag;
    using detail::parse_ll;
    using detail::parse_real;
    using detail::parse_u64;
    auto as_int = [&] { return static_cast<int>(parse_ll(value, key)); };

    if (key == "mode") cfg.loop.mode = parse_mode(value);
    else if (key == "strategies") cfg.strategies = detail::parse_strategy_list(value);
    else if (key == "n_replications") cfg.n_replications = as_int();
    else if (key == "master_seed") cfg.master_seed = parse_u64(value, key);
    else if (key == "valid_frac") cfg.valid_frac = parse_real(value, key);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "cohort_n") cfg.cohort.n = as_int();
    else if (key == "cohort_d_x1") cfg.cohort.d_x1 = as_int();
    else if (key == "cohort_d_x2") cfg.cohort.d_x2 = as_int();
    else if (key == "cohort_beta_s") cfg.cohort.beta_s = parse_real(value, key);
    else if (key == "cohort_sigma_link") cfg.cohort.sigma_link = parse_real(value, key);
    else if (key == "cohort_sigma_proxy") cfg.cohort.sigma_proxy = parse_real(value, key);
    else if (key == "cohort_proxy_scale") cfg.cohort.proxy_scale = parse_real(value, key);
    else if (key == "cohort_threshold_s_true") cfg.cohort.threshold_s_true = parse_flag(value, key);
    else if (key == "cohort_baseline_rate") cfg.survival_params.baseline_rate = parse_real(value, key);
    else if (key == "cohort_censor_horizon") cfg.survival_params.censor_horizon = parse_real(value, key);
    else if (key == "seed_size") cfg.loop.seed_size = as_int();
    else if (key == "batch_size") cfg.loop.batch_size = as_int();
    else if (key == "n_iterations") cfg.loop.n_iterations = as_int();
    else if (key == "reward_mode") cfg.loop.reward_mode = parse_reward_mode(value);
    else if (key == "mirror_validation") cfg.loop.mirror_validation = parse_flag(value, key);
    else if (key == "strategy_l2") cfg.loop.strategy_l2 = parse_real(value, key);
    else if (key == "downstream_l2") cfg.loop.downstream_l2 = parse_real(value, key);
    else if (key == "target_fpr") cfg.loop.target_fpr = parse_real(value, key);
    else if (key == "committee_m") cfg.loop.committee.m = as_int();
    else if (key == "committee_dropout_p") cfg.loop.committee.dropout_p = parse_real(value, key);
    else if (key == "committee_l2_jitter") cfg.loop.committee.l2_jitter = parse_real(value, key);
    else if (key == "committee_entropy_weight") cfg.loop.committee.entropy_weight = parse_real(value, key);
    else if (key == "diversity_k") cfg.loop.diversity_k = as_int();
    else if (key == "diversity_lambda") cfg.loop.diversity_lambda = parse_real(value, key);
    else if (key == "state_window") cfg.loop.state_window = as_int();
    else if (key == "lookahead_alpha") cfg.loop.lookahead_alpha = parse_real(value, key);
    else if (key == "lookahead_gamma") cfg.loop.lookahead_gamma = parse_real(value, key);
    else if (key == "lookahead_k") cfg.loop.lookahead_k = as_int();
    else if (key == "ppo_lr") cfg.loop.ppo.lr = parse_real(value, key);
    else if (key == "ppo_clip") cfg.loop.ppo.clip = parse_real(value, key);
    else if (key == "ppo_gamma") cfg.loop.ppo.gamma = parse_real(value, key);
    else if (key == "ppo_gae_lambda") cfg.loop.ppo.gae_lambda = parse_real(value, key);
    else if (key == "ppo_epochs") cfg.loop.ppo.epochs = as_int();
    else if (key == "ppo_value_coef") cfg.loop.ppo.value_coef = parse_real(value, key);
    else if (key == "ppo_entropy_coef") cfg.loop.ppo.entropy_coef = parse_real(value, key);
    else if (key == "subgroup_column") cfg.loop.subgroup_column = as_int();
    else throw ConfigError("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    return parse_config(in, path);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::string s;
    auto put = [&](const std::string& key, const std::string& value) {
        s += key + " = " + value + "\n";
    };
    put("mode", to_string(cfg.loop.mode));
    std::string strategies;
    for (std::size_t i = 0; i < cfg.strategies.size(); ++i) {
        if (i > 0) strategies += ',';
        strategies += to_string(cfg.strategies[i]);
    }
    put("strategies", strategies);
    put("n_replications", std::to_string(cfg.n_replications));
    put("master_seed", std::to_string(cfg.master_seed));
    put("valid_frac", g9(cfg.valid_frac));
    put("output_dir", cfg.output_dir);
    put("cohort_n", std::to_string(cfg.cohort.n));
    put("cohort_d_x1", std::to_string(cfg.cohort.d_x1));
    put("cohort_d_x2", std::to_string(cfg.cohort.d_x2));
    put("cohort_beta_s", g9(cfg.cohort.beta_s));
    put("cohort_sigma_link", g9(cfg.cohort.sigma_link));
    put("cohort_sigma_proxy", g9(cfg.cohort.sigma_proxy));
    put("cohort_proxy_scale", g9(cfg.cohort.proxy_scale));
    put("cohort_threshold_s_true", cfg.cohort.threshold_s_true ? "1" : "0");
    put("cohort_baseline_rate", g9(cfg.survival_params.baseline_rate));
    put("cohort_censor_horizon", g9(cfg.survival_params.censor_horizon));
    put("seed_size", std::to_string(cfg.loop.seed_size));
    put("batch_size", std::to_string(cfg.loop.batch_size));
    put("n_iterations", std::to_string(cfg.loop.n_iterations));
    put("reward_mode", to_string(cfg.loop.reward_mode));
    put("mirror_validation", cfg.loop.mirror_validation ? "1" : "0");
    put("strategy_l2", g9(cfg.loop.strategy_l2));
    put("downstream_l2", g9(cfg.loop.downstream_l2));
    put("target_fpr", g9(cfg.loop.target_fpr));
    put("committee_m", std::to_string(cfg.loop.committee.m));
    put("committee_dropout_p", g9(cfg.loop.committee.dropout_p));
    put("committee_l2_jitter", g9(cfg.loop.committee.l2_jitter));
    put("committee_entropy_weight", g9(cfg.loop.committee.entropy_weight));
    put("diversity_k", std::to_string(cfg.loop.diversity_k));
    put("diversity_lambda", g9(cfg.loop.diversity_lambda));
    put("state_window", std::to_string(cfg.loop.state_window));
    put("lookahead_alpha", g9(cfg.loop.lookahead_alpha));
    put("lookahead_gamma", g9(cfg.loop.lookahead_gamma));
    put("lookahead_k", std::to_string(cfg.loop.lookahead_k));
    put("ppo_lr", g9(cfg.loop.ppo.lr));
    put("ppo_clip", g9(cfg.loop.ppo.clip));
    put("ppo_gamma", g9(cfg.loop.ppo.gamma));
    put("ppo_gae_lambda", g9(cfg.loop.ppo.gae_lambda));
    put("ppo_epochs", std::to_string(cfg.loop.ppo.epochs));
    put("ppo_value_coef", g9(cfg.loop.ppo.value_coef));
    put("ppo_entropy_coef", g9(cfg.loop.ppo.entropy_coef));
    put("subgroup_column", std::to_string(cfg.loop.subgroup_column));
    return s;
}

struct RunRecord {
    int replication = 0;
    Strategy strategy = Strategy::releap;
    std::uint64_t cohort_hash = 0;
    std::uint64_t cohort_seed = 0;
    bool failed = false;
    std::string error;
    RunResult result;
};

struct ExperimentResults {
    std::vector<RunRecord> records;  // replication-major, strategy order as configured
    int n_failures = 0;
};

// seed-derivation tags; the episode stream is shared by all strategies within
// a replication so the initial seed set is paired
namespace seed_tag {
constexpr std::uint64_t cohort = 1;
constexpr std::uint64_t split = 2;
constexpr std::uint64_t episode = 3;
constexpr std::uint64_t policy = 4;
}  // namespace seed_tag

inline int worker_count(int n_tasks) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RELEAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("RELEAP_THREADS must be a positive integer");
        n = static_cast<int>(v);
    }
    if (n < 1) n = 1;
    return std::min(n, std::max(1, n_tasks));
}

inline ExperimentResults run_experiment(const ExperimentConfig& cfg, bool verbose = false,
                                        std::ostream* log = nullptr) {
    cfg.validate();
    const CohortConfig cohort_cfg = cfg.effective_cohort();
    const auto n_strats = cfg.strategies.size();
    const int reps = cfg.n_replications;

    ExperimentResults results;
    results.records.resize(static_cast<std::size_t>(reps) * n_strats);

    bool has_releap = false;
    for (std::size_t s = 0; s < n_strats; ++s)
        if (cfg.strategies[s] == Strategy::releap) has_releap = true;

    auto make_cohort = [&](int rep, std::uint64_t& seed_out) {
        seed_out = derive_seed(cfg.master_seed, seed_tag::cohort, static_cast<std::uint64_t>(rep));
        CohortConfig c = cohort_cfg;
        c.seed = seed_out;
        Rng rng(c.seed);
        return generate_cohort(c, rng);
    };

    auto run_one = [&](const Cohort& cohort, const SplitIndex& split, int rep, Strategy strategy,
                       PolicyNet* policy, RunRecord& record) {
        record.replication = rep;
        record.strategy = strategy;
        record.cohort_hash = cohort_hash(cohort);
        try {
            LoopConfig loop = cfg.loop;
            loop.strategy = strategy;
            Rng episode_rng(
                derive_seed(cfg.master_seed, seed_tag::episode, static_cast<std::uint64_t>(rep)));
            record.result = run_episode(cohort, split, loop, policy, episode_rng);
        } catch (const Error& e) {
            record.failed = true;
            record.error = e.what();
        }
    };

    // phase one: everything except releap fans out across workers
    {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= reps) return;
                std::uint64_t cohort_seed = 0;
                const Cohort cohort = make_cohort(rep, cohort_seed);
                Rng split_rng(derive_seed(cfg.master_seed, seed_tag::split,
                                          static_cast<std::uint64_t>(rep)));
                const SplitIndex split = split_cohort(cohort, cfg.valid_frac, split_rng);
                for (std::size_t s = 0; s < n_strats; ++s) {
                    RunRecord& record =
                        results.records[static_cast<std::size_t>(rep) * n_strats + s];
                    record.cohort_seed = cohort_seed;
                    if (cfg.strategies[s] == Strategy::releap) {
                        record.replication = rep;
                        record.strategy = Strategy::releap;
                        record.cohort_hash = cohort_hash(cohort);
                        continue;  // sequential phase below
                    }
                    run_one(cohort, split, rep, cfg.strategies[s], nullptr, record);
                }
            }
        };
        const int n_workers = worker_count(reps);
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers - 1));
        for (int w = 1; w < n_workers; ++w) threads.emplace_back(worker);
        worker();
        for (std::thread& t : threads) t.join();
        if (verbose && log)
            *log << "baseline phase done: " << reps << " replication(s) across " << n_workers
                 << " worker(s)\n";
    }

    // phase two: releap episodes share one policy and must run in order
    if (has_releap) {
        PolicyNet policy(derive_seed(cfg.master_seed, seed_tag::policy, 0));
        for (int rep = 0; rep < reps; ++rep) {
            std::uint64_t cohort_seed = 0;
            const Cohort cohort = make_cohort(rep, cohort_seed);
            Rng split_rng(
                derive_seed(cfg.master_seed, seed_tag::split, static_cast<std::uint64_t>(rep)));
            const SplitIndex split = split_cohort(cohort, cfg.valid_frac, split_rng);
            for (std::size_t s = 0; s < n_strats; ++s) {
                if (cfg.strategies[s] != Strategy::releap) continue;
                RunRecord& record = results.records[static_cast<std::size_t>(rep) * n_strats + s];
                run_one(cohort, split, rep, Strategy::releap, &policy, record);
            }
            if (verbose && log)
                *log << "policy phase replication " << rep + 1 << "/" << reps << " done\n";
        }
    }

    for (const RunRecord& r : results.records)
        if (r.failed) ++results.n_failures;
    return results;
}

struct SummaryRow {
    std::string strategy;
    std::string metric;
    int iteration = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n = 0;
};

inline const std::vector<std::string>& summary_metric_names() {
    static const std::vector<std::string> names{"auc", "f1", "tpr", "ppv", "prob_mse", "c_index"};
    return names;
}

inline std::optional<double> report_field(const MetricsReport& r, const std::string& metric) {
    if (metric == "auc") return r.auc;
    if (metric == "f1") return r.f1;
    if (metric == "tpr") return r.tpr;
    if (metric == "ppv") return r.ppv;
    if (metric == "prob_mse") return r.prob_mse;
    if (metric == "c_index") return r.c_index;
    if (metric == "threshold_used") return r.threshold_used;
    throw PreconditionError("unknown metric name: " + metric);
}

// normal-approximation interval around the mean; n = 1 collapses to a point
inline SummaryRow summarize_values(const std::vector<double>& values) {
    SummaryRow row;
    row.n = static_cast<int>(values.size());
    if (values.empty()) return row;
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(row.n);
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean) * (v - row.mean);
    const double sd = row.n > 1 ? std::sqrt(ss / static_cast<double>(row.n - 1)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(static_cast<double>(row.n));
    row.ci_low = row.mean - half;
    row.ci_high = row.mean + half;
    return row;
}

inline std::vector<SummaryRow> summarize(const ExperimentResults& results,
                                         const std::vector<Strategy>& strategy_order) {
    std::vector<SummaryRow> rows;
    for (Strategy strategy : strategy_order) {
        // iterations present for this strategy
        std::size_t max_logs = 0;
        for (const RunRecord& r : results.records)
            if (!r.failed && r.strategy == strategy) max_logs = std::max(max_logs, r.result.logs.size());
        for (const std::string& metric : summary_metric_names()) {
            for (std::size_t it = 0; it < max_logs; ++it) {
                std::vector<double> values;
                for (const RunRecord& r : results.records) {
                    if (r.failed || r.strategy != strategy) continue;
                    if (it >= r.result.logs.size()) continue;
                    const std::optional<double> v =
                        report_field(r.result.logs[it].report, metric);
                    if (v) values.push_back(*v);
                }
                if (values.empty()) continue;
                SummaryRow row = summarize_values(values);
                row.strategy = to_string(strategy);
                row.metric = metric;
                row.iteration = static_cast<int>(it);
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline const std::vector<std::string>& runs_csv_header() {
    static const std::vector<std::string> header{
        "run_id", "strategy", "iteration", "n_labeled", "w_unc",     "w_div",
        "w_qbc",  "reward_raw", "reward_norm", "auc",   "f1",        "tpr",
        "ppv",    "prob_mse", "c_index",   "threshold_used"};
    return header;
}

inline void write_runs_csv(const ExperimentResults& results, const std::string& path) {
    CsvWriter out(path);
    out.row(runs_csv_header());
    for (const RunRecord& r : results.records) {
        if (r.failed) continue;
        for (const IterationLog& log : r.result.logs) {
            out.row({std::to_string(r.replication), to_string(r.strategy),
                     std::to_string(log.iteration), std::to_string(log.n_labeled),
                     g9(log.weights.unc), g9(log.weights.div), g9(log.weights.qbc),
                     g9(log.reward_raw), g9(log.reward_norm), g9(log.report.auc),
                     g9(log.report.f1), g9(log.report.tpr), g9(log.report.ppv),
                     g9(log.report.prob_mse), g9(log.report.c_index),
                     g9(log.report.threshold_used)});
        }
    }
    out.close();
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    CsvWriter out(path);
    out.row({"strategy", "metric", "iteration", "mean", "ci_low", "ci_high", "n"});
    for (const SummaryRow& r : rows)
        out.row({r.strategy, r.metric, std::to_string(r.iteration), g9(r.mean), g9(r.ci_low),
                 g9(r.ci_high), std::to_string(r.n)});
    out.close();
}

inline void write_cohort_meta_csv(const ExperimentResults& results, const std::string& path) {
    CsvWriter out(path);
    out.row({"replication", "cohort_seed", "cohort_hash"});
    int last = -1;
    for (const RunRecord& r : results.records) {
        if (r.replication == last) continue;  // records are replication-major
        last = r.replication;
        out.row({std::to_string(r.replication), std::to_string(r.cohort_seed),
                 std::to_string(r.cohort_hash)});
    }
    out.close();
}

inline void write_subgroups_csv(const ExperimentResults& results, const std::string& path) {
    CsvWriter out(path);
    out.row({"run_id", "strategy", "group", "n_eval", "auc", "f1", "tpr", "ppv", "prob_mse",
             "c_index", "threshold_used"});
    for (const RunRecord& r : results.records) {
        if (r.failed || !r.result.has_subgroups) continue;
        const StratifiedReport& sr = r.result.final_subgroups;
        int group = 0;
        for (const MetricsReport* rep : {&sr.group0, &sr.group1}) {
            out.row({std::to_string(r.replication), to_string(r.strategy), std::to_string(group),
                     std::to_string(rep->n_eval), g9(rep->auc), g9(rep->f1), g9(rep->tpr),
                     g9(rep->ppv), g9(rep->prob_mse), g9(rep->c_index), g9(rep->threshold_used)});
            ++group;
        }
    }
    out.close();
}

// independent recomputation path used by the summarize subcommand and the
// summary-vs-runs consistency check
inline std::vector<SummaryRow> summarize_runs_csv(const std::string& runs_path) {
    const CsvTable table = read_csv(runs_path);
    const int col_strategy = table.column("strategy");
    const int col_iteration = table.column("iteration");

    std::vector<std::string> strategy_order;
    for (const std::vector<std::string>& row : table.rows) {
        const std::string& s = row[static_cast<std::size_t>(col_strategy)];
        bool seen = false;
        for (const std::string& known : strategy_order)
            if (known == s) seen = true;
        if (!seen) strategy_order.push_back(s);
    }

    std::vector<SummaryRow> rows;
    for (const std::string& strategy : strategy_order) {
        for (const std::string& metric : summary_metric_names()) {
            const int col_metric = table.column(metric);
            std::map<int, std::vector<double>> by_iteration;
            for (const std::vector<std::string>& row : table.rows) {
                if (row[static_cast<std::size_t>(col_strategy)] != strategy) continue;
                const std::optional<double> v =
                    csv_opt(row[static_cast<std::size_t>(col_metric)]);
                if (!v) continue;
                const int it =
                    static_cast<int>(csv_num(row[static_cast<std::size_t>(col_iteration)]));
                by_iteration[it].push_back(*v);
            }
            for (const auto& [it, values] : by_iteration) {
                SummaryRow row = summarize_values(values);
                row.strategy = strategy;
                row.metric = metric;
                row.iteration = it;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int cs = table.column("strategy");
    const int cm = table.column("metric");
    const int ci = table.column("iteration");
    const int cmean = table.column("mean");
    const int clo = table.column("ci_low");
    const int chi = table.column("ci_high");
    const int cn = table.column("n");
    std::vector<SummaryRow> rows;
    for (const std::vector<std::string>& r : table.rows) {
        SummaryRow row;
        row.strategy = r[static_cast<std::size_t>(cs)];
        row.metric = r[static_cast<std::size_t>(cm)];
        row.iteration = static_cast<int>(csv_num(r[static_cast<std::size_t>(ci)]));
        row.mean = csv_num(r[static_cast<std::size_t>(cmean)]);
        row.ci_low = csv_num(r[static_cast<std::size_t>(clo)]);
        row.ci_high = csv_num(r[static_cast<std::size_t>(chi)]);
        row.n = static_cast<int>(csv_num(r[static_cast<std::size_t>(cn)]));
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<std::string> emit_plots(const std::vector<SummaryRow>& rows,
                                           const std::string& dir) {
    if (rows.empty()) throw PreconditionError("emit_plots: no summary rows");
    std::vector<std::string> written;
    for (const std::string& metric : summary_metric_names()) {
        std::vector<std::string> strategies;
        for (const SummaryRow& r : rows)
            if (r.metric == metric) {
                bool seen = false;
                for (const std::string& s : strategies)
                    if (s == r.strategy) seen = true;
                if (!seen) strategies.push_back(r.strategy);
            }
        if (strategies.empty()) continue;

        LineChart chart;
        chart.set_title(metric + " vs iteration");
        chart.set_x_label("iteration");
        chart.set_y_label(metric);
        for (const std::string& strategy : strategies) {
            ChartSeries series;
            series.label = strategy;
            for (const SummaryRow& r : rows) {
                if (r.metric != metric || r.strategy != strategy) continue;
                series.x.push_back(r.iteration);
                series.y.push_back(r.mean);
                series.lo.push_back(r.ci_low);
                series.hi.push_back(r.ci_high);
            }
            chart.add_series(std::move(series));
        }
        const std::string path = dir + "/" + metric + ".svg";
        chart.save(path);
        written.push_back(path);
    }
    return written;
}

inline void export_experiment(const ExperimentConfig& cfg, const ExperimentResults& results,
                              const std::vector<SummaryRow>& summaries) {
    std::filesystem::create_directories(cfg.output_dir);
    write_runs_csv(results, cfg.output_dir + "/runs.csv");
    write_summary_csv(summaries, cfg.output_dir + "/summary.csv");
    write_cohort_meta_csv(results, cfg.output_dir + "/cohort_meta.csv");
    bool any_subgroups = false;
    for (const RunRecord& r : results.records)
        if (!r.failed && r.result.has_subgroups) any_subgroups = true;
    if (any_subgroups) write_subgroups_csv(results, cfg.output_dir + "/subgroups.csv");
    std::ofstream config_out(cfg.output_dir + "/config.txt");
    if (!config_out) throw IoError("cannot open for writing: " + cfg.output_dir + "/config.txt");
    config_out << serialize_config(cfg);
}

}  // namespace releap
