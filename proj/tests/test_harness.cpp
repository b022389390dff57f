#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "releap/harness.hpp"

using namespace releap;

namespace {

// small desk config that keeps replication counts and cohort sizes tiny
ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.cohort.n = 120;
    cfg.cohort.d_x1 = 3;
    cfg.cohort.d_x2 = 2;
    cfg.loop.seed_size = 6;
    cfg.loop.batch_size = 5;
    cfg.loop.n_iterations = 3;
    cfg.loop.committee.m = 3;
    cfg.n_replications = 3;
    cfg.master_seed = 9;
    cfg.output_dir = out_dir;
    cfg.strategies = {Strategy::uncertainty, Strategy::random, Strategy::proxy_only};
    return cfg;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config applies documented defaults") {
    std::stringstream in("mode = logistic\n");
    const ExperimentConfig cfg = parse_config(in, "inline");
    CHECK(cfg.loop.mode == Mode::logistic);
    CHECK(cfg.cohort.n == 1000);
    CHECK(cfg.loop.seed_size == 40);
    CHECK(cfg.loop.batch_size == 40);
    CHECK(cfg.loop.n_iterations == 10);
    CHECK(cfg.n_replications == 100);
    CHECK(cfg.valid_frac == 0.2);
    CHECK(cfg.strategies.size() == 7);
    CHECK(cfg.loop.committee.m == 7);
    CHECK(cfg.loop.ppo.lr == 3e-4);
    CHECK(cfg.loop.subgroup_column == -1);
}

TEST_CASE("config parser rejects unknown keys and bad values with line info") {
    std::stringstream bad_key("mode = logistic\nbatch_sized = 3\n");
    CHECK_THROWS_WITH(parse_config(bad_key, "cfg"),
                      Catch::Matchers::ContainsSubstring("cfg:2") &&
                          Catch::Matchers::ContainsSubstring("unknown key"));

    std::stringstream bad_value("batch_size = many\n");
    CHECK_THROWS_AS(parse_config(bad_value, "cfg"), ConfigError);

    std::stringstream no_eq("just words\n");
    CHECK_THROWS_WITH(parse_config(no_eq, "cfg"),
                      Catch::Matchers::ContainsSubstring("expected key = value"));

    std::stringstream zero_batch("batch_size = 0\n");
    CHECK_THROWS_WITH(parse_config(zero_batch, "cfg"),
                      Catch::Matchers::ContainsSubstring("batch_size must be >= 1"));

    // every violated invariant is named at once
    std::stringstream multi("batch_size = 0\nn_replications = 0\n");
    CHECK_THROWS_AS(parse_config(multi, "cfg"), ConfigError);

    CHECK_THROWS_AS(load_config("/nonexistent/releap.cfg"), IoError);
}

TEST_CASE("config serialization round-trips") {
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        ExperimentConfig cfg;
        cfg.loop.mode = rng.bernoulli(0.5) ? Mode::survival : Mode::logistic;
        cfg.cohort.n = 200 + static_cast<int>(rng.uniform_int(800));
        cfg.cohort.beta_s = rng.uniform(0.5, 4.0);
        cfg.cohort.sigma_proxy = rng.uniform(0.5, 3.0);
        cfg.loop.seed_size = 4 + static_cast<int>(rng.uniform_int(20));
        cfg.loop.batch_size = 1 + static_cast<int>(rng.uniform_int(10));
        cfg.loop.n_iterations = static_cast<int>(rng.uniform_int(8));
        cfg.loop.reward_mode = rng.bernoulli(0.5) ? RewardMode::lookahead : RewardMode::shaped;
        cfg.loop.mirror_validation = rng.bernoulli(0.5);
        cfg.loop.ppo.lr = rng.uniform(1e-4, 1e-2);
        cfg.loop.diversity_lambda = rng.uniform(0.0, 1.0);
        cfg.n_replications = 1 + static_cast<int>(rng.uniform_int(5));
        cfg.master_seed = rng.next_u64() % 100000;
        cfg.strategies = {Strategy::qbc, Strategy::oracle};
        cfg.validate();

        std::stringstream ss(serialize_config(cfg));
        const ExperimentConfig back = parse_config(ss, "roundtrip");
        CHECK(serialize_config(back) == serialize_config(cfg));
    }
}

TEST_CASE("ci summaries match hand arithmetic") {
    const SummaryRow two = summarize_values({0.7, 0.8});
    CHECK(two.mean == Catch::Approx(0.75).epsilon(1e-12));
    const double half = 1.96 * 0.0707106781186548 / std::sqrt(2.0);
    CHECK(two.ci_high - two.mean == Catch::Approx(half).epsilon(1e-10));
    CHECK(two.mean - two.ci_low == Catch::Approx(half).epsilon(1e-10));

    const SummaryRow one = summarize_values({0.9});
    CHECK(one.mean == 0.9);
    CHECK(one.ci_low == one.mean);
    CHECK(one.ci_high == one.mean);

    const SummaryRow flat = summarize_values({0.6, 0.6, 0.6, 0.6});
    CHECK(flat.ci_low == flat.mean);
    CHECK(flat.ci_high == flat.mean);
    CHECK(flat.n == 4);
}

TEST_CASE("experiment pairs cohorts across strategies and orders records") {
    TempDir dir("releap_harness_pairing");
    const ExperimentConfig cfg = tiny_config(dir.str());
    const ExperimentResults results = run_experiment(cfg);
    REQUIRE(results.records.size() == 9);
    CHECK(results.n_failures == 0);

    for (int rep = 0; rep < 3; ++rep) {
        const std::size_t base = static_cast<std::size_t>(rep) * 3;
        CHECK(results.records[base].replication == rep);
        CHECK(results.records[base].strategy == Strategy::uncertainty);
        CHECK(results.records[base + 1].strategy == Strategy::random);
        CHECK(results.records[base + 2].strategy == Strategy::proxy_only);
        // paired design: identical cohort bytes within a replication
        CHECK(results.records[base].cohort_hash == results.records[base + 1].cohort_hash);
        CHECK(results.records[base].cohort_hash == results.records[base + 2].cohort_hash);
    }
    // distinct cohorts across replications
    CHECK(results.records[0].cohort_hash != results.records[3].cohort_hash);

    // paired seed set: first-iteration labeled counts agree between strategies
    CHECK(results.records[0].result.logs[0].n_labeled ==
          results.records[1].result.logs[0].n_labeled);
}

TEST_CASE("experiment outputs are a pure function of config and seed") {
    TempDir dir_a("releap_harness_pure_a");
    TempDir dir_b("releap_harness_pure_b");
    ExperimentConfig cfg_a = tiny_config(dir_a.str());
    cfg_a.strategies = {Strategy::releap, Strategy::random};
    ExperimentConfig cfg_b = cfg_a;
    cfg_b.output_dir = dir_b.str();

    const ExperimentResults res_a = run_experiment(cfg_a);
    const ExperimentResults res_b = run_experiment(cfg_b);
    export_experiment(cfg_a, res_a, summarize(res_a, cfg_a.strategies));
    export_experiment(cfg_b, res_b, summarize(res_b, cfg_b.strategies));

    CHECK(slurp(dir_a.str() + "/runs.csv") == slurp(dir_b.str() + "/runs.csv"));
    CHECK(slurp(dir_a.str() + "/summary.csv") == slurp(dir_b.str() + "/summary.csv"));
    CHECK(slurp(dir_a.str() + "/cohort_meta.csv") == slurp(dir_b.str() + "/cohort_meta.csv"));
}

TEST_CASE("runs csv row counts and byte determinism") {
    TempDir dir("releap_harness_rows");
    const ExperimentConfig cfg = tiny_config(dir.str());
    const ExperimentResults results = run_experiment(cfg);
    const std::vector<SummaryRow> rows = summarize(results, cfg.strategies);
    export_experiment(cfg, results, rows);

    const CsvTable runs = read_csv(dir.str() + "/runs.csv");
    CHECK(runs.header == runs_csv_header());
    // strategies x replications x (iterations + 1)
    CHECK(runs.rows.size() == 3u * 3u * 4u);

    const std::string first = slurp(dir.str() + "/runs.csv");
    export_experiment(cfg, results, rows);
    CHECK(slurp(dir.str() + "/runs.csv") == first);

    const CsvTable meta = read_csv(dir.str() + "/cohort_meta.csv");
    CHECK(meta.rows.size() == 3);

    // empty results still produce a headers-only file
    ExperimentResults empty;
    write_runs_csv(empty, dir.str() + "/empty_runs.csv");
    const CsvTable empty_runs = read_csv(dir.str() + "/empty_runs.csv");
    CHECK(empty_runs.header == runs_csv_header());
    CHECK(empty_runs.rows.empty());
}

TEST_CASE("summary csv agrees with an independent recomputation from runs csv") {
    TempDir dir("releap_harness_recompute");
    ExperimentConfig cfg = tiny_config(dir.str());
    cfg.strategies = {Strategy::uncertainty, Strategy::qbc, Strategy::oracle};
    const ExperimentResults results = run_experiment(cfg);
    const std::vector<SummaryRow> direct = summarize(results, cfg.strategies);
    export_experiment(cfg, results, direct);

    const std::vector<SummaryRow> recomputed = summarize_runs_csv(dir.str() + "/runs.csv");
    REQUIRE(recomputed.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(recomputed[i].strategy == direct[i].strategy);
        CHECK(recomputed[i].metric == direct[i].metric);
        CHECK(recomputed[i].iteration == direct[i].iteration);
        CHECK(recomputed[i].mean == Catch::Approx(direct[i].mean).margin(1e-9));
        CHECK(recomputed[i].ci_low == Catch::Approx(direct[i].ci_low).margin(1e-9));
        CHECK(recomputed[i].ci_high == Catch::Approx(direct[i].ci_high).margin(1e-9));
        CHECK(recomputed[i].n == direct[i].n);
    }
}

TEST_CASE("subgroup reporting lands in its own csv") {
    TempDir dir("releap_harness_subgroups");
    ExperimentConfig cfg = tiny_config(dir.str());
    cfg.strategies = {Strategy::uncertainty};
    cfg.loop.subgroup_column = 1;
    const ExperimentResults results = run_experiment(cfg);
    export_experiment(cfg, results, summarize(results, cfg.strategies));

    const CsvTable sub = read_csv(dir.str() + "/subgroups.csv");
    CHECK(sub.rows.size() == 2u * 3u);  // two groups per run
    int total = 0;
    const int col_n = sub.column("n_eval");
    for (const std::vector<std::string>& row : sub.rows)
        total += static_cast<int>(csv_num(row[static_cast<std::size_t>(col_n)]));
    // groups partition the validation set in every run
    CHECK(total == 3 * static_cast<int>(std::llround(0.2 * cfg.cohort.n)));
}

TEST_CASE("single oracle replication yields a flat one-strategy summary") {
    TempDir dir("releap_harness_oracle");
    ExperimentConfig cfg = tiny_config(dir.str());
    cfg.strategies = {Strategy::oracle};
    cfg.n_replications = 1;
    const ExperimentResults results = run_experiment(cfg);
    const std::vector<SummaryRow> rows = summarize(results, cfg.strategies);
    for (const SummaryRow& r : rows) {
        CHECK(r.n == 1);
        CHECK(r.ci_low == r.mean);
        CHECK(r.ci_high == r.mean);
    }
    double first_auc = -1.0;
    for (const SummaryRow& r : rows) {
        if (r.metric != "auc") continue;
        if (first_auc < 0.0) first_auc = r.mean;
        CHECK(r.mean == first_auc);
    }
}

TEST_CASE("svg charts are well formed and bands map to the data ranges") {
    LineChart chart;
    chart.set_title("toy");
    chart.set_x_label("iteration");
    chart.set_y_label("auc");
    ChartSeries s;
    s.label = "one";
    s.x = {0.0, 1.0, 2.0};
    s.y = {0.5, 0.6, 0.7};
    s.lo = {0.45, 0.55, 0.65};
    s.hi = {0.55, 0.65, 0.75};
    chart.add_series(s);
    const std::string svg = chart.render();

    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<polygon") != std::string::npos);

    // every opened tag closes (self-closing or matching pair): count crudely
    CHECK(std::count(svg.begin(), svg.end(), '<') == std::count(svg.begin(), svg.end(), '>'));

    // band polygon extremes equal the mapped ci bounds
    char expect_hi[64], expect_lo[64];
    std::snprintf(expect_hi, sizeof expect_hi, "%.6g,%.6g", chart.map_x(2.0), chart.map_y(0.75));
    std::snprintf(expect_lo, sizeof expect_lo, "%.6g,%.6g", chart.map_x(0.0), chart.map_y(0.45));
    CHECK(svg.find(expect_hi) != std::string::npos);
    CHECK(svg.find(expect_lo) != std::string::npos);

    // map_y decreases as data increases (screen coordinates)
    CHECK(chart.map_y(0.75) < chart.map_y(0.45));
    CHECK(chart.map_x(0.0) < chart.map_x(2.0));

    TempDir dir("releap_harness_svg");
    std::vector<SummaryRow> rows;
    for (int it = 0; it <= 2; ++it) {
        SummaryRow r;
        r.strategy = "uncertainty";
        r.metric = "auc";
        r.iteration = it;
        r.mean = 0.6 + 0.05 * it;
        r.ci_low = r.mean - 0.02;
        r.ci_high = r.mean + 0.02;
        r.n = 5;
        rows.push_back(r);
    }
    const std::vector<std::string> files = emit_plots(rows, dir.str());
    REQUIRE(files.size() == 1);
    CHECK(files[0] == dir.str() + "/auc.svg");
    const std::string body = slurp(files[0]);
    CHECK(body.find("xmlns") != std::string::npos);
}

TEST_CASE("worker count respects the environment cap") {
    const char* saved = std::getenv("RELEAP_THREADS");
    const std::string saved_value = saved ? saved : "";

    setenv("RELEAP_THREADS", "2", 1);
    CHECK(worker_count(10) == 2);
    CHECK(worker_count(1) == 1);
    setenv("RELEAP_THREADS", "0", 1);
    CHECK_THROWS_AS(worker_count(4), ConfigError);
    setenv("RELEAP_THREADS", "abc", 1);
    CHECK_THROWS_AS(worker_count(4), ConfigError);

    if (saved)
        setenv("RELEAP_THREADS", saved_value.c_str(), 1);
    else
        unsetenv("RELEAP_THREADS");
}

TEST_CASE("results are identical under different worker counts") {
    TempDir dir_a("releap_harness_threads_a");
    TempDir dir_b("releap_harness_threads_b");
    ExperimentConfig cfg = tiny_config(dir_a.str());
    cfg.strategies = {Strategy::releap, Strategy::uncertainty, Strategy::random};

    setenv("RELEAP_THREADS", "1", 1);
    const ExperimentResults res_a = run_experiment(cfg);
    export_experiment(cfg, res_a, summarize(res_a, cfg.strategies));

    setenv("RELEAP_THREADS", "3", 1);
    cfg.output_dir = dir_b.str();
    const ExperimentResults res_b = run_experiment(cfg);
    export_experiment(cfg, res_b, summarize(res_b, cfg.strategies));
    unsetenv("RELEAP_THREADS");

    CHECK(slurp(dir_a.str() + "/runs.csv") == slurp(dir_b.str() + "/runs.csv"));
    CHECK(slurp(dir_a.str() + "/summary.csv") == slurp(dir_b.str() + "/summary.csv"));
}
