#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "releap/cohort.hpp"
#include "releap/rng.hpp"

using namespace releap;

namespace {
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double ma = a.mean(), mb = b.mean();
    const auto ca = (a.array() - ma).matrix();
    const auto cb = (b.array() - mb).matrix();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}
}  // namespace

TEST_CASE("default config produces a full cohort with valid ranges") {
    CohortConfig cfg;
    cfg.seed = 42;
    Rng rng(cfg.seed);
    const Cohort c = generate_cohort(cfg, rng);
    REQUIRE(c.n() == 1000);
    CHECK(c.x1.rows() == 1000);
    CHECK(c.x1.cols() == cfg.d_x1);
    CHECK(c.x2.cols() == cfg.d_x2);
    for (int i = 0; i < c.n(); ++i) {
        CHECK((c.s_true[i] == 0 || c.s_true[i] == 1));
        CHECK((c.y[i] == 0 || c.y[i] == 1));
        CHECK(c.p_true[i] > 0.0);
        CHECK(c.p_true[i] < 1.0);
        CHECK(c.s_star[i] > 0.0);
        CHECK(c.s_star[i] < 1.0);
    }
    // no survival block requested
    CHECK(c.t.isZero());
    CHECK(c.censor_horizon == 0.0);
}

TEST_CASE("generation is bitwise deterministic in the seed") {
    CohortConfig cfg;
    cfg.seed = 7;
    Rng r1(cfg.seed), r2(cfg.seed);
    const Cohort a = generate_cohort(cfg, r1);
    const Cohort b = generate_cohort(cfg, r2);
    CHECK(cohort_hash(a) == cohort_hash(b));
    CHECK(a.x1 == b.x1);
    CHECK(a.s_star == b.s_star);
    Rng r3(8);
    const Cohort c = generate_cohort(cfg, r3);
    CHECK(cohort_hash(a) != cohort_hash(c));
}

TEST_CASE("noiseless wide-scale proxy is near-perfect") {
    CohortConfig cfg;
    cfg.n = 500;
    cfg.sigma_proxy = 0.0;
    cfg.proxy_scale = 30.0;
    Rng rng(3);
    const Cohort c = generate_cohort(cfg, rng);
    for (int i = 0; i < c.n(); ++i) {
        if (c.s_true[i] == 1)
            CHECK(c.s_star[i] > 0.999);
        else
            CHECK(c.s_star[i] < 0.001);
    }
}

TEST_CASE("proxy is informative but imperfect at the default noise scales") {
    CohortConfig cfg;
    cfg.seed = 42;
    Rng rng(cfg.seed);
    const Cohort c = generate_cohort(cfg, rng);
    const Eigen::VectorXd s = c.s_true.cast<double>();
    const double r = pearson(c.s_star, s);
    CHECK(r > 0.3);
    CHECK(r < 0.95);
}

TEST_CASE("thresholded phenotype mode follows p_true") {
    CohortConfig cfg;
    cfg.n = 400;
    cfg.threshold_s_true = true;
    Rng rng(5);
    const Cohort c = generate_cohort(cfg, rng);
    for (int i = 0; i < c.n(); ++i) CHECK(c.s_true[i] == (c.p_true[i] >= 0.5 ? 1 : 0));
}

TEST_CASE("phenotype rate matches quadrature over the linear predictor") {
    CohortConfig cfg;
    cfg.n = 100000;
    Rng rng(11);
    const Cohort c = generate_cohort(cfg, rng);
    // eta | beta1 is centered normal; integrate sigmoid against that density
    const double sd = std::sqrt(c.beta1.squaredNorm() + cfg.sigma_link * cfg.sigma_link);
    const int steps = 20000;
    const double lo = -10.0 * sd, hi = 10.0 * sd, h = (hi - lo) / steps;
    double integral = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double z = lo + k * h;
        const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
        const double phi = std::exp(-0.5 * z * z / (sd * sd)) / (sd * std::sqrt(2.0 * M_PI));
        integral += w * sigmoid(z) * phi;
    }
    integral *= h;
    const double rate = c.s_true.cast<double>().mean();
    CHECK(std::abs(rate - integral) < 0.01);
}

TEST_CASE("positive phenotype raises the outcome rate") {
    CohortConfig cfg;
    cfg.n = 20000;
    Rng rng(13);
    const Cohort c = generate_cohort(cfg, rng);
    double sum1 = 0.0, sum0 = 0.0;
    int n1 = 0, n0 = 0;
    for (int i = 0; i < c.n(); ++i) {
        if (c.s_true[i] == 1) {
            sum1 += c.y[i];
            ++n1;
        } else {
            sum0 += c.y[i];
            ++n0;
        }
    }
    REQUIRE(n1 > 0);
    REQUIRE(n0 > 0);
    CHECK(sum1 / n1 > sum0 / n0 + 0.2);
}

TEST_CASE("survival mode censors administratively") {
    CohortConfig cfg;
    cfg.n = 5000;
    cfg.survival = SurvivalConfig{0.1, 5.0};
    Rng rng(17);
    const Cohort c = generate_cohort(cfg, rng);
    CHECK(c.censor_horizon == 5.0);
    int events = 0;
    double event_time_sum = 0.0;
    for (int i = 0; i < c.n(); ++i) {
        CHECK(c.t[i] > 0.0);
        CHECK(c.t[i] <= 5.0);
        if (c.event[i] == 1) {
            CHECK(c.t[i] < 5.0);
            ++events;
            event_time_sum += c.t[i];
        } else {
            CHECK(c.t[i] == 5.0);
        }
    }
    CHECK(events > 0);
    CHECK(events < c.n());
    CHECK(event_time_sum / events < 5.0);
}

TEST_CASE("config validation rejects bad fields") {
    CohortConfig cfg;
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = CohortConfig{};
    cfg.sigma_proxy = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = CohortConfig{};
    cfg.survival = SurvivalConfig{0.0, 5.0};
    Rng rng(1);
    CHECK_THROWS_AS(generate_cohort(cfg, rng), ConfigError);
}

TEST_CASE("split keeps strata proportional and reproducible") {
    CohortConfig cfg;
    cfg.seed = 21;
    Rng rng(cfg.seed);
    const Cohort c = generate_cohort(cfg, rng);
    Rng sa(99), sb(99);
    const SplitIndex a = split_cohort(c, 0.2, sa);
    const SplitIndex b = split_cohort(c, 0.2, sb);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.valid_ids == b.valid_ids);
    CHECK(a.valid_ids.size() == 200);
    CHECK(a.train_ids.size() == 800);

    std::set<int> all(a.train_ids.begin(), a.train_ids.end());
    all.insert(a.valid_ids.begin(), a.valid_ids.end());
    CHECK(all.size() == 1000);

    // per-stratum counts: rounded to the nearest patient
    int pos_total = 0, pos_valid = 0;
    for (int i = 0; i < c.n(); ++i) pos_total += c.y[i];
    for (int id : a.valid_ids) pos_valid += c.y[id];
    CHECK(std::abs(pos_valid - 0.2 * pos_total) <= 0.5 + 1e-9);

    CHECK(std::is_sorted(a.train_ids.begin(), a.train_ids.end()));
    CHECK(std::is_sorted(a.valid_ids.begin(), a.valid_ids.end()));
}

TEST_CASE("tiny split has two validation patients with at most one positive") {
    CohortConfig cfg;
    cfg.n = 10;
    Rng g(2);
    Cohort c = generate_cohort(cfg, g);
    for (int i = 0; i < 10; ++i) c.y[i] = i < 2 ? 1 : 0;
    Rng rng(4);
    const SplitIndex s = split_cohort(c, 0.2, rng);
    REQUIRE(s.valid_ids.size() == 2);
    int pos = 0;
    for (int id : s.valid_ids) pos += c.y[id];
    CHECK(pos <= 1);
}

TEST_CASE("single-class cohort cannot be stratified") {
    CohortConfig cfg;
    cfg.n = 50;
    Rng g(2);
    Cohort c = generate_cohort(cfg, g);
    for (int i = 0; i < c.n(); ++i) c.y[i] = 1;
    Rng rng(4);
    CHECK_THROWS_AS(split_cohort(c, 0.2, rng), ConfigError);
    Rng rng2(4);
    CHECK_THROWS_AS(split_cohort(c, 0.0, rng2), PreconditionError);
}

TEST_CASE("cohort csv round trip preserves values to nine digits") {
    CohortConfig cfg;
    cfg.n = 64;
    cfg.survival = SurvivalConfig{0.2, 4.0};
    Rng rng(33);
    const Cohort c = generate_cohort(cfg, rng);
    const std::string path = "cohort_roundtrip_test.csv";
    write_cohort_csv(c, path);
    const Cohort r = read_cohort_csv(path);
    std::remove(path.c_str());
    REQUIRE(r.n() == c.n());
    REQUIRE(r.x1.cols() == c.x1.cols());
    REQUIRE(r.x2.cols() == c.x2.cols());
    CHECK(r.s_true == c.s_true);
    CHECK(r.y == c.y);
    CHECK(r.event == c.event);
    for (int i = 0; i < c.n(); ++i) {
        CHECK(std::abs(r.s_star[i] - c.s_star[i]) <= 1e-8 * std::abs(c.s_star[i]) + 1e-12);
        CHECK(std::abs(r.t[i] - c.t[i]) <= 1e-8 * std::abs(c.t[i]) + 1e-12);
        for (int j = 0; j < c.x1.cols(); ++j)
            CHECK(std::abs(r.x1(i, j) - c.x1(i, j)) <= 1e-8 * std::abs(c.x1(i, j)) + 1e-12);
    }
    CHECK_THROWS_AS(read_cohort_csv("definitely_missing_file.csv"), Error);
}
