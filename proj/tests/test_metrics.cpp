#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "releap/metrics.hpp"
#include "releap/rng.hpp"

using namespace releap;

namespace {

double auc_pair_loop(const Eigen::VectorXd& s, const Eigen::VectorXi& y) {
    double credit = 0.0;
    long long pairs = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (s[i] > s[j])
                credit += 1.0;
            else if (s[i] == s[j])
                credit += 0.5;
        }
    }
    return credit / pairs;
}

double cindex_pair_loop(const Eigen::VectorXd& r, const Eigen::VectorXd& t,
                        const Eigen::VectorXi& e, bool* any = nullptr) {
    double credit = 0.0;
    long long pairs = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (e[i] != 1) continue;
        for (Eigen::Index j = 0; j < r.size(); ++j) {
            if (!(t[i] < t[j])) continue;
            ++pairs;
            if (r[i] > r[j])
                credit += 1.0;
            else if (r[i] == r[j])
                credit += 0.5;
        }
    }
    if (any) *any = pairs > 0;
    return pairs > 0 ? credit / pairs : -1.0;
}

ThresholdMetrics threshold_exhaustive(const Eigen::VectorXd& s, const Eigen::VectorXi& y,
                                      double target) {
    // every candidate cut: each score plus one above the max
    std::vector<double> cuts(s.data(), s.data() + s.size());
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(cuts.back() + 1.0);
    const int n_pos = y.sum();
    const int n_neg = static_cast<int>(y.size()) - n_pos;
    ThresholdMetrics best;
    double best_tpr = -1.0, best_cut = 1e300;
    for (double cut : cuts) {
        int tp = 0, fp = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s[i] >= cut) ((y[i] == 1) ? tp : fp)++;
        }
        const double fpr = double(fp) / n_neg;
        if (fpr > target) continue;
        const double tpr = double(tp) / n_pos;
        if (tpr > best_tpr + 1e-15 || (std::abs(tpr - best_tpr) <= 1e-15 && cut < best_cut)) {
            best_tpr = tpr;
            best_cut = cut;
            best.threshold = cut;
            best.tpr = tpr;
            best.ppv = (tp + fp) > 0 ? double(tp) / (tp + fp) : 0.0;
            best.f1 = (best.tpr + best.ppv) > 0 ? 2 * best.tpr * best.ppv / (best.tpr + best.ppv)
                                                : 0.0;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("auc on separated and flipped labels") {
    Eigen::VectorXd s(4);
    s << 0.1, 0.2, 0.8, 0.9;
    Eigen::VectorXi y(4);
    y << 0, 0, 1, 1;
    CHECK(auc(s, y) == 1.0);
    Eigen::VectorXi flipped(4);
    flipped << 1, 1, 0, 0;
    CHECK(auc(s, flipped) == 0.0);
    Eigen::VectorXi ones = Eigen::VectorXi::Ones(4);
    CHECK_THROWS_AS(auc(s, ones), MetricError);
}

TEST_CASE("rank auc equals the pair loop on 200 random tied instances") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(46));
        Eigen::VectorXd s(n);
        Eigen::VectorXi y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = 0.1 * static_cast<double>(rng.uniform_int(12));  // force ties
            y[i] = rng.bernoulli(0.4) ? 1 : 0;
        }
        y[0] = 0;
        y[1] = 1;
        CHECK(auc(s, y) == Catch::Approx(auc_pair_loop(s, y)).epsilon(1e-12));
    }
}

TEST_CASE("auc complement identity on tie-free scores") {
    Rng rng(103);
    Eigen::VectorXd s(40);
    Eigen::VectorXi y(40);
    for (int i = 0; i < 40; ++i) {
        s[i] = rng.normal();
        y[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(auc(s, y) + auc(-s, y) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("auc is invariant to strictly monotone transforms") {
    Rng rng(107);
    Eigen::VectorXd s(30);
    Eigen::VectorXi y(30);
    for (int i = 0; i < 30; ++i) {
        s[i] = rng.normal();
        y[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const Eigen::VectorXd warped = s.array().exp();
    CHECK(auc(s, y) == auc(warped, y));
}

TEST_CASE("threshold metrics on clean and degenerate scores") {
    Eigen::VectorXd s(6);
    s << 0.05, 0.1, 0.2, 0.8, 0.9, 0.95;
    Eigen::VectorXi y(6);
    y << 0, 0, 0, 1, 1, 1;
    const ThresholdMetrics tm = threshold_metrics(s, y, 0.1);
    CHECK(tm.tpr == 1.0);
    CHECK(tm.ppv == 1.0);
    CHECK(tm.f1 == 1.0);

    Eigen::VectorXd flat = Eigen::VectorXd::Constant(6, 0.4);
    const ThresholdMetrics degenerate = threshold_metrics(flat, y, 0.1);
    CHECK(degenerate.tpr == 0.0);
    CHECK(degenerate.ppv == 0.0);
    CHECK(degenerate.f1 == 0.0);

    CHECK_THROWS_AS(threshold_metrics(s, y, 0.0), PreconditionError);
    Eigen::VectorXi ones = Eigen::VectorXi::Ones(6);
    CHECK_THROWS_AS(threshold_metrics(s, ones, 0.1), MetricError);
}

TEST_CASE("threshold scan matches the exhaustive oracle on 200 instances") {
    Rng rng(109);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 8 + static_cast<int>(rng.uniform_int(43));
        Eigen::VectorXd s(n);
        Eigen::VectorXi y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = 0.05 * static_cast<double>(rng.uniform_int(25));
            y[i] = rng.bernoulli(0.45) ? 1 : 0;
        }
        y[0] = 0;
        y[1] = 1;
        const double target = 0.05 + 0.3 * rng.uniform();
        const ThresholdMetrics got = threshold_metrics(s, y, target);
        const ThresholdMetrics want = threshold_exhaustive(s, y, target);
        CHECK(got.tpr == want.tpr);
        CHECK(got.ppv == want.ppv);
        CHECK(got.f1 == want.f1);
        CHECK(got.threshold == want.threshold);
    }
}

TEST_CASE("threshold operating point survives monotone transforms") {
    Rng rng(113);
    Eigen::VectorXd s(40);
    Eigen::VectorXi y(40);
    for (int i = 0; i < 40; ++i) {
        s[i] = rng.normal();
        y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const ThresholdMetrics a = threshold_metrics(s, y, 0.1);
    const ThresholdMetrics b = threshold_metrics(s.array().exp().matrix(), y, 0.1);
    CHECK(a.tpr == b.tpr);
    CHECK(a.ppv == b.ppv);
    CHECK(a.f1 == b.f1);
}

TEST_CASE("brier score hand values") {
    Eigen::VectorXd p(2);
    Eigen::VectorXi y(2);
    p << 0.2, 0.7;
    y << 0, 1;
    CHECK(prob_mse(p, y) == Catch::Approx(0.065).epsilon(1e-12));

    Eigen::VectorXd exact(3);
    exact << 0, 1, 1;
    Eigen::VectorXi ylab(3);
    ylab << 0, 1, 1;
    CHECK(prob_mse(exact, ylab) == 0.0);

    Eigen::VectorXd half = Eigen::VectorXd::Constant(3, 0.5);
    CHECK(prob_mse(half, ylab) == 0.25);

    Eigen::VectorXd bad(1);
    bad << 1.5;
    Eigen::VectorXi yb(1);
    yb << 1;
    CHECK_THROWS_AS(prob_mse(bad, yb), PreconditionError);
}

TEST_CASE("c-index on ordered, constant, and degenerate inputs") {
    Eigen::VectorXd t(5);
    t << 1, 2, 3, 4, 5;
    Eigen::VectorXi e = Eigen::VectorXi::Ones(5);
    Eigen::VectorXd risk(5);
    risk << 5, 4, 3, 2, 1;  // earliest death has highest risk
    CHECK(c_index(risk, t, e) == 1.0);

    Eigen::VectorXd flat = Eigen::VectorXd::Constant(5, 2.0);
    CHECK(c_index(flat, t, e) == 0.5);

    Eigen::VectorXi censored = Eigen::VectorXi::Zero(5);
    CHECK_THROWS_AS(c_index(risk, t, censored), MetricError);
    Eigen::VectorXd same_t = Eigen::VectorXd::Constant(5, 3.0);
    CHECK_THROWS_AS(c_index(risk, same_t, e), MetricError);
}

TEST_CASE("fenwick c-index equals the pair loop on 200 censored instances") {
    Rng rng(127);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(46));
        Eigen::VectorXd risk(n), t(n);
        Eigen::VectorXi e(n);
        for (int i = 0; i < n; ++i) {
            risk[i] = 0.25 * static_cast<double>(rng.uniform_int(9));  // risk ties
            t[i] = 1.0 + static_cast<double>(rng.uniform_int(8));      // time ties
            e[i] = rng.bernoulli(0.6) ? 1 : 0;
        }
        bool any = false;
        const double want = cindex_pair_loop(risk, t, e, &any);
        if (!any) {
            CHECK_THROWS_AS(c_index(risk, t, e), MetricError);
            continue;
        }
        CHECK(c_index(risk, t, e) == Catch::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("c-index is invariant to monotone risk transforms") {
    Rng rng(131);
    const int n = 25;
    Eigen::VectorXd risk(n), t(n);
    Eigen::VectorXi e(n);
    for (int i = 0; i < n; ++i) {
        risk[i] = rng.normal();
        t[i] = rng.exponential(1.0);
        e[i] = rng.bernoulli(0.7) ? 1 : 0;
    }
    e[0] = 1;
    CHECK(c_index(risk, t, e) == c_index(risk.array().exp().matrix() * 3.0, t, e));
}

TEST_CASE("classification report collects the mode metrics") {
    Rng rng(137);
    const int n = 60;
    Eigen::VectorXd p(n);
    Eigen::VectorXi y(n);
    for (int i = 0; i < n; ++i) {
        p[i] = rng.uniform();
        y[i] = rng.bernoulli(p[i]) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const MetricsReport r = classification_report(p, y, 0.1);
    REQUIRE(r.auc.has_value());
    REQUIRE(r.f1.has_value());
    REQUIRE(r.tpr.has_value());
    REQUIRE(r.ppv.has_value());
    REQUIRE(r.prob_mse.has_value());
    REQUIRE(r.threshold_used.has_value());
    CHECK_FALSE(r.c_index.has_value());
    CHECK(r.n_eval == n);
    CHECK(*r.auc == auc(p, y));
    CHECK(*r.prob_mse == prob_mse(p, y));

    Eigen::VectorXi ones = Eigen::VectorXi::Ones(n);
    const MetricsReport degenerate = classification_report(p, ones, 0.1);
    CHECK_FALSE(degenerate.auc.has_value());
    CHECK(degenerate.n_eval == n);
}

TEST_CASE("stratified reports match direct subset recomputation") {
    Rng rng(139);
    const int n = 80;
    Eigen::VectorXd p(n);
    Eigen::VectorXi y(n), g(n);
    for (int i = 0; i < n; ++i) {
        p[i] = rng.uniform();
        y[i] = rng.bernoulli(p[i]) ? 1 : 0;
        g[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    // make both strata contain both classes
    y[0] = 0; g[0] = 0;
    y[1] = 1; g[1] = 0;
    y[2] = 0; g[2] = 1;
    y[3] = 1; g[3] = 1;
    const StratifiedReport sr = stratified_classification_report(p, y, g, 0.1);
    for (int grp = 0; grp < 2; ++grp) {
        std::vector<double> ps;
        std::vector<int> ys;
        for (int i = 0; i < n; ++i) {
            if (g[i] == grp) {
                ps.push_back(p[i]);
                ys.push_back(y[i]);
            }
        }
        Eigen::VectorXd pv = Eigen::Map<Eigen::VectorXd>(ps.data(), ps.size());
        Eigen::VectorXi yv = Eigen::Map<Eigen::VectorXi>(ys.data(), ys.size());
        const MetricsReport direct = classification_report(pv, yv, 0.1);
        const MetricsReport& got = grp == 0 ? sr.group0 : sr.group1;
        CHECK(got.auc == direct.auc);
        CHECK(got.f1 == direct.f1);
        CHECK(got.prob_mse == direct.prob_mse);
        CHECK(got.n_eval == direct.n_eval);
    }
}

TEST_CASE("identical strata give identical reports and empty group stays empty") {
    Eigen::VectorXd p(8);
    p << 0.1, 0.9, 0.2, 0.8, 0.1, 0.9, 0.2, 0.8;
    Eigen::VectorXi y(8);
    y << 0, 1, 0, 1, 0, 1, 0, 1;
    Eigen::VectorXi g(8);
    g << 0, 0, 0, 0, 1, 1, 1, 1;  // strata are copies of each other
    const StratifiedReport sr = stratified_classification_report(p, y, g, 0.1);
    CHECK(sr.group0.auc == sr.group1.auc);
    CHECK(sr.group0.f1 == sr.group1.f1);

    Eigen::VectorXi allzero = Eigen::VectorXi::Zero(8);
    const StratifiedReport sz = stratified_classification_report(p, y, allzero, 0.1);
    CHECK(sz.group0.auc.has_value());
    CHECK_FALSE(sz.group1.auc.has_value());
    CHECK(sz.group1.n_eval == 0);
}

TEST_CASE("stratified survival report matches subsets") {
    Rng rng(149);
    const int n = 50;
    Eigen::VectorXd risk(n), t(n);
    Eigen::VectorXi e(n), g(n);
    for (int i = 0; i < n; ++i) {
        risk[i] = rng.normal();
        t[i] = rng.exponential(std::exp(risk[i]));
        e[i] = rng.bernoulli(0.7) ? 1 : 0;
        g[i] = i % 2;
    }
    e[0] = 1;
    e[1] = 1;
    const StratifiedReport sr = stratified_survival_report(risk, t, e, g);
    REQUIRE(sr.group0.c_index.has_value());
    REQUIRE(sr.group1.c_index.has_value());
    CHECK_FALSE(sr.group0.auc.has_value());
    std::vector<double> r0, t0;
    std::vector<int> e0;
    for (int i = 0; i < n; i += 2) {
        r0.push_back(risk[i]);
        t0.push_back(t[i]);
        e0.push_back(e[i]);
    }
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r0.data(), r0.size());
    Eigen::VectorXd tv = Eigen::Map<Eigen::VectorXd>(t0.data(), t0.size());
    Eigen::VectorXi ev = Eigen::Map<Eigen::VectorXi>(e0.data(), e0.size());
    CHECK(*sr.group0.c_index == c_index(rv, tv, ev));
}
