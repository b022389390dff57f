#pragma once
// Synthetic cohort generation and stratified splitting. Patients carry
// phenotype features x1, outcome features x2, a true binary phenotype, a
// continuous noisy proxy of it, a binary outcome, and (optionally) an
// exponential-hazard event time with administrative censoring.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "releap/errors.hpp"
#include "releap/rng.hpp"

namespace releap {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double clamp_prob(double p) {
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

struct SurvivalConfig {
    double baseline_rate = 0.1;
    double censor_horizon = 5.0;
};

struct CohortConfig {
    int n = 1000;
    int d_x1 = 5;
    int d_x2 = 4;
    double beta_s = 2.5;       // coefficient of the true phenotype in the outcome model
    double sigma_link = 1.0;   // sd of the perturbation on the phenotype linear predictor
    double sigma_proxy = 1.5;  // sd of the noise turning the phenotype into the proxy
    double proxy_scale = 2.0;  // binary phenotype mapped to +-proxy_scale before noise
    bool threshold_s_true = false;  // threshold p at 0.5 instead of sampling
    std::optional<SurvivalConfig> survival;
    std::uint64_t seed = 0;

    void validate() const {
        std::vector<std::string> bad;
        if (n < 1) bad.push_back("n must be >= 1");
        if (d_x1 < 1) bad.push_back("d_x1 must be >= 1");
        if (d_x2 < 1) bad.push_back("d_x2 must be >= 1");
        if (sigma_link < 0.0) bad.push_back("sigma_link must be >= 0");
        if (sigma_proxy < 0.0) bad.push_back("sigma_proxy must be >= 0");
        if (proxy_scale < 0.0) bad.push_back("proxy_scale must be >= 0");
        if (survival) {
            if (survival->baseline_rate <= 0.0) bad.push_back("baseline_rate must be > 0");
            if (survival->censor_horizon <= 0.0) bad.push_back("censor_horizon must be > 0");
        }
        if (!bad.empty()) {
            std::string msg = "invalid cohort config:";
            for (const auto& b : bad) msg += " " + b + ";";
            throw ConfigError(msg);
        }
    }
};

struct Cohort {
    Eigen::MatrixXd x1;
    Eigen::MatrixXd x2;
    Eigen::VectorXi s_true;
    Eigen::VectorXd p_true;
    Eigen::VectorXd s_star;
    Eigen::VectorXi y;
    Eigen::VectorXd t;      // zeros unless generated in survival mode
    Eigen::VectorXi event;  // zeros unless generated in survival mode
    Eigen::VectorXd beta1;  // per-cohort coefficient draws, kept for reproducibility
    Eigen::VectorXd beta2;
    double censor_horizon = 0.0;  // 0 when no survival part was generated

    int n() const { return static_cast<int>(s_true.size()); }
};

struct SplitIndex {
    std::vector<int> train_ids;
    std::vector<int> valid_ids;
};

// Draw order is fixed (beta1, beta2, x1, x2, link noise, phenotype, proxy
// noise, outcome, survival) so a (config, seed) pair always produces the
// same cohort bit for bit.
inline Cohort generate_cohort(const CohortConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.n;
    Cohort c;
    c.beta1.resize(cfg.d_x1);
    for (int j = 0; j < cfg.d_x1; ++j) c.beta1[j] = rng.normal();
    c.beta2.resize(cfg.d_x2);
    for (int j = 0; j < cfg.d_x2; ++j) c.beta2[j] = rng.normal();

    c.x1.resize(n, cfg.d_x1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cfg.d_x1; ++j) c.x1(i, j) = rng.normal();
    c.x2.resize(n, cfg.d_x2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < cfg.d_x2; ++j) c.x2(i, j) = rng.normal();

    c.s_true.resize(n);
    c.p_true.resize(n);
    for (int i = 0; i < n; ++i) {
        const double eta = c.x1.row(i).dot(c.beta1) + rng.normal(0.0, cfg.sigma_link);
        c.p_true[i] = clamp_prob(sigmoid(eta));
        if (cfg.threshold_s_true)
            c.s_true[i] = c.p_true[i] >= 0.5 ? 1 : 0;
        else
            c.s_true[i] = rng.bernoulli(c.p_true[i]) ? 1 : 0;
    }

    c.s_star.resize(n);
    for (int i = 0; i < n; ++i) {
        const double centered = cfg.proxy_scale * (2.0 * c.s_true[i] - 1.0);
        c.s_star[i] = clamp_prob(sigmoid(centered + rng.normal(0.0, cfg.sigma_proxy)));
    }

    c.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const double eta = cfg.beta_s * c.s_true[i] + c.x2.row(i).dot(c.beta2);
        c.y[i] = rng.bernoulli(sigmoid(eta)) ? 1 : 0;
    }

    c.t = Eigen::VectorXd::Zero(n);
    c.event = Eigen::VectorXi::Zero(n);
    if (cfg.survival) {
        c.censor_horizon = cfg.survival->censor_horizon;
        for (int i = 0; i < n; ++i) {
            const double eta = cfg.beta_s * c.s_true[i] + c.x2.row(i).dot(c.beta2);
            const double rate = cfg.survival->baseline_rate * std::exp(eta);
            const double t_raw = rng.exponential(rate);
            if (t_raw < c.censor_horizon) {
                c.t[i] = t_raw;
                c.event[i] = 1;
            } else {
                c.t[i] = c.censor_horizon;
                c.event[i] = 0;
            }
        }
    }
    return c;
}

// Shuffles within each outcome stratum and assigns round(valid_frac * size)
// indices of each stratum to validation. Output lists are sorted.
inline SplitIndex split_cohort(const Cohort& cohort, double valid_frac, Rng& rng) {
    if (!(valid_frac > 0.0 && valid_frac < 1.0))
        throw PreconditionError("split_cohort: valid_frac must be in (0, 1)");
    std::vector<int> pos, neg;
    for (int i = 0; i < cohort.n(); ++i) (cohort.y[i] == 1 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw ConfigError("split_cohort: cohort has a single outcome class (degenerate stratum)");

    SplitIndex split;
    for (auto* stratum : {&pos, &neg}) {
        rng.shuffle(*stratum);
        const auto n_valid = static_cast<std::size_t>(
            std::llround(valid_frac * static_cast<double>(stratum->size())));
        for (std::size_t k = 0; k < stratum->size(); ++k)
            (k < n_valid ? split.valid_ids : split.train_ids).push_back((*stratum)[k]);
    }
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.valid_ids.begin(), split.valid_ids.end());
    return split;
}

// FNV-1a over the generated arrays; used by the harness to confirm that all
// strategies within a replication consumed the identical cohort.
inline std::uint64_t cohort_hash(const Cohort& c) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix_bytes = [&h](const void* data, std::size_t nbytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < nbytes; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    auto mix_d = [&](const Eigen::MatrixXd& m) { mix_bytes(m.data(), sizeof(double) * m.size()); };
    auto mix_i = [&](const Eigen::VectorXi& v) { mix_bytes(v.data(), sizeof(int) * v.size()); };
    mix_d(c.x1);
    mix_d(c.x2);
    mix_i(c.s_true);
    mix_d(c.s_star);
    mix_i(c.y);
    mix_d(c.t);
    mix_i(c.event);
    return h;
}

namespace detail {
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}
}  // namespace detail

inline void write_cohort_csv(const Cohort& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "patient_id";
    for (int j = 0; j < c.x1.cols(); ++j) out << ",x1_" << j;
    for (int j = 0; j < c.x2.cols(); ++j) out << ",x2_" << j;
    out << ",s_true,s_star,y,t,event\n";
    for (int i = 0; i < c.n(); ++i) {
        out << i;
        for (int j = 0; j < c.x1.cols(); ++j) out << ',' << detail::format_g9(c.x1(i, j));
        for (int j = 0; j < c.x2.cols(); ++j) out << ',' << detail::format_g9(c.x2(i, j));
        out << ',' << c.s_true[i] << ',' << detail::format_g9(c.s_star[i]) << ',' << c.y[i]
            << ',' << detail::format_g9(c.t[i]) << ',' << c.event[i] << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

inline Cohort read_cohort_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path);
    std::string header;
    if (!std::getline(in, header)) throw Error("empty cohort csv: " + path);

    int d_x1 = 0, d_x2 = 0;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.rfind("x1_", 0) == 0) ++d_x1;
            if (col.rfind("x2_", 0) == 0) ++d_x2;
        }
        if (d_x1 == 0 || d_x2 == 0) throw Error("cohort csv missing feature columns: " + path);
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        const std::size_t expected = 1 + d_x1 + d_x2 + 5;
        if (row.size() != expected)
            throw Error("cohort csv row has " + std::to_string(row.size()) + " fields, expected " +
                        std::to_string(expected));
        rows.push_back(std::move(row));
    }

    const int n = static_cast<int>(rows.size());
    Cohort c;
    c.x1.resize(n, d_x1);
    c.x2.resize(n, d_x2);
    c.s_true.resize(n);
    c.p_true = Eigen::VectorXd::Zero(n);  // not part of the csv schema
    c.s_star.resize(n);
    c.y.resize(n);
    c.t.resize(n);
    c.event.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& r = rows[i];
        int k = 1;
        for (int j = 0; j < d_x1; ++j) c.x1(i, j) = r[k++];
        for (int j = 0; j < d_x2; ++j) c.x2(i, j) = r[k++];
        c.s_true[i] = static_cast<int>(r[k++]);
        c.s_star[i] = r[k++];
        c.y[i] = static_cast<int>(r[k++]);
        c.t[i] = r[k++];
        c.event[i] = static_cast<int>(r[k++]);
    }
    return c;
}

}  // namespace releap
