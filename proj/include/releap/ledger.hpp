#pragma once
// Budgeted label bookkeeping. A ledger owns one partition (training or
// validation): every patient starts at the proxy value and flips to the
// reference label exactly once when queried.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "releap/cohort.hpp"
#include "releap/errors.hpp"
#include "releap/rng.hpp"

namespace releap {

class LabelLedger {
  public:
    LabelLedger() = default;

    LabelLedger(const Cohort& cohort, std::vector<int> pool_ids)
        : pool_ids_(std::move(pool_ids)),
          s_current_(cohort.s_star),
          labeled_(static_cast<std::size_t>(cohort.n()), 0),
          in_pool_(static_cast<std::size_t>(cohort.n()), 0) {
        for (int id : pool_ids_) {
            if (id < 0 || id >= cohort.n()) throw PreconditionError("LabelLedger: id out of range");
            in_pool_[id] = 1;
        }
    }

    void set_budget(int total) {
        if (total < 0) throw ConfigError("LabelLedger: negative budget");
        budget_total_ = total;
    }

    const std::vector<int>& pool_ids() const { return pool_ids_; }
    const Eigen::VectorXd& s_current() const { return s_current_; }
    bool is_labeled(int id) const { return labeled_[id] != 0; }
    int n_labeled() const { return n_labeled_; }
    int seed_size() const { return seed_size_; }
    int seed_imbalance() const { return seed_imbalance_; }
    int budget_total() const { return budget_total_; }
    int budget_used() const { return budget_used_; }
    int remaining_budget() const { return budget_total_ - budget_used_; }

    double budget_frac_remaining() const {
        return budget_total_ > 0 ? static_cast<double>(remaining_budget()) / budget_total_ : 0.0;
    }

    std::vector<int> labeled_ids() const {
        std::vector<int> out;
        out.reserve(n_labeled_);
        for (int id : pool_ids_)
            if (labeled_[id]) out.push_back(id);
        return out;
    }

    std::vector<int> unlabeled_ids() const {
        std::vector<int> out;
        out.reserve(pool_ids_.size() - static_cast<std::size_t>(n_labeled_));
        for (int id : pool_ids_)
            if (!labeled_[id]) out.push_back(id);
        return out;
    }

    // Overwrites the proxy with the reference label. Patients cannot be
    // queried twice and must belong to this ledger's partition.
    void label(int id, const Cohort& cohort) {
        if (id < 0 || id >= static_cast<int>(labeled_.size()) || !in_pool_[id])
            throw PreconditionError("LabelLedger: patient not in this partition");
        if (labeled_[id]) throw InvariantError("LabelLedger: patient already labeled");
        s_current_[id] = static_cast<double>(cohort.s_true[id]);
        labeled_[id] = 1;
        ++n_labeled_;
    }

    // Replaces every patient's working value with the reference label without
    // marking them queried; used by the oracle baseline.
    void reveal_all(const Cohort& cohort) {
        for (int id : pool_ids_) s_current_[id] = static_cast<double>(cohort.s_true[id]);
    }

    friend LabelLedger init_seed(const Cohort& cohort, const std::vector<int>& train_ids,
                                 int seed_size, Rng& rng);
    friend void acquire_batch(LabelLedger& ledger, const std::vector<int>& selected,
                              const Cohort& cohort);

  private:
    std::vector<int> pool_ids_;
    Eigen::VectorXd s_current_;
    std::vector<char> labeled_;
    std::vector<char> in_pool_;
    int n_labeled_ = 0;
    int seed_size_ = 0;
    int seed_imbalance_ = 0;
    int budget_total_ = 0;
    int budget_used_ = 0;
};

// Balanced seed draw: half the seed from each reference class, shortfalls
// filled from the other class and recorded as an imbalance.
inline LabelLedger init_seed(const Cohort& cohort, const std::vector<int>& train_ids,
                             int seed_size, Rng& rng) {
    if (seed_size < 1) throw ConfigError("init_seed: seed_size must be >= 1");
    if (seed_size > static_cast<int>(train_ids.size()))
        throw ConfigError("init_seed: seed_size exceeds the training pool");

    LabelLedger ledger(cohort, train_ids);
    std::vector<int> pos, neg;
    for (int id : train_ids) (cohort.s_true[id] == 1 ? pos : neg).push_back(id);
    rng.shuffle(pos);
    rng.shuffle(neg);

    const int want_pos = seed_size / 2;
    const int want_neg = seed_size - want_pos;
    const int take_pos = std::min<int>(want_pos, static_cast<int>(pos.size()));
    const int take_neg = std::min<int>(want_neg, static_cast<int>(neg.size()));
    int deficit = seed_size - take_pos - take_neg;
    ledger.seed_imbalance_ = deficit;

    std::vector<int> chosen(pos.begin(), pos.begin() + take_pos);
    chosen.insert(chosen.end(), neg.begin(), neg.begin() + take_neg);
    // fill the shortfall from whichever class still has members
    for (std::size_t k = take_pos; deficit > 0 && k < pos.size(); ++k, --deficit)
        chosen.push_back(pos[k]);
    for (std::size_t k = take_neg; deficit > 0 && k < neg.size(); ++k, --deficit)
        chosen.push_back(neg[k]);
    if (deficit > 0) throw InvariantError("init_seed: pool cannot supply the seed");

    for (int id : chosen) ledger.label(id, cohort);
    ledger.seed_size_ = seed_size;
    return ledger;
}

// Truncates to the remaining budget, then flips each selected patient.
inline void acquire_batch(LabelLedger& ledger, const std::vector<int>& selected,
                          const Cohort& cohort) {
    const int room = ledger.remaining_budget();
    const int take = std::min<int>(room, static_cast<int>(selected.size()));
    for (int k = 0; k < take; ++k) ledger.label(selected[k], cohort);
    ledger.budget_used_ += take;
}

}  // namespace releap
