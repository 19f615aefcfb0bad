// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rdrec/corpus.hpp"
#include "rdrec/distiller.hpp"
#include "rdrec/model.hpp"
#include "rdrec/rng.hpp"
#include "rdrec/textcodec.hpp"

namespace rdrec {

struct TaskRatio {
    int eg = 1, rg = 1, sr = 1, tr = 3;
    void validate() const;
};

TaskRatio parse_ratio(const std::string& spec); // "1:1:1:3" as EG:RG:SR:TR

struct TrainerConfig {
    int batch_size = 64;
    double lr = 0.001;
    double weight_decay = 0.0;
    int patience = 5;
    int max_epochs = 100;
    uint64_t seed = 42;
    TaskRatio ratios;
    int n_negatives = 99;
    int steps_per_epoch = 0;     // 0 = ceil(total pool size / batch)
    double stop_train_loss = 0.0; // 0 = disabled
    int min_len = 3;
    // ablation switches; both rationale sub-tasks share the rg ratio
    bool use_eg = true, use_rg_pref = true, use_rg_attr = true, use_sr = true,
         use_tr = true;
    void validate() const;
};

// Sample makers. Histories and candidates hold item indices.
SampleSpec make_sr_sample(int user, const std::vector<int>& history,
                          const Vocab& vocab, Rng& rng);
SampleSpec make_tr_sample(int user, int positive,
                          const std::vector<int>& interacted_items, size_t n_items,
                          int n_negatives, const Vocab& vocab, Rng& rng);
std::pair<SampleSpec, SampleSpec> make_rationale_samples(const Quadruplet& q,
                                                         const ReviewSet& rs,
                                                         const Vocab& vocab);
std::optional<SampleSpec> make_eg_sample(const Interaction& inter,
                                         const ReviewSet& rs, const Vocab& vocab);

// Per-task training pools plus the fixed validation sets.
class SamplePools {
public:
    SamplePools(const ReviewSet& rs, const SplitSet& splits,
                const std::vector<Quadruplet>& quads, const Vocab& vocab,
                const TrainerConfig& cfg);

    bool task_available(Task t) const;
    size_t pool_size(Task t) const;
    size_t total_pool_size() const;
    SampleSpec draw(Task t, Rng& rng); // uniform, reshuffled per pool pass

    const std::vector<SampleSpec>& validation_samples(Task t) const;

    const ReviewSet& reviews() const { return rs_; }
    const SplitSet& splits() const { return splits_; }
    const Vocab& vocab() const { return vocab_; }

private:
    struct Cursor {
        std::vector<int> order;
        size_t pos = 0;
        int next(Rng& rng);
    };

    const ReviewSet& rs_;
    const SplitSet& splits_;
    const Vocab& vocab_;
    TrainerConfig cfg_;

    std::vector<int> eg_pool_;                    // interaction idx
    std::vector<std::pair<int, int>> rg_pool_;    // (quad idx, 0=pref 1=attr)
    std::vector<int> sr_pool_, tr_pool_;          // positions into splits.seq
    std::vector<Quadruplet> quads_;
    std::array<Cursor, kNumTasks> cursors_;
    std::array<std::vector<SampleSpec>, kNumTasks> val_samples_;
};

// Draws each sample's task from the categorical distribution given by the
// enabled-task ratios, then uniformly within the task pool.
class EpochSampler {
public:
    EpochSampler(SamplePools& pools, const TrainerConfig& cfg);
    Task draw_task(Rng& rng);
    std::vector<SampleSpec> draw_batch(Rng& rng);

private:
    SamplePools& pools_;
    TrainerConfig cfg_;
    std::vector<Task> enabled_;
    std::vector<double> cumulative_;
};

// Checkpoint-on-minimum bookkeeping with consecutive-miss patience.
class EarlyStopper {
public:
    explicit EarlyStopper(int patience) : patience_(patience) {}
    struct Verdict {
        bool improved = false;
        bool stop = false;
    };
    Verdict feed(double val_loss);
    double best() const { return best_; }
    int best_epoch() const { return best_epoch_; }

private:
    int patience_;
    double best_ = 0.0;
    bool has_best_ = false;
    int misses_ = 0;
    int epoch_ = 0;
    int best_epoch_ = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    std::array<double, kNumTasks> train_by_task{};  // nan when unseen
    std::array<double, kNumTasks> val_by_task{};    // nan when no pool
    double val_total = 0.0;
    bool checkpointed = false;
};

struct TrainResult {
    std::string best_checkpoint;
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    std::string stop_reason; // "patience" | "max_epochs" | "train_loss_target"
};

TrainResult train(RdrecModel& model, SamplePools& pools, const TrainerConfig& cfg,
                  const std::string& checkpoint_dir);

void write_loss_history_csv(const std::vector<EpochStats>& history,
                            const std::string& path);

// Corpus texts for vocabulary construction: reviews, rationale sentences,
// and the static template words of all four tasks.
std::vector<std::string> vocab_corpus(const ReviewSet& rs,
                                      const std::vector<Quadruplet>& quads);

} // namespace rdrec
