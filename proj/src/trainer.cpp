// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "rdrec/errors.hpp"
#include "rdrec/optimizer.hpp"

namespace rdrec {

namespace fs = std::filesystem;

void TaskRatio::validate() const {
    if (eg < 1 || rg < 1 || sr < 1 || tr < 1) {
        fail(Err::RangeError, "trainer: every task ratio must be >= 1");
    }
}

TaskRatio parse_ratio(const std::string& spec) {
    TaskRatio r;
    std::istringstream ss(spec);
    std::string part;
    std::vector<int> vals;
    while (std::getline(ss, part, ':')) {
        // tolerate spaces around the separators
        std::string digits;
        for (char c : part) {
            if (!std::isspace(static_cast<unsigned char>(c))) digits.push_back(c);
        }
        try {
            vals.push_back(std::stoi(digits));
        } catch (...) {
            fail(Err::ConfigError, "trainer: bad ratio component '" + part + "'");
        }
    }
    if (vals.size() != 4) {
        fail(Err::ConfigError, "trainer: ratio must have four EG:RG:SR:TR parts");
    }
    r.eg = vals[0];
    r.rg = vals[1];
    r.sr = vals[2];
    r.tr = vals[3];
    r.validate();
    return r;
}

void TrainerConfig::validate() const {
    if (batch_size < 1) fail(Err::RangeError, "trainer: batch_size must be >= 1");
    if (patience < 1) fail(Err::RangeError, "trainer: patience must be >= 1");
    if (max_epochs < 1) fail(Err::RangeError, "trainer: max_epochs must be >= 1");
    if (n_negatives < 1) fail(Err::RangeError, "trainer: n_negatives must be >= 1");
    if (lr <= 0.0) fail(Err::RangeError, "trainer: lr must be positive");
    if (min_len < 3) fail(Err::RangeError, "trainer: min_len must be >= 3");
    ratios.validate();
}

SampleSpec make_sr_sample(int user, const std::vector<int>& history,
                          const Vocab& vocab, Rng& rng) {
    const int n = static_cast<int>(history.size());
    if (n < 2) fail(Err::InvalidArgument, "trainer: history too short for SR");
    // uniform over contiguous segments [j..k] with j < k
    const uint64_t n_pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
    uint64_t r = rng.uniform_below(n_pairs);
    int k = 1;
    while (r >= static_cast<uint64_t>(k)) {
        r -= k;
        ++k;
    }
    int j = static_cast<int>(r);
    TaskFields f;
    f.user = user;
    f.history.assign(history.begin() + j, history.begin() + k);
    SampleSpec s;
    s.task = Task::SR;
    s.input = encode_rendered(render_task_input(Task::SR, f), vocab);
    for (const auto& piece : entity_pieces("item", history[k])) {
        s.target.push_back(vocab.id_of(piece));
    }
    return s;
}

SampleSpec make_tr_sample(int user, int positive,
                          const std::vector<int>& interacted_items, size_t n_items,
                          int n_negatives, const Vocab& vocab, Rng& rng) {
    std::set<int> interacted(interacted_items.begin(), interacted_items.end());
    std::vector<int> non_interacted;
    non_interacted.reserve(n_items);
    for (size_t i = 0; i < n_items; ++i) {
        int item = static_cast<int>(i);
        if (!interacted.count(item) && item != positive) {
            non_interacted.push_back(item);
        }
    }
    if (static_cast<int>(non_interacted.size()) < n_negatives) {
        fail(Err::InvalidArgument,
             "trainer: item universe too small for " + std::to_string(n_negatives) +
                 " negatives");
    }
    // partial Fisher-Yates: first n_negatives entries are a uniform sample
    for (int i = 0; i < n_negatives; ++i) {
        size_t j = i + static_cast<size_t>(
                           rng.uniform_below(non_interacted.size() - i));
        std::swap(non_interacted[i], non_interacted[j]);
    }
    std::vector<int> candidates(non_interacted.begin(),
                                non_interacted.begin() + n_negatives);
    candidates.push_back(positive);
    rng.shuffle(candidates);

    TaskFields f;
    f.user = user;
    f.candidates = candidates;
    SampleSpec s;
    s.task = Task::TR;
    s.input = encode_rendered(render_task_input(Task::TR, f), vocab);
    for (const auto& piece : entity_pieces("item", positive)) {
        s.target.push_back(vocab.id_of(piece));
    }
    return s;
}

std::pair<SampleSpec, SampleSpec> make_rationale_samples(const Quadruplet& q,
                                                         const ReviewSet& rs,
                                                         const Vocab& vocab) {
    int user = rs.user_index(q.user_id);
    int item = rs.item_index(q.item_id);
    if (user < 0 || item < 0) {
        fail(Err::InvalidArgument, "trainer: quadruplet references unknown entity");
    }
    TaskFields fu;
    fu.user = user;
    SampleSpec pref;
    pref.task = Task::RGPref;
    pref.input = encode_rendered(render_task_input(Task::RGPref, fu), vocab);
    pref.target = encode(q.rationale.preference, vocab).ids;

    TaskFields fi;
    fi.item = item;
    SampleSpec attr;
    attr.task = Task::RGAttr;
    attr.input = encode_rendered(render_task_input(Task::RGAttr, fi), vocab);
    attr.target = encode(q.rationale.attribute, vocab).ids;
    return {pref, attr};
}

std::optional<SampleSpec> make_eg_sample(const Interaction& inter,
                                         const ReviewSet& rs, const Vocab& vocab) {
    TokenSequence target = encode(inter.review_text, vocab);
    if (target.ids.empty()) return std::nullopt;
    TaskFields f;
    f.user = rs.user_index(inter.user_id);
    f.item = rs.item_index(inter.item_id);
    SampleSpec s;
    s.task = Task::EG;
    s.input = encode_rendered(render_task_input(Task::EG, f), vocab);
    s.target = target.ids;
    return s;
}

int SamplePools::Cursor::next(Rng& rng) {
    if (pos >= order.size()) {
        rng.shuffle(order);
        pos = 0;
    }
    return order[pos++];
}

SamplePools::SamplePools(const ReviewSet& rs, const SplitSet& splits,
                         const std::vector<Quadruplet>& quads, const Vocab& vocab,
                         const TrainerConfig& cfg)
    : rs_(rs), splits_(splits), vocab_(vocab), cfg_(cfg), quads_(quads) {
    auto pair_set = [&](const std::vector<int>& ks) {
        std::set<std::pair<int, int>> s;
        for (int k : ks) s.insert({rs.user_of(k), rs.item_of(k)});
        return s;
    };
    std::set<std::pair<int, int>> train_pairs = pair_set(splits.expl_train);
    std::set<std::pair<int, int>> val_pairs = pair_set(splits.expl_val);
    std::set<std::pair<int, int>> test_pairs = pair_set(splits.expl_test);

    for (int k : splits.expl_train) {
        if (!rs.interactions()[k].review_text.empty()) eg_pool_.push_back(k);
    }
    // A quadruplet joins a partition only when its (user,item) pair is
    // unambiguous across partitions, so held-out rationale text never leaks.
    for (size_t qi = 0; qi < quads_.size(); ++qi) {
        int u = rs.user_index(quads_[qi].user_id);
        int i = rs.item_index(quads_[qi].item_id);
        if (u < 0 || i < 0) continue;
        std::pair<int, int> key{u, i};
        bool in_train = train_pairs.count(key) > 0;
        bool in_heldout = val_pairs.count(key) > 0 || test_pairs.count(key) > 0;
        if (in_train && !in_heldout) {
            rg_pool_.emplace_back(static_cast<int>(qi), 0);
            rg_pool_.emplace_back(static_cast<int>(qi), 1);
        } else if (val_pairs.count(key) > 0 && !test_pairs.count(key) &&
                   !in_train) {
            auto [pref, attr] = make_rationale_samples(quads_[qi], rs_, vocab_);
            val_samples_[static_cast<int>(Task::RGPref)].push_back(pref);
            val_samples_[static_cast<int>(Task::RGAttr)].push_back(attr);
        }
    }
    for (size_t p = 0; p < splits.seq.size(); ++p) {
        const auto& us = splits.seq[p];
        if (us.train_items.size() >= 2) sr_pool_.push_back(static_cast<int>(p));
        std::vector<int> interacted = rs.item_sequence(us.user);
        size_t non_interacted = 0;
        std::set<int> seen(interacted.begin(), interacted.end());
        for (size_t i = 0; i < rs.n_items(); ++i) {
            if (!seen.count(static_cast<int>(i))) ++non_interacted;
        }
        if (!us.train_items.empty() &&
            non_interacted >= static_cast<size_t>(cfg.n_negatives)) {
            tr_pool_.push_back(static_cast<int>(p));
        }
    }

    cursors_[static_cast<int>(Task::EG)].order.resize(eg_pool_.size());
    cursors_[static_cast<int>(Task::RGPref)].order.resize(rg_pool_.size());
    cursors_[static_cast<int>(Task::SR)].order.resize(sr_pool_.size());
    cursors_[static_cast<int>(Task::TR)].order.resize(tr_pool_.size());
    for (auto& c : cursors_) {
        for (size_t i = 0; i < c.order.size(); ++i) c.order[i] = static_cast<int>(i);
        c.pos = c.order.size(); // first draw reshuffles
    }

    // fixed validation sets
    Rng vrng(cfg.seed ^ 0x76616c5f5f5f5f5fULL);
    for (int k : splits.expl_val) {
        if (auto s = make_eg_sample(rs.interactions()[k], rs_, vocab_)) {
            val_samples_[static_cast<int>(Task::EG)].push_back(*s);
        }
    }
    for (const auto& us : splits_.seq) {
        if (!us.train_items.empty()) {
            TaskFields f;
            f.user = us.user;
            f.history = us.train_items;
            SampleSpec s;
            s.task = Task::SR;
            s.input = encode_rendered(render_task_input(Task::SR, f), vocab_);
            for (const auto& piece : entity_pieces("item", us.val_item)) {
                s.target.push_back(vocab_.id_of(piece));
            }
            val_samples_[static_cast<int>(Task::SR)].push_back(std::move(s));
        }
        std::vector<int> interacted = rs_.item_sequence(us.user);
        std::set<int> seen(interacted.begin(), interacted.end());
        size_t non_interacted = 0;
        for (size_t i = 0; i < rs_.n_items(); ++i) {
            if (!seen.count(static_cast<int>(i))) ++non_interacted;
        }
        if (non_interacted >= static_cast<size_t>(cfg_.n_negatives)) {
            val_samples_[static_cast<int>(Task::TR)].push_back(
                make_tr_sample(us.user, us.val_item, interacted, rs_.n_items(),
                               cfg_.n_negatives, vocab_, vrng));
        }
    }
}

bool SamplePools::task_available(Task t) const { return pool_size(t) > 0; }

size_t SamplePools::pool_size(Task t) const {
    switch (t) {
        case Task::EG: return eg_pool_.size();
        case Task::RGPref:
        case Task::RGAttr: return rg_pool_.size();
        case Task::SR: return sr_pool_.size();
        case Task::TR: return tr_pool_.size();
    }
    return 0;
}

size_t SamplePools::total_pool_size() const {
    return eg_pool_.size() + rg_pool_.size() + sr_pool_.size() + tr_pool_.size();
}

SampleSpec SamplePools::draw(Task t, Rng& rng) {
    switch (t) {
        case Task::EG: {
            int k = eg_pool_[cursors_[static_cast<int>(Task::EG)].next(rng)];
            auto s = make_eg_sample(rs_.interactions()[k], rs_, vocab_);
            return *s; // pool holds non-empty reviews only
        }
        case Task::RGPref:
        case Task::RGAttr: {
            auto [qi, which] = rg_pool_[cursors_[static_cast<int>(Task::RGPref)].next(rng)];
            auto [pref, attr] = make_rationale_samples(quads_[qi], rs_, vocab_);
            return which == 0 ? pref : attr;
        }
        case Task::SR: {
            const auto& us =
                splits_.seq[sr_pool_[cursors_[static_cast<int>(Task::SR)].next(rng)]];
            return make_sr_sample(us.user, us.train_items, vocab_, rng);
        }
        case Task::TR: {
            const auto& us =
                splits_.seq[tr_pool_[cursors_[static_cast<int>(Task::TR)].next(rng)]];
            // positive drawn from the user's training interactions
            int positive = us.train_items[rng.uniform_below(us.train_items.size())];
            return make_tr_sample(us.user, positive, rs_.item_sequence(us.user),
                                  rs_.n_items(), cfg_.n_negatives, vocab_, rng);
        }
    }
    fail(Err::InvalidArgument, "trainer: unknown task");
}

const std::vector<SampleSpec>& SamplePools::validation_samples(Task t) const {
    return val_samples_[static_cast<int>(t)];
}

EpochSampler::EpochSampler(SamplePools& pools, const TrainerConfig& cfg)
    : pools_(pools), cfg_(cfg) {
    struct Entry {
        Task task;
        double weight;
        bool enabled;
    };
    // the two rationale sub-tasks split the rg ratio evenly
    std::vector<Entry> entries{
        {Task::EG, static_cast<double>(cfg.ratios.eg), cfg.use_eg},
        {Task::RGPref, cfg.ratios.rg / 2.0, cfg.use_rg_pref},
        {Task::RGAttr, cfg.ratios.rg / 2.0, cfg.use_rg_attr},
        {Task::SR, static_cast<double>(cfg.ratios.sr), cfg.use_sr},
        {Task::TR, static_cast<double>(cfg.ratios.tr), cfg.use_tr},
    };
    double total = 0.0;
    for (const auto& e : entries) {
        if (!e.enabled) continue;
        if (!pools_.task_available(e.task)) {
            fail(Err::EmptyInput, std::string("trainer: empty pool for enabled task ") +
                                      task_name(e.task));
        }
        total += e.weight;
    }
    if (total <= 0.0) fail(Err::ConfigError, "trainer: no task enabled");
    double acc = 0.0;
    for (const auto& e : entries) {
        if (!e.enabled) continue;
        acc += e.weight / total;
        enabled_.push_back(e.task);
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

Task EpochSampler::draw_task(Rng& rng) {
    double u = rng.uniform_real();
    for (size_t i = 0; i < cumulative_.size(); ++i) {
        if (u < cumulative_[i]) return enabled_[i];
    }
    return enabled_.back();
}

std::vector<SampleSpec> EpochSampler::draw_batch(Rng& rng) {
    std::vector<SampleSpec> batch;
    batch.reserve(cfg_.batch_size);
    for (int i = 0; i < cfg_.batch_size; ++i) {
        batch.push_back(pools_.draw(draw_task(rng), rng));
    }
    return batch;
}

EarlyStopper::Verdict EarlyStopper::feed(double val_loss) {
    ++epoch_;
    Verdict v;
    if (!has_best_ || val_loss < best_) {
        best_ = val_loss;
        has_best_ = true;
        best_epoch_ = epoch_;
        misses_ = 0;
        v.improved = true;
    } else {
        ++misses_;
        if (misses_ >= patience_) v.stop = true;
    }
    return v;
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::array<double, kNumTasks> per_task_mean(
    const std::vector<std::pair<Task, double>>& losses) {
    std::array<double, kNumTasks> sum{};
    std::array<size_t, kNumTasks> count{};
    for (const auto& [task, loss] : losses) {
        sum[static_cast<int>(task)] += loss;
        ++count[static_cast<int>(task)];
    }
    std::array<double, kNumTasks> mean{};
    for (int t = 0; t < kNumTasks; ++t) {
        mean[t] = count[t] ? sum[t] / count[t] : kNan;
    }
    return mean;
}

} // namespace

TrainResult train(RdrecModel& model, SamplePools& pools, const TrainerConfig& cfg,
                  const std::string& checkpoint_dir) {
    cfg.validate();
    fs::create_directories(checkpoint_dir);
    std::string best_path = (fs::path(checkpoint_dir) / "checkpoint_best.rdc").string();

    EpochSampler sampler(pools, cfg);
    Rng rng(cfg.seed);
    AdamW opt(cfg.lr, cfg.weight_decay);
    EarlyStopper stopper(cfg.patience);

    int steps = cfg.steps_per_epoch;
    if (steps <= 0) {
        steps = static_cast<int>(
            (pools.total_pool_size() + cfg.batch_size - 1) / cfg.batch_size);
        steps = std::max(steps, 1);
    }

    // ratio weights for the total-validation-loss aggregation
    std::array<double, kNumTasks> ratio_w{};
    ratio_w[static_cast<int>(Task::EG)] = cfg.use_eg ? cfg.ratios.eg : 0.0;
    ratio_w[static_cast<int>(Task::RGPref)] = cfg.use_rg_pref ? cfg.ratios.rg / 2.0 : 0.0;
    ratio_w[static_cast<int>(Task::RGAttr)] = cfg.use_rg_attr ? cfg.ratios.rg / 2.0 : 0.0;
    ratio_w[static_cast<int>(Task::SR)] = cfg.use_sr ? cfg.ratios.sr : 0.0;
    ratio_w[static_cast<int>(Task::TR)] = cfg.use_tr ? cfg.ratios.tr : 0.0;

    TrainResult result;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::vector<std::pair<Task, double>> train_losses;
        double loss_sum = 0.0;
        for (int s = 0; s < steps; ++s) {
            std::vector<SampleSpec> samples = sampler.draw_batch(rng);
            Batch batch = make_batch(samples);
            ForwardOutput fo = model.forward(batch, true);
            auto grads = model.backward(fo);
            opt.step(model.params(), grads);
            loss_sum += fo.loss_value;
            for (size_t r = 0; r < samples.size(); ++r) {
                train_losses.emplace_back(samples[r].task, fo.row_loss[r]);
            }
        }

        EpochStats st;
        st.epoch = epoch;
        st.train_loss = loss_sum / steps;
        st.train_by_task = per_task_mean(train_losses);

        // validation: forward-only over the fixed per-task sets
        std::vector<std::pair<Task, double>> val_losses;
        for (int t = 0; t < kNumTasks; ++t) {
            const auto& vs = pools.validation_samples(static_cast<Task>(t));
            if (vs.empty() || ratio_w[t] == 0.0) continue;
            for (size_t off = 0; off < vs.size();
                 off += static_cast<size_t>(cfg.batch_size)) {
                size_t end = std::min(vs.size(), off + cfg.batch_size);
                std::vector<SampleSpec> chunk(vs.begin() + off, vs.begin() + end);
                Batch batch = make_batch(chunk);
                ForwardOutput fo = model.forward(batch, false);
                for (size_t r = 0; r < chunk.size(); ++r) {
                    val_losses.emplace_back(chunk[r].task, fo.row_loss[r]);
                }
            }
        }
        st.val_by_task = per_task_mean(val_losses);
        double wsum = 0.0, wtotal = 0.0;
        for (int t = 0; t < kNumTasks; ++t) {
            if (std::isnan(st.val_by_task[t]) || ratio_w[t] == 0.0) continue;
            wsum += ratio_w[t] * st.val_by_task[t];
            wtotal += ratio_w[t];
        }
        st.val_total = wtotal > 0.0 ? wsum / wtotal : st.train_loss;

        if (!std::isfinite(st.val_total) || !std::isfinite(st.train_loss)) {
            result.history.push_back(st);
            fail(Err::NonFinite,
                 "trainer: diverged at epoch " + std::to_string(epoch) +
                     "; last good checkpoint retained at " + best_path);
        }

        auto verdict = stopper.feed(st.val_total);
        if (verdict.improved) {
            CheckpointMeta meta;
            meta.step = static_cast<int64_t>(epoch) * steps;
            meta.val_loss = st.val_total;
            save_checkpoint(best_path, model.config(), model.params(), meta);
            st.checkpointed = true;
        }
        result.history.push_back(st);
        std::cerr << "trainer: epoch " << epoch << " train " << st.train_loss
                  << " val " << st.val_total << (st.checkpointed ? " *" : "")
                  << "\n";
        if (cfg.stop_train_loss > 0.0 && st.train_loss < cfg.stop_train_loss) {
            result.stop_reason = "train_loss_target";
            break;
        }
        if (verdict.stop) {
            result.stop_reason = "patience";
            break;
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "max_epochs";

    Checkpoint best = load_checkpoint_expect(best_path, model.config());
    model.params() = std::move(best.params);
    result.best_checkpoint = best_path;
    result.best_epoch = stopper.best_epoch();
    result.best_val_loss = stopper.best();
    return result;
}

void write_loss_history_csv(const std::vector<EpochStats>& history,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "trainer: cannot write " + path);
    out << "epoch,task,split,loss\n";
    auto emit = [&](int epoch, const std::string& task, const char* split,
                    double loss) {
        if (std::isnan(loss)) return;
        out << epoch << "," << task << "," << split << "," << loss << "\n";
    };
    for (const auto& st : history) {
        emit(st.epoch, "all", "train", st.train_loss);
        emit(st.epoch, "all", "val", st.val_total);
        for (int t = 0; t < kNumTasks; ++t) {
            emit(st.epoch, task_name(static_cast<Task>(t)), "train",
                 st.train_by_task[t]);
            emit(st.epoch, task_name(static_cast<Task>(t)), "val",
                 st.val_by_task[t]);
        }
    }
}

std::vector<std::string> vocab_corpus(const ReviewSet& rs,
                                      const std::vector<Quadruplet>& quads) {
    std::vector<std::string> texts;
    texts.reserve(rs.n_reviews() + 2 * quads.size() + 4);
    for (const auto& it : rs.interactions()) texts.push_back(it.review_text);
    for (const auto& q : quads) {
        texts.push_back(q.rationale.preference);
        texts.push_back(q.rationale.attribute);
    }
    // static template words for every task
    TaskFields f;
    f.user = 0;
    f.item = 0;
    f.history = {0};
    f.candidates = {0};
    for (Task t : {Task::SR, Task::TR, Task::EG, Task::RGPref, Task::RGAttr}) {
        texts.push_back(render_task_input(t, f).text);
    }
    return texts;
}

} // namespace rdrec
