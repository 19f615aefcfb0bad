// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace rdrec {

// One (user, item, review) record with its position in the user's history.
struct Interaction {
    std::string user_id;
    std::string item_id;
    std::string review_text;
    int64_t ts = 0;
    int order_index = 0; // 0-based, contiguous per user, ascending ts
};

// Immutable after load. Dense user/item indexes are assigned in order of
// first appearance; entity surface forms ("user_12") are built from them.
class ReviewSet {
public:
    ReviewSet() = default;

    int add_interaction(const std::string& user, const std::string& item,
                        const std::string& text, int64_t ts);
    // Assigns order_index per user (ascending ts, stable on ties) and builds
    // the per-user / per-item indexes. Call once after the last add.
    void finalize();

    const std::vector<Interaction>& interactions() const { return interactions_; }
    size_t n_users() const { return user_ids_.size(); }
    size_t n_items() const { return item_ids_.size(); }
    size_t n_reviews() const { return interactions_.size(); }

    const std::string& user_id(int idx) const { return user_ids_[idx]; }
    const std::string& item_id(int idx) const { return item_ids_[idx]; }
    int user_index(const std::string& id) const;  // -1 if absent
    int item_index(const std::string& id) const;

    // Interaction indices of a user, ordered by order_index.
    const std::vector<int>& history(int user_idx) const { return histories_[user_idx]; }
    // Item indices of a user's history, ordered.
    std::vector<int> item_sequence(int user_idx) const;
    const std::vector<int>& users_of_item(int item_idx) const { return item_users_[item_idx]; }

    int user_of(int interaction_idx) const { return inter_user_[interaction_idx]; }
    int item_of(int interaction_idx) const { return inter_item_[interaction_idx]; }

private:
    std::vector<Interaction> interactions_;
    std::vector<std::string> user_ids_, item_ids_;
    std::unordered_map<std::string, int> user_idx_, item_idx_;
    std::vector<int> inter_user_, inter_item_;
    std::vector<std::vector<int>> histories_;  // user idx -> interaction idxs
    std::vector<std::vector<int>> item_users_; // item idx -> user idxs
    bool finalized_ = false;
};

struct DatasetStats {
    size_t n_users = 0;
    size_t n_items = 0;
    size_t n_reviews = 0;
    double avg_reviews_per_user = 0.0;
    double density_percent = 0.0;
};

struct SplitSet {
    struct UserSeq {
        int user = -1;
        std::vector<int> train_items; // item indices, ordered
        int val_item = -1;
        int test_item = -1;
    };
    std::vector<UserSeq> seq;        // retained users only
    std::vector<int> excluded_users; // below min_len

    // Explanation / rationale split: interaction indices, disjoint, exhaustive.
    std::vector<int> expl_train, expl_val, expl_test;
};

struct LoadOptions {
    bool lenient = false; // skip malformed lines instead of aborting
};

struct LoadReport {
    size_t lines = 0;
    size_t skipped_malformed = 0;
    size_t duplicate_triples = 0;
};

// Input: JSON-lines, one {"user","item","text","ts"} per line.
ReviewSet load_reviews(const std::string& path, const LoadOptions& opts = {},
                       LoadReport* report = nullptr);
void save_reviews(const ReviewSet& rs, const std::string& path);

DatasetStats compute_stats(const ReviewSet& rs);
DatasetStats stats_from_counts(size_t n_users, size_t n_items, size_t n_reviews);
// Aligned table in the #User/#Item/#Review/Avg./Density layout.
std::string format_stats_table(const DatasetStats& s, const std::string& name);

SplitSet split_leave_one_out(const ReviewSet& rs, int min_len = 3);
// Fills the expl_* partitions of `out` with an 8:1:1 random partition:
// test and val each get floor(n/10), train gets the rest.
void split_explanation(const ReviewSet& rs, uint64_t seed, SplitSet& out);
SplitSet make_splits(const ReviewSet& rs, int min_len, uint64_t seed);

// Splits persisted as JSON-lines with an added "split" field.
void save_splits(const ReviewSet& rs, const SplitSet& sp,
                 const std::string& seq_path, const std::string& expl_path);
SplitSet load_splits(const ReviewSet& rs, const std::string& seq_path,
                     const std::string& expl_path);

} // namespace rdrec
