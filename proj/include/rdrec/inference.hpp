// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rdrec/evaluator.hpp"
#include "rdrec/model.hpp"
#include "rdrec/textcodec.hpp"

namespace rdrec {

struct BeamConfig {
    int width = 20;
    int max_len = 16;
    double length_penalty = 0.0; // 0 = raw log-probability sums
};

// Trie over EOS-terminated item token sequences. The EOS terminator makes
// the paths prefix-free, so every completed beam maps to exactly one item.
class PrefixTrie {
public:
    PrefixTrie();

    void insert(const std::vector<int>& token_ids_with_eos, int item);
    bool empty() const { return n_items_ == 0; }
    size_t n_items() const { return n_items_; }

    static constexpr int kRoot = 0;
    // children of a node as (token, child node) pairs, token-ascending
    const std::vector<std::pair<int, int>>& children(int node) const {
        return nodes_[node].children;
    }
    // item stored at a terminal node, -1 otherwise
    int item_at(int node) const { return nodes_[node].item; }

private:
    struct TrieNode {
        std::vector<std::pair<int, int>> children;
        int item = -1;
    };
    std::vector<TrieNode> nodes_;
    size_t n_items_ = 0;
};

struct BeamHypothesis {
    std::vector<int> tokens; // EOS excluded
    double log_prob = 0.0;
    bool complete = false;
};

// Standard beam expansion over the decoder; returns up to `width` completed
// sequences by descending score (ties by token-id order). When nothing
// completes within max_len the best partials come back flagged incomplete.
std::vector<BeamHypothesis> beam_search(RdrecModel& model,
                                        const TokenSequence& input, Task task,
                                        const BeamConfig& cfg);

// Beam restricted to trie continuations; every result is a valid item.
RankedList constrained_beam_search(RdrecModel& model, const TokenSequence& input,
                                   Task task, const BeamConfig& cfg,
                                   const PrefixTrie& trie,
                                   const std::vector<std::string>& item_id_of);

// Trie over the given item indices using "item_{idx}" surface forms.
PrefixTrie build_item_trie(const std::vector<int>& items, const Vocab& vocab);

// Next-item ranking over the full item universe.
RankedList recommend_sequential(RdrecModel& model, const Vocab& vocab, int user,
                                const std::vector<int>& history,
                                const std::vector<int>& universe,
                                const std::vector<std::string>& item_id_of,
                                const BeamConfig& cfg);

// Candidate-set ranking (positive + sampled negatives). Warns once when the
// candidate count differs from the conventional 100 unless strict is off.
RankedList recommend_topn(RdrecModel& model, const Vocab& vocab, int user,
                          const std::vector<int>& candidates,
                          const std::vector<std::string>& item_id_of,
                          const BeamConfig& cfg, bool warn_nonstandard = true);

// Teacher-forced log-probability of one item; doubles as the ranking oracle.
double forced_item_score(RdrecModel& model, const TokenSequence& input, Task task,
                         int item, const Vocab& vocab);

} // namespace rdrec
