// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "rdrec/errors.hpp"

namespace rdrec {

PrefixTrie::PrefixTrie() { nodes_.emplace_back(); }

void PrefixTrie::insert(const std::vector<int>& token_ids_with_eos, int item) {
    if (token_ids_with_eos.empty() || token_ids_with_eos.back() != Vocab::kEos) {
        fail(Err::InvalidArgument, "inference: trie entries must end with EOS");
    }
    int node = kRoot;
    for (int tok : token_ids_with_eos) {
        auto& ch = nodes_[node].children;
        auto it = std::lower_bound(
            ch.begin(), ch.end(), tok,
            [](const std::pair<int, int>& c, int t) { return c.first < t; });
        if (it != ch.end() && it->first == tok) {
            node = it->second;
        } else {
            nodes_.emplace_back();
            int child = static_cast<int>(nodes_.size()) - 1;
            // re-fetch: emplace_back may reallocate
            auto& ch2 = nodes_[node].children;
            auto it2 = std::lower_bound(
                ch2.begin(), ch2.end(), tok,
                [](const std::pair<int, int>& c, int t) { return c.first < t; });
            ch2.insert(it2, {tok, child});
            node = child;
        }
    }
    if (nodes_[node].item < 0) {
        nodes_[node].item = item;
        ++n_items_;
    }
}

namespace {

struct Beam {
    std::vector<int> tokens;
    double log_prob = 0.0;
    int trie_node = PrefixTrie::kRoot;
};

bool beam_less(const Beam& a, const Beam& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.tokens < b.tokens; // deterministic tie-break by token ids
}

double final_score(double log_prob, size_t len, double length_penalty) {
    if (length_penalty == 0.0 || len == 0) return log_prob;
    return log_prob / std::pow(static_cast<double>(len), length_penalty);
}

} // namespace

std::vector<BeamHypothesis> beam_search(RdrecModel& model,
                                        const TokenSequence& input, Task task,
                                        const BeamConfig& cfg) {
    if (cfg.width < 1) fail(Err::RangeError, "inference: beam width must be >= 1");
    RdrecModel::Encoded enc = model.encode(input, task);
    const int v = model.config().vocab_size;

    std::vector<Beam> live{Beam{}};
    std::vector<BeamHypothesis> done;
    for (int step = 0; step < cfg.max_len && !live.empty(); ++step) {
        std::vector<std::vector<int>> prefixes;
        prefixes.reserve(live.size());
        for (const auto& b : live) prefixes.push_back(b.tokens);
        auto logp = model.next_token_logprobs(enc, prefixes);

        std::vector<Beam> candidates;
        candidates.reserve(live.size() * 8);
        for (size_t i = 0; i < live.size(); ++i) {
            for (int tok = 0; tok < v; ++tok) {
                if (tok == Vocab::kPad) continue; // never emitted
                Beam nb = live[i];
                nb.log_prob += logp[i][tok];
                if (tok == Vocab::kEos) {
                    done.push_back(BeamHypothesis{nb.tokens, nb.log_prob, true});
                } else {
                    nb.tokens.push_back(tok);
                    candidates.push_back(std::move(nb));
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), beam_less);
        if (static_cast<int>(candidates.size()) > cfg.width) {
            candidates.resize(cfg.width);
        }
        live = std::move(candidates);
    }

    auto hyp_less = [&](const BeamHypothesis& a, const BeamHypothesis& b) {
        double sa = final_score(a.log_prob, a.tokens.size(), cfg.length_penalty);
        double sb = final_score(b.log_prob, b.tokens.size(), cfg.length_penalty);
        if (sa != sb) return sa > sb;
        return a.tokens < b.tokens;
    };
    if (done.empty()) {
        // nothing completed within max_len: surface the partials, flagged
        for (auto& b : live) {
            done.push_back(BeamHypothesis{b.tokens, b.log_prob, false});
        }
    }
    std::sort(done.begin(), done.end(), hyp_less);
    if (static_cast<int>(done.size()) > cfg.width) done.resize(cfg.width);
    return done;
}

RankedList constrained_beam_search(RdrecModel& model, const TokenSequence& input,
                                   Task task, const BeamConfig& cfg,
                                   const PrefixTrie& trie,
                                   const std::vector<std::string>& item_id_of) {
    if (cfg.width < 1) fail(Err::RangeError, "inference: beam width must be >= 1");
    if (trie.empty()) fail(Err::EmptyInput, "inference: empty candidate trie");
    RdrecModel::Encoded enc = model.encode(input, task);

    struct Done {
        int item;
        double log_prob;
        std::vector<int> tokens;
    };
    std::vector<Beam> live{Beam{}};
    std::vector<Done> done;
    for (int step = 0; !live.empty(); ++step) {
        std::vector<std::vector<int>> prefixes;
        prefixes.reserve(live.size());
        for (const auto& b : live) prefixes.push_back(b.tokens);
        auto logp = model.next_token_logprobs(enc, prefixes);

        std::vector<Beam> candidates;
        for (size_t i = 0; i < live.size(); ++i) {
            for (const auto& [tok, child] : trie.children(live[i].trie_node)) {
                Beam nb = live[i];
                nb.log_prob += logp[i][tok];
                nb.trie_node = child;
                if (tok == Vocab::kEos) {
                    int item = trie.item_at(child);
                    done.push_back(Done{item, nb.log_prob, nb.tokens});
                } else {
                    nb.tokens.push_back(tok);
                    candidates.push_back(std::move(nb));
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), beam_less);
        if (static_cast<int>(candidates.size()) > cfg.width) {
            candidates.resize(cfg.width);
        }
        live = std::move(candidates);
    }

    std::sort(done.begin(), done.end(), [](const Done& a, const Done& b) {
        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
        return a.tokens < b.tokens;
    });
    RankedList out;
    for (const auto& d : done) {
        if (static_cast<int>(out.entries.size()) >= cfg.width) break;
        out.entries.emplace_back(item_id_of[d.item], d.log_prob);
    }
    return out;
}

PrefixTrie build_item_trie(const std::vector<int>& items, const Vocab& vocab) {
    PrefixTrie trie;
    for (int item : items) {
        std::vector<int> ids;
        for (const auto& piece : entity_pieces("item", item)) {
            ids.push_back(vocab.id_of(piece));
        }
        ids.push_back(Vocab::kEos);
        trie.insert(ids, item);
    }
    return trie;
}

RankedList recommend_sequential(RdrecModel& model, const Vocab& vocab, int user,
                                const std::vector<int>& history,
                                const std::vector<int>& universe,
                                const std::vector<std::string>& item_id_of,
                                const BeamConfig& cfg) {
    if (history.empty()) fail(Err::EmptyInput, "inference: empty user history");
    if (universe.empty()) fail(Err::EmptyInput, "inference: empty item universe");
    TaskFields f;
    f.user = user;
    f.history = history;
    RenderedInput r = render_task_input(Task::SR, f);
    TokenSequence seq = encode_rendered(r, vocab);
    PrefixTrie trie = build_item_trie(universe, vocab);
    BeamConfig c = cfg;
    c.width = std::min<int>(cfg.width, static_cast<int>(universe.size()));
    return constrained_beam_search(model, seq, Task::SR, c, trie, item_id_of);
}

RankedList recommend_topn(RdrecModel& model, const Vocab& vocab, int user,
                          const std::vector<int>& candidates,
                          const std::vector<std::string>& item_id_of,
                          const BeamConfig& cfg, bool warn_nonstandard) {
    if (candidates.empty()) fail(Err::EmptyInput, "inference: empty candidate set");
    if (warn_nonstandard && candidates.size() != 100) {
        static bool warned = false;
        if (!warned) {
            std::cerr << "inference: candidate count " << candidates.size()
                      << " differs from the conventional 100, proceeding\n";
            warned = true;
        }
    }
    TaskFields f;
    f.user = user;
    f.candidates = candidates;
    RenderedInput r = render_task_input(Task::TR, f);
    TokenSequence seq = encode_rendered(r, vocab);
    PrefixTrie trie = build_item_trie(candidates, vocab);
    BeamConfig c = cfg;
    c.width = std::min<int>(cfg.width, static_cast<int>(candidates.size()));
    return constrained_beam_search(model, seq, Task::TR, c, trie, item_id_of);
}

double forced_item_score(RdrecModel& model, const TokenSequence& input, Task task,
                         int item, const Vocab& vocab) {
    std::vector<int> target;
    for (const auto& piece : entity_pieces("item", item)) {
        target.push_back(vocab.id_of(piece));
    }
    return model.sequence_logprob(input, task, target);
}

} // namespace rdrec
