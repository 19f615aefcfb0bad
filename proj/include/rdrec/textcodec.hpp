// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rdrec {

// Word-level vocabulary. IDs 0..2 are <pad>/<eos>/<unk>; the digit
// characters and '_' are always present so numeric entity IDs tokenize
// compositionally ("user_12" -> ["user","_","1","2"]).
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kEos = 1;
    static constexpr int kUnk = 2;

    Vocab();

    int add(const std::string& token); // returns existing id if present
    int id_of(const std::string& token) const; // kUnk if absent
    const std::string& token_of(int id) const;
    size_t size() const { return tokens_.size(); }

    void save(const std::string& path) const; // one token per line, line = id
    static Vocab load(const std::string& path);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

struct TokenSequence {
    std::vector<int> ids;
    std::vector<int> whole_word; // same length; 0 = non-entity position
};

// Normalization: lowercase + whitespace collapse. Pieces are lowercase
// alphabetic runs, single digits, or single punctuation characters.
std::string normalize_text(const std::string& text);
std::vector<std::string> tokenize(const std::string& text);
// Inverse of tokenize up to normalization; glues '_'/apostrophes to both
// sides, sentence punctuation to the left, and adjacent digit tokens.
std::string detokenize(const std::vector<std::string>& pieces);

Vocab build_vocab(const std::vector<std::string>& corpus_texts, size_t cap);

TokenSequence encode(const std::string& text, const Vocab& v);
std::string decode(const std::vector<int>& ids, const Vocab& v);

// k-th span's positions (1-based k) share index k; everything else is 0.
std::vector<int> whole_word_index(size_t n_tokens,
                                  const std::vector<std::pair<int, int>>& spans);

enum class Task { SR = 0, TR = 1, EG = 2, RGPref = 3, RGAttr = 4 };
constexpr int kNumTasks = 5;
const char* task_name(Task t);

struct RenderedInput {
    std::string text;                       // display form
    std::vector<std::string> pieces;        // tokenizer pieces of text
    std::vector<std::pair<int, int>> spans; // entity spans over pieces, half-open
};

struct TaskFields {
    int user = -1;
    int item = -1;                  // EG / RG-attr
    std::vector<int> history;       // SR: ordered item indices
    std::vector<int> candidates;    // TR: candidate item indices
};

std::vector<std::string> entity_pieces(const std::string& kind, int idx);
std::string entity_surface(const std::string& kind, int idx);

RenderedInput render_task_input(Task task, const TaskFields& fields);

// Rendered pieces -> (ids, whole-word index list).
TokenSequence encode_rendered(const RenderedInput& r, const Vocab& v);

} // namespace rdrec
