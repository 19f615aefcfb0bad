// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/textcodec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "rdrec/errors.hpp"

namespace rdrec {

namespace {

const char* kPadTok = "<pad>";
const char* kEosTok = "<eos>";
const char* kUnkTok = "<unk>";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

} // namespace

Vocab::Vocab() {
    add(kPadTok);
    add(kEosTok);
    add(kUnkTok);
    for (char c = '0'; c <= '9'; ++c) add(std::string(1, c));
    add("_");
}

int Vocab::add(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

int Vocab::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token_of(int id) const {
    return tokens_.at(static_cast<size_t>(id));
}

void Vocab::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "textcodec: cannot write vocab " + path);
    for (const auto& t : tokens_) out << t << "\n";
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::MissingFile, "textcodec: cannot open vocab " + path);
    Vocab v;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        if (lineno < v.size()) {
            // built-in prefix must match
            if (line != v.tokens_[lineno]) {
                fail(Err::MalformedLine,
                     "textcodec: vocab file does not start with the reserved tokens");
            }
        } else {
            v.add(line);
        }
        ++lineno;
    }
    return v;
}

std::string normalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::string norm = normalize_text(text);
    std::vector<std::string> pieces;
    size_t i = 0;
    while (i < norm.size()) {
        char c = norm[i];
        if (c == ' ') {
            ++i;
        } else if (is_alpha(c)) {
            size_t j = i;
            while (j < norm.size() && is_alpha(norm[j])) ++j;
            pieces.emplace_back(norm.substr(i, j - i));
            i = j;
        } else {
            // digits and punctuation are single-character pieces
            pieces.emplace_back(1, c);
            ++i;
        }
    }
    return pieces;
}

std::string detokenize(const std::vector<std::string>& pieces) {
    auto glue_left = [](const std::string& p) {
        return p == "_" || p == "'" || p == "." || p == "," || p == "!" ||
               p == "?" || p == ";" || p == ":";
    };
    auto glue_right = [](const std::string& p) { return p == "_" || p == "'"; };
    std::string out;
    const std::string* prev = nullptr;
    for (const auto& p : pieces) {
        if (prev) {
            bool glue = glue_right(*prev) || glue_left(p) ||
                        (prev->size() == 1 && is_digit((*prev)[0]) &&
                         p.size() == 1 && is_digit(p[0]));
            if (!glue) out.push_back(' ');
        }
        out += p;
        prev = &p;
    }
    return out;
}

Vocab build_vocab(const std::vector<std::string>& corpus_texts, size_t cap) {
    if (cap < 16) fail(Err::RangeError, "textcodec: vocab cap must be >= 16");
    std::map<std::string, size_t> freq; // ordered map: lexicographic ties for free
    for (const auto& text : corpus_texts) {
        for (auto& p : tokenize(text)) ++freq[p];
    }
    std::vector<std::pair<std::string, size_t>> by_freq(freq.begin(), freq.end());
    std::stable_sort(by_freq.begin(), by_freq.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocab v;
    for (const auto& [tok, n] : by_freq) {
        if (v.size() >= cap) break;
        v.add(tok);
    }
    return v;
}

TokenSequence encode(const std::string& text, const Vocab& v) {
    TokenSequence seq;
    for (const auto& p : tokenize(text)) {
        seq.ids.push_back(v.id_of(p));
    }
    seq.whole_word.assign(seq.ids.size(), 0);
    return seq;
}

std::string decode(const std::vector<int>& ids, const Vocab& v) {
    std::vector<std::string> pieces;
    for (int id : ids) {
        if (id == Vocab::kPad || id == Vocab::kEos) continue;
        pieces.push_back(v.token_of(id));
    }
    return detokenize(pieces);
}

std::vector<int> whole_word_index(size_t n_tokens,
                                  const std::vector<std::pair<int, int>>& spans) {
    std::vector<int> idx(n_tokens, 0);
    int prev_end = 0;
    int k = 0;
    for (const auto& [b, e] : spans) {
        ++k;
        if (b < prev_end) {
            fail(Err::OverlappingSpans, "textcodec: overlapping or unordered spans");
        }
        if (b >= e || e > static_cast<int>(n_tokens)) {
            fail(Err::InvalidArgument, "textcodec: span out of bounds");
        }
        for (int p = b; p < e; ++p) idx[p] = k;
        prev_end = e;
    }
    return idx;
}

const char* task_name(Task t) {
    switch (t) {
        case Task::SR: return "sr";
        case Task::TR: return "tr";
        case Task::EG: return "eg";
        case Task::RGPref: return "rg_pref";
        case Task::RGAttr: return "rg_attr";
    }
    return "?";
}

std::vector<std::string> entity_pieces(const std::string& kind, int idx) {
    std::vector<std::string> pieces{kind, "_"};
    for (char c : std::to_string(idx)) pieces.emplace_back(1, c);
    return pieces;
}

std::string entity_surface(const std::string& kind, int idx) {
    return kind + "_" + std::to_string(idx);
}

namespace {

// Accumulates template pieces and records a span per entity mention.
struct InputBuilder {
    RenderedInput r;

    void text(const std::string& s) {
        for (auto& p : tokenize(s)) r.pieces.push_back(p);
        append_display(s);
    }
    void entity(const std::string& kind, int idx) {
        int begin = static_cast<int>(r.pieces.size());
        for (auto& p : entity_pieces(kind, idx)) r.pieces.push_back(p);
        r.spans.emplace_back(begin, static_cast<int>(r.pieces.size()));
        append_display(entity_surface(kind, idx));
    }
    // Entity directly followed by "'s ..." (no space before the apostrophe).
    void entity_possessive(const std::string& kind, int idx, const std::string& rest) {
        entity(kind, idx);
        for (auto& p : tokenize(rest)) r.pieces.push_back(p);
        r.text += rest; // no separating space
    }

private:
    void append_display(const std::string& s) {
        if (!r.text.empty()) r.text.push_back(' ');
        r.text += s;
    }
};

} // namespace

RenderedInput render_task_input(Task task, const TaskFields& fields) {
    InputBuilder b;
    switch (task) {
        case Task::SR:
            b.text("Given the purchase history of");
            b.entity("user", fields.user);
            b.text(":");
            for (int it : fields.history) b.entity("item", it);
            b.text(", predict the next possible item");
            break;
        case Task::TR:
            b.text("Which item of the following to recommend for");
            b.entity("user", fields.user);
            b.text("?");
            for (int it : fields.candidates) b.entity("item", it);
            break;
        case Task::EG:
            b.text("Generate an explanation for");
            b.entity("user", fields.user);
            b.text("about");
            b.entity("item", fields.item);
            break;
        case Task::RGPref:
            b.text("Generate");
            b.entity_possessive("user", fields.user, "'s preference");
            break;
        case Task::RGAttr:
            b.text("Generate");
            b.entity_possessive("item", fields.item, "'s attribute");
            break;
        default:
            fail(Err::InvalidArgument, "textcodec: unknown task tag");
    }
    return b.r;
}

TokenSequence encode_rendered(const RenderedInput& r, const Vocab& v) {
    TokenSequence seq;
    seq.ids.reserve(r.pieces.size());
    for (const auto& p : r.pieces) seq.ids.push_back(v.id_of(p));
    seq.whole_word = whole_word_index(r.pieces.size(), r.spans);
    return seq;
}

} // namespace rdrec
