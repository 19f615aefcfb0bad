// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/distiller.hpp"

#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rdrec/errors.hpp"
#include "rdrec/hashing.hpp"

namespace rdrec {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kTemplatePrefix = "A user bought an item and said '";
const char* kTemplateSuffix =
    "'. Use two sentences to explain the user's preference and the item's "
    "attributes, respectively.";

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool starts_with_ci(const std::string& s, const std::string& prefix) {
    if (s.size() < prefix.size()) return false;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i]))) {
            return false;
        }
    }
    return true;
}

} // namespace

DistillPrompt build_prompt(const std::string& review_text) {
    std::string review = trim(review_text);
    if (review.empty()) {
        fail(Err::EmptyReview, "distiller: EMPTY_REVIEW");
    }
    return DistillPrompt{kTemplatePrefix + review + kTemplateSuffix};
}

int count_whitespace_tokens(const std::string& text) {
    std::istringstream ss(text);
    std::string w;
    int n = 0;
    while (ss >> w) ++n;
    return n;
}

std::vector<std::string> split_sentences(const std::string& text) {
    // Terminal '.', '!' or '?' followed by whitespace or end of text closes a
    // sentence; trailing text without a terminator is not a sentence.
    std::vector<std::string> out;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur.push_back(c);
        bool terminal = (c == '.' || c == '!' || c == '?');
        bool boundary = terminal && (i + 1 == text.size() ||
                                     std::isspace(static_cast<unsigned char>(text[i + 1])));
        if (boundary) {
            std::string s = trim(cur);
            if (s.size() > 1) out.push_back(s); // bare punctuation is noise
            cur.clear();
        }
    }
    return out;
}

std::optional<Rationale> parse_rationale(const std::string& response_text,
                                         int review_len_tokens) {
    std::vector<std::string> sentences = split_sentences(response_text);
    if (sentences.size() < 2) return std::nullopt;

    Rationale r;
    const std::string* pref = nullptr;
    const std::string* attr = nullptr;
    for (const auto& s : sentences) {
        if (!pref && starts_with_ci(s, "The user prefers")) pref = &s;
        if (!attr && starts_with_ci(s, "The item's attributes")) attr = &s;
    }
    if (pref && attr) {
        r.preference = *pref;
        r.attribute = *attr;
    } else {
        r.preference = sentences[0];
        r.attribute = sentences[1];
        r.parse_fallback = true;
    }
    r.short_review = review_len_tokens <= kShortReviewTokens;
    return r;
}

std::string MockLlmBackend::review_slot(const std::string& prompt) {
    size_t b = prompt.find(kTemplatePrefix);
    size_t e = prompt.rfind(kTemplateSuffix);
    if (b == std::string::npos || e == std::string::npos) return prompt;
    b += std::string(kTemplatePrefix).size();
    return e >= b ? prompt.substr(b, e - b) : prompt;
}

std::string MockLlmBackend::complete(const std::string& prompt) {
    std::string review = review_slot(prompt);
    std::istringstream ss(review);
    std::string w;
    std::vector<std::string> content, raw;
    while (ss >> w) {
        raw.push_back(w);
        std::string stripped;
        for (char c : w) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                stripped.push_back(
                    static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
        }
        if (stripped.size() >= 3) content.push_back(stripped);
    }
    const std::vector<std::string>& words = content.empty() ? raw : content;
    auto pick = [&](int i) -> std::string {
        if (words.empty()) return "plain";
        uint64_t h = fnv1a64(review + "#" + std::to_string(i));
        return words[h % words.size()];
    };
    return "The user prefers items featuring " + pick(0) + " and " + pick(1) +
           ". The item's attributes include " + pick(2) + " qualities.";
}

HttpLlmBackend::HttpLlmBackend(const BackendConfig& cfg) : cfg_(cfg) {
    // endpoint = http://host[:port]/path
    std::string url = cfg.endpoint;
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        fail(Err::ConfigError, "distiller: http backend requires an http:// endpoint");
    }
    url = url.substr(scheme.size());
    size_t slash = url.find('/');
    std::string hostport = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : url.substr(slash);
    size_t colon = hostport.find(':');
    host_ = colon == std::string::npos ? hostport : hostport.substr(0, colon);
    port_ = colon == std::string::npos ? 80 : std::stoi(hostport.substr(colon + 1));
    const char* key = std::getenv("RDREC_LLM_API_KEY");
    if (!key || !*key) {
        fail(Err::ConfigError, "distiller: RDREC_LLM_API_KEY is not set");
    }
    api_key_ = key;
}

std::string HttpLlmBackend::complete(const std::string& prompt) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(static_cast<time_t>(cfg_.timeout_s));
    client.set_read_timeout(static_cast<time_t>(cfg_.timeout_s));
    json req;
    req["prompt"] = prompt;
    req["max_tokens"] = cfg_.max_tokens;
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(path_, headers, req.dump(), "application/json");
    if (!res || res->status != 200) {
        fail(Err::BackendFailure,
             "distiller: backend HTTP error" +
                 (res ? " status " + std::to_string(res->status) : " (no response)"));
    }
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("text") || !body["text"].is_string()) {
        fail(Err::BackendFailure, "distiller: backend returned malformed JSON");
    }
    return body["text"].get<std::string>();
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& cfg) {
    if (cfg.kind == BackendConfig::Kind::Http) {
        return std::make_unique<HttpLlmBackend>(cfg);
    }
    return std::make_unique<MockLlmBackend>();
}

namespace {

class ResponseCache {
public:
    explicit ResponseCache(const std::string& dir) : dir_(dir) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }
    bool enabled() const { return !dir_.empty(); }

    std::optional<std::string> get(const std::string& prompt) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(key_path(prompt), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    void put(const std::string& prompt, const std::string& response) const {
        if (!enabled()) return;
        // write-then-rename so concurrent writers of the same key stay whole
        std::string final_path = key_path(prompt);
        std::string tmp = final_path + ".tmp" + std::to_string(
            std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
            std::ofstream out(tmp, std::ios::binary);
            out << response;
        }
        fs::rename(tmp, final_path);
    }

private:
    std::string key_path(const std::string& prompt) const {
        return (fs::path(dir_) / (fnv1a64_hex(prompt) + ".txt")).string();
    }
    std::string dir_;
};

} // namespace

std::vector<Quadruplet> distill(const ReviewSet& rs, LlmBackend& backend,
                                const BackendConfig& cfg, DistillSummary& summary) {
    const auto& inters = rs.interactions();
    summary = DistillSummary{};
    summary.total = inters.size();

    ResponseCache cache(cfg.cache_dir);

    enum class Outcome { Ok, Skip, Fail };
    struct Slot {
        Outcome outcome = Outcome::Skip;
        Quadruplet quad;
        bool fallback = false;
        bool cache_hit = false;
        size_t calls = 0;
    };
    std::vector<Slot> slots(inters.size());

    std::atomic<size_t> next{0};
    std::mutex log_mu;

    auto worker = [&]() {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= inters.size()) break;
            Slot& slot = slots[k];
            const Interaction& it = inters[k];
            std::string review = trim(it.review_text);
            if (review.empty()) {
                std::lock_guard<std::mutex> lk(log_mu);
                std::cerr << "distiller: skipping empty review (user " << it.user_id
                          << ", item " << it.item_id << ")\n";
                continue;
            }
            DistillPrompt prompt = build_prompt(review);
            std::string response;
            if (auto hit = cache.get(prompt.text)) {
                response = *hit;
                slot.cache_hit = true;
            } else {
                bool got = false;
                for (int attempt = 0; attempt <= cfg.max_retries && !got; ++attempt) {
                    try {
                        ++slot.calls;
                        response = backend.complete(prompt.text);
                        got = true;
                    } catch (const RdrecError& e) {
                        if (attempt == cfg.max_retries) {
                            std::lock_guard<std::mutex> lk(log_mu);
                            std::cerr << "distiller: backend failed for (user "
                                      << it.user_id << ", item " << it.item_id
                                      << "): " << e.what() << "\n";
                        } else {
                            std::this_thread::sleep_for(
                                std::chrono::milliseconds(50 << attempt));
                        }
                    }
                }
                if (!got) {
                    slot.outcome = Outcome::Fail;
                    continue;
                }
                cache.put(prompt.text, response);
            }
            auto rationale =
                parse_rationale(response, count_whitespace_tokens(review));
            if (!rationale) {
                std::lock_guard<std::mutex> lk(log_mu);
                std::cerr << "distiller: UNPARSEABLE response for (user "
                          << it.user_id << ", item " << it.item_id << "), skipped\n";
                continue;
            }
            slot.outcome = Outcome::Ok;
            slot.fallback = rationale->parse_fallback;
            slot.quad = Quadruplet{it.user_id, it.item_id, *rationale};
        }
    };

    int n_threads = std::max(1, cfg.max_concurrency);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<Quadruplet> quads;
    for (auto& slot : slots) {
        summary.cache_hits += slot.cache_hit ? 1 : 0;
        summary.backend_calls += slot.calls;
        switch (slot.outcome) {
            case Outcome::Ok:
                ++summary.ok;
                summary.fallback += slot.fallback ? 1 : 0;
                quads.push_back(std::move(slot.quad));
                break;
            case Outcome::Skip: ++summary.skipped; break;
            case Outcome::Fail: ++summary.failed; break;
        }
    }
    if (summary.total > 0 && summary.failed * 2 > summary.total) {
        fail(Err::BackendFailure,
             "distiller: more than half of the interactions failed (" +
                 std::to_string(summary.failed) + "/" + std::to_string(summary.total) +
                 ")");
    }
    return quads;
}

std::vector<Quadruplet> distill(const ReviewSet& rs, const BackendConfig& cfg,
                                DistillSummary& summary) {
    auto backend = make_backend(cfg);
    return distill(rs, *backend, cfg, summary);
}

void save_quadruplets(const std::vector<Quadruplet>& quads, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "distiller: cannot write " + path);
    for (const auto& q : quads) {
        json j;
        j["user"] = q.user_id;
        j["item"] = q.item_id;
        j["preference"] = q.rationale.preference;
        j["attribute"] = q.rationale.attribute;
        std::vector<std::string> flags;
        if (q.rationale.short_review) flags.push_back("SHORT_REVIEW");
        if (q.rationale.parse_fallback) flags.push_back("PARSE_FALLBACK");
        j["flags"] = flags;
        out << j.dump() << "\n";
    }
}

std::vector<Quadruplet> load_quadruplets(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::MissingFile, "distiller: cannot open " + path);
    std::vector<Quadruplet> quads;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            fail(Err::MalformedLine,
                 "distiller: malformed quadruplet at line " + std::to_string(lineno));
        }
        Quadruplet q;
        q.user_id = j.at("user").get<std::string>();
        q.item_id = j.at("item").get<std::string>();
        q.rationale.preference = j.at("preference").get<std::string>();
        q.rationale.attribute = j.at("attribute").get<std::string>();
        for (const auto& f : j.value("flags", std::vector<std::string>{})) {
            if (f == "SHORT_REVIEW") q.rationale.short_review = true;
            if (f == "PARSE_FALLBACK") q.rationale.parse_fallback = true;
        }
        quads.push_back(std::move(q));
    }
    return quads;
}

} // namespace rdrec
