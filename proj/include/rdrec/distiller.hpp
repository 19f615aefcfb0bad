// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdrec/corpus.hpp"

namespace rdrec {

struct DistillPrompt {
    std::string text;
};

struct Rationale {
    std::string preference; // one sentence, terminal punctuation
    std::string attribute;  // one sentence, terminal punctuation
    bool short_review = false;   // source review under the token threshold
    bool parse_fallback = false; // positional split instead of prefix match
};

struct Quadruplet {
    std::string user_id;
    std::string item_id;
    Rationale rationale;
};

struct BackendConfig {
    enum class Kind { Mock, Http };
    Kind kind = Kind::Mock;
    std::string endpoint;       // http only
    double timeout_s = 30.0;
    int max_retries = 3;
    int max_concurrency = 1;
    int max_tokens = 128;
    std::string cache_dir;      // empty = no cache
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    // Returns the raw completion text; throws RdrecError(BackendFailure) on error.
    virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic testing substitute: picks up to three content words out of
// the review slot via a stable hash and emits the two-sentence shape the
// parser's primary rule expects.
class MockLlmBackend : public LlmBackend {
public:
    std::string complete(const std::string& prompt) override;
    static std::string review_slot(const std::string& prompt);
};

// POST {"prompt","max_tokens"} to endpoint, expects {"text"}. Bearer token
// from RDREC_LLM_API_KEY.
class HttpLlmBackend : public LlmBackend {
public:
    explicit HttpLlmBackend(const BackendConfig& cfg);
    std::string complete(const std::string& prompt) override;

private:
    BackendConfig cfg_;
    std::string host_;
    int port_ = 80;
    std::string path_;
    std::string api_key_;
};

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& cfg);

DistillPrompt build_prompt(const std::string& review_text);

// Reviews of this many whitespace tokens or fewer get the SHORT_REVIEW
// hallucination-risk flag.
constexpr int kShortReviewTokens = 5;

// nullopt when fewer than two complete sentences are found (UNPARSEABLE).
std::optional<Rationale> parse_rationale(const std::string& response_text,
                                         int review_len_tokens);

std::vector<std::string> split_sentences(const std::string& text);
int count_whitespace_tokens(const std::string& text);

struct DistillSummary {
    size_t total = 0;
    size_t ok = 0;
    size_t skipped = 0;   // empty review or unparseable response
    size_t fallback = 0;
    size_t failed = 0;    // backend unreachable after retries
    size_t cache_hits = 0;
    size_t backend_calls = 0;
};

// One quadruplet per successfully parsed interaction, in interaction order.
// Consults the response cache before any backend call. Throws when more than
// half of the interactions fail at the backend.
std::vector<Quadruplet> distill(const ReviewSet& rs, LlmBackend& backend,
                                const BackendConfig& cfg, DistillSummary& summary);
std::vector<Quadruplet> distill(const ReviewSet& rs, const BackendConfig& cfg,
                                DistillSummary& summary);

void save_quadruplets(const std::vector<Quadruplet>& quads, const std::string& path);
std::vector<Quadruplet> load_quadruplets(const std::string& path);

} // namespace rdrec
