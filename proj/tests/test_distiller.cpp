// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rdrec/distiller.hpp"
#include "rdrec/errors.hpp"
#include "rdrec/rng.hpp"

using namespace rdrec;
namespace fs = std::filesystem;

namespace {

const std::string kPrefix = "A user bought an item and said '";
const std::string kSuffix =
    "'. Use two sentences to explain the user's preference and the item's "
    "attributes, respectively.";

// test backend with scripted responses keyed by review text
class CannedBackend : public LlmBackend {
public:
    std::map<std::string, std::string> by_review;
    std::atomic<int> calls{0};
    int fail_first_n = 0;

    std::string complete(const std::string& prompt) override {
        int n = ++calls;
        if (n <= fail_first_n) {
            fail(Err::BackendFailure, "canned: scripted failure");
        }
        std::string review = MockLlmBackend::review_slot(prompt);
        auto it = by_review.find(review);
        if (it == by_review.end()) {
            fail(Err::BackendFailure, "canned: no script for review");
        }
        return it->second;
    }
};

class CountingMock : public LlmBackend {
public:
    std::atomic<int> calls{0};
    std::string complete(const std::string& prompt) override {
        ++calls;
        return mock_.complete(prompt);
    }

private:
    MockLlmBackend mock_;
};

class AlwaysFailBackend : public LlmBackend {
public:
    std::string complete(const std::string&) override {
        fail(Err::BackendFailure, "down");
    }
};

ReviewSet tiny_reviews(const std::vector<std::string>& texts) {
    ReviewSet rs;
    for (size_t i = 0; i < texts.size(); ++i) {
        rs.add_interaction("u" + std::to_string(i % 3), "i" + std::to_string(i),
                           texts[i], static_cast<int64_t>(i));
    }
    rs.finalize();
    return rs;
}

} // namespace

TEST_CASE("prompt embeds the review verbatim in the fixed template") {
    DistillPrompt p = build_prompt("This is a fantastic game.");
    CHECK(p.text == kPrefix + "This is a fantastic game." + kSuffix);
}

TEST_CASE("empty review is rejected") {
    CHECK_THROWS_AS(build_prompt(""), RdrecError);
    CHECK_THROWS_AS(build_prompt("   \t\n"), RdrecError);
}

TEST_CASE("apostrophes pass through unescaped") {
    std::string review = "it's my kid's favorite";
    DistillPrompt p = build_prompt(review);
    CHECK(p.text.find(review) != std::string::npos);
    CHECK(p.text == kPrefix + review + kSuffix);
}

TEST_CASE("template fidelity holds for arbitrary reviews") {
    Rng rng(71);
    const std::string words = "abcdefghij klmno pqr stu vwx yz";
    for (int trial = 0; trial < 200; ++trial) {
        std::string review;
        int n = 1 + static_cast<int>(rng.uniform_below(10));
        for (int i = 0; i < n; ++i) {
            size_t at = rng.uniform_below(words.size() - 3);
            for (char c : words.substr(at, 3)) {
                review.push_back(c == ' ' ? 'x' : c);
            }
            if (i + 1 < n) review.push_back(' ');
        }
        DistillPrompt p = build_prompt(review);
        REQUIRE(p.text.find(review) != std::string::npos);
        CHECK(p.text.substr(0, kPrefix.size()) == kPrefix);
        CHECK(p.text.substr(p.text.size() - kSuffix.size()) == kSuffix);
        CHECK(p.text.size() == kPrefix.size() + review.size() + kSuffix.size());
    }
}

TEST_CASE("parse: the worked two-sentence response") {
    std::string response =
        "The user prefers games with engaging storylines. The item's attributes "
        "include a realistic game world, immersive sound effects, and smooth "
        "gameplay.";
    auto r = parse_rationale(response, 5);
    REQUIRE(r.has_value());
    CHECK(r->preference == "The user prefers games with engaging storylines.");
    CHECK(r->attribute ==
          "The item's attributes include a realistic game world, immersive "
          "sound effects, and smooth gameplay.");
    CHECK_FALSE(r->parse_fallback);
    CHECK(r->short_review); // the five-token review is flagged
    auto longer = parse_rationale(response, 12);
    CHECK_FALSE(longer->short_review);
}

TEST_CASE("parse: single sentence is unparseable") {
    CHECK_FALSE(parse_rationale("Good. ", 1).has_value());
    CHECK_FALSE(parse_rationale("no terminal punctuation at all", 6).has_value());
    CHECK_FALSE(parse_rationale("", 1).has_value());
}

TEST_CASE("parse: positional fallback flags itself") {
    auto r = parse_rationale("They liked it a lot. It is a blue mug.", 9);
    REQUIRE(r.has_value());
    CHECK(r->preference == "They liked it a lot.");
    CHECK(r->attribute == "It is a blue mug.");
    CHECK(r->parse_fallback);
}

TEST_CASE("parse: prefix rule finds sentences out of order") {
    std::string response =
        "The item's attributes include sturdy plastic. Some filler sentence "
        "here. The user prefers bright colors.";
    auto r = parse_rationale(response, 8);
    REQUIRE(r.has_value());
    CHECK(r->preference == "The user prefers bright colors.");
    CHECK(r->attribute == "The item's attributes include sturdy plastic.");
    CHECK_FALSE(r->parse_fallback);
}

TEST_CASE("parser totality: outputs are always two complete sentences") {
    Rng rng(5);
    const std::string alphabet = "ab .!?x'";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        int n = static_cast<int>(rng.uniform_below(40));
        for (int i = 0; i < n; ++i) {
            text.push_back(alphabet[rng.uniform_below(alphabet.size())]);
        }
        auto r = parse_rationale(text, 3);
        if (r) {
            CHECK_FALSE(r->preference.empty());
            CHECK_FALSE(r->attribute.empty());
            auto terminal = [](const std::string& s) {
                char c = s.back();
                return c == '.' || c == '!' || c == '?';
            };
            CHECK(terminal(r->preference));
            CHECK(terminal(r->attribute));
        }
    }
}

TEST_CASE("mock backend is deterministic and review-sensitive") {
    MockLlmBackend mock;
    DistillPrompt a = build_prompt("strategic card game fun");
    CHECK(mock.complete(a.text) == mock.complete(a.text));
    DistillPrompt b = build_prompt("soft gentle lotion smell");
    CHECK(mock.complete(a.text) != mock.complete(b.text));
}

TEST_CASE("mock backend draws words from the review only") {
    MockLlmBackend mock;
    std::string review = "strategic card game fun";
    std::string response = mock.complete(build_prompt(review).text);
    auto r = parse_rationale(response, 4);
    REQUIRE(r.has_value());
    CHECK_FALSE(r->parse_fallback); // primary rule always applies
    std::istringstream ss(response);
    std::string w;
    std::set<std::string> allowed{"strategic", "card", "game", "fun"};
    std::set<std::string> scaffold{"The",       "user",    "prefers",
                                   "items",     "featuring", "and",
                                   "item's",    "attributes", "include",
                                   "qualities"};
    while (ss >> w) {
        if (w.back() == '.') w.pop_back();
        bool known = allowed.count(w) > 0 || scaffold.count(w) > 0;
        CHECK(known);
    }
}

TEST_CASE("distill over mock: one quadruplet per interaction, reproducible") {
    ReviewSet rs = tiny_reviews({"fun strategic game night",
                                 "smooth gentle face cream",
                                 "sturdy running shoes fit well"});
    BackendConfig cfg;
    DistillSummary s1, s2;
    MockLlmBackend mock;
    auto q1 = distill(rs, mock, cfg, s1);
    auto q2 = distill(rs, mock, cfg, s2);
    REQUIRE(q1.size() == 3);
    CHECK(s1.ok == 3);
    CHECK(s1.total == 3);
    REQUIRE(q2.size() == 3);
    for (size_t i = 0; i < q1.size(); ++i) {
        CHECK(q1[i].user_id == q2[i].user_id);
        CHECK(q1[i].rationale.preference == q2[i].rationale.preference);
        CHECK(q1[i].rationale.attribute == q2[i].rationale.attribute);
    }
}

TEST_CASE("a warm cache serves every response without backend calls") {
    ReviewSet rs = tiny_reviews({"alpha beta gamma delta", "epsilon zeta eta theta",
                                 "iota kappa lambda mu"});
    fs::path dir = fs::temp_directory_path() / "rdrec_distill_cache";
    fs::remove_all(dir);
    BackendConfig cfg;
    cfg.cache_dir = dir.string();
    CountingMock counting;
    DistillSummary s1;
    auto q1 = distill(rs, counting, cfg, s1);
    CHECK(counting.calls == 3);
    CHECK(s1.cache_hits == 0);
    DistillSummary s2;
    auto q2 = distill(rs, counting, cfg, s2);
    CHECK(counting.calls == 3); // unchanged
    CHECK(s2.cache_hits == 3);
    CHECK(s2.backend_calls == 0);
    REQUIRE(q2.size() == q1.size());
    for (size_t i = 0; i < q1.size(); ++i) {
        CHECK(q1[i].rationale.preference == q2[i].rationale.preference);
    }
}

TEST_CASE("unparseable responses are skipped and counted") {
    ReviewSet rs = tiny_reviews({"first verbose review text", "terse",
                                 "third verbose review text"});
    CannedBackend canned;
    canned.by_review["first verbose review text"] =
        "The user prefers verbosity. The item's attributes include words.";
    canned.by_review["terse"] = "Good.";
    canned.by_review["third verbose review text"] =
        "The user prefers length. The item's attributes include letters.";
    BackendConfig cfg;
    DistillSummary s;
    auto quads = distill(rs, canned, cfg, s);
    CHECK(quads.size() == 2);
    CHECK(s.ok == 2);
    CHECK(s.skipped == 1);
    CHECK(s.failed == 0);
}

TEST_CASE("empty reviews are skipped before any backend call") {
    ReviewSet rs = tiny_reviews({"real review text here", "", "  "});
    CountingMock counting;
    BackendConfig cfg;
    DistillSummary s;
    auto quads = distill(rs, counting, cfg, s);
    CHECK(quads.size() == 1);
    CHECK(s.skipped == 2);
    CHECK(counting.calls == 1);
}

TEST_CASE("majority backend failure aborts with an error") {
    ReviewSet rs = tiny_reviews({"one two three four", "five six seven eight",
                                 "nine ten eleven twelve"});
    AlwaysFailBackend down;
    BackendConfig cfg;
    cfg.max_retries = 1;
    DistillSummary s;
    CHECK_THROWS_AS(distill(rs, down, cfg, s), RdrecError);
}

TEST_CASE("isolated failures skip the record but keep the run alive") {
    ReviewSet rs = tiny_reviews({"aa bb cc dd", "ee ff gg hh", "ii jj kk ll"});
    CannedBackend canned;
    canned.fail_first_n = 2; // first record burns its retry budget, rest succeed
    for (const char* r : {"aa bb cc dd", "ee ff gg hh", "ii jj kk ll"}) {
        canned.by_review[r] =
            "The user prefers x. The item's attributes include y.";
    }
    BackendConfig cfg;
    cfg.max_retries = 1;
    DistillSummary s;
    auto quads = distill(rs, canned, cfg, s);
    CHECK(s.failed == 1);
    CHECK(s.ok == 2);
    CHECK(quads.size() == 2);
}

TEST_CASE("concurrent distillation keeps deterministic output order") {
    std::vector<std::string> texts;
    for (int i = 0; i < 24; ++i) {
        texts.push_back("review number " + std::to_string(i) + " content words");
    }
    ReviewSet rs = tiny_reviews(texts);
    MockLlmBackend mock;
    BackendConfig seq_cfg;
    BackendConfig par_cfg;
    par_cfg.max_concurrency = 4;
    DistillSummary s1, s2;
    auto q1 = distill(rs, mock, seq_cfg, s1);
    auto q2 = distill(rs, mock, par_cfg, s2);
    REQUIRE(q1.size() == q2.size());
    for (size_t i = 0; i < q1.size(); ++i) {
        CHECK(q1[i].user_id == q2[i].user_id);
        CHECK(q1[i].item_id == q2[i].item_id);
        CHECK(q1[i].rationale.preference == q2[i].rationale.preference);
    }
}

TEST_CASE("quadruplets round trip through jsonl") {
    ReviewSet rs = tiny_reviews({"short", "a much longer review with words"});
    MockLlmBackend mock;
    BackendConfig cfg;
    DistillSummary s;
    auto quads = distill(rs, mock, cfg, s);
    fs::path dir = fs::temp_directory_path() / "rdrec_distill_test";
    fs::create_directories(dir);
    std::string path = (dir / "quads.jsonl").string();
    save_quadruplets(quads, path);
    auto loaded = load_quadruplets(path);
    REQUIRE(loaded.size() == quads.size());
    for (size_t i = 0; i < quads.size(); ++i) {
        CHECK(loaded[i].user_id == quads[i].user_id);
        CHECK(loaded[i].item_id == quads[i].item_id);
        CHECK(loaded[i].rationale.preference == quads[i].rationale.preference);
        CHECK(loaded[i].rationale.attribute == quads[i].rationale.attribute);
        CHECK(loaded[i].rationale.short_review == quads[i].rationale.short_review);
        CHECK(loaded[i].rationale.parse_fallback ==
              quads[i].rationale.parse_fallback);
    }
}

TEST_CASE("http backend speaks the wire protocol") {
    setenv("RDREC_LLM_API_KEY", "test-key-123", 1);
    httplib::Server server;
    std::string seen_auth, seen_body;
    server.Post("/v1/complete", [&](const httplib::Request& req,
                                    httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        nlohmann::json out;
        out["text"] =
            "The user prefers tested code. The item's attributes include pipes.";
        res.set_content(out.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    BackendConfig cfg;
    cfg.kind = BackendConfig::Kind::Http;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
    cfg.max_tokens = 77;
    HttpLlmBackend backend(cfg);
    std::string text = backend.complete("prompt text goes here");
    CHECK(text.find("The user prefers tested code.") == 0);
    CHECK(seen_auth == "Bearer test-key-123");
    nlohmann::json body = nlohmann::json::parse(seen_body);
    CHECK(body.at("prompt") == "prompt text goes here");
    CHECK(body.at("max_tokens") == 77);

    server.stop();
    th.join();
}

TEST_CASE("http backend requires the api key env var") {
    unsetenv("RDREC_LLM_API_KEY");
    BackendConfig cfg;
    cfg.kind = BackendConfig::Kind::Http;
    cfg.endpoint = "http://127.0.0.1:9/x";
    CHECK_THROWS_AS(HttpLlmBackend{cfg}, RdrecError);
    setenv("RDREC_LLM_API_KEY", "k", 1);
}

TEST_CASE("http backend surfaces malformed responses as failures") {
    setenv("RDREC_LLM_API_KEY", "k", 1);
    httplib::Server server;
    server.Post("/bad", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    BackendConfig cfg;
    cfg.kind = BackendConfig::Kind::Http;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
    HttpLlmBackend backend(cfg);
    CHECK_THROWS_AS(backend.complete("x"), RdrecError);
    server.stop();
    th.join();
}
