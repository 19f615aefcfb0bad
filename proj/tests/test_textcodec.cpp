// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdrec/errors.hpp"
#include "rdrec/rng.hpp"
#include "rdrec/textcodec.hpp"

using namespace rdrec;
namespace fs = std::filesystem;

namespace {

std::string golden_path(const std::string& name) {
    return std::string(RDREC_GOLDEN_DIR) + "/" + name;
}

std::string render_to_string(const RenderedInput& r) {
    std::ostringstream out;
    out << "text: " << r.text << "\n";
    out << "pieces:";
    for (const auto& p : r.pieces) out << " " << p;
    out << "\nspans:";
    for (const auto& [b, e] : r.spans) out << " " << b << "-" << e;
    out << "\n";
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("tokenize splits ids into composable pieces") {
    CHECK(tokenize("user_12") ==
          std::vector<std::string>{"user", "_", "1", "2"});
    CHECK(tokenize("Hello  World") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("it's fine.") ==
          std::vector<std::string>{"it", "'", "s", "fine", "."});
    CHECK(tokenize("").empty());
}

TEST_CASE("vocab orders by frequency then lexicographically") {
    Vocab v = build_vocab({"a a b"}, 16);
    CHECK(v.id_of("a") < v.id_of("b"));
    CHECK(v.id_of("a") >= 3); // after the specials
    // tie broken lexicographically
    Vocab v2 = build_vocab({"zz aa"}, 32);
    CHECK(v2.id_of("aa") < v2.id_of("zz"));
}

TEST_CASE("empty corpus leaves specials plus the always-present atoms") {
    Vocab v = build_vocab({}, 16);
    CHECK(v.size() == 14); // pad, eos, unk, ten digits, underscore
    CHECK(v.id_of("7") != Vocab::kUnk);
    CHECK(v.id_of("_") != Vocab::kUnk);
    CHECK(v.id_of("word") == Vocab::kUnk);
}

TEST_CASE("vocab respects the cap and the cap floor") {
    std::vector<std::string> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back("w" + std::to_string(i));
    Vocab v = build_vocab(corpus, 20);
    CHECK(v.size() <= 20);
    CHECK_THROWS_AS(build_vocab(corpus, 8), RdrecError);
}

TEST_CASE("vocab files are deterministic and round trip") {
    std::vector<std::string> corpus{"the quick brown fox", "the lazy dog",
                                    "user_12 bought item_7"};
    Vocab a = build_vocab(corpus, 64);
    Vocab b = build_vocab(corpus, 64);
    fs::path dir = fs::temp_directory_path() / "rdrec_codec_test";
    fs::create_directories(dir);
    std::string pa = (dir / "a.vocab").string();
    std::string pb = (dir / "b.vocab").string();
    a.save(pa);
    b.save(pb);
    CHECK(slurp(pa) == slurp(pb));
    Vocab c = Vocab::load(pa);
    CHECK(c.size() == a.size());
    CHECK(c.id_of("quick") == a.id_of("quick"));
}

TEST_CASE("encode basics") {
    Vocab v = build_vocab({"hello world"}, 16);
    CHECK(encode("", v).ids.empty());
    TokenSequence two = encode("hello hello", v);
    REQUIRE(two.ids.size() == 2);
    CHECK(two.ids[0] == two.ids[1]);
    CHECK(two.whole_word == std::vector<int>{0, 0});
    // out-of-vocab word maps to UNK under a capped vocab
    TokenSequence oov = encode("unknownword", v);
    REQUIRE(oov.ids.size() == 1);
    CHECK(oov.ids[0] == Vocab::kUnk);
}

TEST_CASE("decode inverts encode up to normalization") {
    std::vector<std::string> corpus{
        "the user prefers strategic games with clever mechanics.",
        "user_12 bought item_7 and item_23 yesterday",
        "it's a great product, really!"};
    Vocab v = build_vocab(corpus, 256);
    for (const auto& text : corpus) {
        std::string norm = normalize_text(text);
        CHECK(decode(encode(text, v).ids, v) == norm);
    }
}

TEST_CASE("decode is idempotent on random piece soups") {
    Vocab v = build_vocab({"alpha beta gamma delta 12 34 . , _"}, 64);
    Rng rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> ids;
        int n = 1 + static_cast<int>(rng.uniform_below(12));
        for (int i = 0; i < n; ++i) {
            ids.push_back(3 + static_cast<int>(rng.uniform_below(v.size() - 3)));
        }
        std::string once = decode(ids, v);
        std::string twice = decode(encode(once, v).ids, v);
        CHECK(once == twice);
    }
}

TEST_CASE("whole-word index golden from the worked example") {
    // ["P1","P2","P3","user","_","12","34","item","_","98","76"]
    std::vector<std::pair<int, int>> spans{{3, 7}, {7, 11}};
    CHECK(whole_word_index(11, spans) ==
          std::vector<int>{0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2});
}

TEST_CASE("whole-word index edge cases") {
    CHECK(whole_word_index(4, {}) == std::vector<int>{0, 0, 0, 0});
    CHECK(whole_word_index(3, {{0, 3}}) == std::vector<int>{1, 1, 1});
    CHECK_THROWS_AS(whole_word_index(5, {{0, 3}, {2, 5}}), RdrecError);
    CHECK_THROWS_AS(whole_word_index(5, {{3, 5}, {0, 2}}), RdrecError);
    CHECK_THROWS_AS(whole_word_index(3, {{0, 4}}), RdrecError);
    CHECK_THROWS_AS(whole_word_index(3, {{2, 2}}), RdrecError);
}

TEST_CASE("task renderers match their goldens") {
    TaskFields f;
    f.user = 42;
    f.item = 7;
    f.history = {1, 5, 9};
    f.candidates = {3, 7, 11};
    struct Row {
        Task task;
        const char* golden;
    };
    for (const auto& [task, golden] : {Row{Task::SR, "render_sr.txt"},
                                       Row{Task::TR, "render_tr.txt"},
                                       Row{Task::EG, "render_eg.txt"},
                                       Row{Task::RGPref, "render_rg_pref.txt"},
                                       Row{Task::RGAttr, "render_rg_attr.txt"}}) {
        RenderedInput r = render_task_input(task, f);
        CHECK(render_to_string(r) == slurp(golden_path(golden)));
    }
}

TEST_CASE("rendered rg templates carry the expected surface text") {
    TaskFields f;
    f.user = 42;
    f.item = 7;
    RenderedInput pref = render_task_input(Task::RGPref, f);
    CHECK(pref.text == "Generate user_42's preference");
    CHECK(pref.spans.size() == 1);
    RenderedInput attr = render_task_input(Task::RGAttr, f);
    CHECK(attr.text == "Generate item_7's attribute");
    CHECK(attr.spans.size() == 1);
}

TEST_CASE("sr rendering counts one span per entity mention") {
    TaskFields f;
    f.user = 3;
    f.history = {10, 20, 30};
    RenderedInput r = render_task_input(Task::SR, f);
    CHECK(r.spans.size() == 4); // user + 3 items
}

TEST_CASE("every entity mention is covered by exactly one span") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        TaskFields f;
        f.user = static_cast<int>(rng.uniform_below(500));
        f.item = static_cast<int>(rng.uniform_below(500));
        int hist = 1 + static_cast<int>(rng.uniform_below(8));
        int cand = 2 + static_cast<int>(rng.uniform_below(10));
        for (int i = 0; i < hist; ++i) {
            f.history.push_back(static_cast<int>(rng.uniform_below(500)));
        }
        for (int i = 0; i < cand; ++i) {
            f.candidates.push_back(static_cast<int>(rng.uniform_below(500)));
        }
        struct Expect {
            Task task;
            size_t mentions;
        };
        for (auto [task, mentions] :
             {Expect{Task::SR, 1 + f.history.size()},
              Expect{Task::TR, 1 + f.candidates.size()},
              Expect{Task::EG, 2}, Expect{Task::RGPref, 1},
              Expect{Task::RGAttr, 1}}) {
            RenderedInput r = render_task_input(task, f);
            REQUIRE(r.spans.size() == mentions);
            // spans are disjoint, ordered, and hold exactly the entity pieces
            int prev_end = 0;
            for (const auto& [b, e] : r.spans) {
                REQUIRE(b >= prev_end);
                prev_end = e;
                CHECK((r.pieces[b] == "user" || r.pieces[b] == "item"));
                CHECK(r.pieces[b + 1] == "_");
                for (int p = b + 2; p < e; ++p) {
                    CHECK(r.pieces[p].size() == 1);
                    CHECK(isdigit(static_cast<unsigned char>(r.pieces[p][0])));
                }
            }
            // the whole-word list from the spans matches encode_rendered
            Vocab v = build_vocab({r.text}, 2048);
            TokenSequence seq = encode_rendered(r, v);
            CHECK(seq.ids.size() == r.pieces.size());
            CHECK(seq.whole_word ==
                  whole_word_index(r.pieces.size(), r.spans));
        }
        f.history.clear();
        f.candidates.clear();
    }
}

TEST_CASE("entity pieces and surface forms agree") {
    CHECK(entity_pieces("user", 123) ==
          std::vector<std::string>{"user", "_", "1", "2", "3"});
    CHECK(entity_surface("item", 9) == "item_9");
    CHECK(detokenize(entity_pieces("item", 405)) == "item_405");
}
