// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "rdrec/corpus.hpp"
#include "rdrec/errors.hpp"
#include "rdrec/rng.hpp"
#include "rdrec/synth.hpp"

using namespace rdrec;
namespace fs = std::filesystem;

namespace {

std::string write_fixture(const std::string& name, const std::string& content) {
    fs::path dir = fs::temp_directory_path() / "rdrec_corpus_test";
    fs::create_directories(dir);
    std::string path = (dir / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

double round_to(double v, int digits) {
    double scale = std::pow(10.0, digits);
    return std::round(v * scale) / scale;
}

} // namespace

TEST_CASE("empty file loads as an empty review set") {
    std::string path = write_fixture("empty.jsonl", "");
    ReviewSet rs = load_reviews(path);
    CHECK(rs.n_reviews() == 0);
    CHECK(rs.n_users() == 0);
}

TEST_CASE("three-line fixture with two users") {
    std::string path = write_fixture("small.jsonl",
        R"({"user":"alice","item":"x","text":"nice","ts":10})" "\n"
        R"({"user":"bob","item":"y","text":"ok","ts":5})" "\n"
        R"({"user":"alice","item":"z","text":"fine","ts":3})" "\n");
    ReviewSet rs = load_reviews(path);
    CHECK(rs.n_reviews() == 3);
    CHECK(rs.n_users() == 2);
    CHECK(rs.n_items() == 3);
    int alice = rs.user_index("alice");
    int bob = rs.user_index("bob");
    CHECK(rs.history(alice).size() == 2);
    CHECK(rs.history(bob).size() == 1);
    // alice's order follows ts: z (ts 3) before x (ts 10)
    auto seq = rs.item_sequence(alice);
    CHECK(rs.item_id(seq[0]) == "z");
    CHECK(rs.item_id(seq[1]) == "x");
    CHECK(rs.interactions()[rs.history(alice)[0]].order_index == 0);
    CHECK(rs.interactions()[rs.history(alice)[1]].order_index == 1);
}

TEST_CASE("ties on ts keep input order") {
    std::string path = write_fixture("ties.jsonl",
        R"({"user":"u","item":"a","text":"1","ts":7})" "\n"
        R"({"user":"u","item":"b","text":"2","ts":7})" "\n"
        R"({"user":"u","item":"c","text":"3","ts":7})" "\n");
    ReviewSet rs = load_reviews(path);
    auto seq = rs.item_sequence(rs.user_index("u"));
    CHECK(rs.item_id(seq[0]) == "a");
    CHECK(rs.item_id(seq[1]) == "b");
    CHECK(rs.item_id(seq[2]) == "c");
}

TEST_CASE("malformed line aborts with line number, lenient skips") {
    std::string path = write_fixture("bad.jsonl",
        R"({"user":"u","item":"a","text":"1","ts":1})" "\n"
        "{not json}\n"
        R"({"user":"u","item":"b","text":"2","ts":2})" "\n");
    try {
        load_reviews(path);
        FAIL("expected malformed-line error");
    } catch (const RdrecError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    LoadOptions opts;
    opts.lenient = true;
    LoadReport rep;
    ReviewSet rs = load_reviews(path, opts, &rep);
    CHECK(rs.n_reviews() == 2);
    CHECK(rep.skipped_malformed == 1);
}

TEST_CASE("duplicate triples warn and are kept") {
    std::string path = write_fixture("dup.jsonl",
        R"({"user":"u","item":"a","text":"1","ts":1})" "\n"
        R"({"user":"u","item":"a","text":"1","ts":1})" "\n");
    LoadReport rep;
    ReviewSet rs = load_reviews(path, {}, &rep);
    CHECK(rs.n_reviews() == 2);
    CHECK(rep.duplicate_triples == 1);
}

TEST_CASE("missing file is an error") {
    CHECK_THROWS_AS(load_reviews("/nonexistent/reviews.jsonl"), RdrecError);
}

TEST_CASE("review-set serialization round trips") {
    SynthConfig sc;
    sc.n_users = 12;
    sc.n_items = 12;
    sc.seed = 5;
    ReviewSet rs = generate_synthetic_reviews(sc);
    fs::path dir = fs::temp_directory_path() / "rdrec_corpus_test";
    fs::create_directories(dir);
    std::string path = (dir / "roundtrip.jsonl").string();
    save_reviews(rs, path);
    ReviewSet rs2 = load_reviews(path);
    REQUIRE(rs2.n_reviews() == rs.n_reviews());
    REQUIRE(rs2.n_users() == rs.n_users());
    REQUIRE(rs2.n_items() == rs.n_items());
    for (size_t k = 0; k < rs.n_reviews(); ++k) {
        const auto& a = rs.interactions()[k];
        const auto& b = rs2.interactions()[k];
        CHECK(a.user_id == b.user_id);
        CHECK(a.item_id == b.item_id);
        CHECK(a.review_text == b.review_text);
        CHECK(a.ts == b.ts);
        CHECK(a.order_index == b.order_index);
    }
}

TEST_CASE("stats: degenerate and hand-computed cases") {
    DatasetStats one = stats_from_counts(1, 1, 1);
    CHECK(one.density_percent == 100.0);
    CHECK(one.avg_reviews_per_user == 1.0);

    DatasetStats two = stats_from_counts(2, 4, 4);
    CHECK(two.density_percent == 50.0);
    CHECK(two.avg_reviews_per_user == 2.0);

    CHECK_THROWS_AS(stats_from_counts(0, 1, 1), RdrecError);
}

TEST_CASE("stats: published Beauty counts reproduce the reported row") {
    DatasetStats s = stats_from_counts(22363, 12101, 198502);
    CHECK(round_to(s.density_percent, 4) == doctest::Approx(0.0734));
    CHECK(round_to(s.avg_reviews_per_user, 1) == doctest::Approx(8.9));
    std::string table = format_stats_table(s, "beauty");
    CHECK(table.find("0.0734") != std::string::npos);
    CHECK(table.find("8.9") != std::string::npos);
}

TEST_CASE("stats recomputed from raw interactions match the fields") {
    SynthConfig sc;
    sc.seed = 9;
    ReviewSet rs = generate_synthetic_reviews(sc);
    DatasetStats s = compute_stats(rs);
    double density = 100.0 * static_cast<double>(rs.n_reviews()) /
                     (static_cast<double>(rs.n_users()) * rs.n_items());
    double avg = static_cast<double>(rs.n_reviews()) / rs.n_users();
    CHECK(std::fabs(s.density_percent - density) <= 1e-12 * std::fabs(density));
    CHECK(std::fabs(s.avg_reviews_per_user - avg) <= 1e-12 * std::fabs(avg));
}

TEST_CASE("leave-one-out basics") {
    ReviewSet rs;
    rs.add_interaction("u", "a", "r", 1);
    rs.add_interaction("u", "b", "r", 2);
    rs.add_interaction("u", "c", "r", 3);
    rs.finalize();
    SplitSet sp = split_leave_one_out(rs, 3);
    REQUIRE(sp.seq.size() == 1);
    CHECK(sp.seq[0].train_items.size() == 1);
    CHECK(rs.item_id(sp.seq[0].train_items[0]) == "a");
    CHECK(rs.item_id(sp.seq[0].val_item) == "b");
    CHECK(rs.item_id(sp.seq[0].test_item) == "c");
}

TEST_CASE("users below min_len are excluded") {
    ReviewSet rs;
    rs.add_interaction("short", "a", "r", 1);
    rs.add_interaction("short", "b", "r", 2);
    rs.add_interaction("long", "a", "r", 1);
    rs.add_interaction("long", "b", "r", 2);
    rs.add_interaction("long", "c", "r", 3);
    rs.finalize();
    SplitSet sp = split_leave_one_out(rs, 3);
    CHECK(sp.seq.size() == 1);
    CHECK(sp.excluded_users.size() == 1);
    CHECK(rs.user_id(sp.excluded_users[0]) == "short");
}

TEST_CASE("five-user fixture with lengths 3,4,5,2,6") {
    ReviewSet rs;
    int lengths[] = {3, 4, 5, 2, 6};
    for (int u = 0; u < 5; ++u) {
        for (int t = 0; t < lengths[u]; ++t) {
            rs.add_interaction("u" + std::to_string(u),
                               "i" + std::to_string(u * 10 + t), "r", t);
        }
    }
    rs.finalize();
    SplitSet sp = split_leave_one_out(rs, 3);
    REQUIRE(sp.seq.size() == 4);
    std::multiset<size_t> train_sizes;
    for (const auto& us : sp.seq) train_sizes.insert(us.train_items.size());
    CHECK(train_sizes == std::multiset<size_t>{1, 2, 3, 4});
    // split completeness: |train| + 2 == original length
    for (const auto& us : sp.seq) {
        CHECK(us.train_items.size() + 2 == rs.history(us.user).size());
    }
}

TEST_CASE("all users below min_len is an error") {
    ReviewSet rs;
    rs.add_interaction("u", "a", "r", 1);
    rs.finalize();
    CHECK_THROWS_AS(split_leave_one_out(rs, 3), RdrecError);
}

TEST_CASE("explanation split sizes and determinism") {
    auto build = [](int n) {
        ReviewSet rs;
        for (int k = 0; k < n; ++k) {
            rs.add_interaction("u" + std::to_string(k % 7), "i" + std::to_string(k),
                               "text", k);
        }
        rs.finalize();
        return rs;
    };
    {
        ReviewSet rs = build(10);
        SplitSet sp;
        split_explanation(rs, 42, sp);
        CHECK(sp.expl_train.size() == 8);
        CHECK(sp.expl_val.size() == 1);
        CHECK(sp.expl_test.size() == 1);
    }
    {
        ReviewSet rs = build(103);
        SplitSet sp;
        split_explanation(rs, 42, sp);
        // documented rounding: test and val get floor(n/10) each
        CHECK(sp.expl_train.size() == 83);
        CHECK(sp.expl_val.size() == 10);
        CHECK(sp.expl_test.size() == 10);
    }
    {
        ReviewSet rs = build(100);
        SplitSet a, b;
        split_explanation(rs, 7, a);
        split_explanation(rs, 7, b);
        CHECK(a.expl_train == b.expl_train);
        CHECK(a.expl_val == b.expl_val);
        CHECK(a.expl_test == b.expl_test);
        SplitSet c;
        split_explanation(rs, 8, c);
        CHECK(a.expl_train != c.expl_train);
    }
    {
        // partitions are disjoint and exhaustive
        ReviewSet rs = build(57);
        SplitSet sp;
        split_explanation(rs, 3, sp);
        std::set<int> all;
        for (int k : sp.expl_train) all.insert(k);
        for (int k : sp.expl_val) all.insert(k);
        for (int k : sp.expl_test) all.insert(k);
        CHECK(all.size() == 57);
        CHECK(sp.expl_train.size() + sp.expl_val.size() + sp.expl_test.size() == 57);
    }
}

TEST_CASE("splits persist and reload") {
    SynthConfig sc;
    sc.seed = 3;
    ReviewSet rs = generate_synthetic_reviews(sc);
    SplitSet sp = make_splits(rs, 3, 11);
    fs::path dir = fs::temp_directory_path() / "rdrec_corpus_test";
    fs::create_directories(dir);
    std::string seq_path = (dir / "sseq.jsonl").string();
    std::string expl_path = (dir / "sexpl.jsonl").string();
    save_splits(rs, sp, seq_path, expl_path);
    SplitSet sp2 = load_splits(rs, seq_path, expl_path);
    REQUIRE(sp2.seq.size() == sp.seq.size());
    for (size_t i = 0; i < sp.seq.size(); ++i) {
        CHECK(sp2.seq[i].user == sp.seq[i].user);
        CHECK(sp2.seq[i].train_items == sp.seq[i].train_items);
        CHECK(sp2.seq[i].val_item == sp.seq[i].val_item);
        CHECK(sp2.seq[i].test_item == sp.seq[i].test_item);
    }
    CHECK(sp2.expl_train == sp.expl_train);
    CHECK(sp2.expl_val == sp.expl_val);
    CHECK(sp2.expl_test == sp.expl_test);
}
