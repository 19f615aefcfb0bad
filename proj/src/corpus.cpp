// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "rdrec/errors.hpp"
#include "rdrec/rng.hpp"

namespace rdrec {

using json = nlohmann::json;

int ReviewSet::add_interaction(const std::string& user, const std::string& item,
                               const std::string& text, int64_t ts) {
    auto uit = user_idx_.find(user);
    int u;
    if (uit == user_idx_.end()) {
        u = static_cast<int>(user_ids_.size());
        user_idx_.emplace(user, u);
        user_ids_.push_back(user);
    } else {
        u = uit->second;
    }
    auto iit = item_idx_.find(item);
    int i;
    if (iit == item_idx_.end()) {
        i = static_cast<int>(item_ids_.size());
        item_idx_.emplace(item, i);
        item_ids_.push_back(item);
    } else {
        i = iit->second;
    }
    interactions_.push_back(Interaction{user, item, text, ts, 0});
    inter_user_.push_back(u);
    inter_item_.push_back(i);
    return static_cast<int>(interactions_.size()) - 1;
}

void ReviewSet::finalize() {
    histories_.assign(user_ids_.size(), {});
    item_users_.assign(item_ids_.size(), {});
    for (size_t k = 0; k < interactions_.size(); ++k) {
        histories_[inter_user_[k]].push_back(static_cast<int>(k));
    }
    for (auto& h : histories_) {
        // ascending ts, input order on ties
        std::stable_sort(h.begin(), h.end(), [&](int a, int b) {
            return interactions_[a].ts < interactions_[b].ts;
        });
        for (size_t pos = 0; pos < h.size(); ++pos) {
            interactions_[h[pos]].order_index = static_cast<int>(pos);
        }
    }
    for (size_t u = 0; u < histories_.size(); ++u) {
        for (int k : histories_[u]) {
            item_users_[inter_item_[k]].push_back(static_cast<int>(u));
        }
    }
    finalized_ = true;
}

int ReviewSet::user_index(const std::string& id) const {
    auto it = user_idx_.find(id);
    return it == user_idx_.end() ? -1 : it->second;
}

int ReviewSet::item_index(const std::string& id) const {
    auto it = item_idx_.find(id);
    return it == item_idx_.end() ? -1 : it->second;
}

std::vector<int> ReviewSet::item_sequence(int user_idx) const {
    std::vector<int> seq;
    seq.reserve(histories_[user_idx].size());
    for (int k : histories_[user_idx]) {
        seq.push_back(inter_item_[k]);
    }
    return seq;
}

ReviewSet load_reviews(const std::string& path, const LoadOptions& opts,
                       LoadReport* report) {
    std::ifstream in(path);
    if (!in) {
        fail(Err::MissingFile, "corpus: cannot open reviews file: " + path);
    }
    ReviewSet rs;
    LoadReport rep;
    std::set<std::tuple<std::string, std::string, int64_t>> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ++rep.lines;
        json j = json::parse(line, nullptr, false);
        bool ok = !j.is_discarded() && j.is_object() && j.contains("user") &&
                  j.contains("item") && j.contains("text") && j.contains("ts") &&
                  j["user"].is_string() && j["item"].is_string() &&
                  j["text"].is_string() && j["ts"].is_number_integer();
        if (!ok) {
            if (opts.lenient) {
                ++rep.skipped_malformed;
                std::cerr << "corpus: skipping malformed line " << lineno << "\n";
                continue;
            }
            fail(Err::MalformedLine,
                 "corpus: malformed record at line " + std::to_string(lineno) +
                     " of " + path);
        }
        std::string user = j["user"].get<std::string>();
        std::string item = j["item"].get<std::string>();
        int64_t ts = j["ts"].get<int64_t>();
        if (!seen.insert({user, item, ts}).second) {
            ++rep.duplicate_triples;
            std::cerr << "corpus: duplicate (user,item,ts) at line " << lineno
                      << ", kept\n";
        }
        rs.add_interaction(user, item, j["text"].get<std::string>(), ts);
    }
    rs.finalize();
    if (report) *report = rep;
    return rs;
}

void save_reviews(const ReviewSet& rs, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        fail(Err::IoError, "corpus: cannot write " + path);
    }
    for (const auto& it : rs.interactions()) {
        json j;
        j["user"] = it.user_id;
        j["item"] = it.item_id;
        j["text"] = it.review_text;
        j["ts"] = it.ts;
        out << j.dump() << "\n";
    }
}

DatasetStats stats_from_counts(size_t n_users, size_t n_items, size_t n_reviews) {
    if (n_users == 0 || n_items == 0 || n_reviews == 0) {
        fail(Err::EmptyInput, "corpus: stats over an empty review set");
    }
    DatasetStats s;
    s.n_users = n_users;
    s.n_items = n_items;
    s.n_reviews = n_reviews;
    s.avg_reviews_per_user =
        static_cast<double>(n_reviews) / static_cast<double>(n_users);
    s.density_percent = 100.0 * static_cast<double>(n_reviews) /
                        (static_cast<double>(n_users) * static_cast<double>(n_items));
    return s;
}

DatasetStats compute_stats(const ReviewSet& rs) {
    return stats_from_counts(rs.n_users(), rs.n_items(), rs.n_reviews());
}

std::string format_stats_table(const DatasetStats& s, const std::string& name) {
    char buf[256];
    std::ostringstream out;
    out << "Dataset     #User     #Item   #Review      Avg.  Density (%)\n";
    std::snprintf(buf, sizeof(buf), "%-9s %9zu %9zu %9zu %9.1f %12.4f\n",
                  name.c_str(), s.n_users, s.n_items, s.n_reviews,
                  s.avg_reviews_per_user, s.density_percent);
    out << buf;
    return out.str();
}

SplitSet split_leave_one_out(const ReviewSet& rs, int min_len) {
    if (min_len < 3) {
        fail(Err::RangeError, "corpus: min_len must be >= 3");
    }
    SplitSet sp;
    for (size_t u = 0; u < rs.n_users(); ++u) {
        std::vector<int> seq = rs.item_sequence(static_cast<int>(u));
        if (static_cast<int>(seq.size()) < min_len) {
            sp.excluded_users.push_back(static_cast<int>(u));
            continue;
        }
        SplitSet::UserSeq us;
        us.user = static_cast<int>(u);
        us.test_item = seq.back();
        us.val_item = seq[seq.size() - 2];
        us.train_items.assign(seq.begin(), seq.end() - 2);
        sp.seq.push_back(std::move(us));
    }
    if (sp.seq.empty()) {
        fail(Err::EmptyInput, "corpus: no trainable users (all below min_len)");
    }
    return sp;
}

void split_explanation(const ReviewSet& rs, uint64_t seed, SplitSet& out) {
    size_t n = rs.n_reviews();
    if (n == 0) {
        fail(Err::EmptyInput, "corpus: explanation split over empty review set");
    }
    std::vector<int> idx(n);
    for (size_t k = 0; k < n; ++k) idx[k] = static_cast<int>(k);
    Rng rng(seed);
    rng.shuffle(idx);
    size_t n_test = n / 10;
    size_t n_val = n / 10;
    out.expl_test.assign(idx.begin(), idx.begin() + n_test);
    out.expl_val.assign(idx.begin() + n_test, idx.begin() + n_test + n_val);
    out.expl_train.assign(idx.begin() + n_test + n_val, idx.end());
    std::sort(out.expl_test.begin(), out.expl_test.end());
    std::sort(out.expl_val.begin(), out.expl_val.end());
    std::sort(out.expl_train.begin(), out.expl_train.end());
}

SplitSet make_splits(const ReviewSet& rs, int min_len, uint64_t seed) {
    SplitSet sp = split_leave_one_out(rs, min_len);
    split_explanation(rs, seed, sp);
    return sp;
}

void save_splits(const ReviewSet& rs, const SplitSet& sp,
                 const std::string& seq_path, const std::string& expl_path) {
    {
        std::ofstream out(seq_path);
        if (!out) fail(Err::IoError, "corpus: cannot write " + seq_path);
        for (const auto& us : sp.seq) {
            auto emit = [&](int item, const char* split) {
                json j;
                j["user"] = rs.user_id(us.user);
                j["item"] = rs.item_id(item);
                j["split"] = split;
                out << j.dump() << "\n";
            };
            for (int it : us.train_items) emit(it, "train");
            emit(us.val_item, "val");
            emit(us.test_item, "test");
        }
    }
    {
        std::ofstream out(expl_path);
        if (!out) fail(Err::IoError, "corpus: cannot write " + expl_path);
        auto emit = [&](const std::vector<int>& ks, const char* split) {
            for (int k : ks) {
                const Interaction& it = rs.interactions()[k];
                json j;
                j["user"] = it.user_id;
                j["item"] = it.item_id;
                j["ts"] = it.ts;
                j["split"] = split;
                out << j.dump() << "\n";
            }
        };
        emit(sp.expl_train, "train");
        emit(sp.expl_val, "val");
        emit(sp.expl_test, "test");
    }
}

SplitSet load_splits(const ReviewSet& rs, const std::string& seq_path,
                     const std::string& expl_path) {
    SplitSet sp;
    {
        std::ifstream in(seq_path);
        if (!in) fail(Err::MissingFile, "corpus: cannot open " + seq_path);
        std::unordered_map<int, SplitSet::UserSeq> by_user;
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                fail(Err::MalformedLine,
                     "corpus: malformed split record at line " + std::to_string(lineno));
            }
            int u = rs.user_index(j["user"].get<std::string>());
            int i = rs.item_index(j["item"].get<std::string>());
            if (u < 0 || i < 0) {
                fail(Err::InvalidArgument,
                     "corpus: split references unknown user/item at line " +
                         std::to_string(lineno));
            }
            auto& us = by_user[u];
            us.user = u;
            std::string split = j["split"].get<std::string>();
            if (split == "train") {
                us.train_items.push_back(i);
            } else if (split == "val") {
                us.val_item = i;
            } else if (split == "test") {
                us.test_item = i;
            }
        }
        std::vector<int> users;
        for (auto& [u, us] : by_user) users.push_back(u);
        std::sort(users.begin(), users.end());
        for (int u : users) sp.seq.push_back(std::move(by_user[u]));
        for (size_t u = 0; u < rs.n_users(); ++u) {
            if (!by_user.count(static_cast<int>(u))) {
                sp.excluded_users.push_back(static_cast<int>(u));
            }
        }
    }
    {
        std::ifstream in(expl_path);
        if (!in) fail(Err::MissingFile, "corpus: cannot open " + expl_path);
        // Keyed by (user, item, ts); duplicates resolve in file order.
        std::map<std::tuple<std::string, std::string, int64_t>, std::vector<int>> lookup;
        for (size_t k = 0; k < rs.interactions().size(); ++k) {
            const auto& it = rs.interactions()[k];
            lookup[{it.user_id, it.item_id, it.ts}].push_back(static_cast<int>(k));
        }
        std::map<std::tuple<std::string, std::string, int64_t>, size_t> cursor;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            std::tuple<std::string, std::string, int64_t> key{
                j["user"].get<std::string>(), j["item"].get<std::string>(),
                j["ts"].get<int64_t>()};
            auto it = lookup.find(key);
            if (it == lookup.end() || cursor[key] >= it->second.size()) {
                fail(Err::InvalidArgument, "corpus: split references unknown interaction");
            }
            int k = it->second[cursor[key]++];
            std::string split = j["split"].get<std::string>();
            if (split == "train") sp.expl_train.push_back(k);
            else if (split == "val") sp.expl_val.push_back(k);
            else if (split == "test") sp.expl_test.push_back(k);
        }
        std::sort(sp.expl_train.begin(), sp.expl_train.end());
        std::sort(sp.expl_val.begin(), sp.expl_val.end());
        std::sort(sp.expl_test.begin(), sp.expl_test.end());
    }
    return sp;
}

} // namespace rdrec
