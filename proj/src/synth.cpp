// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/synth.hpp"

#include <array>
#include <vector>

#include "rdrec/errors.hpp"
#include "rdrec/rng.hpp"

namespace rdrec {

namespace {

struct GenreBank {
    std::vector<const char*> adjectives;
    std::vector<const char*> nouns;
};

const std::array<GenreBank, 3> kBanks{{
    {{"strategic", "clever", "tactical", "challenging", "engaging"},
     {"strategy", "mechanics", "decisions", "planning", "replayability"}},
    {{"gentle", "smooth", "fragrant", "soft", "moisturizing"},
     {"skin", "scent", "texture", "glow", "coverage"}},
    {{"durable", "sturdy", "lightweight", "comfortable", "breathable"},
     {"grip", "fit", "material", "support", "stitching"}},
}};

} // namespace

ReviewSet generate_synthetic_reviews(const SynthConfig& cfg) {
    if (cfg.n_genres < 1 || cfg.n_users < 1 || cfg.n_items < cfg.n_genres) {
        fail(Err::ConfigError, "synth: bad corpus dimensions");
    }
    if (cfg.min_len < 3 || cfg.max_len < cfg.min_len) {
        fail(Err::ConfigError, "synth: bad sequence length range");
    }
    Rng rng(cfg.seed);

    // genre item pools and one fixed cycle order per genre
    const int pool_size = cfg.n_items / cfg.n_genres;
    std::vector<std::vector<int>> cycles(cfg.n_genres);
    for (int g = 0; g < cfg.n_genres; ++g) {
        for (int i = 0; i < pool_size; ++i) cycles[g].push_back(g * pool_size + i);
        rng.shuffle(cycles[g]);
    }
    // leftover items (n_items not divisible by n_genres) join the last genre
    for (int i = cfg.n_genres * pool_size; i < cfg.n_items; ++i) {
        cycles[cfg.n_genres - 1].push_back(i);
    }

    ReviewSet rs;
    for (int u = 0; u < cfg.n_users; ++u) {
        const int g = u % cfg.n_genres;
        const auto& cycle = cycles[g];
        const GenreBank& bank = kBanks[g % kBanks.size()];
        int len = cfg.min_len + static_cast<int>(rng.uniform_below(
                                    cfg.max_len - cfg.min_len + 1));
        len = std::min<int>(len, static_cast<int>(cycle.size()));
        int phase = static_cast<int>(rng.uniform_below(cycle.size()));
        for (int t = 0; t < len; ++t) {
            int item = cycle[(phase + t) % cycle.size()];
            auto adj = [&]() { return bank.adjectives[rng.uniform_below(bank.adjectives.size())]; };
            auto noun = [&]() { return bank.nouns[rng.uniform_below(bank.nouns.size())]; };
            std::string review = std::string("really ") + adj() + " " + noun() +
                                 " with " + adj() + " " + noun() +
                                 " and great " + noun();
            rs.add_interaction("u" + std::to_string(u), "i" + std::to_string(item),
                               review, t);
        }
    }
    rs.finalize();
    return rs;
}

void write_synthetic_reviews(const SynthConfig& cfg, const std::string& path) {
    save_reviews(generate_synthetic_reviews(cfg), path);
}

} // namespace rdrec
