// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "rdrec/corpus.hpp"

namespace rdrec {

// Seeded synthetic review corpus: users follow genre-specific item cycles
// (so next-item patterns are learnable) and write templated reviews built
// from genre word banks (so distilled rationales carry genre signal).
struct SynthConfig {
    int n_users = 30;
    int n_items = 24;
    int n_genres = 3;
    int min_len = 6; // interactions per user
    int max_len = 8;
    uint64_t seed = 1;
};

ReviewSet generate_synthetic_reviews(const SynthConfig& cfg);
void write_synthetic_reviews(const SynthConfig& cfg, const std::string& path);

} // namespace rdrec
