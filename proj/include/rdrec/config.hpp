// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rdrec/distiller.hpp"
#include "rdrec/inference.hpp"
#include "rdrec/model.hpp"
#include "rdrec/trainer.hpp"

namespace rdrec {

struct PathsConfig {
    std::string reviews;
    std::string quads;
    std::string out_dir = "out";
    std::string vocab;          // default: <out_dir>/vocab.txt
    std::string checkpoint_dir; // default: <out_dir>/checkpoints
    std::string splits_seq;     // default: <out_dir>/splits_seq.jsonl
    std::string splits_expl;    // default: <out_dir>/splits_expl.jsonl
    std::string ranked;         // default: <out_dir>/ranked_<task>.jsonl
    std::string report;         // default: <out_dir>/report_<task>.json
};

struct EvalConfig {
    std::vector<int> ks{1, 5, 10};
    int trials = 1;
    uint64_t seed_base = 100;
    int sr_candidates = 0; // 0 = rank the full item universe
};

struct RunConfig {
    uint64_t seed = 42;
    PathsConfig paths;
    ModelConfig model;      // vocab_size filled at run time from the vocab
    int vocab_cap = 2048;
    TrainerConfig trainer;
    BeamConfig beam;
    BackendConfig distill;
    EvalConfig eval;

    void validate() const;
    void fill_path_defaults();
};

// Strict parse: unknown keys, type mismatches, and out-of-range values are
// ConfigError with the dotted path to the offending key.
RunConfig parse_config_json(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);

// "trainer.patience=5" style override.
void apply_override(RunConfig& cfg, const std::string& assignment);

nlohmann::json config_to_json(const RunConfig& cfg); // effective-config echo

} // namespace rdrec
