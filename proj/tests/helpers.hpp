// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rdrec/model.hpp"
#include "rdrec/rng.hpp"

namespace rdrec::testutil {

inline ModelConfig tiny_config(int vocab = 40) {
    ModelConfig cfg;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.d_model = 16;
    cfg.d_ff = 32;
    cfg.vocab_size = vocab;
    cfg.max_seq_len = 32;
    cfg.n_prompt_per_task = 3;
    cfg.whole_word_capacity = 8;
    return cfg;
}

inline SampleSpec random_sample(Task task, int vocab, int input_len,
                                int target_len, Rng& rng) {
    SampleSpec s;
    s.task = task;
    for (int i = 0; i < input_len; ++i) {
        s.input.ids.push_back(3 + static_cast<int>(rng.uniform_below(vocab - 3)));
    }
    s.input.whole_word.assign(s.input.ids.size(), 0);
    if (input_len >= 4) { // mark a two-token entity mention
        s.input.whole_word[1] = 1;
        s.input.whole_word[2] = 1;
    }
    for (int i = 0; i < target_len; ++i) {
        s.target.push_back(3 + static_cast<int>(rng.uniform_below(vocab - 3)));
    }
    return s;
}

struct FdCheckResult {
    int checked = 0;
    double max_rel_err = 0.0;
    std::string worst_coord;
};

// Central finite differences on `n_coords` random parameter coordinates.
inline FdCheckResult fd_gradient_check(RdrecModel& model, const Batch& batch,
                                       int n_coords, double eps, Rng& rng) {
    ForwardOutput fo = model.forward(batch, true);
    auto grads = model.backward(fo);

    std::vector<std::string> names;
    for (const auto& [name, t] : model.params()) names.push_back(name);

    FdCheckResult res;
    for (int c = 0; c < n_coords; ++c) {
        const std::string& name = names[rng.uniform_below(names.size())];
        Tensor& t = model.params()[name];
        int64_t idx = static_cast<int64_t>(rng.uniform_below(t.numel()));
        double saved = t.data[idx];
        t.data[idx] = saved + eps;
        double lp = model.forward(batch, false).loss_value;
        t.data[idx] = saved - eps;
        double lm = model.forward(batch, false).loss_value;
        t.data[idx] = saved;
        double fd = (lp - lm) / (2.0 * eps);
        double an = grads.at(name).data[idx];
        double denom = std::max({std::fabs(fd), std::fabs(an), 1e-6});
        double rel = std::fabs(fd - an) / denom;
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_coord = name + "[" + std::to_string(idx) + "]";
        }
        ++res.checked;
    }
    return res;
}

} // namespace rdrec::testutil
