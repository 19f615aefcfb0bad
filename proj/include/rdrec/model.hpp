// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdrec/autodiff.hpp"
#include "rdrec/tensor.hpp"
#include "rdrec/textcodec.hpp"

namespace rdrec {

struct ModelConfig {
    int n_layers = 2;
    int n_heads = 4;
    int d_model = 64;
    int d_ff = 256;
    int vocab_size = 0; // set from the built vocabulary
    int max_seq_len = 128;
    int n_prompt_per_task = 3;
    int n_tasks = kNumTasks;
    int whole_word_capacity = 128;

    bool operator==(const ModelConfig&) const = default;
    void validate() const;
    void validate_dims_only() const; // everything except vocab_size
};

// Named tensors; std::map keeps iteration (and checkpoint bytes) stable.
using Parameters = std::map<std::string, Tensor>;

Parameters init_parameters(const ModelConfig& cfg, uint64_t seed);

// Fixed sinusoidal absolute positional encodings, [max_len, d].
Tensor sinusoidal_positions(int max_len, int d);

// One padded training/eval batch of mixed-task samples.
struct Batch {
    int b = 0;
    int t_in = 0;  // max input token count (prompts excluded)
    int t_out = 0; // max target length (EOS included)
    std::vector<int> input_ids;  // b*t_in, PAD-padded
    std::vector<int> ww_ids;     // b*t_in, 0-padded
    std::vector<int> input_len;  // per row
    std::vector<int> task;       // per row, static_cast<int>(Task)
    std::vector<int> target_ids; // b*t_out, PAD-padded, each row ends with EOS
    std::vector<int> target_len; // per row
};

struct SampleSpec {
    TokenSequence input;
    Task task = Task::SR;
    std::vector<int> target; // token ids, EOS appended by the batch builder
};

Batch make_batch(const std::vector<SampleSpec>& samples);

struct ForwardOutput {
    NodePtr loss;                 // scalar graph root
    NodePtr logits;               // [b*t_out, V]
    double loss_value = 0.0;
    std::vector<double> row_loss; // per row: mean nll over its target tokens
};

class RdrecModel {
public:
    RdrecModel(ModelConfig cfg, uint64_t seed);
    RdrecModel(ModelConfig cfg, Parameters params);

    const ModelConfig& config() const { return cfg_; }
    Parameters& params() { return params_; }
    const Parameters& params() const { return params_; }

    // Teacher-forced forward over the batch. with_grad enables the tape.
    ForwardOutput forward(const Batch& batch, bool with_grad);
    // Runs the tape; returns gradients for every trainable tensor.
    std::map<std::string, Tensor> backward(ForwardOutput& fo);

    // ---- inference (no tape kept) ----
    struct Encoded {
        Tensor enc_out; // [1, t, d]
        int valid_len = 0;
    };
    Encoded encode(const TokenSequence& input, Task task);
    // log p(next token) for each prefix; prefixes must share one length.
    std::vector<std::vector<double>> next_token_logprobs(
        const Encoded& enc, const std::vector<std::vector<int>>& prefixes);
    // total log p(target | input) by teacher forcing; target excludes EOS,
    // which is appended internally.
    double sequence_logprob(const TokenSequence& input, Task task,
                            const std::vector<int>& target);

private:
    NodePtr leaf_of(const std::string& name, bool with_grad);
    NodePtr encoder_stack(const Batch& batch, bool with_grad,
                          std::vector<int>* enc_valid);
    NodePtr decoder_stack(NodePtr enc_out, const std::vector<int>& enc_valid,
                          int b, int t_out, const std::vector<int>& dec_in,
                          const std::vector<int>& dec_valid, bool with_grad);

    ModelConfig cfg_;
    Parameters params_;
    Tensor positions_;
    std::map<std::string, NodePtr> live_leaves_; // leaves of the last forward
};

struct CheckpointMeta {
    int64_t step = 0;
    double val_loss = 0.0;
};

struct Checkpoint {
    ModelConfig config;
    Parameters params;
    CheckpointMeta meta;
};

// Binary container: magic, version, JSON manifest, float32 LE payload, CRC32.
void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const Parameters& params, const CheckpointMeta& meta);
Checkpoint load_checkpoint(const std::string& path);
// load + config equality check.
Checkpoint load_checkpoint_expect(const std::string& path, const ModelConfig& cfg);

} // namespace rdrec
