// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rdrec/tensor.hpp"

namespace rdrec {

// Tape node. Ops build nodes whose backward closures push gradients into
// their parents; backward() runs them in reverse topological order.
struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;
    bool requires_grad = false;
    const char* op = "leaf";

    Tensor& ensure_grad() {
        if (grad.data.empty()) grad = Tensor::zeros(value.shape);
        return grad;
    }
};

using NodePtr = std::shared_ptr<Node>;

NodePtr make_leaf(Tensor value, bool requires_grad, const char* name = "leaf");

// Seeds d(root)/d(root) = 1 and propagates; root must be scalar.
void backward(const NodePtr& root);

// y = x + other, same shape.
NodePtr add(NodePtr a, NodePtr b);
// y = max(x, 0)
NodePtr relu(NodePtr x);
// rows of x: y = gamma * (x - mean) / sqrt(var + eps) + beta; gamma/beta [d].
NodePtr layer_norm(NodePtr x, NodePtr gamma, NodePtr beta, double eps = 1e-6);
// x [R, din] (leading dims flattened), w [din, dout], b [dout] or nullptr.
NodePtr linear(NodePtr x, NodePtr w, NodePtr b);

struct AttnMask {
    std::vector<int> q_valid; // per batch row: valid query positions
    std::vector<int> k_valid; // per batch row: valid key positions
    bool causal = false;      // query i attends keys j <= i
};

// q [B,Tq,D], k/v [B,Tk,D]; scaled dot-product over n_heads heads.
// Rows of the attention matrix each sum to 1 over unmasked keys; fully
// masked-out query rows produce zero output.
NodePtr multihead_attention(NodePtr q, NodePtr k, NodePtr v, int n_heads,
                            AttnMask mask);

// Encoder input assembly: token + whole-word + positional embeddings for
// each row's tokens, then that row's task prompt vectors, then padding.
// input_ids/ww_ids are [B*t_in] padded; output [B, t_in + n_prompt, d].
NodePtr encoder_input(int b, int t_in, int n_prompt,
                      const std::vector<int>& input_ids,
                      const std::vector<int>& ww_ids,
                      const std::vector<int>& input_len,
                      const std::vector<int>& task_of_row,
                      NodePtr token_table, NodePtr ww_table, NodePtr prompt_bank,
                      const Tensor& positional);

// ids [B*t_out] -> [B, t_out, d]: token embedding + positional. No
// whole-word term on the decoder side.
NodePtr decoder_input(int b, int t_out, const std::vector<int>& ids,
                      NodePtr token_table, const Tensor& positional);

// loss = sum_i weights[i] * nll(logits[i], targets[i]); logits [N, V].
// Rows with weight 0 are skipped. out_nll, if given, receives the per-row
// nll (0 for skipped rows).
NodePtr cross_entropy(NodePtr logits, const std::vector<int>& targets,
                      const std::vector<double>& weights,
                      std::vector<double>* out_nll = nullptr);

} // namespace rdrec
