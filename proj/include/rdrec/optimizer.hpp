// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "rdrec/model.hpp"
#include "rdrec/tensor.hpp"

namespace rdrec {

// Adam with decoupled weight decay: the decay term is applied to the
// parameters directly, never folded into the gradients.
class AdamW {
public:
    AdamW(double lr, double weight_decay = 0.0, double beta1 = 0.9,
          double beta2 = 0.999, double eps = 1e-8);

    void step(Parameters& params, const std::map<std::string, Tensor>& grads);

    int64_t step_count() const { return t_; }
    double lr() const { return lr_; }

private:
    double lr_, weight_decay_, beta1_, beta2_, eps_;
    int64_t t_ = 0;
    std::map<std::string, Tensor> m_, v_;
};

} // namespace rdrec
