// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/optimizer.hpp"

#include <cmath>

#include "rdrec/errors.hpp"

namespace rdrec {

AdamW::AdamW(double lr, double weight_decay, double beta1, double beta2,
             double eps)
    : lr_(lr), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2),
      eps_(eps) {
    if (lr <= 0.0) fail(Err::RangeError, "optimizer: lr must be positive");
}

void AdamW::step(Parameters& params, const std::map<std::string, Tensor>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (auto& [name, p] : params) {
        auto git = grads.find(name);
        if (git == grads.end()) continue;
        const Tensor& g = git->second;
        if (!g.same_shape(p)) {
            fail(Err::InvalidArgument, "optimizer: gradient shape mismatch for " + name);
        }
        if (!g.all_finite()) {
            fail(Err::NonFinite, "optimizer: non-finite gradient for " + name);
        }
        Tensor& m = m_.try_emplace(name, Tensor::zeros(p.shape)).first->second;
        Tensor& v = v_.try_emplace(name, Tensor::zeros(p.shape)).first->second;
        for (int64_t i = 0; i < p.numel(); ++i) {
            const double gi = g.data[i];
            m.data[i] = beta1_ * m.data[i] + (1.0 - beta1_) * gi;
            v.data[i] = beta2_ * v.data[i] + (1.0 - beta2_) * gi * gi;
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            const double old = p.data[i];
            p.data[i] = old - lr_ * mhat / (std::sqrt(vhat) + eps_) -
                        lr_ * weight_decay_ * old;
        }
    }
}

} // namespace rdrec
