// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rdrec/errors.hpp"

namespace rdrec {

NodePtr make_leaf(Tensor value, bool requires_grad, const char* name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->op = name;
    return n;
}

namespace {

NodePtr make_op(Tensor value, std::vector<NodePtr> parents, const char* op) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->op = op;
    for (const auto& p : parents) n->requires_grad |= p->requires_grad;
    n->parents = std::move(parents);
    return n;
}

} // namespace

void backward(const NodePtr& root) {
    if (root->value.numel() != 1) {
        fail(Err::InvalidArgument, "autodiff: backward root must be a scalar");
    }
    // Iterative post-order DFS for the topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, size_t>> stack{{root.get(), 0}};
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, child] = stack.back();
        if (child < node->parents.size()) {
            Node* p = node->parents[child++].get();
            if (p->requires_grad && visited.insert(p).second) {
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    root->ensure_grad().data[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->requires_grad) n->backward_fn(*n);
    }
}

NodePtr add(NodePtr a, NodePtr b) {
    if (!a->value.same_shape(b->value)) {
        fail(Err::InvalidArgument, "autodiff: add shape mismatch " +
                                       a->value.shape_str() + " vs " +
                                       b->value.shape_str());
    }
    Tensor out = a->value;
    const double* bp = b->value.ptr();
    for (int64_t i = 0; i < out.numel(); ++i) out.data[i] += bp[i];
    NodePtr n = make_op(std::move(out), {a, b}, "add");
    n->backward_fn = [a, b](Node& self) {
        const double* g = self.grad.ptr();
        if (a->requires_grad) {
            double* ga = a->ensure_grad().ptr();
            for (int64_t i = 0; i < self.grad.numel(); ++i) ga[i] += g[i];
        }
        if (b->requires_grad) {
            double* gb = b->ensure_grad().ptr();
            for (int64_t i = 0; i < self.grad.numel(); ++i) gb[i] += g[i];
        }
    };
    return n;
}

NodePtr relu(NodePtr x) {
    Tensor out = x->value;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    NodePtr n = make_op(std::move(out), {x}, "relu");
    n->backward_fn = [x](Node& self) {
        if (!x->requires_grad) return;
        double* gx = x->ensure_grad().ptr();
        const double* g = self.grad.ptr();
        const double* xv = x->value.ptr();
        for (int64_t i = 0; i < self.grad.numel(); ++i) {
            if (xv[i] > 0.0) gx[i] += g[i];
        }
    };
    return n;
}

NodePtr layer_norm(NodePtr x, NodePtr gamma, NodePtr beta, double eps) {
    const int64_t d = x->value.shape.back();
    const int64_t rows = x->value.numel() / d;
    Tensor out(x->value.shape);
    auto mean = std::make_shared<std::vector<double>>(rows);
    auto rstd = std::make_shared<std::vector<double>>(rows);
    const double* xp = x->value.ptr();
    const double* gp = gamma->value.ptr();
    const double* bp = beta->value.ptr();
    double* op = out.ptr();
    for (int64_t r = 0; r < rows; ++r) {
        const double* row = xp + r * d;
        double m = 0.0;
        for (int64_t i = 0; i < d; ++i) m += row[i];
        m /= static_cast<double>(d);
        double var = 0.0;
        for (int64_t i = 0; i < d; ++i) {
            double c = row[i] - m;
            var += c * c;
        }
        var /= static_cast<double>(d);
        double rs = 1.0 / std::sqrt(var + eps);
        (*mean)[r] = m;
        (*rstd)[r] = rs;
        double* orow = op + r * d;
        for (int64_t i = 0; i < d; ++i) {
            orow[i] = gp[i] * (row[i] - m) * rs + bp[i];
        }
    }
    NodePtr n = make_op(std::move(out), {x, gamma, beta}, "layer_norm");
    n->backward_fn = [x, gamma, beta, mean, rstd, d, rows](Node& self) {
        const double* g = self.grad.ptr();
        const double* xp = x->value.ptr();
        const double* gp = gamma->value.ptr();
        double* gx = x->requires_grad ? x->ensure_grad().ptr() : nullptr;
        double* gg = gamma->requires_grad ? gamma->ensure_grad().ptr() : nullptr;
        double* gb = beta->requires_grad ? beta->ensure_grad().ptr() : nullptr;
        for (int64_t r = 0; r < rows; ++r) {
            const double* grow = g + r * d;
            const double* xrow = xp + r * d;
            const double m = (*mean)[r];
            const double rs = (*rstd)[r];
            double sum_dxh = 0.0, sum_dxh_xh = 0.0;
            for (int64_t i = 0; i < d; ++i) {
                double xh = (xrow[i] - m) * rs;
                double dxh = grow[i] * gp[i];
                sum_dxh += dxh;
                sum_dxh_xh += dxh * xh;
                if (gg) gg[i] += grow[i] * xh;
                if (gb) gb[i] += grow[i];
            }
            if (gx) {
                const double inv_d = 1.0 / static_cast<double>(d);
                double* gxrow = gx + r * d;
                for (int64_t i = 0; i < d; ++i) {
                    double xh = (xrow[i] - m) * rs;
                    double dxh = grow[i] * gp[i];
                    gxrow[i] += rs * (dxh - inv_d * sum_dxh - xh * inv_d * sum_dxh_xh);
                }
            }
        }
    };
    return n;
}

NodePtr linear(NodePtr x, NodePtr w, NodePtr b) {
    const int64_t din = w->value.shape[0];
    const int64_t dout = w->value.shape[1];
    const int64_t rows = x->value.numel() / din;
    std::vector<int64_t> out_shape = x->value.shape;
    out_shape.back() = dout;
    Tensor out(out_shape);
    gemm_nn(rows, dout, din, x->value.ptr(), w->value.ptr(), out.ptr(), false);
    if (b) {
        double* op = out.ptr();
        const double* bp = b->value.ptr();
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t j = 0; j < dout; ++j) op[r * dout + j] += bp[j];
        }
    }
    std::vector<NodePtr> parents{x, w};
    if (b) parents.push_back(b);
    NodePtr n = make_op(std::move(out), std::move(parents), "linear");
    n->backward_fn = [x, w, b, rows, din, dout](Node& self) {
        const double* g = self.grad.ptr();
        if (x->requires_grad) {
            gemm_nt(rows, din, dout, g, w->value.ptr(), x->ensure_grad().ptr(), true);
        }
        if (w->requires_grad) {
            gemm_tn(din, dout, rows, x->value.ptr(), g, w->ensure_grad().ptr(), true);
        }
        if (b && b->requires_grad) {
            double* gb = b->ensure_grad().ptr();
            for (int64_t r = 0; r < rows; ++r) {
                for (int64_t j = 0; j < dout; ++j) gb[j] += g[r * dout + j];
            }
        }
    };
    return n;
}

NodePtr multihead_attention(NodePtr q, NodePtr k, NodePtr v, int n_heads,
                            AttnMask mask) {
    const int64_t bsz = q->value.shape[0];
    const int64_t tq = q->value.shape[1];
    const int64_t tk = k->value.shape[1];
    const int64_t d = q->value.shape[2];
    const int64_t dh = d / n_heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // probs saved for the backward pass
    auto probs = std::make_shared<Tensor>(
        Tensor::zeros({bsz, n_heads, tq, tk}));
    Tensor out({bsz, tq, d});

    std::vector<double> qh(tq * dh), kh(tk * dh), vh(tk * dh), oh(tq * dh);
    std::vector<double> scores(tq * tk);
    const double* qp = q->value.ptr();
    const double* kp = k->value.ptr();
    const double* vp = v->value.ptr();
    for (int64_t b = 0; b < bsz; ++b) {
        const int qv = mask.q_valid.empty() ? static_cast<int>(tq) : mask.q_valid[b];
        const int kv = mask.k_valid.empty() ? static_cast<int>(tk) : mask.k_valid[b];
        for (int h = 0; h < n_heads; ++h) {
            // gather head slices
            for (int64_t t = 0; t < tq; ++t) {
                const double* src = qp + (b * tq + t) * d + h * dh;
                std::copy(src, src + dh, qh.data() + t * dh);
            }
            for (int64_t t = 0; t < tk; ++t) {
                const double* srck = kp + (b * tk + t) * d + h * dh;
                const double* srcv = vp + (b * tk + t) * d + h * dh;
                std::copy(srck, srck + dh, kh.data() + t * dh);
                std::copy(srcv, srcv + dh, vh.data() + t * dh);
            }
            gemm_nt(tq, tk, dh, qh.data(), kh.data(), scores.data(), false);
            double* prow = probs->ptr() + ((b * n_heads + h) * tq) * tk;
            for (int64_t i = 0; i < tq; ++i) {
                double* srow = scores.data() + i * tk;
                if (i >= qv) {
                    std::fill(srow, srow + tk, 0.0); // dead query row
                    continue;
                }
                int64_t limit = mask.causal ? std::min<int64_t>(i + 1, kv) : kv;
                for (int64_t j = 0; j < limit; ++j) srow[j] *= scale;
                std::fill(srow + limit, srow + tk, 0.0);
                softmax_row(srow, limit);
            }
            std::copy(scores.begin(), scores.end(), prow);
            gemm_nn(tq, dh, tk, scores.data(), vh.data(), oh.data(), false);
            double* outp = out.ptr();
            for (int64_t t = 0; t < tq; ++t) {
                double* dst = outp + (b * tq + t) * d + h * dh;
                std::copy(oh.data() + t * dh, oh.data() + t * dh + dh, dst);
            }
        }
    }
    // zero dead query rows entirely (all heads)
    {
        double* outp = out.ptr();
        for (int64_t b = 0; b < bsz; ++b) {
            const int qv = mask.q_valid.empty() ? static_cast<int>(tq) : mask.q_valid[b];
            for (int64_t t = qv; t < tq; ++t) {
                std::fill(outp + (b * tq + t) * d, outp + (b * tq + t + 1) * d, 0.0);
            }
        }
    }

    NodePtr n = make_op(std::move(out), {q, k, v}, "attention");
    n->backward_fn = [q, k, v, n_heads, probs, bsz, tq, tk, d, dh,
                      scale](Node& self) {
        const double* g = self.grad.ptr();
        double* gq = q->requires_grad ? q->ensure_grad().ptr() : nullptr;
        double* gk = k->requires_grad ? k->ensure_grad().ptr() : nullptr;
        double* gv = v->requires_grad ? v->ensure_grad().ptr() : nullptr;
        const double* qp = q->value.ptr();
        const double* kp = k->value.ptr();
        const double* vp = v->value.ptr();
        std::vector<double> qh(tq * dh), kh(tk * dh), vh(tk * dh), goh(tq * dh);
        std::vector<double> dp(tq * tk), ds(tq * tk), dqh(tq * dh), dkh(tk * dh),
            dvh(tk * dh);
        for (int64_t b = 0; b < bsz; ++b) {
            for (int h = 0; h < n_heads; ++h) {
                const double* prow = probs->ptr() + ((b * n_heads + h) * tq) * tk;
                for (int64_t t = 0; t < tq; ++t) {
                    const double* src = qp + (b * tq + t) * d + h * dh;
                    std::copy(src, src + dh, qh.data() + t * dh);
                    const double* gsrc = g + (b * tq + t) * d + h * dh;
                    std::copy(gsrc, gsrc + dh, goh.data() + t * dh);
                }
                for (int64_t t = 0; t < tk; ++t) {
                    const double* srck = kp + (b * tk + t) * d + h * dh;
                    const double* srcv = vp + (b * tk + t) * d + h * dh;
                    std::copy(srck, srck + dh, kh.data() + t * dh);
                    std::copy(srcv, srcv + dh, vh.data() + t * dh);
                }
                // dV = P^T dO ; dP = dO V^T
                gemm_tn(tk, dh, tq, prow, goh.data(), dvh.data(), false);
                gemm_nt(tq, tk, dh, goh.data(), vh.data(), dp.data(), false);
                // dS = P o (dP - rowsum(dP o P))
                for (int64_t i = 0; i < tq; ++i) {
                    const double* pr = prow + i * tk;
                    const double* dpr = dp.data() + i * tk;
                    double* dsr = ds.data() + i * tk;
                    double dot = 0.0;
                    for (int64_t j = 0; j < tk; ++j) dot += dpr[j] * pr[j];
                    for (int64_t j = 0; j < tk; ++j) dsr[j] = pr[j] * (dpr[j] - dot);
                }
                // dQ = dS K * scale ; dK = dS^T Q * scale
                gemm_nn(tq, dh, tk, ds.data(), kh.data(), dqh.data(), false);
                gemm_tn(tk, dh, tq, ds.data(), qh.data(), dkh.data(), false);
                if (gq) {
                    for (int64_t t = 0; t < tq; ++t) {
                        double* dst = gq + (b * tq + t) * d + h * dh;
                        for (int64_t i = 0; i < dh; ++i) dst[i] += scale * dqh[t * dh + i];
                    }
                }
                if (gk) {
                    for (int64_t t = 0; t < tk; ++t) {
                        double* dst = gk + (b * tk + t) * d + h * dh;
                        for (int64_t i = 0; i < dh; ++i) dst[i] += scale * dkh[t * dh + i];
                    }
                }
                if (gv) {
                    for (int64_t t = 0; t < tk; ++t) {
                        double* dst = gv + (b * tk + t) * d + h * dh;
                        for (int64_t i = 0; i < dh; ++i) dst[i] += dvh[t * dh + i];
                    }
                }
            }
        }
    };
    return n;
}

NodePtr encoder_input(int b, int t_in, int n_prompt,
                      const std::vector<int>& input_ids,
                      const std::vector<int>& ww_ids,
                      const std::vector<int>& input_len,
                      const std::vector<int>& task_of_row,
                      NodePtr token_table, NodePtr ww_table, NodePtr prompt_bank,
                      const Tensor& positional) {
    const int64_t d = token_table->value.shape[1];
    const int t_total = t_in + n_prompt;
    Tensor out({b, t_total, d});
    const double* tok = token_table->value.ptr();
    const double* ww = ww_table->value.ptr();
    const double* pb = prompt_bank->value.ptr();
    const double* pos = positional.ptr();
    double* op = out.ptr();
    for (int r = 0; r < b; ++r) {
        const int len = input_len[r];
        for (int p = 0; p < t_total; ++p) {
            double* dst = op + (r * t_total + p) * d;
            const double* posrow = pos + p * d;
            if (p >= len && p < len + n_prompt) {
                const double* prow = pb + (task_of_row[r] * n_prompt + (p - len)) * d;
                const double* wrow = ww; // prompts carry whole-word index 0
                for (int64_t i = 0; i < d; ++i) dst[i] = prow[i] + wrow[i] + posrow[i];
            } else {
                // token position; indexes past len+n_prompt map to padded slots
                int slot = p < len ? p : p - n_prompt;
                int id = input_ids[r * t_in + slot];
                int w = ww_ids[r * t_in + slot];
                const double* trow = tok + id * d;
                const double* wrow = ww + w * d;
                for (int64_t i = 0; i < d; ++i) dst[i] = trow[i] + wrow[i] + posrow[i];
            }
        }
    }
    NodePtr n = make_op(std::move(out), {token_table, ww_table, prompt_bank},
                        "encoder_input");
    n->backward_fn = [b, t_in, n_prompt, t_total, d, input_ids, ww_ids,
                      input_len, task_of_row, token_table, ww_table,
                      prompt_bank](Node& self) {
        const double* g = self.grad.ptr();
        double* gtok = token_table->requires_grad
                           ? token_table->ensure_grad().ptr() : nullptr;
        double* gww = ww_table->requires_grad ? ww_table->ensure_grad().ptr()
                                              : nullptr;
        double* gpb = prompt_bank->requires_grad
                          ? prompt_bank->ensure_grad().ptr() : nullptr;
        for (int r = 0; r < b; ++r) {
            const int len = input_len[r];
            for (int p = 0; p < t_total; ++p) {
                const double* grow = g + (r * t_total + p) * d;
                if (p >= len && p < len + n_prompt) {
                    if (gpb) {
                        double* dst = gpb + (task_of_row[r] * n_prompt + (p - len)) * d;
                        for (int64_t i = 0; i < d; ++i) dst[i] += grow[i];
                    }
                    if (gww) {
                        for (int64_t i = 0; i < d; ++i) gww[i] += grow[i];
                    }
                } else {
                    int slot = p < len ? p : p - n_prompt;
                    int id = input_ids[r * t_in + slot];
                    int w = ww_ids[r * t_in + slot];
                    if (gtok) {
                        double* dst = gtok + id * d;
                        for (int64_t i = 0; i < d; ++i) dst[i] += grow[i];
                    }
                    if (gww) {
                        double* dst = gww + w * d;
                        for (int64_t i = 0; i < d; ++i) dst[i] += grow[i];
                    }
                }
            }
        }
    };
    return n;
}

NodePtr decoder_input(int b, int t_out, const std::vector<int>& ids,
                      NodePtr token_table, const Tensor& positional) {
    const int64_t d = token_table->value.shape[1];
    Tensor out({b, t_out, d});
    const double* tok = token_table->value.ptr();
    const double* pos = positional.ptr();
    double* op = out.ptr();
    for (int r = 0; r < b; ++r) {
        for (int p = 0; p < t_out; ++p) {
            const double* trow = tok + ids[r * t_out + p] * d;
            const double* posrow = pos + p * d;
            double* dst = op + (r * t_out + p) * d;
            for (int64_t i = 0; i < d; ++i) dst[i] = trow[i] + posrow[i];
        }
    }
    NodePtr n = make_op(std::move(out), {token_table}, "decoder_input");
    n->backward_fn = [b, t_out, d, ids, token_table](Node& self) {
        if (!token_table->requires_grad) return;
        double* gtok = token_table->ensure_grad().ptr();
        const double* g = self.grad.ptr();
        for (int r = 0; r < b; ++r) {
            for (int p = 0; p < t_out; ++p) {
                double* dst = gtok + ids[r * t_out + p] * d;
                const double* grow = g + (r * t_out + p) * d;
                for (int64_t i = 0; i < d; ++i) dst[i] += grow[i];
            }
        }
    };
    return n;
}

NodePtr cross_entropy(NodePtr logits, const std::vector<int>& targets,
                      const std::vector<double>& weights,
                      std::vector<double>* out_nll) {
    const int64_t v = logits->value.shape.back();
    const int64_t rows = logits->value.numel() / v;
    auto probs = std::make_shared<Tensor>(Tensor::zeros({rows, v}));
    double loss = 0.0;
    if (out_nll) out_nll->assign(rows, 0.0);
    const double* lp = logits->value.ptr();
    double* pp = probs->ptr();
    for (int64_t r = 0; r < rows; ++r) {
        if (weights[r] == 0.0) continue;
        const double* row = lp + r * v;
        double* prow = pp + r * v;
        std::copy(row, row + v, prow);
        softmax_row(prow, v);
        double p_target = std::max(prow[targets[r]], 1e-300);
        double nll = -std::log(p_target);
        if (out_nll) (*out_nll)[r] = nll;
        loss += weights[r] * nll;
    }
    Tensor out({1});
    out.data[0] = loss;
    NodePtr n = make_op(std::move(out), {logits}, "cross_entropy");
    n->backward_fn = [logits, probs, targets, weights, rows, v](Node& self) {
        if (!logits->requires_grad) return;
        const double gscale = self.grad.data[0];
        double* gl = logits->ensure_grad().ptr();
        const double* pp = probs->ptr();
        for (int64_t r = 0; r < rows; ++r) {
            const double w = weights[r];
            if (w == 0.0) continue;
            const double* prow = pp + r * v;
            double* grow = gl + r * v;
            const double scale = gscale * w;
            for (int64_t j = 0; j < v; ++j) grow[j] += scale * prow[j];
            grow[targets[r]] -= scale;
        }
    };
    return n;
}

} // namespace rdrec
