// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rdrec {

// Dense row-major tensor of doubles. All training math runs in 64-bit;
// checkpoints quantize to 32-bit floats on disk.
struct Tensor {
    std::vector<int64_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int64_t> s)
        : shape(std::move(s)), data(static_cast<size_t>(numel_of(shape)), 0.0) {}

    static int64_t numel_of(const std::vector<int64_t>& s) {
        int64_t n = 1;
        for (int64_t d : s) n *= d;
        return n;
    }
    static Tensor zeros(std::vector<int64_t> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int64_t> s, double v) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int64_t dim(size_t i) const { return shape[i]; }
    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    std::string shape_str() const;
    bool all_finite() const;
};

// C[M,N] = A[M,K] * B[K,N] (+= when accumulate). Row-major, ikj order.
void gemm_nn(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate);
// C[M,N] = A[M,K] * B[N,K]^T
void gemm_nt(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate);
// C[M,N] = A[K,M]^T * B[K,N]
void gemm_tn(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate);

// In-place numerically stable softmax over a contiguous row.
void softmax_row(double* row, int64_t n);

} // namespace rdrec
