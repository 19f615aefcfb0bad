// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/tensor.hpp"

#include <algorithm>
#include <vector>
#include <cmath>
#include <sstream>

namespace rdrec {

std::string Tensor::shape_str() const {
    std::ostringstream ss;
    ss << "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) ss << ",";
        ss << shape[i];
    }
    ss << "]";
    return ss.str();
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void gemm_nn_kernel(int64_t m, int64_t n, int64_t k, const double* __restrict__ a,
                    const double* __restrict__ b, double* __restrict__ c) {
    for (int64_t i = 0; i < m; ++i) {
        const double* __restrict__ arow = a + i * k;
        double* __restrict__ crow = c + i * n;
        for (int64_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* __restrict__ brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) {
                crow[j] += av * brow[j];
            }
        }
    }
}

// rows x cols source -> cols x rows destination
void transpose_into(int64_t rows, int64_t cols, const double* __restrict__ src,
                    double* __restrict__ dst) {
    for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < cols; ++c) {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

} // namespace

void gemm_nn(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    gemm_nn_kernel(m, n, k, a, b, c);
}

void gemm_nt(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate) {
    // b is [n,k]; transposing it keeps the multiply on the fast nn path
    std::vector<double> bt(static_cast<size_t>(k) * n);
    transpose_into(n, k, b, bt.data());
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    gemm_nn_kernel(m, n, k, a, bt.data(), c);
}

void gemm_tn(int64_t m, int64_t n, int64_t k, const double* a, const double* b,
             double* c, bool accumulate) {
    // a is [k,m]
    std::vector<double> at(static_cast<size_t>(m) * k);
    transpose_into(k, m, a, at.data());
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    gemm_nn_kernel(m, n, k, at.data(), b, c);
}

void softmax_row(double* row, int64_t n) {
    double mx = row[0];
    for (int64_t i = 1; i < n; ++i) mx = std::max(mx, row[i]);
    double sum = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        row[i] = std::exp(row[i] - mx);
        sum += row[i];
    }
    const double inv = 1.0 / sum;
    for (int64_t i = 0; i < n; ++i) row[i] *= inv;
}

} // namespace rdrec
