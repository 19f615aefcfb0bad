// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

namespace rdrec {

// Ordered (item_id, log_score), scores non-increasing, items unique.
struct RankedList {
    std::vector<std::pair<std::string, double>> entries;
};

int hr_at_k(const RankedList& ranked, const std::string& positive, int k);
double ndcg_at_k(const RankedList& ranked, const std::string& positive, int k);

struct MetricReport {
    std::map<int, double> hr;   // k -> mean over users
    std::map<int, double> ndcg;
    size_t n_users = 0;
    size_t n_missing_positive = 0; // positives absent from their ranked list
};

// Per-user metrics averaged over users; iteration order independent.
MetricReport evaluate(const std::map<std::string, RankedList>& ranked_by_user,
                      const std::map<std::string, std::string>& positive_by_user,
                      const std::vector<int>& ks);

std::string format_metric_report(const MetricReport& r);

struct TTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
};

// Two-sample Welch test (unequal variances), two-sided p-value.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);
// Paired variant (requires equal sizes); not the default anywhere.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);
// Two-sided tail probability of Student's t with dof nu.
double student_t_two_sided_p(double t, double nu);

} // namespace rdrec
