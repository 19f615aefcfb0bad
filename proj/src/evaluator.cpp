// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rdrec/errors.hpp"

namespace rdrec {

namespace {

// 1-based rank of the positive, 0 if absent.
int rank_of(const RankedList& ranked, const std::string& positive) {
    for (size_t i = 0; i < ranked.entries.size(); ++i) {
        if (ranked.entries[i].first == positive) return static_cast<int>(i) + 1;
    }
    return 0;
}

} // namespace

int hr_at_k(const RankedList& ranked, const std::string& positive, int k) {
    if (k < 1) fail(Err::RangeError, "evaluator: k must be >= 1");
    int r = rank_of(ranked, positive);
    return (r >= 1 && r <= k) ? 1 : 0;
}

double ndcg_at_k(const RankedList& ranked, const std::string& positive, int k) {
    if (k < 1) fail(Err::RangeError, "evaluator: k must be >= 1");
    int r = rank_of(ranked, positive);
    if (r < 1 || r > k) return 0.0;
    return 1.0 / std::log2(static_cast<double>(r) + 1.0);
}

MetricReport evaluate(const std::map<std::string, RankedList>& ranked_by_user,
                      const std::map<std::string, std::string>& positive_by_user,
                      const std::vector<int>& ks) {
    if (positive_by_user.empty()) {
        fail(Err::EmptyInput, "evaluator: no users to evaluate");
    }
    std::vector<std::string> missing;
    for (const auto& [user, pos] : positive_by_user) {
        if (!ranked_by_user.count(user)) missing.push_back(user);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& u : missing) list += " " + u;
        fail(Err::InvalidArgument, "evaluator: missing ranked lists for users:" + list);
    }
    MetricReport rep;
    for (int k : ks) {
        rep.hr[k] = 0.0;
        rep.ndcg[k] = 0.0;
    }
    // std::map iteration keeps the reduction order fixed regardless of how
    // callers assembled their maps
    for (const auto& [user, pos] : positive_by_user) {
        const RankedList& rl = ranked_by_user.at(user);
        if (rank_of(rl, pos) == 0) ++rep.n_missing_positive;
        for (int k : ks) {
            rep.hr[k] += hr_at_k(rl, pos, k);
            rep.ndcg[k] += ndcg_at_k(rl, pos, k);
        }
        ++rep.n_users;
    }
    for (int k : ks) {
        rep.hr[k] /= static_cast<double>(rep.n_users);
        rep.ndcg[k] /= static_cast<double>(rep.n_users);
    }
    return rep;
}

std::string format_metric_report(const MetricReport& r) {
    std::ostringstream out;
    char buf[64];
    out << "metric ";
    for (const auto& [k, v] : r.hr) {
        std::snprintf(buf, sizeof(buf), "  H@%-5d", k);
        out << buf;
    }
    for (const auto& [k, v] : r.ndcg) {
        std::snprintf(buf, sizeof(buf), "  N@%-5d", k);
        out << buf;
    }
    out << "\nvalue  ";
    for (const auto& [k, v] : r.hr) {
        std::snprintf(buf, sizeof(buf), "  %.4f", v);
        out << buf;
    }
    for (const auto& [k, v] : r.ndcg) {
        std::snprintf(buf, sizeof(buf), "  %.4f", v);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "\nusers  %zu", r.n_users);
    out << buf;
    if (r.n_missing_positive > 0) {
        std::snprintf(buf, sizeof(buf), "  (positives absent: %zu)",
                      r.n_missing_positive);
        out << buf;
    }
    out << "\n";
    return out.str();
}

// Lentz's algorithm for the continued fraction of I_x(a,b).
namespace {

double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-12;
    constexpr double kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    double x = nu / (nu + t * t);
    return incomplete_beta(nu / 2.0, 0.5, x);
}

namespace {

std::pair<double, double> mean_var(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1); // sample variance
    return {m, s2};
}

} // namespace

TTestResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) {
        fail(Err::InvalidArgument, "evaluator: t-test needs >= 2 trials per group");
    }
    auto [ma, va] = mean_var(a);
    auto [mb, vb] = mean_var(b);
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double se2 = va / na + vb / nb;
    TTestResult r;
    if (se2 == 0.0) {
        // degenerate: no variance in either group
        r.dof = na + nb - 2.0;
        if (ma == mb) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = ma > mb ? HUGE_VAL : -HUGE_VAL;
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 /
            (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    r.p_value = student_t_two_sided_p(r.t_statistic, r.dof);
    return r;
}

TTestResult paired_t_test(const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        fail(Err::InvalidArgument, "evaluator: paired t-test needs equal-size groups");
    }
    std::vector<double> d(a.size());
    for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    auto [md, vd] = mean_var(d);
    double n = static_cast<double>(d.size());
    TTestResult r;
    r.dof = n - 1.0;
    if (vd == 0.0) {
        if (md == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = md > 0.0 ? HUGE_VAL : -HUGE_VAL;
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = md / std::sqrt(vd / n);
    r.p_value = student_t_two_sided_p(r.t_statistic, r.dof);
    return r;
}

} // namespace rdrec
