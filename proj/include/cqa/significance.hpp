#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cqa {

enum class TTestStatus {
    ok,
    zero_variance,  // every difference is zero: t = 0, p = 1
    saturated,      // differences constant but non-zero: |t| = inf, p = 0
};

struct TTestResult {
    double t_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    TTestStatus status = TTestStatus::ok;
};

/// Two-sided paired t-test on a - b with n - 1 degrees of freedom.
/// Throws std::invalid_argument for n < 2 or unequal lengths.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Pairs values by query id. Throws std::invalid_argument if the two maps
/// cover different queries.
TTestResult paired_t_test(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

struct SignificanceResult {
    std::string metric_name;
    std::string system_a;
    std::string system_b;
    double t_statistic = 0.0;
    double p_value = 1.0;
    double corrected_alpha = 0.0;
    bool significant = false;
};

/// corrected_alpha = alpha / m and significant = p < corrected_alpha for
/// each p-value. Requires alpha in (0, 1) and m >= p_values.size().
std::vector<SignificanceResult> bonferroni(const std::vector<double>& p_values, double alpha, std::size_t m);

/// Same decision rule applied in place.
void apply_bonferroni(std::vector<SignificanceResult>& results, double alpha, std::size_t m);

}  // namespace cqa
