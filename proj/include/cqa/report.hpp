#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cqa/eval.hpp"
#include "cqa/significance.hpp"

namespace cqa {

/// One row of a metrics table: a system name and its reports, all rows
/// sharing the same metric list.
struct SystemMetrics {
    std::string system;
    std::vector<MetricReport> reports;
};

/// Fixed-width text table, aggregates printed with three decimals.
void write_metrics_table(std::ostream& out, const std::vector<SystemMetrics>& rows);
void write_significance_table(std::ostream& out, const std::vector<SignificanceResult>& results);

/// {"metrics": [...], "systems": [{"system", "aggregate": {...}, "per_query": {...}}],
///  "significance": [...]}
std::string metrics_to_json(const std::vector<SystemMetrics>& rows, const std::vector<SignificanceResult>& tests);

/// Paired t-tests between every pair of systems on every metric, then
/// Bonferroni with `m` comparisons.
std::vector<SignificanceResult> compare_systems(const std::vector<SystemMetrics>& rows, double alpha, std::size_t m);

}  // namespace cqa
