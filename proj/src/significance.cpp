#include "cqa/significance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace cqa {

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw std::invalid_argument("paired t-test needs at least two pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        all_zero = all_zero && d == 0.0;
        ss += (d - mean) * (d - mean);
    }

    TTestResult r;
    r.n = n;
    if (all_zero) {
        r.status = TTestStatus::zero_variance;
        return r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
        r.status = TTestStatus::saturated;
        r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.p_value = 0.0;
        return r;
    }
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t_statistic))));
    return r;
}

TTestResult paired_t_test(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired samples cover different queries");
    std::vector<double> va, vb;
    va.reserve(a.size());
    vb.reserve(b.size());
    auto ib = b.begin();
    for (const auto& [qid, v] : a) {
        if (ib->first != qid) throw std::invalid_argument("paired samples cover different queries: " + qid);
        va.push_back(v);
        vb.push_back(ib->second);
        ++ib;
    }
    return paired_t_test(va, vb);
}

namespace {

double corrected(double alpha, std::size_t m, std::size_t count) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    if (m == 0 || m < count) throw std::invalid_argument("comparison count m must be >= number of tests");
    return alpha / static_cast<double>(m);
}

}  // namespace

std::vector<SignificanceResult> bonferroni(const std::vector<double>& p_values, double alpha, std::size_t m) {
    const double threshold = corrected(alpha, m, p_values.size());
    std::vector<SignificanceResult> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        SignificanceResult r;
        r.p_value = p;
        r.corrected_alpha = threshold;
        r.significant = p < threshold;
        out.push_back(std::move(r));
    }
    return out;
}

void apply_bonferroni(std::vector<SignificanceResult>& results, double alpha, std::size_t m) {
    const double threshold = corrected(alpha, m, results.size());
    for (auto& r : results) {
        r.corrected_alpha = threshold;
        r.significant = r.p_value < threshold;
    }
}

}  // namespace cqa
