#include "cqa/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace cqa {

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

void write_metrics_table(std::ostream& out, const std::vector<SystemMetrics>& rows) {
    if (rows.empty()) return;
    std::size_t name_width = 6;
    for (const auto& r : rows) name_width = std::max(name_width, r.system.size());
    const std::size_t col = 9;
    out << pad("system", name_width);
    for (const auto& rep : rows.front().reports) out << ' ' << pad(rep.metric_name(), col);
    out << '\n';
    for (const auto& r : rows) {
        out << pad(r.system, name_width);
        for (const auto& rep : r.reports) out << ' ' << pad(fixed(rep.aggregate, 3), col);
        out << '\n';
    }
}

void write_significance_table(std::ostream& out, const std::vector<SignificanceResult>& results) {
    for (const auto& r : results) {
        out << r.metric_name << ' ' << r.system_a << " vs " << r.system_b << ": t=" << fixed(r.t_statistic, 4)
            << " p=" << r.p_value << " alpha/m=" << r.corrected_alpha
            << (r.significant ? " significant" : " not significant") << '\n';
    }
}

std::string metrics_to_json(const std::vector<SystemMetrics>& rows, const std::vector<SignificanceResult>& tests) {
    nlohmann::ordered_json doc;
    doc["metrics"] = nlohmann::json::array();
    if (!rows.empty()) {
        for (const auto& rep : rows.front().reports) doc["metrics"].push_back(rep.metric_name());
    }
    doc["systems"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json sys;
        sys["system"] = r.system;
        nlohmann::ordered_json agg, per;
        for (const auto& rep : r.reports) {
            agg[rep.metric_name()] = rep.aggregate;
            per[rep.metric_name()] = rep.per_query;
        }
        sys["aggregate"] = std::move(agg);
        sys["per_query"] = std::move(per);
        doc["systems"].push_back(std::move(sys));
    }
    doc["significance"] = nlohmann::json::array();
    for (const auto& t : tests) {
        nlohmann::ordered_json j;
        j["metric"] = t.metric_name;
        j["system_a"] = t.system_a;
        j["system_b"] = t.system_b;
        // JSON has no infinities; saturated tests carry t as null.
        if (std::isfinite(t.t_statistic)) {
            j["t_statistic"] = t.t_statistic;
        } else {
            j["t_statistic"] = nullptr;
        }
        j["p_value"] = t.p_value;
        j["corrected_alpha"] = t.corrected_alpha;
        j["significant"] = t.significant;
        doc["significance"].push_back(std::move(j));
    }
    return doc.dump(2);
}

std::vector<SignificanceResult> compare_systems(const std::vector<SystemMetrics>& rows, double alpha, std::size_t m) {
    std::vector<SignificanceResult> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            for (std::size_t r = 0; r < rows[i].reports.size(); ++r) {
                const auto& a = rows[i].reports[r];
                const auto& b = rows[j].reports.at(r);
                SignificanceResult s;
                s.metric_name = a.metric_name();
                s.system_a = rows[i].system;
                s.system_b = rows[j].system;
                if (a.per_query.size() >= 2) {
                    const auto t = paired_t_test(a.per_query, b.per_query);
                    s.t_statistic = t.t_statistic;
                    s.p_value = t.p_value;
                }
                out.push_back(std::move(s));
            }
        }
    }
    apply_bonferroni(out, alpha, m);
    return out;
}

}  // namespace cqa
