#include "cqa/eval.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cqa/error.hpp"

namespace cqa {

Qrels to_qrels(const std::vector<Judgment>& judgments) {
    Qrels out;
    for (const auto& j : judgments) out[j.question_id].insert(j.best_answer_id);
    return out;
}

Qrels read_qrels_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    Qrels out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string qid, iter, docid, extra;
        long rel = 0;
        if (!(ls >> qid >> iter >> docid >> rel) || (ls >> extra)) {
            throw RecordError(path.string(), n, "", "expected '<qid> 0 <docid> <relevance>'");
        }
        if (rel > 0) out[qid].insert(docid);
    }
    return out;
}

namespace {

void check_args(const std::set<std::string>& relevant, std::size_t k) {
    if (k == 0) throw std::invalid_argument("cutoff k must be >= 1");
    if (relevant.empty()) throw std::invalid_argument("query has no relevant documents");
}

}  // namespace

double average_precision_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k) {
    check_args(relevant, k);
    double sum = 0.0;
    std::size_t hits = 0;
    const auto depth = std::min(k, list.entries.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.contains(list.entries[i].answer_id)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double average_precision_at_k(const RankedList& list, const Judgment& judgment, std::size_t k) {
    return average_precision_at_k(list, std::set<std::string>{judgment.best_answer_id}, k);
}

double recall_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k) {
    check_args(relevant, k);
    std::size_t hits = 0;
    const auto depth = std::min(k, list.entries.size());
    for (std::size_t i = 0; i < depth; ++i) hits += relevant.contains(list.entries[i].answer_id) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double recall_at_k(const RankedList& list, const Judgment& judgment, std::size_t k) {
    return recall_at_k(list, std::set<std::string>{judgment.best_answer_id}, k);
}

double reciprocal_rank_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k) {
    check_args(relevant, k);
    const auto depth = std::min(k, list.entries.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.contains(list.entries[i].answer_id)) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

std::string MetricSpec::name() const {
    std::string prefix = metric == Metric::map ? "MAP@" : metric == Metric::recall ? "R@" : "MRR@";
    if (k >= 1000 && k % 1000 == 0) return prefix + std::to_string(k / 1000) + "k";
    return prefix + std::to_string(k);
}

MetricSpec MetricSpec::parse(std::string_view text) {
    const auto at = text.find('@');
    if (at == std::string_view::npos) throw std::invalid_argument("metric must look like MAP@1k or R@10");
    const auto head = text.substr(0, at);
    auto tail = text.substr(at + 1);
    MetricSpec spec;
    if (head == "MAP" || head == "map") {
        spec.metric = Metric::map;
    } else if (head == "R" || head == "recall" || head == "Recall") {
        spec.metric = Metric::recall;
    } else if (head == "MRR" || head == "mrr") {
        spec.metric = Metric::mrr;
    } else {
        throw std::invalid_argument("unknown metric '" + std::string(head) + "'");
    }
    std::size_t scale = 1;
    if (!tail.empty() && (tail.back() == 'k' || tail.back() == 'K')) {
        scale = 1000;
        tail.remove_suffix(1);
    }
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (ec != std::errc() || ptr != tail.data() + tail.size() || k == 0) {
        throw std::invalid_argument("bad cutoff in metric '" + std::string(text) + "'");
    }
    spec.k = k * scale;
    return spec;
}

std::vector<MetricSpec> default_metrics() {
    return {{Metric::map, 1000},  {Metric::recall, 1000}, {Metric::recall, 100},
            {Metric::recall, 10}, {Metric::recall, 2},    {Metric::recall, 1}};
}

std::vector<MetricReport> evaluate_run(const Run& run, const Qrels& qrels, const std::vector<MetricSpec>& metrics) {
    std::vector<MetricReport> reports;
    reports.reserve(metrics.size());
    const RankedList empty;
    for (const auto& spec : metrics) {
        MetricReport report;
        report.spec = spec;
        double sum = 0.0;
        for (const auto& [qid, relevant] : qrels) {
            if (relevant.empty()) continue;
            auto it = run.find(qid);
            const RankedList& list = it == run.end() ? empty : it->second;
            double v = 0.0;
            switch (spec.metric) {
                case Metric::map: v = average_precision_at_k(list, relevant, spec.k); break;
                case Metric::recall: v = recall_at_k(list, relevant, spec.k); break;
                case Metric::mrr: v = reciprocal_rank_at_k(list, relevant, spec.k); break;
            }
            report.per_query.emplace(qid, v);
            sum += v;
        }
        report.aggregate = report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<MetricReport> evaluate_run(const Run& run, const Qrels& qrels, const std::vector<std::size_t>& cutoffs) {
    std::vector<MetricSpec> metrics;
    for (auto k : cutoffs) {
        metrics.push_back({Metric::map, k});
        metrics.push_back({Metric::recall, k});
    }
    return evaluate_run(run, qrels, metrics);
}

}  // namespace cqa
