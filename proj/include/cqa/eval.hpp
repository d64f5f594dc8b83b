#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/corpus.hpp"
#include "cqa/ranked_list.hpp"

namespace cqa {

/// Relevant answer ids per question. LegalQA has exactly one per question,
/// but the metrics accept any number.
using Qrels = std::map<std::string, std::set<std::string>>;

Qrels to_qrels(const std::vector<Judgment>& judgments);
/// TREC qrels; lines with relevance <= 0 are ignored.
Qrels read_qrels_file(const std::filesystem::path& path);

/// Sum of precision at each relevant hit within the top k, divided by the
/// number of relevant documents. Throws std::invalid_argument if k == 0 or
/// `relevant` is empty.
double average_precision_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k);
double average_precision_at_k(const RankedList& list, const Judgment& judgment, std::size_t k);

/// Fraction of relevant documents in the top k.
double recall_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k);
double recall_at_k(const RankedList& list, const Judgment& judgment, std::size_t k);

/// 1 / rank of the first relevant document within the top k, else 0.
double reciprocal_rank_at_k(const RankedList& list, const std::set<std::string>& relevant, std::size_t k);

enum class Metric { map, recall, mrr };

struct MetricSpec {
    Metric metric = Metric::map;
    std::size_t k = 1000;

    /// "MAP@1k", "R@10", "MRR@10"; k of 1000 prints as 1k.
    std::string name() const;
    /// Accepts the forms produced by name() and plain digits ("MAP@1000").
    static MetricSpec parse(std::string_view text);

    bool operator==(const MetricSpec&) const = default;
};

/// MAP@1k, R@1k, R@100, R@10, R@2, R@1.
std::vector<MetricSpec> default_metrics();

struct MetricReport {
    MetricSpec spec;
    std::map<std::string, double> per_query;
    double aggregate = 0.0;

    std::string metric_name() const { return spec.name(); }
};

/// Evaluates over every judged query. Judged queries missing from the run
/// score 0; run queries without judgments are ignored. The mean is a fold in
/// ascending question-id order.
std::vector<MetricReport> evaluate_run(const Run& run, const Qrels& qrels, const std::vector<MetricSpec>& metrics);

/// MAP@k and R@k for each cutoff, in that order.
std::vector<MetricReport> evaluate_run(const Run& run, const Qrels& qrels, const std::vector<std::size_t>& cutoffs);

}  // namespace cqa
