#include "cqa/ablation.hpp"

namespace cqa {

std::vector<MetricSpec> ablation_metrics() {
    return {{Metric::map, 1000}, {Metric::recall, 100}, {Metric::recall, 10}, {Metric::recall, 1},
            {Metric::recall, 1000}};
}

std::vector<AblationVariant> ablation_variants() {
    return {{"fs without [T] and tags", AblationSpec{Segment::tags}},
            {"fs without [S] and subject", AblationSpec{Segment::subject}},
            {"fs without [D] and description", AblationSpec{Segment::description}},
            {"fs", AblationSpec{}}};
}

std::vector<SystemMetrics> run_ablation(const Run& first_stage, const Corpus& corpus, const Qrels& qrels,
                                        Scorer& scorer, RerankOptions options, const std::vector<MetricSpec>& metrics,
                                        unsigned threads) {
    std::vector<SystemMetrics> rows;
    options.format = InputFormat::fs;
    for (const auto& variant : ablation_variants()) {
        options.ablation = variant.drop;
        const Run reranked = rerank_run(first_stage, corpus, scorer, options, threads);
        rows.push_back({variant.label, evaluate_run(reranked, qrels, metrics)});
    }
    return rows;
}

}  // namespace cqa
