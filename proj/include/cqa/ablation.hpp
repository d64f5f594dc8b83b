#pragma once

#include <vector>

#include "cqa/eval.hpp"
#include "cqa/rerank.hpp"
#include "cqa/report.hpp"

namespace cqa {

/// MAP@1k, R@100, R@10, R@1, plus R@1k to show the candidate set is shared.
std::vector<MetricSpec> ablation_metrics();

struct AblationVariant {
    std::string label;
    AblationSpec drop;
};

/// Drop [T], drop [S], drop [D], then the full structured input.
std::vector<AblationVariant> ablation_variants();

/// Re-ranks one first-stage run once per variant in the fs format and
/// evaluates each result. `options.format` and `options.ablation` are
/// overridden per variant.
std::vector<SystemMetrics> run_ablation(const Run& first_stage, const Corpus& corpus, const Qrels& qrels,
                                        Scorer& scorer, RerankOptions options = {},
                                        const std::vector<MetricSpec>& metrics = ablation_metrics(),
                                        unsigned threads = 0);

}  // namespace cqa
