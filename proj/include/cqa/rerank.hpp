#pragma once

#include "cqa/corpus.hpp"
#include "cqa/ranked_list.hpp"
#include "cqa/scorer.hpp"
#include "cqa/structured_query.hpp"

namespace cqa {

struct RerankOptions {
    InputFormat format = InputFormat::fs;
    /// Only meaningful for the fs format.
    AblationSpec ablation;
    /// Whether the flat cat query includes the rendered tags.
    bool cat_include_tags = true;
    std::size_t batch_size = kDefaultBatchSize;
};

/// The scorer input for one candidate under `options`.
StructuredInput build_input(const Question& question, const Answer& answer, const RerankOptions& options);

/// Reorders one candidate list by scorer score, descending; ties keep the
/// first-stage order. Candidates are sent in batches of
/// options.batch_size and merged by pair id before sorting, so batching
/// never changes the result. The answer set is unchanged and ranks are
/// renumbered from 1.
RankedList rerank(const RankedList& list, const Corpus& corpus, Scorer& scorer, const RerankOptions& options = {});

/// rerank() for every list of a run on `threads` workers (0 = hardware
/// concurrency). The first failure is rethrown with its original type.
Run rerank_run(const Run& run, const Corpus& corpus, Scorer& scorer, const RerankOptions& options = {},
               unsigned threads = 0);

}  // namespace cqa
