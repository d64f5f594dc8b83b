#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cqa/structured_query.hpp"

namespace cqa {

struct ScorePair {
    std::string pair_id;
    StructuredInput input;
    InputFormat format = InputFormat::fs;

    bool operator==(const ScorePair&) const = default;
};

using ScoreRequest = std::vector<ScorePair>;
/// pair_id -> relevance score, higher is more relevant.
using ScoreResponse = std::map<std::string, double>;

inline constexpr std::size_t kDefaultBatchSize = 32;

/// Anything that can score query/answer pairs: the neural service behind
/// HttpScorer, or an in-process mock. Implementations must be safe to call
/// from several threads at once.
class Scorer {
public:
    virtual ~Scorer() = default;

    /// May return an incomplete or otherwise bad response; score_batch
    /// checks it.
    virtual ScoreResponse score(const ScoreRequest& request) = 0;
};

/// Sends one batch and checks the answer: exactly one finite score per
/// pair. Rejects empty batches, batches above `max_batch_size`, and repeated
/// pair ids with std::invalid_argument before anything is sent. A bad
/// response raises ScorerResponseError for the whole batch.
ScoreResponse score_batch(const ScoreRequest& request, Scorer& scorer,
                          std::size_t max_batch_size = kDefaultBatchSize);

}  // namespace cqa
