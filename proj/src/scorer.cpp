#include "cqa/scorer.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "cqa/error.hpp"

namespace cqa {

ScoreResponse score_batch(const ScoreRequest& request, Scorer& scorer, std::size_t max_batch_size) {
    if (request.empty()) throw std::invalid_argument("empty score batch");
    if (request.size() > max_batch_size) {
        throw std::invalid_argument("score batch of " + std::to_string(request.size()) +
                                    " exceeds the maximum of " + std::to_string(max_batch_size));
    }
    std::unordered_set<std::string_view> ids;
    for (const auto& p : request) {
        if (!ids.insert(p.pair_id).second) throw std::invalid_argument("repeated pair id " + p.pair_id);
    }

    ScoreResponse response = scorer.score(request);

    for (const auto& p : request) {
        auto it = response.find(p.pair_id);
        if (it == response.end()) throw ScorerResponseError("scorer returned no score for pair " + p.pair_id);
        if (!std::isfinite(it->second)) {
            throw ScorerResponseError("scorer returned a non-finite score for pair " + p.pair_id);
        }
    }
    if (response.size() != request.size()) {
        for (const auto& [id, s] : response) {
            if (!ids.contains(id)) throw ScorerResponseError("scorer returned an unrequested pair " + id);
        }
    }
    return response;
}

}  // namespace cqa
