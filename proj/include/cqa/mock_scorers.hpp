#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include "cqa/scorer.hpp"

namespace cqa {

/// Scores each pair independently with a plain function.
class FunctionScorer : public Scorer {
public:
    explicit FunctionScorer(std::function<double(const ScorePair&)> fn) : fn_(std::move(fn)) {}

    ScoreResponse score(const ScoreRequest& request) override {
        ScoreResponse out;
        for (const auto& p : request) out[p.pair_id] = fn_(p);
        return out;
    }

private:
    std::function<double(const ScorePair&)> fn_;
};

/// Every pair gets the same score.
std::unique_ptr<Scorer> make_constant_scorer(double value);
/// Score = answer length in code points.
std::unique_ptr<Scorer> make_length_scorer();
/// Score = number of answer tokens that also occur in the [T] segment.
std::unique_ptr<Scorer> make_tag_overlap_scorer();
/// Score = number of answer tokens that occur anywhere on the query side.
std::unique_ptr<Scorer> make_term_overlap_scorer();

/// "mock:constant", "mock:length", "mock:tag-overlap", "mock:term-overlap";
/// throws std::invalid_argument otherwise.
std::unique_ptr<Scorer> make_mock_scorer(std::string_view name);

}  // namespace cqa
