#include "cqa/mock_scorers.hpp"

#include <stdexcept>
#include <unordered_set>

#include "cqa/text_index.hpp"
#include "cqa/utf8.hpp"

namespace cqa {

namespace {

double overlap(const std::string& answer, const std::unordered_set<std::string>& vocabulary) {
    double n = 0;
    for (const auto& tok : tokenize(answer)) n += vocabulary.contains(tok) ? 1 : 0;
    return n;
}

}  // namespace

std::unique_ptr<Scorer> make_constant_scorer(double value) {
    return std::make_unique<FunctionScorer>([value](const ScorePair&) { return value; });
}

std::unique_ptr<Scorer> make_length_scorer() {
    return std::make_unique<FunctionScorer>(
        [](const ScorePair& p) { return static_cast<double>(utf8::length(p.input.answer_text)); });
}

std::unique_ptr<Scorer> make_tag_overlap_scorer() {
    return std::make_unique<FunctionScorer>([](const ScorePair& p) {
        std::unordered_set<std::string> tags;
        for (const auto& s : p.input.query_segments) {
            if (s.marker != Marker::T) continue;
            for (auto& tok : tokenize(s.text)) tags.insert(std::move(tok));
        }
        return overlap(p.input.answer_text, tags);
    });
}

std::unique_ptr<Scorer> make_term_overlap_scorer() {
    return std::make_unique<FunctionScorer>([](const ScorePair& p) {
        std::unordered_set<std::string> terms;
        for (const auto& s : p.input.query_segments) {
            for (auto& tok : tokenize(s.text)) terms.insert(std::move(tok));
        }
        return overlap(p.input.answer_text, terms);
    });
}

std::unique_ptr<Scorer> make_mock_scorer(std::string_view name) {
    if (name == "mock:constant") return make_constant_scorer(0.0);
    if (name == "mock:length") return make_length_scorer();
    if (name == "mock:tag-overlap") return make_tag_overlap_scorer();
    if (name == "mock:term-overlap") return make_term_overlap_scorer();
    throw std::invalid_argument("unknown mock scorer '" + std::string(name) + "'");
}

}  // namespace cqa
