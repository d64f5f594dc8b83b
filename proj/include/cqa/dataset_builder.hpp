#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/corpus.hpp"

namespace cqa {

/// Minimum "lawyer agree" votes that make an answer a best answer when the
/// asker did not mark one as helpful.
inline constexpr std::uint32_t kMinLawyerAgrees = 3;

/// The questioner-helpful answer if there is one, otherwise the answer with
/// the most lawyer agrees among those with at least three (ties: smallest
/// id). Independent of input order.
std::optional<std::string> select_best_answer(const Question& question,
                                              const std::vector<const Answer*>& answers);

/// Adjudicates every question of `corpus` and returns the judgments in
/// question order. Questions without a qualifying answer get none.
std::vector<Judgment> adjudicate(const Corpus& corpus);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// Like edit_distance, but gives up once the distance is known to exceed
/// `bound` and returns bound + 1 in that case.
std::size_t bounded_edit_distance(std::u32string_view a, std::u32string_view b, std::size_t bound);

/// 100 * (1 - distance / max(len_a, len_b)); two empty strings score 100.
double levenshtein_ratio(std::u32string_view a, std::u32string_view b);

/// Text compared by the duplicate detector: subject + ' ' + description.
std::string dedup_text(const Question& q);

struct DuplicatePair {
    std::string first;   // lexicographically smaller id
    std::string second;
    double ratio = 0.0;

    bool operator==(const DuplicatePair&) const = default;
};

/// All unordered pairs whose ratio strictly exceeds `threshold` (0, 100],
/// sorted by (first, second). Candidates come from a length window and a
/// q-gram prefix and count filter that never drops a qualifying pair; only
/// they reach the banded edit distance. Work is spread over `threads`
/// workers (0 = hardware concurrency).
std::vector<DuplicatePair> find_near_duplicates(const std::vector<Question>& questions,
                                                double threshold, unsigned threads = 0);

/// Collapses each connected component of the duplicate graph onto its
/// longest question (ties: earliest timestamp, then smallest id). Answers of
/// removed questions move to the survivor; their judgments move too unless
/// the survivor already has one.
Corpus collapse_duplicates(const Corpus& corpus, const std::vector<DuplicatePair>& pairs);

struct SplitSpec {
    // Fractions as integer parts per `denominator` so the floors are exact.
    std::size_t train = 70;
    std::size_t validation = 10;
    std::size_t test = 20;
    std::size_t denominator = 100;

    void validate() const;
};

struct DatasetSplits {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

/// Sorts by (timestamp, id); the first floor(train*N) questions train, the
/// next floor(validation*N) validate, the rest test. Throws DataError when a
/// split would be empty.
DatasetSplits chronological_split(const std::vector<Question>& questions, const SplitSpec& spec = {});

/// `{"train": [...], "validation": [...], "test": [...]}`
void write_splits(const DatasetSplits& splits, const std::filesystem::path& path);
DatasetSplits read_splits(const std::filesystem::path& path);

}  // namespace cqa
