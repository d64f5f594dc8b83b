#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cqa {

struct RankedEntry {
    std::string answer_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based

    bool operator==(const RankedEntry&) const = default;
};

/// Candidates for one query, best first. Ranks run 1..n, scores never
/// increase with rank, answer ids are distinct.
struct RankedList {
    std::string question_id;
    std::vector<RankedEntry> entries;

    /// Throws DataError if any invariant is broken.
    void validate() const;

    bool operator==(const RankedList&) const = default;
};

/// A TREC run: ranked lists keyed by question id.
using Run = std::map<std::string, RankedList>;

/// `<question_id> Q0 <answer_id> <rank> <score> <tag>` with 6-decimal scores.
void write_trec_run(std::ostream& out, const RankedList& list, const std::string& tag);
void write_trec_run(const std::filesystem::path& path, const Run& run, const std::string& tag);

/// Parses a TREC run. Within a query, entries are ordered by score
/// descending, then by the rank column, then by answer id, and re-ranked
/// from 1. Throws RecordError on malformed lines and on a repeated
/// (question, answer) pair.
Run read_trec_run(const std::filesystem::path& path);
Run read_trec_run(std::istream& in, const std::string& name);

}  // namespace cqa
