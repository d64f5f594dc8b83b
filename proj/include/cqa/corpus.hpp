#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cqa {

using Timestamp = std::chrono::sys_seconds;

struct Question {
    std::string id;
    std::string subject;
    std::string description;
    std::vector<std::string> tags;
    Timestamp timestamp{};
    std::string asker_id;

    bool operator==(const Question&) const = default;
};

struct Answer {
    std::string id;
    std::string question_id;
    std::string text;
    std::string lawyer_id;
    bool questioner_helpful = false;
    std::uint32_t lawyer_agree_count = 0;

    bool operator==(const Answer&) const = default;
};

struct Judgment {
    std::string question_id;
    std::string best_answer_id;

    bool operator==(const Judgment&) const = default;
};

/// Questions, answers and best-answer judgments with referential integrity.
/// Questions keep file order; answers keep file order; judgments are kept in
/// the order they were read.
class Corpus {
public:
    Corpus() = default;

    /// Validates every type invariant and throws DataError on the first
    /// violation.
    Corpus(std::vector<Question> questions, std::vector<Answer> answers,
           std::vector<Judgment> judgments);

    const std::vector<Question>& questions() const noexcept { return questions_; }
    const std::vector<Answer>& answers() const noexcept { return answers_; }
    const std::vector<Judgment>& judgments() const noexcept { return judgments_; }

    const Question* find_question(std::string_view id) const;
    const Answer* find_answer(std::string_view id) const;
    const Judgment* find_judgment(std::string_view question_id) const;

    /// Answers of one question, in corpus order.
    std::vector<const Answer*> answers_of(std::string_view question_id) const;

    bool operator==(const Corpus& other) const {
        return questions_ == other.questions_ && answers_ == other.answers_ &&
               judgments_ == other.judgments_;
    }

private:
    void build_lookup();

    std::vector<Question> questions_;
    std::vector<Answer> answers_;
    std::vector<Judgment> judgments_;
    std::unordered_map<std::string, std::size_t> question_pos_;
    std::unordered_map<std::string, std::size_t> answer_pos_;
    std::unordered_map<std::string, std::size_t> judgment_pos_;
    std::unordered_map<std::string, std::vector<std::size_t>> answers_by_question_;
};

/// Locations of the three corpus files.
struct CorpusPaths {
    std::filesystem::path questions;
    std::filesystem::path answers;
    std::filesystem::path qrels;

    /// `<dir>/questions.jsonl`, `<dir>/answers.jsonl`, `<dir>/qrels.txt`.
    static CorpusPaths in_directory(const std::filesystem::path& dir);
};

/// Reads a corpus. A missing qrels file is treated as "no judgments" so raw,
/// unadjudicated forum dumps load with the same reader.
Corpus load_corpus(const CorpusPaths& paths);
Corpus load_corpus(const std::filesystem::path& dir);

void write_corpus(const Corpus& corpus, const CorpusPaths& paths);
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

std::vector<Question> read_questions(const std::filesystem::path& path);
std::vector<Answer> read_answers(const std::filesystem::path& path);
std::vector<Judgment> read_qrels(const std::filesystem::path& path);
void write_qrels(const std::vector<Judgment>& judgments, const std::filesystem::path& path);

/// RFC 3339 with a `Z` or `±hh:mm` offset; fractional seconds are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);
/// Always UTC, `YYYY-MM-DDThh:mm:ssZ`.
std::string format_rfc3339(Timestamp ts);

}  // namespace cqa
