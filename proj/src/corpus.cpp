#include "cqa/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "cqa/error.hpp"

namespace cqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

struct Violation {
    std::string field;
    std::string message;
};

std::optional<Violation> check_question(const Question& q) {
    if (q.id.empty()) return Violation{"id", "empty id"};
    if (blank(q.subject)) return Violation{"subject", "empty subject"};
    if (blank(q.description)) return Violation{"description", "empty description"};
    for (const auto& tag : q.tags) {
        if (tag.empty()) return Violation{"tags", "empty tag"};
        if (tag.find(';') != std::string::npos) {
            return Violation{"tags", "tag contains ';': " + tag};
        }
    }
    return std::nullopt;
}

std::optional<Violation> check_answer(const Answer& a) {
    if (a.id.empty()) return Violation{"id", "empty id"};
    if (a.question_id.empty()) return Violation{"question_id", "empty question_id"};
    if (blank(a.text)) return Violation{"text", "empty text"};
    return std::nullopt;
}

// Cross-record checks shared by the Corpus constructor and the file loader.
// `where(kind, index)` returns a prefix locating the offending record.
template <typename Where>
void check_integrity(const std::vector<Question>& questions, const std::vector<Answer>& answers,
                     const std::vector<Judgment>& judgments, Where where) {
    std::unordered_set<std::string_view> qids;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (auto v = check_question(questions[i])) {
            throw DataError(where(0, i) + "field '" + v->field + "': " + v->message);
        }
        if (!qids.insert(questions[i].id).second) {
            throw DataError(where(0, i) + "duplicate question id " + questions[i].id);
        }
    }
    std::unordered_map<std::string_view, std::string_view> answer_owner;
    std::unordered_set<std::string_view> helpful_seen;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        const auto& a = answers[i];
        if (auto v = check_answer(a)) {
            throw DataError(where(1, i) + "field '" + v->field + "': " + v->message);
        }
        if (!answer_owner.emplace(a.id, a.question_id).second) {
            throw DataError(where(1, i) + "duplicate answer id " + a.id);
        }
        if (!qids.contains(a.question_id)) {
            throw DataError(where(1, i) + "answer " + a.id + " references unknown question id " +
                            a.question_id);
        }
        if (a.questioner_helpful && !helpful_seen.insert(a.question_id).second) {
            throw DataError(where(1, i) + "question " + a.question_id +
                            " has more than one questioner-helpful answer");
        }
    }
    std::unordered_set<std::string_view> judged;
    for (std::size_t i = 0; i < judgments.size(); ++i) {
        const auto& j = judgments[i];
        if (!qids.contains(j.question_id)) {
            throw DataError(where(2, i) + "judgment references unknown question id " +
                            j.question_id);
        }
        auto owner = answer_owner.find(j.best_answer_id);
        if (owner == answer_owner.end()) {
            throw DataError(where(2, i) + "judgment references unknown answer id " +
                            j.best_answer_id);
        }
        if (owner->second != j.question_id) {
            throw DataError(where(2, i) + "answer " + j.best_answer_id +
                            " does not belong to question " + j.question_id);
        }
        if (!judged.insert(j.question_id).second) {
            throw DataError(where(2, i) + "more than one judgment for question " + j.question_id);
        }
    }
}

const json& require(const json& obj, const char* key, const std::string& file, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw RecordError(file, line, key, "missing");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& file,
                           std::size_t line) {
    const auto& v = require(obj, key, file, line);
    if (!v.is_string()) throw RecordError(file, line, key, "expected a string");
    return v.get<std::string>();
}

template <typename F>
void for_each_line(const fs::path& path, F&& f) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        f(line, lineno);
    }
}

json parse_object(const std::string& line, const std::string& file, std::size_t lineno) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw RecordError(file, lineno, "", std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw RecordError(file, lineno, "", "record is not an object");
    return obj;
}

Question parse_question(const std::string& line, const std::string& file, std::size_t lineno) {
    const json obj = parse_object(line, file, lineno);
    Question q;
    q.id = require_string(obj, "id", file, lineno);
    q.subject = require_string(obj, "subject", file, lineno);
    q.description = require_string(obj, "description", file, lineno);
    const auto& tags = require(obj, "tags", file, lineno);
    if (!tags.is_array()) throw RecordError(file, lineno, "tags", "expected an array");
    for (const auto& t : tags) {
        if (!t.is_string()) throw RecordError(file, lineno, "tags", "expected strings");
        q.tags.push_back(t.get<std::string>());
    }
    const auto ts = require_string(obj, "timestamp", file, lineno);
    auto parsed = parse_rfc3339(ts);
    if (!parsed) throw RecordError(file, lineno, "timestamp", "not RFC 3339: " + ts);
    q.timestamp = *parsed;
    q.asker_id = require_string(obj, "asker_id", file, lineno);
    if (auto v = check_question(q)) throw RecordError(file, lineno, v->field, v->message);
    return q;
}

Answer parse_answer(const std::string& line, const std::string& file, std::size_t lineno) {
    const json obj = parse_object(line, file, lineno);
    Answer a;
    a.id = require_string(obj, "id", file, lineno);
    a.question_id = require_string(obj, "question_id", file, lineno);
    a.text = require_string(obj, "text", file, lineno);
    a.lawyer_id = require_string(obj, "lawyer_id", file, lineno);
    const auto& helpful = require(obj, "questioner_helpful", file, lineno);
    if (!helpful.is_boolean()) {
        throw RecordError(file, lineno, "questioner_helpful", "expected a boolean");
    }
    a.questioner_helpful = helpful.get<bool>();
    const auto& agrees = require(obj, "lawyer_agree_count", file, lineno);
    if (agrees.is_number_unsigned()) {
        const auto n = agrees.get<std::uint64_t>();
        if (n > std::numeric_limits<std::uint32_t>::max()) {
            throw RecordError(file, lineno, "lawyer_agree_count", "out of range");
        }
        a.lawyer_agree_count = static_cast<std::uint32_t>(n);
    } else {
        throw RecordError(file, lineno, "lawyer_agree_count", "expected a non-negative integer");
    }
    if (auto v = check_answer(a)) throw RecordError(file, lineno, v->field, v->message);
    return a;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

Corpus::Corpus(std::vector<Question> questions, std::vector<Answer> answers,
               std::vector<Judgment> judgments)
    : questions_(std::move(questions)),
      answers_(std::move(answers)),
      judgments_(std::move(judgments)) {
    static constexpr const char* kinds[] = {"question", "answer", "judgment"};
    check_integrity(questions_, answers_, judgments_, [](int kind, std::size_t i) {
        return std::string(kinds[kind]) + " #" + std::to_string(i + 1) + ": ";
    });
    build_lookup();
}

void Corpus::build_lookup() {
    for (std::size_t i = 0; i < questions_.size(); ++i) question_pos_.emplace(questions_[i].id, i);
    for (std::size_t i = 0; i < answers_.size(); ++i) {
        answer_pos_.emplace(answers_[i].id, i);
        answers_by_question_[answers_[i].question_id].push_back(i);
    }
    for (std::size_t i = 0; i < judgments_.size(); ++i) {
        judgment_pos_.emplace(judgments_[i].question_id, i);
    }
}

const Question* Corpus::find_question(std::string_view id) const {
    auto it = question_pos_.find(std::string(id));
    return it == question_pos_.end() ? nullptr : &questions_[it->second];
}

const Answer* Corpus::find_answer(std::string_view id) const {
    auto it = answer_pos_.find(std::string(id));
    return it == answer_pos_.end() ? nullptr : &answers_[it->second];
}

const Judgment* Corpus::find_judgment(std::string_view question_id) const {
    auto it = judgment_pos_.find(std::string(question_id));
    return it == judgment_pos_.end() ? nullptr : &judgments_[it->second];
}

std::vector<const Answer*> Corpus::answers_of(std::string_view question_id) const {
    std::vector<const Answer*> out;
    auto it = answers_by_question_.find(std::string(question_id));
    if (it == answers_by_question_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(&answers_[i]);
    return out;
}

CorpusPaths CorpusPaths::in_directory(const fs::path& dir) {
    return {dir / "questions.jsonl", dir / "answers.jsonl", dir / "qrels.txt"};
}

std::vector<Question> read_questions(const fs::path& path) {
    std::vector<Question> out;
    const auto file = path.string();
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        out.push_back(parse_question(line, file, n));
    });
    return out;
}

std::vector<Answer> read_answers(const fs::path& path) {
    std::vector<Answer> out;
    const auto file = path.string();
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        out.push_back(parse_answer(line, file, n));
    });
    return out;
}

namespace {

std::vector<Judgment> read_qrels_lines(const fs::path& path, std::vector<std::size_t>* lines) {
    std::vector<Judgment> out;
    const auto file = path.string();
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        std::istringstream in(line);
        std::string qid, iter, aid, rel, extra;
        if (!(in >> qid >> iter >> aid >> rel) || (in >> extra)) {
            throw RecordError(file, n, "", "expected '<question_id> 0 <answer_id> <relevance>'");
        }
        int relevance = 0;
        try {
            std::size_t used = 0;
            relevance = std::stoi(rel, &used);
            if (used != rel.size()) throw std::invalid_argument(rel);
        } catch (const std::exception&) {
            throw RecordError(file, n, "relevance", "not an integer: " + rel);
        }
        if (relevance > 0) {
            out.push_back({qid, aid});
            if (lines) lines->push_back(n);
        }
    });
    return out;
}

}  // namespace

std::vector<Judgment> read_qrels(const fs::path& path) { return read_qrels_lines(path, nullptr); }

Corpus load_corpus(const CorpusPaths& paths) {
    // Per-record line numbers, so cross-record violations can be located.
    std::vector<std::size_t> qlines, alines, jlines;
    std::vector<Question> questions;
    std::vector<Answer> answers;
    std::vector<Judgment> judgments;

    const auto qfile = paths.questions.string();
    for_each_line(paths.questions, [&](const std::string& line, std::size_t n) {
        questions.push_back(parse_question(line, qfile, n));
        qlines.push_back(n);
    });
    const auto afile = paths.answers.string();
    for_each_line(paths.answers, [&](const std::string& line, std::size_t n) {
        answers.push_back(parse_answer(line, afile, n));
        alines.push_back(n);
    });
    if (fs::exists(paths.qrels)) {
        judgments = read_qrels_lines(paths.qrels, &jlines);
    }

    const std::string files[] = {qfile, afile, paths.qrels.string()};
    const std::vector<std::size_t>* lines[] = {&qlines, &alines, &jlines};
    check_integrity(questions, answers, judgments, [&](int kind, std::size_t i) {
        return files[kind] + ":" + std::to_string((*lines[kind])[i]) + ": ";
    });
    return Corpus(std::move(questions), std::move(answers), std::move(judgments));
}

Corpus load_corpus(const fs::path& dir) { return load_corpus(CorpusPaths::in_directory(dir)); }

void write_qrels(const std::vector<Judgment>& judgments, const fs::path& path) {
    std::vector<std::string> lines;
    lines.reserve(judgments.size());
    for (const auto& j : judgments) lines.push_back(j.question_id + " 0 " + j.best_answer_id + " 1");
    write_lines(path, lines);
}

void write_corpus(const Corpus& corpus, const CorpusPaths& paths) {
    std::vector<std::string> lines;
    lines.reserve(corpus.questions().size());
    for (const auto& q : corpus.questions()) {
        json obj = {{"id", q.id},
                    {"subject", q.subject},
                    {"description", q.description},
                    {"tags", q.tags},
                    {"timestamp", format_rfc3339(q.timestamp)},
                    {"asker_id", q.asker_id}};
        lines.push_back(obj.dump());
    }
    write_lines(paths.questions, lines);

    lines.clear();
    for (const auto& a : corpus.answers()) {
        json obj = {{"id", a.id},
                    {"question_id", a.question_id},
                    {"text", a.text},
                    {"lawyer_id", a.lawyer_id},
                    {"questioner_helpful", a.questioner_helpful},
                    {"lawyer_agree_count", a.lawyer_agree_count}};
        lines.push_back(obj.dump());
    }
    write_lines(paths.answers, lines);
    write_qrels(corpus.judgments(), paths.qrels);
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
    write_corpus(corpus, CorpusPaths::in_directory(dir));
}

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    auto digits = [&](std::size_t pos, std::size_t count) -> std::optional<int> {
        if (pos + count > text.size()) return std::nullopt;
        int v = 0;
        for (std::size_t i = pos; i < pos + count; ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    auto expect = [&](std::size_t pos, std::string_view chars) {
        return pos < text.size() && chars.find(text[pos]) != std::string_view::npos;
    };
    auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
    auto h = digits(11, 2), mi = digits(14, 2), s = digits(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    if (!expect(4, "-") || !expect(7, "-") || !expect(10, "Tt ") || !expect(13, ":") ||
        !expect(16, ":")) {
        return std::nullopt;
    }
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 60) return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == start) return std::nullopt;
    }
    seconds offset{0};
    if (expect(pos, "Zz")) {
        ++pos;
    } else if (expect(pos, "+-")) {
        const int sign = text[pos] == '-' ? -1 : 1;
        auto oh = digits(pos + 1, 2), om = digits(pos + 4, 2);
        if (!oh || !om || !expect(pos + 3, ":") || *oh > 23 || *om > 59) return std::nullopt;
        offset = seconds{sign * (*oh * 3600 + *om * 60)};
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
    const auto local = sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*s};
    return time_point_cast<seconds>(local - offset);
}

std::string format_rfc3339(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace cqa
