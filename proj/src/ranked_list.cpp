#include "cqa/ranked_list.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "cqa/error.hpp"

namespace cqa {

void RankedList::validate() const {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.rank != i + 1) {
            throw DataError("query " + question_id + ": rank " + std::to_string(e.rank) +
                            " at position " + std::to_string(i + 1));
        }
        if (i > 0 && e.score > entries[i - 1].score) {
            throw DataError("query " + question_id + ": score increases at rank " + std::to_string(e.rank));
        }
        if (!seen.insert(e.answer_id).second) {
            throw DataError("query " + question_id + ": duplicate answer " + e.answer_id);
        }
    }
}

void write_trec_run(std::ostream& out, const RankedList& list, const std::string& tag) {
    char score[64];
    for (const auto& e : list.entries) {
        std::snprintf(score, sizeof score, "%.6f", e.score);
        out << list.question_id << " Q0 " << e.answer_id << ' ' << e.rank << ' ' << score << ' ' << tag
            << '\n';
    }
}

void write_trec_run(const std::filesystem::path& path, const Run& run, const std::string& tag) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& [qid, list] : run) write_trec_run(out, list, tag);
    if (!out) throw DataError("write failed: " + path.string());
}

Run read_trec_run(std::istream& in, const std::string& name) {
    Run run;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string qid, q0, aid, rank_s, score_s, tag, extra;
        if (!(ls >> qid >> q0 >> aid >> rank_s >> score_s >> tag) || (ls >> extra)) {
            throw RecordError(name, n, "", "expected '<qid> Q0 <docid> <rank> <score> <tag>'");
        }
        RankedEntry e;
        e.answer_id = aid;
        try {
            std::size_t used = 0;
            const long long r = std::stoll(rank_s, &used);
            if (used != rank_s.size() || r < 0) throw std::invalid_argument(rank_s);
            e.rank = static_cast<std::size_t>(r);
            e.score = std::stod(score_s, &used);
            if (used != score_s.size() || !std::isfinite(e.score)) throw std::invalid_argument(score_s);
        } catch (const std::exception&) {
            throw RecordError(name, n, "", "bad rank or score");
        }
        if (!seen.emplace(qid, aid).second) {
            throw RecordError(name, n, "docid", "duplicate pair (" + qid + ", " + aid + ")");
        }
        auto& list = run[qid];
        list.question_id = qid;
        list.entries.push_back(std::move(e));
    }
    for (auto& [qid, list] : run) {
        std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.answer_id < b.answer_id;
        });
        for (std::size_t i = 0; i < list.entries.size(); ++i) list.entries[i].rank = i + 1;
    }
    return run;
}

Run read_trec_run(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_trec_run(in, path.string());
}

}  // namespace cqa
