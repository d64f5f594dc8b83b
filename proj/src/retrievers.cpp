#include "cqa/retrievers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace cqa {

void Bm25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw std::invalid_argument("bm25 k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("bm25 b must be in [0, 1]");
}

void LmdParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("lmd mu must be > 0");
}

ScorerKind parse_scorer_kind(std::string_view name) {
    if (name == "bm25") return ScorerKind::bm25;
    if (name == "lmd") return ScorerKind::lmd;
    throw std::invalid_argument("unknown scorer '" + std::string(name) + "' (expected bm25 or lmd)");
}

std::string_view to_string(ScorerKind kind) { return kind == ScorerKind::bm25 ? "bm25" : "lmd"; }

QueryComposition QueryComposition::parse(std::string_view spec) {
    QueryComposition c{false, false, false};
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = std::min(spec.find(',', pos), spec.size());
        const auto part = spec.substr(pos, comma - pos);
        if (part == "subject") {
            c.subject = true;
        } else if (part == "description") {
            c.description = true;
        } else if (part == "tags") {
            c.tags = true;
        } else {
            throw std::invalid_argument("unknown query field '" + std::string(part) + "'");
        }
        pos = comma + 1;
    }
    if (!c.subject && !c.description && !c.tags) throw std::invalid_argument("empty query composition");
    return c;
}

std::string compose_query(const Question& q, const QueryComposition& composition) {
    std::string out;
    auto add = [&](const std::string& part) {
        if (part.empty()) return;
        if (!out.empty()) out += ' ';
        out += part;
    };
    if (composition.subject) add(q.subject);
    if (composition.description) add(q.description);
    if (composition.tags) {
        for (const auto& t : q.tags) add(t);
    }
    return out;
}

namespace {

struct QueryTerm {
    TermId id;
    std::uint32_t count;
};

// Collection-known query terms, distinct, in first-occurrence order.
std::vector<QueryTerm> known_terms(const TokenStream& query, const InvertedIndex& index) {
    std::vector<QueryTerm> out;
    std::unordered_map<TermId, std::size_t> pos;
    for (const auto& tok : query) {
        auto t = index.find_term(tok);
        if (!t) continue;
        auto [it, inserted] = pos.emplace(*t, out.size());
        if (inserted) {
            out.push_back({*t, 1});
        } else {
            ++out[it->second].count;
        }
    }
    return out;
}

DocIndex require_doc(const InvertedIndex& index, std::string_view answer_id) {
    auto d = index.find_doc(answer_id);
    if (!d) throw DataError("answer " + std::string(answer_id) + " is not indexed");
    return *d;
}

double idf(const InvertedIndex& index, TermId t) {
    const auto n = static_cast<double>(index.doc_count());
    const auto df = static_cast<double>(index.document_frequency(t));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_term(double idf, double tf, double doc_len, double avgdl, const Bm25Params& p) {
    const double norm = 1.0 - p.b + p.b * doc_len / avgdl;
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * norm);
}

double lmd_term(std::uint32_t count, double tf, double doc_len, double p_c, double mu) {
    return count * std::log((tf + mu * p_c) / (doc_len + mu));
}

}  // namespace

double bm25_score(const TokenStream& query, std::string_view answer_id, const InvertedIndex& index,
                  const Bm25Params& params) {
    const DocIndex d = require_doc(index, answer_id);
    const double len = index.doc_length(d);
    const double avgdl = index.average_doc_length();
    double score = 0.0;
    for (const auto& qt : known_terms(query, index)) {
        const auto tf = index.term_frequency(qt.id, d);
        if (tf == 0) continue;
        score += bm25_term(idf(index, qt.id), tf, len, avgdl, params);
    }
    return score;
}

double lmd_score(const TokenStream& query, std::string_view answer_id, const InvertedIndex& index,
                 const LmdParams& params) {
    const DocIndex d = require_doc(index, answer_id);
    const auto terms = known_terms(query, index);
    if (terms.empty()) throw UnscoreableQuery("no query term occurs in the collection");
    const double len = index.doc_length(d);
    const double cl = static_cast<double>(index.collection_length());
    double score = 0.0;
    for (const auto& qt : terms) {
        const double p_c = static_cast<double>(index.collection_frequency(qt.id)) / cl;
        score += lmd_term(qt.count, index.term_frequency(qt.id, d), len, p_c, params.mu);
    }
    return score;
}

RankedList select_top_k(std::string question_id, std::vector<std::pair<DocIndex, double>> scored,
                        const InvertedIndex& index, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    auto better = [&](const std::pair<DocIndex, double>& a, const std::pair<DocIndex, double>& b) {
        if (a.second != b.second) return a.second > b.second;
        return index.doc_id(a.first) < index.doc_id(b.first);
    };
    const auto keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
    RankedList out;
    out.question_id = std::move(question_id);
    out.entries.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.entries.push_back({index.doc_id(scored[i].first), scored[i].second, i + 1});
    }
    return out;
}

RankedList retrieve_tokens(std::string question_id, const TokenStream& query, const InvertedIndex& index,
                           const RetrievalConfig& config) {
    if (config.k == 0) throw std::invalid_argument("k must be positive");
    if (index.doc_count() == 0) throw DataError("cannot retrieve from an empty index");
    const auto terms = known_terms(query, index);

    // Term-at-a-time accumulation. Each document sums its terms in query
    // order, so scores equal bm25_score / lmd_score bit for bit.
    const std::size_t n = index.doc_count();
    std::vector<double> acc(n, 0.0);
    std::vector<char> hit(n, 0);
    std::vector<DocIndex> candidates;
    for (const auto& qt : terms) {
        for (const auto& p : index.postings(qt.id)) {
            if (!hit[p.doc]) {
                hit[p.doc] = 1;
                candidates.push_back(p.doc);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());

    if (config.scorer == ScorerKind::bm25) {
        const double avgdl = index.average_doc_length();
        for (const auto& qt : terms) {
            const double w = idf(index, qt.id);
            for (const auto& p : index.postings(qt.id)) {
                acc[p.doc] += bm25_term(w, p.tf, index.doc_length(p.doc), avgdl, config.bm25);
            }
        }
    } else {
        const double cl = static_cast<double>(index.collection_length());
        std::vector<std::uint32_t> tf(n, 0);
        for (const auto& qt : terms) {
            for (const auto& p : index.postings(qt.id)) tf[p.doc] = p.tf;
            const double p_c = static_cast<double>(index.collection_frequency(qt.id)) / cl;
            for (DocIndex d : candidates) {
                acc[d] += lmd_term(qt.count, tf[d], index.doc_length(d), p_c, config.lmd.mu);
            }
            for (const auto& p : index.postings(qt.id)) tf[p.doc] = 0;
        }
    }

    std::vector<std::pair<DocIndex, double>> scored;
    scored.reserve(candidates.size());
    for (DocIndex d : candidates) scored.emplace_back(d, acc[d]);
    return select_top_k(std::move(question_id), std::move(scored), index, config.k);
}

RankedList retrieve(const Question& question, const InvertedIndex& index, const RetrievalConfig& config) {
    return retrieve_tokens(question.id, tokenize(compose_query(question, config.composition)), index, config);
}

RankedList retrieve_with(std::string question_id, const TokenStream& query, const InvertedIndex& index,
                         const DocScorer& scorer, std::size_t k) {
    std::vector<char> hit(index.doc_count(), 0);
    std::vector<std::pair<DocIndex, double>> scored;
    for (const auto& qt : known_terms(query, index)) {
        for (const auto& p : index.postings(qt.id)) {
            if (!hit[p.doc]) {
                hit[p.doc] = 1;
                scored.emplace_back(p.doc, 0.0);
            }
        }
    }
    for (auto& [d, s] : scored) s = scorer(d);
    return select_top_k(std::move(question_id), std::move(scored), index, k);
}

Run retrieve_all(const std::vector<const Question*>& questions, const InvertedIndex& index,
                 const RetrievalConfig& config, unsigned threads) {
    config.bm25.validate();
    config.lmd.validate();
    std::vector<RankedList> lists(questions.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < questions.size() && !failed; i = next++) {
            try {
                lists[i] = retrieve(*questions[i], index, config);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);
    Run run;
    for (auto& list : lists) {
        auto qid = list.question_id;
        run.emplace(std::move(qid), std::move(list));
    }
    return run;
}

}  // namespace cqa
