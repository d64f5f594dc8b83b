#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cqa/corpus.hpp"
#include "cqa/error.hpp"
#include "cqa/ranked_list.hpp"
#include "cqa/text_index.hpp"

namespace cqa {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    void validate() const;
};

/// Dirichlet-smoothed query likelihood.
struct LmdParams {
    double mu = 1000.0;

    void validate() const;
};

enum class ScorerKind { bm25, lmd };

ScorerKind parse_scorer_kind(std::string_view name);
std::string_view to_string(ScorerKind kind);

/// Which question fields make up the first-stage query text.
struct QueryComposition {
    bool subject = true;
    bool description = true;
    bool tags = true;

    /// Comma-separated subset of "subject,description,tags".
    static QueryComposition parse(std::string_view spec);
};

/// Selected fields joined by single spaces; tags are space-joined.
std::string compose_query(const Question& q, const QueryComposition& composition = {});

/// No query term occurs anywhere in the collection.
class UnscoreableQuery : public DataError {
public:
    using DataError::DataError;
};

/// Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)), summed over
/// distinct query terms. Throws DataError for an unknown answer id.
double bm25_score(const TokenStream& query, std::string_view answer_id, const InvertedIndex& index,
                  const Bm25Params& params = {});

/// sum over query terms with collection frequency > 0 of
/// ln((tf + mu * cf / |C|) / (|d| + mu)). Repeated query terms count again.
/// Throws UnscoreableQuery when every query term is unseen.
double lmd_score(const TokenStream& query, std::string_view answer_id, const InvertedIndex& index,
                 const LmdParams& params = {});

struct RetrievalConfig {
    ScorerKind scorer = ScorerKind::bm25;
    Bm25Params bm25;
    LmdParams lmd;
    std::size_t k = 1000;
    QueryComposition composition;
};

/// Scores every answer sharing at least one term with the query and keeps the
/// best k, ties by ascending answer id. For LMD this candidate restriction
/// is exact only between documents of equal length; see README.
RankedList retrieve(const Question& question, const InvertedIndex& index, const RetrievalConfig& config);

RankedList retrieve_tokens(std::string question_id, const TokenStream& query, const InvertedIndex& index,
                           const RetrievalConfig& config);

using DocScorer = std::function<double(DocIndex)>;

/// Ranks the documents matching any query term by an arbitrary scorer.
RankedList retrieve_with(std::string question_id, const TokenStream& query, const InvertedIndex& index,
                         const DocScorer& scorer, std::size_t k);

/// Top-k of scored candidates: score descending, then answer id ascending.
RankedList select_top_k(std::string question_id, std::vector<std::pair<DocIndex, double>> scored,
                        const InvertedIndex& index, std::size_t k);

/// Retrieves for many questions on `threads` workers (0 = hardware
/// concurrency). Output does not depend on the thread count.
Run retrieve_all(const std::vector<const Question*>& questions, const InvertedIndex& index,
                 const RetrievalConfig& config, unsigned threads = 0);

}  // namespace cqa
