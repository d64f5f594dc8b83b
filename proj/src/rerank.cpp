#include "cqa/rerank.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "cqa/error.hpp"

namespace cqa {

StructuredInput build_input(const Question& question, const Answer& answer, const RerankOptions& options) {
    if (options.format == InputFormat::fs) return build_fs_input(question, answer.text, options.ablation);
    if (!options.ablation.empty()) throw std::invalid_argument("segment ablation requires the fs format");
    return build_cat_input(question, answer.text, options.cat_include_tags);
}

RankedList rerank(const RankedList& list, const Corpus& corpus, Scorer& scorer, const RerankOptions& options) {
    if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    const Question* question = corpus.find_question(list.question_id);
    if (!question) throw DataError("run references unknown question " + list.question_id);

    std::vector<std::string> pair_ids;
    pair_ids.reserve(list.entries.size());
    ScoreResponse scores;
    ScoreRequest batch;
    auto flush = [&] {
        if (batch.empty()) return;
        auto part = score_batch(batch, scorer, options.batch_size);
        scores.merge(part);
        batch.clear();
    };
    for (const auto& e : list.entries) {
        const Answer* answer = corpus.find_answer(e.answer_id);
        if (!answer) throw DataError("run references unknown answer " + e.answer_id);
        pair_ids.push_back(list.question_id + "/" + e.answer_id);
        batch.push_back({pair_ids.back(), build_input(*question, *answer, options), options.format});
        if (batch.size() == options.batch_size) flush();
    }
    flush();

    struct Scored {
        const RankedEntry* entry;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(list.entries.size());
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        scored.push_back({&list.entries[i], scores.at(pair_ids[i])});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entry->rank < b.entry->rank;
    });

    RankedList out;
    out.question_id = list.question_id;
    out.entries.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        out.entries.push_back({scored[i].entry->answer_id, scored[i].score, i + 1});
    }
    return out;
}

Run rerank_run(const Run& run, const Corpus& corpus, Scorer& scorer, const RerankOptions& options,
               unsigned threads) {
    std::vector<const RankedList*> inputs;
    inputs.reserve(run.size());
    for (const auto& [qid, list] : run) inputs.push_back(&list);
    std::vector<RankedList> outputs(inputs.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    auto work = [&] {
        for (std::size_t i = next++; i < inputs.size() && !failed; i = next++) {
            try {
                outputs[i] = rerank(*inputs[i], corpus, scorer, options);
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

    Run out;
    for (auto& list : outputs) {
        auto qid = list.question_id;
        out.emplace(std::move(qid), std::move(list));
    }
    return out;
}

}  // namespace cqa
