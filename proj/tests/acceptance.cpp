// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any check fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cqa/dataset_builder.hpp"
#include "cqa/error.hpp"
#include "cqa/eval.hpp"
#include "cqa/mock_scorers.hpp"
#include "cqa/rerank.hpp"
#include "cqa/retrievers.hpp"
#include "cqa/significance.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

int failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body) {
    try {
        const auto note = body();
        std::cout << "PASS " << name << (note.empty() ? "" : " (" + note + ")") << '\n';
    } catch (const Failure& f) {
        ++failures;
        std::cout << "FAIL " << name << ": " << f.what << '\n';
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "FAIL " << name << ": unexpected exception: " << e.what() << '\n';
    }
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

struct Fixture {
    Run run;
    Qrels qrels;
};

// Up to 50 queries over up to 100 documents. Some queries have no run entry
// and some run lists never reach the relevant documents.
Fixture random_fixture(std::mt19937_64& rng, bool single_relevant) {
    Fixture f;
    const std::size_t queries = 1 + rng() % 50, docs = 1 + rng() % 100;
    for (std::size_t q = 0; q < queries; ++q) {
        const auto qid = "q" + std::to_string(q);
        const std::size_t nrel = single_relevant ? 1 : 1 + rng() % std::min<std::size_t>(5, docs);
        auto& rel = f.qrels[qid];
        while (rel.size() < nrel) rel.insert("d" + std::to_string(rng() % docs));
        if (rng() % 10 == 0) continue;
        std::vector<std::string> ids;
        for (std::size_t d = 0; d < docs; ++d) ids.push_back("d" + std::to_string(d));
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(rng() % (docs + 1));
        RankedList list{qid, {}};
        for (std::size_t i = 0; i < ids.size(); ++i)
            list.entries.push_back({ids[i], static_cast<double>(ids.size() - i), i + 1});
        f.run.emplace(qid, std::move(list));
    }
    return f;
}

const std::vector<std::size_t> kCutoffs = {1, 2, 5, 10, 100, 1000};

std::string metric_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    for (int fixture = 0; fixture < 200; ++fixture) {
        const auto f = random_fixture(rng, fixture % 2 == 0);
        std::vector<MetricSpec> specs;
        for (auto k : kCutoffs) specs.push_back({Metric::map, k}), specs.push_back({Metric::recall, k});
        const auto reports = evaluate_run(f.run, f.qrels, specs);
        for (const auto& report : reports) {
            double sum = 0;
            for (const auto& [qid, rel] : f.qrels) {
                const auto it = f.run.find(qid);
                const auto o = it == f.run.end() ? oracle::PrefixScan{}
                                                 : oracle::prefix_scan(it->second.entries, rel, report.spec.k);
                const double expected = report.spec.metric == Metric::map ? o.ap : o.recall;
                const double got = report.per_query.at(qid);
                require(std::fabs(got - expected) <= 1e-12, "fixture " + std::to_string(fixture) + " " +
                                                                report.metric_name() + " " + qid + ": " + fmt(got) +
                                                                " vs " + fmt(expected));
                sum += expected;
            }
            const double mean = sum / static_cast<double>(f.qrels.size());
            require(std::fabs(report.aggregate - mean) <= 1e-12,
                    "fixture " + std::to_string(fixture) + " mean " + report.metric_name());
        }
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(secs < 10.0, "took " + fmt(secs) + " s");
    return "200 fixtures, " + std::to_string(static_cast<int>(secs * 1000)) + " ms";
}

std::string map_equals_mrr() {
    std::mt19937_64 rng(77);
    for (int fixture = 0; fixture < 200; ++fixture) {
        const auto f = random_fixture(rng, true);
        for (auto k : kCutoffs) {
            const auto r = evaluate_run(f.run, f.qrels, std::vector<MetricSpec>{{Metric::map, k}, {Metric::mrr, k}});
            require(r[0].per_query == r[1].per_query, "per-query MAP@" + std::to_string(k) + " != MRR");
            require(r[0].aggregate == r[1].aggregate, "aggregate MAP@" + std::to_string(k) + " != MRR");
        }
    }
    return "200 fixtures";
}

std::string scorer_oracle() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> k1d(0.5, 2.0), bd(0.0, 1.0), mud(10, 3000);
    std::size_t checked = 0;
    for (int c = 0; c < 100; ++c) {
        oracle::MicroCorpus naive;
        std::vector<Answer> answers;
        const int n = 1 + static_cast<int>(rng() % 10);
        for (int d = 0; d < n; ++d) {
            const auto text = random_text(rng, 1, 20, 8);
            answers.push_back(answer("d" + std::to_string(d), "q", text));
            naive.ids.push_back(answers.back().id);
            naive.docs.push_back(tokenize(text));
        }
        const auto index = build_index(answers);
        const Bm25Params bm{c == 0 ? 1.2 : k1d(rng), c == 0 ? 0.75 : bd(rng)};
        const LmdParams lm{c == 0 ? 1000.0 : mud(rng)};
        for (int qn = 0; qn < 5; ++qn) {
            const auto query = tokenize(random_text(rng, 1, 6, 10));
            bool any_seen = false;
            for (const auto& t : query) any_seen |= naive.cf(t) > 0;
            for (int d = 0; d < n; ++d) {
                const double eb = oracle::bm25(naive, query, d, bm.k1, bm.b);
                const double gb = bm25_score(query, naive.ids[d], index, bm);
                require(std::fabs(gb - eb) <= 1e-9 * std::max(1.0, std::fabs(eb)),
                        "bm25 " + fmt(gb) + " vs " + fmt(eb));
                if (!any_seen) continue;
                const double el = oracle::lmd(naive, query, d, lm.mu);
                const double gl = lmd_score(query, naive.ids[d], index, lm);
                require(std::fabs(gl - el) <= 1e-9 * std::max(1.0, std::fabs(el)),
                        "lmd " + fmt(gl) + " vs " + fmt(el));
                checked += 2;
            }
        }
    }
    return std::to_string(checked) + " scores";
}

std::string rerank_set_preservation() {
    std::mt19937_64 rng(99);
    std::vector<std::unique_ptr<Scorer>> mocks;
    mocks.push_back(make_constant_scorer(0.5));
    mocks.push_back(make_length_scorer());
    mocks.push_back(make_tag_overlap_scorer());
    mocks.push_back(make_term_overlap_scorer());
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<Answer> answers;
        RankedList list{"q", {}};
        for (std::size_t i = 0; i < n; ++i) {
            answers.push_back(answer("a" + std::to_string(i), "q", random_text(rng, 1, 30)));
            list.entries.push_back({answers.back().id, static_cast<double>(n - i), i + 1});
        }
        const Corpus corpus({question("q", random_text(rng, 1, 5), random_text(rng, 1, 20), {random_word(rng)})},
                            answers, {});
        std::set<std::string> rel;
        for (int r = 1 + static_cast<int>(rng() % 3); r > 0; --r) rel.insert("a" + std::to_string(rng() % (n + 5)));

        std::uniform_real_distribution<double> u(-1, 1);
        std::map<std::string, double> random_scores;
        for (const auto& a : answers) random_scores[a.id] = u(rng);
        FunctionScorer random_scorer([&](const ScorePair& p) { return random_scores.at(p.pair_id.substr(2)); });
        Scorer& scorer = trial % 5 == 4 ? static_cast<Scorer&>(random_scorer) : *mocks[trial % 4];

        RerankOptions opts;
        opts.format = trial % 2 ? InputFormat::cat : InputFormat::fs;
        opts.batch_size = 1 + rng() % 40;
        const auto out = rerank(list, corpus, scorer, opts);
        require(recall_at_k(out, rel, n) == recall_at_k(list, rel, n), "recall changed on trial " + std::to_string(trial));
        auto a = list.entries, b = out.entries;
        auto by_id = [](auto& x, auto& y) { return x.answer_id < y.answer_id; };
        std::sort(a.begin(), a.end(), by_id);
        std::sort(b.begin(), b.end(), by_id);
        require(a.size() == b.size() &&
                    std::equal(a.begin(), a.end(), b.begin(), [](auto& x, auto& y) { return x.answer_id == y.answer_id; }),
                "candidate set changed on trial " + std::to_string(trial));
        out.validate();
    }
    return "100 lists";
}

// Replaces `count` characters starting at `from` with letters absent from
// the base text.
std::string mutate(std::string s, std::size_t from, std::size_t count, char with) {
    for (std::size_t i = 0; i < count; ++i) s[from + i] = with;
    return s;
}

std::string dedup_correctness() {
    // Dedup text is subject + ' ' + description; subjects are 9 characters so
    // every text is 100 characters long.
    const std::string base_desc(90, 'a');
    const std::string other_desc = std::string(45, 'b') + std::string(45, 'c');
    auto text_q = [](std::string id, std::string desc, long long ts) {
        return question(std::move(id), "subject x", std::move(desc), {}, ts);
    };
    // A~B and B~C at 94 percent, A~C only 88: one component through B.
    const auto a = text_q("A", base_desc, 10);
    const auto b = text_q("B", mutate(base_desc, 0, 6, 'z'), 5);
    const auto c = text_q("C", mutate(mutate(base_desc, 0, 6, 'z'), 40, 6, 'y'), 30);
    // 92 percent pair.
    const auto d = text_q("D", other_desc, 1);
    const auto e = text_q("E", mutate(other_desc, 10, 8, 'q'), 2);
    const auto f = question("F", "unrelated", "please help me with chapter 7 and the homestead exemption rules", {}, 3);
    const std::vector<Question> qs = {a, b, c, d, e, f};

    std::vector<Answer> answers;
    std::vector<Judgment> judgments;
    int n = 0;
    for (const auto& q : qs) {
        for (int i = 0; i < 2; ++i) answers.push_back(answer("ans" + std::to_string(n++), q.id, "text", i == 0 && q.id != "E"));
        judgments.push_back({q.id, answers[answers.size() - 2].id});
    }
    const Corpus corpus(qs, answers, judgments);

    require(oracle::oracle_ratio(dedup_text(d), dedup_text(e)) == 92.0, "pair fixture is not 92% similar");
    require(oracle::oracle_ratio(dedup_text(a), dedup_text(c)) <= 90.0, "chain ends are directly similar");

    const auto pairs = find_near_duplicates(corpus.questions(), 90.0);
    const auto expected_pairs = oracle::oracle_pairs(qs, 90.0);
    require(pairs.size() == expected_pairs.size(), "pair count " + std::to_string(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        require(pairs[i].first == expected_pairs[i].first && pairs[i].second == expected_pairs[i].second &&
                    std::fabs(pairs[i].ratio - expected_pairs[i].ratio) < 1e-9,
                "pair " + pairs[i].first + "~" + pairs[i].second);
    }

    const auto collapsed = collapse_duplicates(corpus, pairs);
    require(collapsed.questions().size() == 3, "kept " + std::to_string(collapsed.questions().size()) + " questions");
    require(collapsed.answers().size() == corpus.answers().size(), "answer count changed");

    // Survivor per component: longest text, then earliest timestamp, then id.
    const auto label = oracle::oracle_components(qs, expected_pairs);
    std::map<std::string, const Question*> survivor;
    for (const auto& q : qs) {
        auto& s = survivor[label.at(q.id)];
        auto key = [](const Question* x) {
            return std::make_tuple(-static_cast<long long>(utf8::length(dedup_text(*x))), x->timestamp, x->id);
        };
        if (!s || key(&q) < key(s)) s = &q;
    }
    std::set<std::string> expected_ids, got_ids;
    for (const auto& [l, q] : survivor) expected_ids.insert(q->id);
    for (const auto& q : collapsed.questions()) got_ids.insert(q.id);
    require(expected_ids == got_ids, "survivors differ from the union-find oracle");
    for (const auto& ans : corpus.answers()) {
        const auto* moved = collapsed.find_answer(ans.id);
        require(moved && moved->question_id == survivor.at(label.at(ans.question_id))->id,
                "answer " + ans.id + " not on its component's survivor");
    }
    return "6 -> 3 questions";
}

std::string split_correctness() {
    std::mt19937_64 rng(5);
    auto make = [&](std::size_t n) {
        std::vector<Question> qs;
        for (std::size_t i = 0; i < n; ++i)
            qs.push_back(question("q" + std::to_string(i), "s", "d", {}, static_cast<long long>(rng() % (n / 2 + 1))));
        std::shuffle(qs.begin(), qs.end(), rng);
        return qs;
    };
    bool threw = false;
    try {
        chronological_split(make(3));
    } catch (const std::exception&) {
        threw = true;
    }
    require(threw, "N=3 did not raise");

    for (auto [n, tr, va, te] : {std::tuple{10, 7, 1, 2}, std::tuple{9846, 6892, 984, 1970}}) {
        const auto qs = make(static_cast<std::size_t>(n));
        const auto s = chronological_split(qs);
        require(s.train.size() == static_cast<std::size_t>(tr) && s.validation.size() == static_cast<std::size_t>(va) &&
                    s.test.size() == static_cast<std::size_t>(te),
                "sizes for N=" + std::to_string(n));
        std::map<std::string, std::pair<Timestamp, std::string>> key;
        for (const auto& q : qs) key[q.id] = {q.timestamp, q.id};
        std::vector<std::string> all;
        for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(all.end(), part->begin(), part->end());
        require(std::set<std::string>(all.begin(), all.end()).size() == qs.size(), "not a partition");
        for (std::size_t i = 1; i < all.size(); ++i)
            require(key.at(all[i - 1]) < key.at(all[i]), "not chronological at position " + std::to_string(i));
    }
    return "N in {3, 10, 9846}";
}

std::string significance_oracle() {
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> noise(0.0, 0.25);
    std::uniform_real_distribution<double> shift(-0.1, 0.1);
    for (int sample = 0; sample < 20; ++sample) {
        const std::size_t n = 2 + rng() % 60;
        const double s = shift(rng);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = std::clamp(0.4 + noise(rng), 0.0, 1.0);
            b[i] = std::clamp(a[i] + s + noise(rng) * 0.5, 0.0, 1.0);
        }
        const auto r = paired_t_test(a, b);
        const auto o = oracle::paired_t(a, b);
        require(std::fabs(r.t_statistic - o.t) <= 1e-6 * std::max(1.0, std::fabs(o.t)),
                "t " + fmt(r.t_statistic) + " vs " + fmt(o.t));
        require(std::fabs(r.p_value - o.p) <= 1e-6, "p " + fmt(r.p_value) + " vs " + fmt(o.p));
    }

    // alpha 0.001: thresholds 0.00025 at m = 4 and 0.000333... at m = 3.
    const auto decisions = bonferroni({0.0003, 0.00034, 0.0001, 0.5}, 0.001, 4);
    require(decisions[0].corrected_alpha == 0.001 / 4, "corrected alpha");
    require(!decisions[0].significant && !decisions[1].significant && decisions[2].significant &&
                !decisions[3].significant,
            "decisions at m=4");
    const auto m3 = bonferroni({0.0003, 0.00034}, 0.001, 3);
    require(m3[0].significant && !m3[1].significant, "decisions at m=3");
    require(!bonferroni({0.01}, 0.05, 5)[0].significant && bonferroni({0.0099}, 0.05, 5)[0].significant,
            "boundary at alpha/m = 0.01");
    return "20 samples";
}

// Only runs when the released corpus is available, laid out as the
// build-dataset output (questions.jsonl, answers.jsonl, qrels.txt,
// splits.json).
void legal_reproduction() {
    const char* dir = std::getenv("CQA_LEGALQA_DIR");
    const std::string name = "BM25 reproduction on the released corpus";
    if (!dir || !*dir) {
        std::cout << "SKIP " << name << " (set CQA_LEGALQA_DIR to run)\n";
        return;
    }
    criterion(name, [&]() -> std::string {
        const auto corpus = load_corpus(std::filesystem::path(dir));
        const auto splits = read_splits(std::filesystem::path(dir) / "splits.json");
        std::vector<const Question*> test;
        for (const auto& id : splits.test) test.push_back(corpus.find_question(id));
        const auto index = build_index(corpus.answers());
        const auto run = retrieve_all(test, index, RetrievalConfig{});
        const auto reports = evaluate_run(run, to_qrels(corpus.judgments()),
                                          std::vector<MetricSpec>{{Metric::map, 1000}, {Metric::recall, 1000},
                                                                  {Metric::recall, 10}});
        const double expected[] = {0.120, 0.542, 0.192};
        std::string note;
        for (std::size_t i = 0; i < 3; ++i) {
            note += reports[i].metric_name() + "=" + fmt(reports[i].aggregate) + " ";
            require(std::fabs(reports[i].aggregate - expected[i]) <= 0.03, note);
        }
        return note;
    });
}

}  // namespace

int main() {
    criterion("metric oracle equivalence", metric_oracle);
    criterion("single-relevant MAP equals MRR", map_equals_mrr);
    criterion("scorer oracle equivalence", scorer_oracle);
    criterion("re-rank set preservation", rerank_set_preservation);
    criterion("dedup correctness", dedup_correctness);
    criterion("split correctness", split_correctness);
    criterion("significance oracle", significance_oracle);
    legal_reproduction();
    return failures == 0 ? 0 : 1;
}
