#include "cqa/ablation.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "cqa/mock_scorers.hpp"
#include "test_util.hpp"

using namespace cqa;
using namespace cqa::testing;

namespace {

// Each question's relevant answer repeats the question's tag and nothing
// else from the query, and sits last in the first-stage list. Distractors
// repeat subject words instead.
struct Fixture {
    Corpus corpus;
    cqa::Run run;
    Qrels qrels;
};

Fixture tag_fixture() {
    std::vector<Question> qs;
    std::vector<Answer> as;
    cqa::Run run;
    Qrels qrels;
    for (int i = 0; i < 8; ++i) {
        const auto qid = "q" + std::to_string(i);
        const auto tag = "tagword" + std::string(1, static_cast<char>('a' + i));
        qs.push_back(question(qid, "subject words here", "some description", {tag}, i));
        RankedList list{qid, {}};
        for (int a = 0; a < 5; ++a) {
            const auto aid = qid + "_a" + std::to_string(a);
            const bool rel = a == 4;
            as.push_back(answer(aid, qid, rel ? tag + " explained" : "subject words"));
            list.entries.push_back({aid, 10.0 - a, static_cast<std::size_t>(a + 1)});
        }
        run.emplace(qid, list);
        qrels[qid] = {qid + "_a4"};
    }
    return {Corpus(qs, as, {}), run, qrels};
}

double aggregate(const SystemMetrics& row, const std::string& name) {
    for (const auto& r : row.reports)
        if (r.metric_name() == name) return r.aggregate;
    throw std::runtime_error("no metric " + name);
}

}  // namespace

TEST(Ablation, VariantOrderAndMetrics) {
    const auto v = ablation_variants();
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0].drop, AblationSpec{Segment::tags});
    EXPECT_EQ(v[1].drop, AblationSpec{Segment::subject});
    EXPECT_EQ(v[2].drop, AblationSpec{Segment::description});
    EXPECT_TRUE(v[3].drop.empty());
    std::vector<std::string> names;
    for (const auto& m : ablation_metrics()) names.push_back(m.name());
    EXPECT_EQ(names, (std::vector<std::string>{"MAP@1k", "R@100", "R@10", "R@1", "R@1k"}));
}

TEST(Ablation, DroppingTagsHurtsATagDrivenScorer) {
    const auto f = tag_fixture();
    auto scorer = make_tag_overlap_scorer();
    const auto rows = run_ablation(f.run, f.corpus, f.qrels, *scorer);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_DOUBLE_EQ(aggregate(rows[3], "MAP@1k"), 1.0);
    EXPECT_DOUBLE_EQ(aggregate(rows[0], "MAP@1k"), 0.2);
    EXPECT_GT(aggregate(rows[3], "MAP@1k"), aggregate(rows[0], "MAP@1k"));
    for (const auto& row : rows) EXPECT_EQ(aggregate(row, "R@1k"), 1.0) << row.system;
}

TEST(Ablation, FullRowEqualsDirectRerank) {
    const auto f = tag_fixture();
    auto scorer = make_term_overlap_scorer();
    const auto rows = run_ablation(f.run, f.corpus, f.qrels, *scorer);
    const auto direct = evaluate_run(rerank_run(f.run, f.corpus, *scorer, {}), f.qrels, ablation_metrics());
    ASSERT_EQ(rows[3].reports.size(), direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(rows[3].reports[i].aggregate, direct[i].aggregate);
        EXPECT_EQ(rows[3].reports[i].per_query, direct[i].per_query);
    }
}

TEST(Report, TableAndJson) {
    const auto f = tag_fixture();
    auto scorer = make_tag_overlap_scorer();
    const auto rows = run_ablation(f.run, f.corpus, f.qrels, *scorer);
    std::ostringstream table;
    write_metrics_table(table, rows);
    EXPECT_NE(table.str().find("MAP@1k"), std::string::npos);
    EXPECT_NE(table.str().find("1.000"), std::string::npos);
    EXPECT_NE(table.str().find("0.200"), std::string::npos);

    const auto tests = compare_systems({rows[0], rows[3]}, 0.001, 5);
    EXPECT_EQ(tests.size(), ablation_metrics().size());
    for (const auto& t : tests) EXPECT_DOUBLE_EQ(t.corrected_alpha, 0.001 / 5);
    const auto json = metrics_to_json(rows, tests);
    EXPECT_NE(json.find("\"significance\""), std::string::npos);
    EXPECT_THROW(compare_systems({rows[0], rows[1], rows[3]}, 0.001, 2), std::invalid_argument);
}
