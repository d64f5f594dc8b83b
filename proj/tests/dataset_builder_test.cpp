#include "cqa/dataset_builder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "cqa/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cqa;
using namespace cqa::testing;
using oracle::oracle_components;
using oracle::oracle_distance;
using oracle::oracle_pairs;
using oracle::oracle_ratio;

namespace {

std::string text_of_length(std::size_t n, char c = 'x') { return std::string(n, c); }

}  // namespace

TEST(SelectBestAnswer, QuestionerChoiceWinsOverLawyerVotes) {
    const auto q = question("q", "s", "d");
    const auto a1 = answer("A1", "q", "t", true, 0), a2 = answer("A2", "q", "t", false, 5);
    EXPECT_EQ(select_best_answer(q, {&a1, &a2}), "A1");
}

TEST(SelectBestAnswer, ThreeLawyerAgreesQualify) {
    const auto q = question("q", "s", "d");
    const auto a1 = answer("A1", "q", "t", false, 3);
    EXPECT_EQ(select_best_answer(q, {&a1}), "A1");
}

TEST(SelectBestAnswer, TwoAgreesAreNotEnough) {
    const auto q = question("q", "s", "d");
    const auto a1 = answer("A1", "q", "t", false, 2);
    EXPECT_EQ(select_best_answer(q, {&a1}), std::nullopt);
    EXPECT_EQ(select_best_answer(q, {}), std::nullopt);
}

TEST(SelectBestAnswer, TieBreakAndPermutationInvariance) {
    const auto q = question("q", "s", "d");
    std::vector<Answer> pool = {answer("A3", "q", "t", false, 4), answer("A1", "q", "t", false, 4),
                                answer("A2", "q", "t", false, 3), answer("A0", "q", "t", false, 1)};
    std::vector<const Answer*> ptrs;
    for (auto& a : pool) ptrs.push_back(&a);
    std::sort(ptrs.begin(), ptrs.end());
    do {
        EXPECT_EQ(select_best_answer(q, ptrs), "A1");
    } while (std::next_permutation(ptrs.begin(), ptrs.end()));
}

TEST(SelectBestAnswer, RejectsForeignAnswers) {
    const auto q = question("q", "s", "d");
    const auto a = answer("A1", "other", "t");
    EXPECT_THROW(select_best_answer(q, {&a}), std::invalid_argument);
}

TEST(EditDistance, MatchesFullMatrixOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = utf8::decode(random_text(rng, 0, 6, 3));
        const auto b = utf8::decode(random_text(rng, 0, 6, 3));
        const auto expected = oracle_distance(a, b);
        ASSERT_EQ(edit_distance(a, b), expected);
        for (std::size_t bound = 0; bound < 12; ++bound) {
            const auto got = bounded_edit_distance(a, b, bound);
            ASSERT_EQ(got, expected <= bound ? expected : bound + 1) << "bound " << bound;
        }
    }
}

TEST(EditDistance, CountsCodePointsNotBytes) {
    EXPECT_EQ(edit_distance(utf8::decode("caf\xC3\xA9"), utf8::decode("cafe")), 1u);
    EXPECT_DOUBLE_EQ(levenshtein_ratio(U"", U""), 100.0);
}

TEST(FindNearDuplicates, IdenticalQuestionsScore100) {
    std::vector<Question> qs = {question("q2", "please help", "chapter 7 question"),
                                question("q1", "please help", "chapter 7 question")};
    const auto pairs = find_near_duplicates(qs, 90);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0].first, "q1");
    EXPECT_EQ(pairs[0].second, "q2");
    EXPECT_DOUBLE_EQ(pairs[0].ratio, 100.0);
}

TEST(FindNearDuplicates, DisjointQuestionsAreKept) {
    std::vector<Question> qs = {question("q1", "please help me", "with chapter 7"),
                                question("q2", "seeking advice", "regarding divorce filing")};
    EXPECT_TRUE(find_near_duplicates(qs, 90).empty());
}

TEST(FindNearDuplicates, FourSubstitutionsInOneHundredCharacters) {
    // dedup text is subject + ' ' + description = 100 characters
    std::string subject = "abcdefghij";
    std::string description;
    for (int i = 0; i < 89; ++i) description.push_back(static_cast<char>('a' + (i * 7) % 26));
    auto edited = description;
    for (int pos : {3, 30, 55, 80}) edited[pos] = edited[pos] == 'Z' ? 'Y' : 'Z';
    std::vector<Question> qs = {question("a", subject, description), question("b", subject, edited)};
    ASSERT_EQ(utf8::length(dedup_text(qs[0])), 100u);

    const double expected = oracle_ratio(dedup_text(qs[0]), dedup_text(qs[1]));
    ASSERT_DOUBLE_EQ(expected, 100.0 * (1.0 - 4.0 / 100.0));
    const auto pairs = find_near_duplicates(qs, 90);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_DOUBLE_EQ(pairs[0].ratio, expected);
}

TEST(FindNearDuplicates, ThresholdIsStrict) {
    // distance 1 over 10 characters: ratio exactly 90
    std::vector<Question> qs = {question("a", "abcd", "efghi"), question("b", "abcd", "efghX")};
    EXPECT_TRUE(find_near_duplicates(qs, 90).empty());
    EXPECT_EQ(find_near_duplicates(qs, 89.9).size(), 1u);
}

TEST(FindNearDuplicates, MatchesAllPairsOracleAndIgnoresOrder) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Question> qs;
        const std::string base = random_text(rng, 6, 10, 4);
        for (int i = 0; i < 12; ++i) {
            std::string d = base;
            std::uniform_int_distribution<std::size_t> pos(0, d.size() - 1), edits(0, 4);
            for (auto e = edits(rng); e > 0; --e) d[pos(rng)] = 'q';
            if (i % 4 == 3) d = random_text(rng, 3, 8, 4);
            qs.push_back(question("q" + std::to_string(i), "s", d));
        }
        for (double threshold : {80.0, 90.0, 95.0}) {
            const auto expected = oracle_pairs(qs, threshold);
            ASSERT_EQ(find_near_duplicates(qs, threshold, 1), expected);
            auto shuffled = qs;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            ASSERT_EQ(find_near_duplicates(shuffled, threshold, 3), expected);
        }
    }
}

TEST(FindNearDuplicates, RejectsBadThreshold) {
    EXPECT_THROW(find_near_duplicates({}, 0), std::invalid_argument);
    EXPECT_THROW(find_near_duplicates({}, 100.5), std::invalid_argument);
}

TEST(CollapseDuplicates, LongerQuestionKeepsAllAnswers) {
    Corpus c({question("Q1", "s", text_of_length(198)), question("Q2", "s", text_of_length(148))},
             {answer("a1", "Q1", "t"), answer("b1", "Q2", "t"), answer("b2", "Q2", "t")}, {});
    const Corpus out = collapse_duplicates(c, {{"Q1", "Q2", 95}});
    ASSERT_EQ(out.questions().size(), 1u);
    EXPECT_EQ(out.questions()[0].id, "Q1");
    EXPECT_EQ(out.answers_of("Q1").size(), 3u);
}

TEST(CollapseDuplicates, NoPairsIsIdentity) {
    Corpus c({question("Q1", "s", "d"), question("Q2", "s", "e")}, {answer("a", "Q1", "t")}, {{"Q1", "a"}});
    EXPECT_EQ(collapse_duplicates(c, {}), c);
}

TEST(CollapseDuplicates, ChainCollapsesOntoLongest) {
    Corpus c({question("Q1", "s", text_of_length(8)), question("Q2", "s", text_of_length(18)),
              question("Q3", "s", text_of_length(28))},
             {answer("a1", "Q1", "t"), answer("a2", "Q2", "t"), answer("a3", "Q3", "t")}, {});
    const Corpus out = collapse_duplicates(c, {{"Q1", "Q2", 91}, {"Q2", "Q3", 91}});
    ASSERT_EQ(out.questions().size(), 1u);
    EXPECT_EQ(out.questions()[0].id, "Q3");
    EXPECT_EQ(out.answers_of("Q3").size(), 3u);
}

TEST(CollapseDuplicates, SurvivorTieBreaksByTimestampThenId) {
    Corpus c({question("Q2", "s", "same", {}, 10), question("Q1", "s", "same", {}, 20), question("Q0", "s", "same", {}, 20)},
             {}, {});
    auto out = collapse_duplicates(c, {{"Q1", "Q2", 100}, {"Q0", "Q1", 100}});
    ASSERT_EQ(out.questions().size(), 1u);
    EXPECT_EQ(out.questions()[0].id, "Q2");

    Corpus d({question("Q1", "s", "same", {}, 20), question("Q0", "s", "same", {}, 20)}, {}, {});
    EXPECT_EQ(collapse_duplicates(d, {{"Q0", "Q1", 100}}).questions()[0].id, "Q0");
}

TEST(CollapseDuplicates, JudgmentCollisionKeepsSurvivors) {
    Corpus c({question("Q1", "s", "longer text"), question("Q2", "s", "short"), question("Q3", "s", "tiny")},
             {answer("a1", "Q1", "t", true), answer("a2", "Q2", "t", true), answer("a3", "Q3", "t", true)},
             {{"Q1", "a1"}, {"Q2", "a2"}});
    const Corpus out = collapse_duplicates(c, {{"Q1", "Q2", 95}, {"Q1", "Q3", 95}});
    ASSERT_EQ(out.judgments().size(), 1u);
    EXPECT_EQ(out.judgments()[0], (Judgment{"Q1", "a1"}));
    // only the survivor's own answer keeps its helpful mark
    int helpful = 0;
    for (const auto& a : out.answers()) helpful += a.questioner_helpful;
    EXPECT_EQ(helpful, 1);
    EXPECT_TRUE(out.find_answer("a1")->questioner_helpful);
}

TEST(CollapseDuplicates, JudgmentMovesToUnjudgedSurvivor) {
    Corpus c({question("Q1", "s", "longer text"), question("Q2", "s", "short")},
             {answer("a1", "Q1", "t"), answer("a2", "Q2", "t", true)}, {{"Q2", "a2"}});
    const Corpus out = collapse_duplicates(c, {{"Q1", "Q2", 95}});
    ASSERT_EQ(out.judgments().size(), 1u);
    EXPECT_EQ(out.judgments()[0], (Judgment{"Q1", "a2"}));
    EXPECT_TRUE(out.find_answer("a2")->questioner_helpful);
}

TEST(CollapseDuplicates, MatchesUnionFindOracleOnSyntheticCorpus) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Question> qs;
        std::vector<Answer> as;
        std::uniform_int_distribution<std::size_t> len(1, 12), answers(0, 3);
        for (int i = 0; i < 5; ++i) {
            qs.push_back(question("Q" + std::to_string(i), "s", text_of_length(len(rng)), {}, static_cast<long long>(len(rng))));
            for (auto k = answers(rng); k > 0; --k) {
                as.push_back(answer("a" + std::to_string(i) + "_" + std::to_string(k), qs.back().id, "t"));
            }
        }
        std::vector<DuplicatePair> pairs;
        std::bernoulli_distribution edge(0.3);
        for (int i = 0; i < 5; ++i) {
            for (int j = i + 1; j < 5; ++j) {
                if (edge(rng)) pairs.push_back({qs[i].id, qs[j].id, 95});
            }
        }
        const Corpus c(qs, as, {});
        const Corpus out = collapse_duplicates(c, pairs);

        const auto label = oracle_components(qs, pairs);
        std::map<std::string, const Question*> expected_survivor;
        for (const auto& q : qs) {
            auto& best = expected_survivor[label.at(q.id)];
            auto key = [](const Question* x) {
                return std::make_tuple(-static_cast<long>(x->subject.size() + x->description.size()), x->timestamp, x->id);
            };
            if (!best || key(&q) < key(best)) best = &q;
        }
        ASSERT_EQ(out.questions().size(), expected_survivor.size());
        ASSERT_EQ(out.answers().size(), as.size());
        for (const auto& a : as) {
            const auto survivor = expected_survivor.at(label.at(a.question_id))->id;
            ASSERT_EQ(out.find_answer(a.id)->question_id, survivor);
        }
    }
}

TEST(ChronologicalSplit, TenQuestions) {
    std::vector<Question> qs;
    for (int i = 10; i >= 1; --i) qs.push_back(question("t" + std::to_string(i), "s", "d", {}, i));
    const auto s = chronological_split(qs);
    EXPECT_EQ(s.train, (std::vector<std::string>{"t1", "t2", "t3", "t4", "t5", "t6", "t7"}));
    EXPECT_EQ(s.validation, (std::vector<std::string>{"t8"}));
    EXPECT_EQ(s.test, (std::vector<std::string>{"t9", "t10"}));
}

TEST(ChronologicalSplit, TooFewQuestionsIsAnError) {
    for (int n : {0, 1, 2, 3, 9}) {
        std::vector<Question> qs;
        for (int i = 0; i < n; ++i) qs.push_back(question("q" + std::to_string(i), "s", "d", {}, i));
        EXPECT_THROW(chronological_split(qs), DataError) << n;
    }
}

TEST(ChronologicalSplit, LegalQaSizes) {
    std::vector<Question> qs;
    for (int i = 0; i < 9846; ++i) qs.push_back(question("q" + std::to_string(i), "s", "d", {}, i % 977));
    std::mt19937_64 rng(1);
    std::shuffle(qs.begin(), qs.end(), rng);
    const auto s = chronological_split(qs);
    EXPECT_EQ(s.train.size(), 6892u);
    EXPECT_EQ(s.validation.size(), 984u);
    EXPECT_EQ(s.test.size(), 1970u);
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), qs.size());
}

TEST(ChronologicalSplit, EqualTimestampsOrderById) {
    std::vector<Question> qs;
    for (const char* id : {"e", "c", "a", "j", "b", "d", "i", "f", "h", "g"}) qs.push_back(question(id, "s", "d", {}, 5));
    const auto s = chronological_split(qs);
    EXPECT_EQ(s.validation, (std::vector<std::string>{"h"}));
}

TEST(ChronologicalSplit, RejectsDuplicateIdsAndBadSpec) {
    std::vector<Question> qs(10, question("same", "s", "d"));
    EXPECT_THROW(chronological_split(qs), DataError);
    EXPECT_THROW((SplitSpec{70, 10, 10, 100}.validate()), std::invalid_argument);
    EXPECT_THROW((SplitSpec{90, 0, 10, 100}.validate()), std::invalid_argument);
}

TEST(Splits, ManifestRoundTrip) {
    TempDir dir;
    DatasetSplits s{{"a", "b"}, {"c"}, {"d", "e"}};
    write_splits(s, dir / "splits.json");
    const auto back = read_splits(dir / "splits.json");
    EXPECT_EQ(back.train, s.train);
    EXPECT_EQ(back.validation, s.validation);
    EXPECT_EQ(back.test, s.test);
}

TEST(Adjudicate, ProducesOneJudgmentPerQualifyingQuestion) {
    Corpus c({question("q1", "s", "d"), question("q2", "s", "d"), question("q3", "s", "d")},
             {answer("a1", "q1", "t", true), answer("a2", "q2", "t", false, 2), answer("a3", "q3", "t", false, 7)}, {});
    EXPECT_EQ(adjudicate(c), (std::vector<Judgment>{{"q1", "a1"}, {"q3", "a3"}}));
}

TEST(FindNearDuplicates, LongMutatedTextsMatchOracle) {
    // Long enough to go through the gram filter; edits straddle every threshold.
    std::mt19937_64 rng(83);
    for (double threshold : {70.0, 80.0, 85.0, 90.0, 95.0}) {
        std::vector<Question> qs;
        for (int base = 0; base < 6; ++base) {
            const std::string desc = random_text(rng, 10, 40, 20);
            for (int copy = 0; copy < 8; ++copy) {
                std::string t = desc;
                for (int e = static_cast<int>(rng() % 12); e > 0 && !t.empty(); --e) {
                    const auto pos = rng() % t.size();
                    switch (rng() % 3) {
                        case 0: t[pos] = static_cast<char>('a' + rng() % 26); break;
                        case 1: t.erase(pos, 1); break;
                        default: t.insert(pos, 1, static_cast<char>('a' + rng() % 26));
                    }
                }
                if (t.find_first_not_of(' ') == std::string::npos) t = "x";
                qs.push_back(question("q" + std::to_string(base) + "_" + std::to_string(copy), "subj", t));
            }
        }
        const auto expected = oracle_pairs(qs, threshold);
        ASSERT_FALSE(expected.empty());
        for (unsigned threads : {1u, 3u}) {
            const auto got = find_near_duplicates(qs, threshold, threads);
            ASSERT_EQ(got.size(), expected.size()) << threshold;
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].first, expected[i].first);
                EXPECT_EQ(got[i].second, expected[i].second);
                EXPECT_NEAR(got[i].ratio, expected[i].ratio, 1e-9);
            }
        }
    }
}
