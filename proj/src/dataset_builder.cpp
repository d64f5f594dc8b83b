#include "cqa/dataset_builder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "cqa/error.hpp"
#include "cqa/utf8.hpp"

namespace cqa {

std::optional<std::string> select_best_answer(const Question& question,
                                              const std::vector<const Answer*>& answers) {
    const Answer* helpful = nullptr;
    const Answer* endorsed = nullptr;
    for (const Answer* a : answers) {
        if (a->question_id != question.id) {
            throw std::invalid_argument("answer " + a->id + " does not belong to question " +
                                        question.id);
        }
        if (a->questioner_helpful) {
            // At most one per question in a valid corpus; smallest id keeps
            // the result order-independent regardless.
            if (!helpful || a->id < helpful->id) helpful = a;
            continue;
        }
        if (a->lawyer_agree_count < kMinLawyerAgrees) continue;
        if (!endorsed || a->lawyer_agree_count > endorsed->lawyer_agree_count ||
            (a->lawyer_agree_count == endorsed->lawyer_agree_count && a->id < endorsed->id)) {
            endorsed = a;
        }
    }
    if (helpful) return helpful->id;
    if (endorsed) return endorsed->id;
    return std::nullopt;
}

std::vector<Judgment> adjudicate(const Corpus& corpus) {
    std::vector<Judgment> out;
    for (const auto& q : corpus.questions()) {
        if (auto best = select_best_answer(q, corpus.answers_of(q.id))) {
            out.push_back({q.id, std::move(*best)});
        }
    }
    return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    return bounded_edit_distance(a, b, std::max(a.size(), b.size()));
}

std::size_t bounded_edit_distance(std::u32string_view a, std::u32string_view b, std::size_t bound) {
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (m - n > bound) return bound + 1;
    if (n == 0) return m;

    // Ukkonen band: only cells with |i - j| <= bound can hold values <= bound.
    // Cells outside the band are never written, so they stay at inf, except
    // the one just left of the band, which is reset every row.
    const std::size_t inf = bound + 1;
    thread_local std::vector<std::size_t> prev, cur;
    prev.assign(m + 1, inf);
    cur.assign(m + 1, inf);
    for (std::size_t j = 0; j <= std::min(m, bound); ++j) prev[j] = j;

    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t lo = i > bound ? i - bound : 1;
        const std::size_t hi = std::min(m, i + bound);
        cur[lo - 1] = lo == 1 && i <= bound ? i : inf;
        std::size_t row_min = cur[lo - 1];
        for (std::size_t j = lo; j <= hi; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            const std::size_t del = prev[j] + 1;
            const std::size_t ins = cur[j - 1] + 1;
            cur[j] = std::min({sub, del, ins, inf});
            row_min = std::min(row_min, cur[j]);
        }
        if (row_min > bound) return inf;
        std::swap(prev, cur);
    }
    return std::min(prev[m], inf);
}

double levenshtein_ratio(std::u32string_view a, std::u32string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 100.0;
    const auto d = edit_distance(a, b);
    return 100.0 * (1.0 - static_cast<double>(d) / static_cast<double>(longest));
}

std::string dedup_text(const Question& q) { return q.subject + " " + q.description; }

namespace {

// Grams are hashed; a collision can only add shared tokens, which costs an
// extra candidate and never a missed pair.
struct GramKey {
    std::uint64_t gram;
    std::uint32_t occurrence;
    bool operator==(const GramKey&) const = default;
};

struct GramKeyHash {
    std::size_t operator()(const GramKey& k) const noexcept {
        return std::hash<std::uint64_t>{}(k.gram * 0x9E3779B97F4A7C15ull ^ k.occurrence);
    }
};

// Each text becomes the set of its (q-gram, occurrence number) tokens, so
// multiset overlap is plain set overlap. Token ids are ranks in ascending
// document frequency, rarest first, and each list is sorted by id.
std::vector<std::vector<std::uint32_t>> gram_tokens(const std::vector<std::u32string>& texts, std::size_t q) {
    std::unordered_map<GramKey, std::uint32_t, GramKeyHash> ids;
    std::vector<std::uint32_t> freq;
    std::vector<std::vector<std::uint32_t>> tokens(texts.size());
    std::unordered_map<std::uint64_t, std::uint32_t> seen;
    for (std::size_t t = 0; t < texts.size(); ++t) {
        const auto& s = texts[t];
        seen.clear();
        for (std::size_t i = 0; i + q <= s.size(); ++i) {
            std::uint64_t gram = 1469598103934665603ull;
            for (std::size_t k = i; k < i + q; ++k) gram = (gram ^ s[k]) * 1099511628211ull;
            const GramKey key{gram, seen[gram]++};
            auto [it, inserted] = ids.emplace(key, static_cast<std::uint32_t>(freq.size()));
            if (inserted) freq.push_back(0);
            ++freq[it->second];
            tokens[t].push_back(it->second);
        }
    }
    std::vector<std::uint32_t> order(freq.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return freq[x] != freq[y] ? freq[x] < freq[y] : x < y; });
    std::vector<std::uint32_t> rank(freq.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    for (auto& list : tokens) {
        for (auto& id : list) id = rank[id];
        std::sort(list.begin(), list.end());
    }
    return tokens;
}

// Longer grams are rarer and prune more, but each edit destroys q of them;
// keep q * slack at or below a half so the filter still bites.
std::size_t gram_size(double slack) {
    for (std::size_t q = 8; q > 3; --q)
        if (static_cast<double>(q) * slack <= 0.5 + 1e-12) return q;
    return 3;
}

}  // namespace

std::vector<DuplicatePair> find_near_duplicates(const std::vector<Question>& questions,
                                                double threshold, unsigned threads) {
    if (!(threshold > 0.0 && threshold <= 100.0)) {
        throw std::invalid_argument("threshold must be in (0, 100]");
    }
    struct Item {
        std::u32string text;
        const std::string* id;
    };
    std::vector<Item> items;
    items.reserve(questions.size());
    for (const auto& q : questions) items.push_back({utf8::decode(dedup_text(q)), &q.id});
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        return x.text.size() != y.text.size() ? x.text.size() < y.text.size() : *x.id < *y.id;
    });
    const std::size_t n = items.size();

    // ratio > t needs distance < len_long * slack; the +1 absorbs rounding
    // and the exact ratio test decides.
    const double slack = 1.0 - threshold / 100.0;
    auto bound_of = [&](std::size_t len) { return static_cast<std::size_t>(static_cast<double>(len) * slack) + 1; };

    // Count filter: texts within distance d share at least
    // L - q + 1 - q * d gram tokens, L the longer length. With d <= L * slack + 1
    // that is at least L * (1 - q * slack) - 2q + 1, which grows with L, so
    // the value at a text's own length holds for every partner at least as
    // long. Prefix filtering on that overlap: two texts sharing tau tokens
    // share one among their first |tokens| - tau + 1 rarest.
    const std::size_t q = gram_size(slack);
    const double growth = 1.0 - static_cast<double>(q) * slack;
    std::vector<std::size_t> prefix(n, 0);
    std::size_t first_filtered = n;  // items before this one skip the filter
    std::vector<std::vector<std::uint32_t>> tokens;
    if (growth > 0.0) {
        std::vector<std::u32string> texts;
        texts.reserve(n);
        for (const auto& it : items) texts.push_back(it.text);
        tokens = gram_tokens(texts, q);
        for (std::size_t i = n; i-- > 0;) {
            const double tau = std::floor(static_cast<double>(items[i].text.size()) * growth -
                                          2.0 * static_cast<double>(q) + 1.0);
            if (tau < 1.0) break;
            first_filtered = i;
            prefix[i] = tokens[i].size() - static_cast<std::size_t>(tau) + 1;
        }
    }
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> postings;
    for (std::size_t i = first_filtered; i < n; ++i) {
        for (std::size_t k = 0; k < prefix[i]; ++k) postings[tokens[i][k]].push_back(static_cast<std::uint32_t>(i));
    }

    std::atomic<std::size_t> next{0};
    auto work = [&](std::vector<DuplicatePair>& found) {
        std::vector<std::uint32_t> candidates;
        std::vector<std::size_t> stamp(n, n);
        auto verify = [&](std::size_t shorter_at, std::size_t longer_at) {
            const auto& shorter = items[shorter_at];
            const auto& longer = items[longer_at];
            const std::size_t len = longer.text.size();
            const auto bound = bound_of(len);
            const auto d = bounded_edit_distance(shorter.text, longer.text, bound);
            if (d > bound) return;
            const double ratio =
                len == 0 ? 100.0 : 100.0 * (1.0 - static_cast<double>(d) / static_cast<double>(len));
            if (ratio > threshold) {
                const auto& x = *shorter.id;
                const auto& y = *longer.id;
                found.push_back(x < y ? DuplicatePair{x, y, ratio} : DuplicatePair{y, x, ratio});
            }
        };
        // Each pair is examined from its later item.
        for (std::size_t j = next++; j < n; j = next++) {
            const std::size_t len = items[j].text.size();
            const std::size_t min_len = len > bound_of(len) ? len - bound_of(len) : 0;
            const auto window = static_cast<std::size_t>(
                std::partition_point(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(j),
                                     [&](const Item& it) { return it.text.size() < min_len; }) -
                items.begin());
            const std::size_t unfiltered_end = j < first_filtered ? j : first_filtered;
            for (std::size_t i = window; i < unfiltered_end; ++i) verify(i, j);
            if (j < first_filtered) continue;
            candidates.clear();
            for (std::size_t k = 0; k < prefix[j]; ++k) {
                for (const auto i : postings.at(tokens[j][k])) {
                    if (i >= j) break;
                    if (i < window || i < first_filtered || stamp[i] == j) continue;
                    stamp[i] = j;
                    candidates.push_back(i);
                }
            }
            // Exact count filter for the pair before the edit distance.
            const auto& tj = tokens[j];
            const auto need = static_cast<std::ptrdiff_t>(len + 1) - static_cast<std::ptrdiff_t>(q) -
                              static_cast<std::ptrdiff_t>(q * bound_of(len));
            for (const auto i : candidates) {
                const auto& ti = tokens[i];
                std::ptrdiff_t shared = 0;
                for (std::size_t x = 0, y = 0; x < ti.size() && y < tj.size();) {
                    if (ti[x] < tj[y]) ++x;
                    else if (tj[y] < ti[x]) ++y;
                    else ++shared, ++x, ++y;
                }
                if (shared >= need) verify(i, j);
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n)));
    std::vector<std::vector<DuplicatePair>> partial(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, std::ref(partial[t]));
        work(partial[0]);
    }
    std::vector<DuplicatePair> out;
    for (auto& p : partial) out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end(), [](const DuplicatePair& x, const DuplicatePair& y) {
        return std::tie(x.first, x.second) < std::tie(y.first, y.second);
    });
    return out;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a), b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

Corpus collapse_duplicates(const Corpus& corpus, const std::vector<DuplicatePair>& pairs) {
    if (pairs.empty()) return corpus;
    const auto& questions = corpus.questions();
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < questions.size(); ++i) index.emplace(questions[i].id, i);

    DisjointSets sets(questions.size());
    for (const auto& p : pairs) {
        auto a = index.find(p.first), b = index.find(p.second);
        if (a == index.end() || b == index.end()) {
            throw DataError("duplicate pair references unknown question " +
                            (a == index.end() ? p.first : p.second));
        }
        sets.unite(a->second, b->second);
    }

    std::vector<std::size_t> length(questions.size());
    for (std::size_t i = 0; i < questions.size(); ++i) {
        length[i] = utf8::length(questions[i].subject) + utf8::length(questions[i].description);
    }
    auto better = [&](std::size_t a, std::size_t b) {
        if (length[a] != length[b]) return length[a] > length[b];
        if (questions[a].timestamp != questions[b].timestamp) {
            return questions[a].timestamp < questions[b].timestamp;
        }
        return questions[a].id < questions[b].id;
    };
    std::unordered_map<std::size_t, std::size_t> survivor_of_root;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto root = sets.find(i);
        auto [it, inserted] = survivor_of_root.emplace(root, i);
        if (!inserted && better(i, it->second)) it->second = i;
    }
    auto survivor = [&](std::size_t i) { return survivor_of_root.at(sets.find(i)); };

    std::vector<Question> kept;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (survivor(i) == i) kept.push_back(questions[i]);
    }

    // A survivor keeps its own helpful mark; a moved answer loses its mark
    // when the survivor already carries one.
    std::unordered_set<std::string> has_helpful;
    for (const auto& a : corpus.answers()) {
        if (a.questioner_helpful && survivor(index.at(a.question_id)) == index.at(a.question_id)) {
            has_helpful.insert(a.question_id);
        }
    }
    std::vector<Answer> answers;
    answers.reserve(corpus.answers().size());
    for (const auto& a : corpus.answers()) {
        Answer moved = a;
        const auto owner = index.at(a.question_id);
        const auto target = survivor(owner);
        if (target != owner) {
            moved.question_id = questions[target].id;
            if (moved.questioner_helpful && !has_helpful.insert(moved.question_id).second) {
                moved.questioner_helpful = false;
            }
        }
        answers.push_back(std::move(moved));
    }

    std::unordered_set<std::string> judged;
    for (const auto& j : corpus.judgments()) {
        const auto owner = index.at(j.question_id);
        if (survivor(owner) == owner) judged.insert(j.question_id);
    }
    std::vector<Judgment> judgments;
    for (const auto& j : corpus.judgments()) {
        const auto owner = index.at(j.question_id);
        const auto target = survivor(owner);
        if (target == owner) {
            judgments.push_back(j);
        } else if (judged.insert(questions[target].id).second) {
            judgments.push_back({questions[target].id, j.best_answer_id});
        }
    }
    return Corpus(std::move(kept), std::move(answers), std::move(judgments));
}

void SplitSpec::validate() const {
    if (denominator == 0 || train == 0 || validation == 0 || test == 0) {
        throw std::invalid_argument("split fractions must be in (0, 1)");
    }
    if (train + validation + test != denominator) {
        throw std::invalid_argument("split fractions must sum to 1");
    }
}

DatasetSplits chronological_split(const std::vector<Question>& questions, const SplitSpec& spec) {
    spec.validate();
    const std::size_t n = questions.size();
    std::vector<const Question*> order;
    order.reserve(n);
    std::unordered_set<std::string_view> seen;
    for (const auto& q : questions) {
        if (!seen.insert(q.id).second) throw DataError("duplicate question id " + q.id);
        order.push_back(&q);
    }
    const std::size_t n_train = n * spec.train / spec.denominator;
    const std::size_t n_val = n * spec.validation / spec.denominator;
    const std::size_t n_test = n - n_train - n_val;
    if (n < 3 || n_train == 0 || n_val == 0 || n_test == 0) {
        throw DataError("cannot split " + std::to_string(n) + " questions into three non-empty parts (" +
                        std::to_string(n_train) + ", " + std::to_string(n_val) + ", " +
                        std::to_string(n_test) + ")");
    }
    std::sort(order.begin(), order.end(), [](const Question* a, const Question* b) {
        return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->id < b->id;
    });
    DatasetSplits out;
    for (std::size_t i = 0; i < n; ++i) {
        auto& bucket = i < n_train ? out.train : i < n_train + n_val ? out.validation : out.test;
        bucket.push_back(order[i]->id);
    }
    return out;
}

void write_splits(const DatasetSplits& splits, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    doc["train"] = splits.train;
    doc["validation"] = splits.validation;
    doc["test"] = splits.test;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(1) << '\n';
}

DatasetSplits read_splits(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        DatasetSplits out;
        out.train = doc.at("train").get<std::vector<std::string>>();
        out.validation = doc.at("validation").get<std::vector<std::string>>();
        out.test = doc.at("test").get<std::vector<std::string>>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": malformed splits manifest: " + e.what());
    }
}

}  // namespace cqa
