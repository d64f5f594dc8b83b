#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cqa/ablation.hpp"
#include "cqa/corpus.hpp"
#include "cqa/dataset_builder.hpp"
#include "cqa/error.hpp"
#include "cqa/eval.hpp"
#include "cqa/mock_scorers.hpp"
#include "cqa/ranked_list.hpp"
#include "cqa/report.hpp"
#include "cqa/rerank.hpp"
#include "cqa/retrievers.hpp"
#include "cqa/scorer_protocol.hpp"
#include "cqa/structured_query.hpp"
#include "cqa/text_index.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, usage = 1, data = 2, transport = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes to `path`, or stdout for "-" / empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cqa::DataError("cannot write " + path);
    fn(out);
    if (!out) throw cqa::DataError("error writing " + path);
}

std::vector<const cqa::Question*> select_questions(const cqa::Corpus& corpus, const std::string& split,
                                                   const std::string& splits_path) {
    std::vector<const cqa::Question*> out;
    if (split == "all") {
        for (const auto& q : corpus.questions()) out.push_back(&q);
        return out;
    }
    const auto splits = cqa::read_splits(splits_path);
    const auto& ids = split == "train" ? splits.train : split == "validation" ? splits.validation : splits.test;
    for (const auto& id : ids) {
        const auto* q = corpus.find_question(id);
        if (!q) throw cqa::DataError("splits manifest names unknown question " + id);
        out.push_back(q);
    }
    return out;
}

std::unique_ptr<cqa::Scorer> make_scorer(const std::string& spec, double timeout_s) {
    if (spec.empty()) throw UsageError("no scorer given: pass --scorer or set CQA_SCORER_ENDPOINT");
    if (spec.rfind("mock:", 0) == 0) return cqa::make_mock_scorer(spec);
    return std::make_unique<cqa::HttpScorer>(
        spec, std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000)));
}

cqa::AblationSpec parse_drop(const std::string& text) { return cqa::AblationSpec::parse(text); }

std::pair<std::string, std::string> named_run(const std::string& arg) {
    if (const auto eq = arg.find('='); eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
    return {fs::path(arg).stem().string(), arg};
}

struct Options {
    // build-dataset
    std::string raw_questions, raw_answers, out_dir;
    double threshold = 90.0;
    // shared
    std::string corpus_dir, index_path, run_path, qrels_path, splits_path, output, json_path;
    std::string split = "test";
    unsigned threads = 0;
    // retrieve
    std::string retriever = "bm25", composition = "subject,description,tags", tag;
    std::size_t k = 1000;
    double k1 = 1.2, b = 0.75, mu = 1000.0;
    // rerank / ablate / render
    std::string scorer, format = "fs", drop;
    std::size_t batch_size = cqa::kDefaultBatchSize;
    double timeout = 60.0;
    bool cat_without_tags = false;
    std::string question_id, answer_id;
    bool render_json = false;
    // evaluate
    std::vector<std::string> runs, metrics;
    std::optional<std::size_t> comparisons;
    double alpha = 0.001;
};

void cmd_build_dataset(const Options& o) {
    const auto questions = cqa::read_questions(o.raw_questions);
    const auto answers = cqa::read_answers(o.raw_answers);
    const cqa::Corpus raw(questions, answers, {});
    spdlog::info("loaded {} questions and {} answers", questions.size(), answers.size());

    const auto pairs = cqa::find_near_duplicates(raw.questions(), o.threshold, o.threads);
    const auto collapsed = cqa::collapse_duplicates(raw, pairs);
    spdlog::info("{} near-duplicate pairs, {} questions remain", pairs.size(), collapsed.questions().size());

    auto judgments = cqa::adjudicate(collapsed);
    const cqa::Corpus corpus(collapsed.questions(), collapsed.answers(), judgments);
    std::vector<cqa::Question> judged;
    for (const auto& q : corpus.questions())
        if (corpus.find_judgment(q.id)) judged.push_back(q);
    spdlog::info("{} questions have a best answer", judged.size());

    const auto splits = cqa::chronological_split(judged);
    fs::create_directories(o.out_dir);
    cqa::write_corpus(corpus, fs::path(o.out_dir));
    cqa::write_splits(splits, fs::path(o.out_dir) / "splits.json");
    with_output((fs::path(o.out_dir) / "duplicates.tsv").string(), [&](std::ostream& out) {
        char ratio[32];
        for (const auto& p : pairs) {
            std::snprintf(ratio, sizeof ratio, "%.4f", p.ratio);
            out << p.first << '\t' << p.second << '\t' << ratio << '\n';
        }
    });
    std::cerr << "train " << splits.train.size() << ", validation " << splits.validation.size() << ", test "
              << splits.test.size() << '\n';
}

void cmd_index(const Options& o) {
    const auto answers = cqa::read_answers(o.raw_answers);
    const auto index = cqa::build_index(answers);
    index.save(o.index_path);
    spdlog::info("indexed {} answers, {} terms", index.doc_count(), index.term_count());
}

void cmd_retrieve(const Options& o) {
    const auto corpus = cqa::load_corpus(fs::path(o.corpus_dir));
    const auto index = cqa::InvertedIndex::load(o.index_path);
    cqa::RetrievalConfig cfg;
    cfg.scorer = cqa::parse_scorer_kind(o.retriever);
    cfg.bm25 = {o.k1, o.b};
    cfg.lmd = {o.mu};
    cfg.bm25.validate();
    cfg.lmd.validate();
    if (o.k == 0) throw UsageError("--k must be positive");
    cfg.k = o.k;
    cfg.composition = cqa::QueryComposition::parse(o.composition);
    const auto splits = o.splits_path.empty() ? (fs::path(o.corpus_dir) / "splits.json").string() : o.splits_path;
    const auto questions = select_questions(corpus, o.split, splits);
    const auto run = cqa::retrieve_all(questions, index, cfg, o.threads);
    const auto tag = o.tag.empty() ? std::string(cqa::to_string(cfg.scorer)) : o.tag;
    with_output(o.output, [&](std::ostream& out) {
        for (const auto& [qid, list] : run) cqa::write_trec_run(out, list, tag);
    });
    spdlog::info("retrieved for {} questions", run.size());
}

cqa::RerankOptions rerank_options(const Options& o) {
    cqa::RerankOptions r;
    r.format = cqa::parse_input_format(o.format);
    r.ablation = parse_drop(o.drop);
    r.cat_include_tags = !o.cat_without_tags;
    if (o.batch_size == 0) throw UsageError("--batch-size must be positive");
    r.batch_size = o.batch_size;
    if (r.format == cqa::InputFormat::cat && !r.ablation.empty())
        throw UsageError("--drop only applies to the fs format");
    return r;
}

void cmd_rerank(const Options& o) {
    const auto opts = rerank_options(o);
    auto scorer = make_scorer(o.scorer, o.timeout);
    const auto corpus = cqa::load_corpus(fs::path(o.corpus_dir));
    const auto first_stage = cqa::read_trec_run(o.run_path);
    const auto run = cqa::rerank_run(first_stage, corpus, *scorer, opts, o.threads);
    const auto tag = o.tag.empty() ? "ce-" + std::string(cqa::to_string(opts.format)) : o.tag;
    with_output(o.output, [&](std::ostream& out) {
        for (const auto& [qid, list] : run) cqa::write_trec_run(out, list, tag);
    });
    spdlog::info("re-ranked {} lists", run.size());
}

std::vector<cqa::MetricSpec> metric_list(const Options& o, std::vector<cqa::MetricSpec> fallback) {
    if (o.metrics.empty()) return fallback;
    std::vector<cqa::MetricSpec> out;
    for (const auto& m : o.metrics) out.push_back(cqa::MetricSpec::parse(m));
    return out;
}

void emit_reports(const Options& o, const std::vector<cqa::SystemMetrics>& rows,
                  const std::vector<cqa::SignificanceResult>& tests) {
    cqa::write_metrics_table(std::cout, rows);
    if (!tests.empty()) {
        std::cout << '\n';
        cqa::write_significance_table(std::cout, tests);
    }
    if (!o.json_path.empty()) {
        with_output(o.json_path, [&](std::ostream& out) { out << cqa::metrics_to_json(rows, tests) << '\n'; });
    }
}

void cmd_evaluate(const Options& o) {
    if (o.runs.size() >= 2 && !o.comparisons)
        throw UsageError("--comparisons is required when evaluating two or more runs");
    const auto qrels = cqa::read_qrels_file(o.qrels_path);
    const auto metrics = metric_list(o, cqa::default_metrics());
    std::vector<cqa::SystemMetrics> rows;
    for (const auto& arg : o.runs) {
        const auto [name, path] = named_run(arg);
        rows.push_back({name, cqa::evaluate_run(cqa::read_trec_run(path), qrels, metrics)});
    }
    std::vector<cqa::SignificanceResult> tests;
    if (rows.size() >= 2) tests = cqa::compare_systems(rows, o.alpha, *o.comparisons);
    emit_reports(o, rows, tests);
}

void cmd_ablate(const Options& o) {
    auto opts = rerank_options(o);
    auto scorer = make_scorer(o.scorer, o.timeout);
    const auto corpus = cqa::load_corpus(fs::path(o.corpus_dir));
    const auto qrels = o.qrels_path.empty() ? cqa::to_qrels(corpus.judgments()) : cqa::read_qrels_file(o.qrels_path);
    const auto first_stage = cqa::read_trec_run(o.run_path);
    const auto metrics = metric_list(o, cqa::ablation_metrics());
    const auto rows = cqa::run_ablation(first_stage, corpus, qrels, *scorer, opts, metrics, o.threads);

    // Each segment-drop row against the full row.
    std::vector<cqa::SignificanceResult> tests;
    if (o.comparisons) {
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            auto part = cqa::compare_systems({rows[i], rows.back()}, o.alpha, *o.comparisons);
            tests.insert(tests.end(), part.begin(), part.end());
        }
        cqa::apply_bonferroni(tests, o.alpha, *o.comparisons);
    }
    emit_reports(o, rows, tests);
}

void cmd_render(const Options& o) {
    const auto opts = rerank_options(o);
    const auto corpus = cqa::load_corpus(fs::path(o.corpus_dir));
    const auto* q = corpus.find_question(o.question_id);
    if (!q) throw cqa::DataError("unknown question " + o.question_id);
    const auto* a = corpus.find_answer(o.answer_id);
    if (!a) throw cqa::DataError("unknown answer " + o.answer_id);
    const auto input = cqa::build_input(*q, *a, opts);
    if (o.render_json) {
        std::cout << cqa::encode_request({{q->id + "/" + a->id, input, opts.format}}) << '\n';
    } else {
        std::cout << cqa::render_query(input) << '\n' << input.answer_text << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community QA answer retrieval: dataset building, lexical retrieval, re-ranking, evaluation"};
    app.set_config("--config", "", "TOML or INI file with default flag values");
    app.require_subcommand(1);
    app.fallthrough();
    int verbosity = 0;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbosity, "More logging on stderr; repeat for debug output");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    Options o;
    auto threads = [&](CLI::App* c) {
        c->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
    };
    auto rerank_flags = [&](CLI::App* c) {
        c->add_option("--scorer", o.scorer, "http://host:port[/path] or mock:constant|length|tag-overlap|term-overlap")
            ->envname("CQA_SCORER_ENDPOINT");
        c->add_option("--batch-size", o.batch_size, "Pairs per scorer request")->capture_default_str();
        c->add_option("--timeout", o.timeout, "Seconds per scorer request")->capture_default_str();
        c->add_flag("--cat-without-tags", o.cat_without_tags, "Leave tags out of the cat query");
    };

    auto* build = app.add_subcommand("build-dataset", "Deduplicate, adjudicate best answers and split");
    build->add_option("--questions", o.raw_questions, "Raw questions JSONL")->required()->check(CLI::ExistingFile);
    build->add_option("--answers", o.raw_answers, "Raw answers JSONL")->required()->check(CLI::ExistingFile);
    build->add_option("--out", o.out_dir, "Output directory")->required();
    build->add_option("--threshold", o.threshold, "Near-duplicate ratio threshold, exclusive")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 100.0));
    threads(build);

    auto* index = app.add_subcommand("index", "Build the answer index");
    index->add_option("--answers", o.raw_answers, "Answers JSONL")->required()->check(CLI::ExistingFile);
    index->add_option("--out", o.index_path, "Index file")->required();

    auto* retrieve = app.add_subcommand("retrieve", "First-stage retrieval to a TREC run");
    retrieve->add_option("--corpus", o.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    retrieve->add_option("--index", o.index_path, "Index file")->required()->check(CLI::ExistingFile);
    retrieve->add_option("--scorer", o.retriever, "bm25 or lmd")
        ->capture_default_str()
        ->check(CLI::IsMember({"bm25", "lmd"}));
    retrieve->add_option("--k", o.k, "Candidates per question")->capture_default_str();
    retrieve->add_option("--k1", o.k1, "BM25 k1")->capture_default_str();
    retrieve->add_option("--b", o.b, "BM25 b")->capture_default_str();
    retrieve->add_option("--mu", o.mu, "LMD mu")->capture_default_str();
    retrieve->add_option("--query", o.composition, "Question fields forming the query")->capture_default_str();
    retrieve->add_option("--split", o.split, "train, validation, test or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"train", "validation", "test", "all"}));
    retrieve->add_option("--splits", o.splits_path, "Splits manifest, default <corpus>/splits.json");
    retrieve->add_option("--tag", o.tag, "Run tag, default the scorer name");
    retrieve->add_option("-o,--out", o.output, "Run file, default stdout");
    threads(retrieve);

    auto* rerank = app.add_subcommand("rerank", "Re-rank a TREC run with a scorer");
    rerank->add_option("--corpus", o.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    rerank->add_option("--run", o.run_path, "First-stage run")->required()->check(CLI::ExistingFile);
    rerank->add_option("--format", o.format, "fs or cat")->capture_default_str()->check(CLI::IsMember({"fs", "cat"}));
    rerank->add_option("--drop", o.drop, "Segments to drop in fs, e.g. T or S,D");
    rerank->add_option("--tag", o.tag, "Run tag, default ce-fs or ce-cat");
    rerank->add_option("-o,--out", o.output, "Run file, default stdout");
    rerank_flags(rerank);
    threads(rerank);

    auto* evaluate = app.add_subcommand("evaluate", "Metrics and significance tests for runs");
    evaluate->add_option("--qrels", o.qrels_path, "TREC qrels")->required()->check(CLI::ExistingFile);
    evaluate->add_option("runs", o.runs, "Run files, optionally NAME=FILE")->required();
    evaluate->add_option("--metrics", o.metrics, "e.g. MAP@1k R@10")->delimiter(',');
    evaluate->add_option("--comparisons", o.comparisons, "Bonferroni m, required for two or more runs")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--alpha", o.alpha, "Family-wise significance level")->capture_default_str();
    evaluate->add_option("--json", o.json_path, "Also write JSON results here");

    auto* ablate = app.add_subcommand("ablate", "Segment-removal study over the fs format");
    ablate->add_option("--corpus", o.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    ablate->add_option("--run", o.run_path, "First-stage run")->required()->check(CLI::ExistingFile);
    ablate->add_option("--qrels", o.qrels_path, "TREC qrels, default the corpus judgments");
    ablate->add_option("--metrics", o.metrics, "Override the metric columns")->delimiter(',');
    ablate->add_option("--comparisons", o.comparisons, "Bonferroni m for variant vs full tests")
        ->check(CLI::PositiveNumber);
    ablate->add_option("--alpha", o.alpha, "Family-wise significance level")->capture_default_str();
    ablate->add_option("--json", o.json_path, "Also write JSON results here");
    rerank_flags(ablate);
    threads(ablate);

    auto* render = app.add_subcommand("render", "Print the scorer input for one question and answer");
    render->add_option("--corpus", o.corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    render->add_option("--question", o.question_id, "Question id")->required();
    render->add_option("--answer", o.answer_id, "Answer id")->required();
    render->add_option("--format", o.format, "fs or cat")->capture_default_str()->check(CLI::IsMember({"fs", "cat"}));
    render->add_option("--drop", o.drop, "Segments to drop in fs");
    render->add_flag("--cat-without-tags", o.cat_without_tags, "Leave tags out of the cat query");
    render->add_flag("--json", o.render_json, "Print the wire request instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Exit::usage;
    }

    auto logger = spdlog::stderr_color_mt("cqa");
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(quiet ? spdlog::level::err
                            : verbosity >= 2 ? spdlog::level::debug
                            : verbosity == 1 ? spdlog::level::info
                                             : spdlog::level::warn);

    try {
        if (*build) cmd_build_dataset(o);
        else if (*index) cmd_index(o);
        else if (*retrieve) cmd_retrieve(o);
        else if (*rerank) cmd_rerank(o);
        else if (*evaluate) cmd_evaluate(o);
        else if (*ablate) cmd_ablate(o);
        else if (*render) cmd_render(o);
    } catch (const cqa::ScorerTransportError& e) {
        spdlog::error("{}", e.what());
        return Exit::transport;
    } catch (const UsageError& e) {
        spdlog::error("{}", e.what());
        return Exit::usage;
    } catch (const std::invalid_argument& e) {
        spdlog::error("{}", e.what());
        return Exit::usage;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return Exit::data;
    }
    return Exit::ok;
}
