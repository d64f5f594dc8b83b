#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cqa/corpus.hpp"

namespace cqa {

/// Normalized terms in text order.
using TokenStream = std::vector<std::string>;

/// Lowercased alphanumeric runs. No stemming, no stopwords; digits are terms.
TokenStream tokenize(std::string_view text);

using DocIndex = std::uint32_t;
using TermId = std::uint32_t;

struct Posting {
    DocIndex doc;
    std::uint32_t tf;

    bool operator==(const Posting&) const = default;
};

/// Document-level inverted index over answer texts. Terms are numbered in
/// lexicographic order and postings are sorted by document, so two builds
/// over the same input are identical and the on-disk form is canonical.
class InvertedIndex {
public:
    InvertedIndex() = default;

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    std::size_t term_count() const noexcept { return terms_.size(); }
    std::uint64_t collection_length() const noexcept { return collection_length_; }
    double average_doc_length() const noexcept {
        return doc_ids_.empty() ? 0.0
                                : static_cast<double>(collection_length_) / static_cast<double>(doc_ids_.size());
    }

    const std::string& doc_id(DocIndex d) const { return doc_ids_.at(d); }
    std::uint32_t doc_length(DocIndex d) const { return doc_lengths_.at(d); }
    std::optional<DocIndex> find_doc(std::string_view id) const;

    const std::string& term(TermId t) const { return terms_.at(t); }
    std::optional<TermId> find_term(std::string_view term) const;

    std::span<const Posting> postings(TermId t) const { return postings_.at(t); }
    std::size_t document_frequency(TermId t) const { return postings_.at(t).size(); }
    std::uint64_t collection_frequency(TermId t) const { return collection_tf_.at(t); }
    /// tf of `t` in `d`, 0 when absent.
    std::uint32_t term_frequency(TermId t, DocIndex d) const;

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    bool operator==(const InvertedIndex& o) const {
        return doc_ids_ == o.doc_ids_ && doc_lengths_ == o.doc_lengths_ && terms_ == o.terms_ &&
               postings_ == o.postings_ && collection_tf_ == o.collection_tf_ &&
               collection_length_ == o.collection_length_;
    }

    struct Document {
        std::string id;
        std::string_view text;
    };
    /// Throws DataError on a duplicate document id.
    static InvertedIndex build(const std::vector<Document>& docs);

private:
    void rebuild_lookup();

    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<std::uint64_t> collection_tf_;
    std::uint64_t collection_length_ = 0;

    std::unordered_map<std::string, TermId> term_lookup_;
    std::unordered_map<std::string, DocIndex> doc_lookup_;
};

/// Indexes answer texts in the given order.
InvertedIndex build_index(const std::vector<Answer>& answers);

}  // namespace cqa
