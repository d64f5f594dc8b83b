#include "cqa/text_index.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <map>

#include "cqa/error.hpp"
#include "cqa/utf8.hpp"

namespace cqa {

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::string current;
    for (char32_t cp : utf8::decode(text)) {
        if (utf8::is_word_char(cp)) {
            utf8::append(current, utf8::to_lower(cp));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::optional<DocIndex> InvertedIndex::find_doc(std::string_view id) const {
    auto it = doc_lookup_.find(std::string(id));
    if (it == doc_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<TermId> InvertedIndex::find_term(std::string_view term) const {
    auto it = term_lookup_.find(std::string(term));
    if (it == term_lookup_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t InvertedIndex::term_frequency(TermId t, DocIndex d) const {
    const auto& list = postings_.at(t);
    auto it = std::lower_bound(list.begin(), list.end(), d,
                               [](const Posting& p, DocIndex doc) { return p.doc < doc; });
    return it != list.end() && it->doc == d ? it->tf : 0;
}

void InvertedIndex::rebuild_lookup() {
    term_lookup_.clear();
    doc_lookup_.clear();
    term_lookup_.reserve(terms_.size());
    for (TermId t = 0; t < terms_.size(); ++t) term_lookup_.emplace(terms_[t], t);
    doc_lookup_.reserve(doc_ids_.size());
    for (DocIndex d = 0; d < doc_ids_.size(); ++d) doc_lookup_.emplace(doc_ids_[d], d);
}

InvertedIndex InvertedIndex::build(const std::vector<Document>& docs) {
    InvertedIndex index;
    // Ordered map keeps term ids lexicographic without a renumbering pass.
    std::map<std::string, std::vector<Posting>, std::less<>> by_term;
    std::unordered_map<std::string_view, std::uint32_t> counts;
    index.doc_ids_.reserve(docs.size());
    index.doc_lengths_.reserve(docs.size());
    for (const auto& doc : docs) {
        const auto d = static_cast<DocIndex>(index.doc_ids_.size());
        if (!index.doc_lookup_.emplace(doc.id, d).second) {
            throw DataError("duplicate document id " + doc.id);
        }
        index.doc_ids_.push_back(doc.id);
        const auto tokens = tokenize(doc.text);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        index.collection_length_ += tokens.size();
        counts.clear();
        for (const auto& tok : tokens) ++counts[tok];
        for (const auto& [term, tf] : counts) {
            auto it = by_term.find(term);
            if (it == by_term.end()) it = by_term.emplace(std::string(term), std::vector<Posting>{}).first;
            it->second.push_back({d, tf});
        }
    }
    index.terms_.reserve(by_term.size());
    index.postings_.reserve(by_term.size());
    for (auto& [term, list] : by_term) {
        std::uint64_t total = 0;
        for (const auto& p : list) total += p.tf;
        index.terms_.push_back(term);
        index.collection_tf_.push_back(total);
        index.postings_.push_back(std::move(list));
    }
    index.rebuild_lookup();
    return index;
}

InvertedIndex build_index(const std::vector<Answer>& answers) {
    std::vector<InvertedIndex::Document> docs;
    docs.reserve(answers.size());
    for (const auto& a : answers) docs.push_back({a.id, a.text});
    return InvertedIndex::build(docs);
}

// On-disk layout (all integers little-endian), see docs/index_format.md:
//   magic "CQAIDX\0\0", u32 version, u64 collection_length,
//   u64 doc_count, doc_count x { u32 id_len, id bytes, u32 length },
//   u64 term_count, term_count x { u32 term_len, term bytes, u64 cf,
//                                  u64 df, df x { u32 doc, u32 tf } }
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'Q', 'A', 'I', 'D', 'X', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw DataError("cannot write " + path.string());
    }
    template <typename T>
    void uint(T v) {
        std::array<char, sizeof(T)> buf;
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        out_.write(buf.data(), buf.size());
    }
    void bytes(std::string_view s) {
        uint<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    bool ok() const { return static_cast<bool>(out_); }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw DataError("cannot open " + path_);
    }
    template <typename T>
    T uint() {
        std::array<unsigned char, sizeof(T)> buf;
        in_.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (!in_) fail("truncated file");
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }
    std::string bytes() {
        const auto n = uint<std::uint32_t>();
        std::string s(n, '\0');
        in_.read(s.data(), n);
        if (!in_) fail("truncated string");
        return s;
    }
    void raw(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (!in_) fail("truncated header");
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
    [[noreturn]] void fail(const std::string& what) const { throw DataError(path_ + ": " + what); }

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace

void InvertedIndex::save(const std::filesystem::path& path) const {
    Writer w(path);
    w.raw(kMagic.data(), kMagic.size());
    w.uint<std::uint32_t>(kVersion);
    w.uint<std::uint64_t>(collection_length_);
    w.uint<std::uint64_t>(doc_ids_.size());
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
        w.bytes(doc_ids_[d]);
        w.uint<std::uint32_t>(doc_lengths_[d]);
    }
    w.uint<std::uint64_t>(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        w.bytes(terms_[t]);
        w.uint<std::uint64_t>(collection_tf_[t]);
        w.uint<std::uint64_t>(postings_[t].size());
        for (const auto& p : postings_[t]) {
            w.uint<std::uint32_t>(p.doc);
            w.uint<std::uint32_t>(p.tf);
        }
    }
    if (!w.ok()) throw DataError("write failed: " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    Reader r(path);
    std::array<char, 8> magic{};
    r.raw(magic.data(), magic.size());
    if (magic != kMagic) r.fail("not an index file");
    if (const auto v = r.uint<std::uint32_t>(); v != kVersion) {
        r.fail("unsupported index version " + std::to_string(v));
    }
    InvertedIndex index;
    index.collection_length_ = r.uint<std::uint64_t>();
    const auto n_docs = r.uint<std::uint64_t>();
    std::uint64_t length_sum = 0;
    for (std::uint64_t d = 0; d < n_docs; ++d) {
        index.doc_ids_.push_back(r.bytes());
        index.doc_lengths_.push_back(r.uint<std::uint32_t>());
        length_sum += index.doc_lengths_.back();
    }
    if (length_sum != index.collection_length_) r.fail("document lengths do not sum to collection length");
    const auto n_terms = r.uint<std::uint64_t>();
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        index.terms_.push_back(r.bytes());
        if (t > 0 && !(index.terms_[t - 1] < index.terms_[t])) r.fail("terms out of order");
        const auto cf = r.uint<std::uint64_t>();
        const auto df = r.uint<std::uint64_t>();
        if (df > n_docs) r.fail("document frequency exceeds document count");
        std::vector<Posting> list;
        list.reserve(df);
        std::uint64_t total = 0;
        for (std::uint64_t i = 0; i < df; ++i) {
            Posting p{r.uint<std::uint32_t>(), r.uint<std::uint32_t>()};
            if (p.doc >= n_docs || p.tf == 0 || (!list.empty() && list.back().doc >= p.doc)) r.fail("bad posting");
            total += p.tf;
            list.push_back(p);
        }
        if (total != cf) r.fail("collection frequency mismatch for term " + index.terms_[t]);
        index.collection_tf_.push_back(cf);
        index.postings_.push_back(std::move(list));
    }
    if (!r.at_end()) r.fail("trailing bytes");
    index.rebuild_lookup();
    if (index.doc_lookup_.size() != index.doc_ids_.size()) r.fail("duplicate document id");
    return index;
}

}  // namespace cqa
