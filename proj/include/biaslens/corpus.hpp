#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "biaslens/acquisition.hpp"

namespace biaslens {

struct TokenizeConfig {
    bool lowercase = true;
    /// Keep ' between word characters as part of the token ("doctor's").
    bool keep_apostrophes = true;
    /// Keep a single - between word characters as part of the token ("co-stars").
    bool keep_hyphens = true;

    bool operator==(const TokenizeConfig&) const = default;
    std::uint64_t hash() const;
};

/// Half-open token range [begin, end).
struct SentenceSpan {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    std::uint32_t size() const { return end - begin; }
    bool operator==(const SentenceSpan&) const = default;
};

struct TokenSequence {
    std::vector<std::string> tokens;
    std::vector<SentenceSpan> sentences;

    /// Checks ordering, bounds and the no-whitespace rule.
    bool well_formed() const;
    bool operator==(const TokenSequence&) const = default;
};

/// Lowercases and splits on Unicode whitespace and punctuation. A sentence
/// ends at . ! or ? followed by whitespace and an uppercase letter (closing
/// quotes and brackets may intervene) or by the end of the text.
TokenSequence tokenize(std::string_view text, const TokenizeConfig& config = {});

using TermId = std::uint32_t;

/// Interns token strings; ids are dense and assigned in first-seen order.
class TermDictionary {
public:
    TermId intern(std::string_view word);
    std::optional<TermId> find(std::string_view word) const;
    const std::string& word(TermId id) const { return words_[id]; }
    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };
    std::vector<std::string> words_;
    std::unordered_map<std::string, TermId, Hash, std::equal_to<>> index_;
};

struct DocumentMeta {
    std::string id;
    std::optional<Date> date;
    std::string source;

    bool operator==(const DocumentMeta&) const = default;
};

struct Document {
    DocumentMeta meta;
    std::vector<TermId> tokens;
    std::vector<SentenceSpan> sentences;
};

class Corpus;
class SwapTable;
struct CorpusCacheKey;

/// Replaces each token in a swap pair with its partner; metadata is unchanged.
Corpus gender_swap(const Corpus& corpus, const SwapTable& table);
/// Throws FormatError for a wrong magic, unsupported version or truncation.
Corpus load_corpus_cache(const std::filesystem::path& path, CorpusCacheKey* key = nullptr);

/// Immutable tokenized corpus. Document positions follow input order.
class Corpus {
public:
    Corpus() = default;

    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }
    const Document& document(std::size_t pos) const { return documents_[pos]; }
    const std::vector<Document>& documents() const { return documents_; }
    std::size_t token_count() const { return token_count_; }
    const TermDictionary& dictionary() const { return dictionary_; }
    std::optional<std::size_t> position_of(std::string_view id) const;
    TokenSequence token_sequence(std::size_t pos) const;
    const TokenizeConfig& tokenizer() const { return tokenizer_; }

    /// Compares metadata and token strings (term ids may differ).
    bool operator==(const Corpus& other) const;

private:
    friend Corpus build_corpus_from_tokens(std::vector<std::pair<DocumentMeta, TokenSequence>>, const TokenizeConfig&);
    friend Corpus gender_swap(const Corpus&, const SwapTable&);
    friend Corpus load_corpus_cache(const std::filesystem::path&, CorpusCacheKey*);

    void index_documents();

    std::vector<Document> documents_;
    TermDictionary dictionary_;
    std::unordered_map<std::string, std::size_t> id_index_;
    std::size_t token_count_ = 0;
    TokenizeConfig tokenizer_;
};

/// Tokenizes every document (in parallel when threads > 1) and assembles a
/// corpus in stream order. Throws PreconditionError on a duplicate id.
Corpus build_corpus(const std::vector<RawDocument>& docs, const TokenizeConfig& config = {}, int threads = 1);
Corpus build_corpus_from_tokens(std::vector<std::pair<DocumentMeta, TokenSequence>> docs,
                                const TokenizeConfig& config = {});

/// Ordered subset of a corpus' documents. The parent must outlive the view.
class CorpusView {
public:
    CorpusView() = default;
    CorpusView(const Corpus& parent, std::vector<std::size_t> selected, std::string label);
    static CorpusView all(const Corpus& parent, std::string label = "all");

    const Corpus& parent() const { return *parent_; }
    const std::vector<std::size_t>& selected() const { return selected_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return selected_.size(); }
    bool empty() const { return selected_.empty(); }
    const Document& operator[](std::size_t i) const { return parent_->document(selected_[i]); }
    std::size_t token_count() const;

private:
    const Corpus* parent_ = nullptr;
    std::vector<std::size_t> selected_;
    std::string label_;
};

struct SliceFilter {
    std::optional<int> year_from;
    std::optional<int> year_to;
    std::optional<std::string> source;
    /// Select exactly the documents without a date.
    bool undated_only = false;

    bool operator==(const SliceFilter&) const = default;
};

CorpusView slice(const Corpus& corpus, const SliceFilter& filter, std::string label);

/// Distinct publication years present, ascending.
std::vector<int> years_present(const Corpus& corpus);

/// Symmetric word pairs used for surface-form gender swapping.
class SwapTable {
public:
    SwapTable() = default;
    /// Throws PreconditionError when a word occurs in two pairs or a pair maps a word to itself.
    static SwapTable from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    std::optional<std::string_view> partner(std::string_view word) const;
    const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
    std::unordered_map<std::string, std::string> partner_;
};

/// Pronoun pairs (he/she, him/her, his/hers, himself/herself) plus common
/// gendered nouns. "her" maps to "him" only: surface forms, not grammatical roles.
SwapTable default_swap_table();


// ---------------------------------------------------------------------------
// Tokenized corpus cache

struct CorpusCacheKey {
    std::uint64_t corpus_hash = 0;
    std::uint64_t tokenizer_hash = 0;
    bool operator==(const CorpusCacheKey&) const = default;
};

std::uint64_t hash_documents(const std::vector<RawDocument>& docs);

void save_corpus_cache(const Corpus& corpus, const CorpusCacheKey& key, const std::filesystem::path& path);
bool is_corpus_cache(const std::filesystem::path& path);

/// Loads `cache_path` when its key matches (docs, config), otherwise builds
/// and rewrites it.
Corpus load_or_build_cached(const std::vector<RawDocument>& docs, const TokenizeConfig& config,
                            const std::filesystem::path& cache_path, int threads = 1, bool* cache_hit = nullptr);

}  // namespace biaslens
