#include "biaslens/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <omp.h>

#include "biaslens/binary_io.hpp"
#include "biaslens/error.hpp"
#include "biaslens/hash.hpp"

namespace biaslens {

namespace fs = std::filesystem;

TermId TermDictionary::intern(std::string_view word) {
    if (auto it = index_.find(word); it != index_.end()) return it->second;
    auto id = static_cast<TermId>(words_.size());
    words_.emplace_back(word);
    index_.emplace(words_.back(), id);
    return id;
}

std::optional<TermId> TermDictionary::find(std::string_view word) const {
    if (auto it = index_.find(word); it != index_.end()) return it->second;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

void Corpus::index_documents() {
    id_index_.clear();
    id_index_.reserve(documents_.size());
    token_count_ = 0;
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (!id_index_.emplace(doc.meta.id, i).second) {
            throw PreconditionError("duplicate document id \"" + doc.meta.id + "\"");
        }
        token_count_ += doc.tokens.size();
    }
}

std::optional<std::size_t> Corpus::position_of(std::string_view id) const {
    if (auto it = id_index_.find(std::string(id)); it != id_index_.end()) return it->second;
    return std::nullopt;
}

TokenSequence Corpus::token_sequence(std::size_t pos) const {
    const Document& doc = documents_.at(pos);
    TokenSequence seq;
    seq.tokens.reserve(doc.tokens.size());
    for (TermId t : doc.tokens) seq.tokens.push_back(dictionary_.word(t));
    seq.sentences = doc.sentences;
    return seq;
}

bool Corpus::operator==(const Corpus& other) const {
    if (documents_.size() != other.documents_.size() || token_count_ != other.token_count_) return false;
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& a = documents_[i];
        const auto& b = other.documents_[i];
        if (!(a.meta == b.meta) || a.sentences != b.sentences || a.tokens.size() != b.tokens.size()) return false;
        for (std::size_t t = 0; t < a.tokens.size(); ++t) {
            if (dictionary_.word(a.tokens[t]) != other.dictionary_.word(b.tokens[t])) return false;
        }
    }
    return true;
}

Corpus build_corpus_from_tokens(std::vector<std::pair<DocumentMeta, TokenSequence>> docs,
                                const TokenizeConfig& config) {
    Corpus corpus;
    corpus.tokenizer_ = config;
    corpus.documents_.reserve(docs.size());
    for (auto& [meta, seq] : docs) {
        Document doc;
        doc.meta = std::move(meta);
        doc.tokens.reserve(seq.tokens.size());
        for (const auto& tok : seq.tokens) doc.tokens.push_back(corpus.dictionary_.intern(tok));
        doc.sentences = std::move(seq.sentences);
        corpus.documents_.push_back(std::move(doc));
    }
    corpus.index_documents();
    return corpus;
}

Corpus build_corpus(const std::vector<RawDocument>& docs, const TokenizeConfig& config, int threads) {
    std::set<std::string_view> ids;
    for (const auto& d : docs) {
        if (!ids.insert(d.id).second) throw PreconditionError("duplicate document id \"" + d.id + "\"");
    }
    std::vector<std::pair<DocumentMeta, TokenSequence>> tokenized(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, threads)) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& d = docs[static_cast<std::size_t>(i)];
        tokenized[static_cast<std::size_t>(i)] = {DocumentMeta{d.id, d.date, d.source}, tokenize(d.text, config)};
    }
    return build_corpus_from_tokens(std::move(tokenized), config);
}

// ---------------------------------------------------------------------------

CorpusView::CorpusView(const Corpus& parent, std::vector<std::size_t> selected, std::string label)
    : parent_(&parent), selected_(std::move(selected)), label_(std::move(label)) {
    for (std::size_t i = 0; i < selected_.size(); ++i) {
        if (selected_[i] >= parent.size()) throw PreconditionError("view position out of range");
        if (i > 0 && selected_[i] <= selected_[i - 1]) throw PreconditionError("view positions must be ascending and unique");
    }
}

CorpusView CorpusView::all(const Corpus& parent, std::string label) {
    std::vector<std::size_t> selected(parent.size());
    for (std::size_t i = 0; i < selected.size(); ++i) selected[i] = i;
    return CorpusView(parent, std::move(selected), std::move(label));
}

std::size_t CorpusView::token_count() const {
    std::size_t n = 0;
    for (std::size_t pos : selected_) n += parent_->document(pos).tokens.size();
    return n;
}

CorpusView slice(const Corpus& corpus, const SliceFilter& filter, std::string label) {
    std::vector<std::size_t> selected;
    bool year_filter = filter.year_from || filter.year_to;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& meta = corpus.document(i).meta;
        if (filter.source && meta.source != *filter.source) continue;
        if (filter.undated_only && meta.date) continue;
        if (year_filter) {
            if (!meta.date) continue;
            if (filter.year_from && meta.date->year < *filter.year_from) continue;
            if (filter.year_to && meta.date->year > *filter.year_to) continue;
        }
        selected.push_back(i);
    }
    return CorpusView(corpus, std::move(selected), std::move(label));
}

std::vector<int> years_present(const Corpus& corpus) {
    std::set<int> years;
    for (const auto& doc : corpus.documents()) {
        if (doc.meta.date) years.insert(doc.meta.date->year);
    }
    return {years.begin(), years.end()};
}

// ---------------------------------------------------------------------------

SwapTable SwapTable::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    SwapTable table;
    for (const auto& [a, b] : pairs) {
        if (a.empty() || b.empty()) throw PreconditionError("swap pair with an empty word");
        if (a == b) throw PreconditionError("swap pair maps \"" + a + "\" to itself");
        for (const auto& w : {a, b}) {
            if (table.partner_.count(w)) throw PreconditionError("word \"" + w + "\" appears in two swap pairs");
        }
        table.partner_.emplace(a, b);
        table.partner_.emplace(b, a);
        table.pairs_.emplace_back(a, b);
    }
    return table;
}

std::optional<std::string_view> SwapTable::partner(std::string_view word) const {
    if (auto it = partner_.find(std::string(word)); it != partner_.end()) return std::string_view(it->second);
    return std::nullopt;
}

SwapTable default_swap_table() {
    return SwapTable::from_pairs({
        {"he", "she"},           {"him", "her"},
        {"his", "hers"},         {"himself", "herself"},
        {"man", "woman"},        {"men", "women"},
        {"boy", "girl"},         {"boys", "girls"},
        {"husband", "wife"},     {"husbands", "wives"},
        {"son", "daughter"},     {"sons", "daughters"},
        {"father", "mother"},    {"fathers", "mothers"},
        {"brother", "sister"},   {"brothers", "sisters"},
        {"uncle", "aunt"},       {"uncles", "aunts"},
        {"nephew", "niece"},     {"nephews", "nieces"},
        {"king", "queen"},       {"kings", "queens"},
        {"gentleman", "lady"},   {"gentlemen", "ladies"},
        {"mr", "mrs"},           {"sir", "madam"},
        {"male", "female"},      {"males", "females"},
        {"boyfriend", "girlfriend"},
    });
}

Corpus gender_swap(const Corpus& corpus, const SwapTable& table) {
    Corpus out;
    out.tokenizer_ = corpus.tokenizer_;
    out.dictionary_ = corpus.dictionary_;
    std::vector<TermId> remap(corpus.dictionary_.size());
    for (TermId id = 0; id < remap.size(); ++id) {
        auto partner = table.partner(corpus.dictionary_.word(id));
        remap[id] = partner ? out.dictionary_.intern(*partner) : id;
    }
    out.documents_ = corpus.documents_;
    for (auto& doc : out.documents_) {
        for (auto& t : doc.tokens) t = remap[t];
    }
    out.id_index_ = corpus.id_index_;
    out.token_count_ = corpus.token_count_;
    return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kCacheMagic = "BLCORPUS";
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

std::uint64_t hash_documents(const std::vector<RawDocument>& docs) {
    Fnv1a h;
    for (const auto& d : docs) {
        h.update(d.id);
        h.update(std::string_view("\0", 1));
        h.update(d.text);
        h.update(std::string_view("\0", 1));
        h.update(d.date ? d.date->to_iso() : std::string("-"));
        h.update(std::string_view("\0", 1));
        h.update(d.source);
        h.update(std::string_view("\x1e", 1));
    }
    return h.digest();
}

void save_corpus_cache(const Corpus& corpus, const CorpusCacheKey& key, const fs::path& path) {
    binary::Writer w;
    w.put_raw(kCacheMagic);
    w.put<std::uint32_t>(kCacheVersion);
    w.put<std::uint64_t>(key.corpus_hash);
    w.put<std::uint64_t>(key.tokenizer_hash);
    const auto& tk = corpus.tokenizer();
    w.put<std::uint8_t>(tk.lowercase);
    w.put<std::uint8_t>(tk.keep_apostrophes);
    w.put<std::uint8_t>(tk.keep_hyphens);
    const auto& words = corpus.dictionary().words();
    w.put<std::uint64_t>(words.size());
    for (const auto& word : words) w.put_string(word);
    w.put<std::uint64_t>(corpus.size());
    for (const auto& doc : corpus.documents()) {
        w.put_string(doc.meta.id);
        w.put_string(doc.meta.source);
        w.put<std::uint8_t>(doc.meta.date.has_value());
        if (doc.meta.date) {
            w.put<std::int32_t>(doc.meta.date->year);
            w.put<std::uint8_t>(static_cast<std::uint8_t>(doc.meta.date->month));
            w.put<std::uint8_t>(static_cast<std::uint8_t>(doc.meta.date->day));
        }
        w.put<std::uint64_t>(doc.tokens.size());
        for (TermId t : doc.tokens) w.put<std::uint32_t>(t);
        w.put<std::uint64_t>(doc.sentences.size());
        for (const auto& s : doc.sentences) {
            w.put<std::uint32_t>(s.begin);
            w.put<std::uint32_t>(s.end);
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

bool is_corpus_cache(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[8] = {};
    in.read(magic, sizeof magic);
    return in && std::string_view(magic, sizeof magic) == kCacheMagic;
}

Corpus load_corpus_cache(const fs::path& path, CorpusCacheKey* key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    binary::Reader r(data, path.string());
    if (r.get_raw(kCacheMagic.size()) != kCacheMagic) throw FormatError(path.string() + ": not a corpus cache");
    auto version = r.get<std::uint32_t>();
    if (version != kCacheVersion) {
        throw FormatError(path.string() + ": unsupported corpus cache version " + std::to_string(version));
    }
    CorpusCacheKey k;
    k.corpus_hash = r.get<std::uint64_t>();
    k.tokenizer_hash = r.get<std::uint64_t>();
    Corpus corpus;
    corpus.tokenizer_.lowercase = r.get<std::uint8_t>() != 0;
    corpus.tokenizer_.keep_apostrophes = r.get<std::uint8_t>() != 0;
    corpus.tokenizer_.keep_hyphens = r.get<std::uint8_t>() != 0;
    auto n_words = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n_words; ++i) {
        auto word = r.get_string();
        if (corpus.dictionary_.intern(word) != i) throw FormatError(path.string() + ": duplicate dictionary entry");
    }
    auto n_docs = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        Document doc;
        doc.meta.id = r.get_string();
        doc.meta.source = r.get_string();
        if (r.get<std::uint8_t>()) {
            Date d;
            d.year = r.get<std::int32_t>();
            d.month = r.get<std::uint8_t>();
            d.day = r.get<std::uint8_t>();
            doc.meta.date = d;
        }
        auto n_tokens = r.get<std::uint64_t>();
        r.need(n_tokens * 4);
        doc.tokens.resize(n_tokens);
        for (auto& t : doc.tokens) {
            t = r.get<std::uint32_t>();
            if (t >= n_words) throw FormatError(path.string() + ": term id out of range");
        }
        auto n_sent = r.get<std::uint64_t>();
        r.need(n_sent * 8);
        doc.sentences.resize(n_sent);
        for (auto& s : doc.sentences) {
            s.begin = r.get<std::uint32_t>();
            s.end = r.get<std::uint32_t>();
            if (s.begin >= s.end || s.end > n_tokens) throw FormatError(path.string() + ": bad sentence span");
        }
        corpus.documents_.push_back(std::move(doc));
    }
    if (r.remaining() != 0) throw FormatError(path.string() + ": trailing bytes");
    corpus.index_documents();
    if (key) *key = k;
    return corpus;
}

Corpus load_or_build_cached(const std::vector<RawDocument>& docs, const TokenizeConfig& config,
                            const fs::path& cache_path, int threads, bool* cache_hit) {
    CorpusCacheKey want{hash_documents(docs), config.hash()};
    if (cache_hit) *cache_hit = false;
    if (fs::exists(cache_path) && is_corpus_cache(cache_path)) {
        try {
            CorpusCacheKey have;
            Corpus cached = load_corpus_cache(cache_path, &have);
            if (have == want) {
                if (cache_hit) *cache_hit = true;
                return cached;
            }
        } catch (const FormatError&) {
            // stale or damaged cache; rebuild below
        }
    }
    Corpus corpus = build_corpus(docs, config, threads);
    save_corpus_cache(corpus, want, cache_path);
    return corpus;
}

}  // namespace biaslens
