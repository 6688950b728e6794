#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"

namespace testing_support {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "biaslens") {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline fs::path fixture_dir() { return fs::path(BIASLENS_FIXTURE_DIR); }

// ---------------------------------------------------------------------------
// Randomized corpora kept alongside a plain string representation, so the
// oracles below never look at interned ids.

using Sentence = std::vector<std::string>;
struct RawDoc {
    std::string id;
    std::optional<int> year;
    std::string source;
    std::vector<Sentence> sentences;
};
using RawCorpus = std::vector<RawDoc>;

inline const std::vector<std::string>& random_word_pool() {
    static const std::vector<std::string> pool = {
        "he", "she", "him", "her", "his", "hers", "himself", "herself",
        "male", "female", "nurse", "lawyer", "doctor", "kind", "tall", "pilot",
        "husband", "wife", "boy", "girl", "son", "daughter", "man", "woman", "men", "women",
        "and", "or", "and", "or",
        "mankind", "humanity", "chairman", "chairperson", "statesman", "spokesperson",
        "the", "a", "of", "to", "in", "was", "said", "mice", "house", "time", "day", "went",
    };
    return pool;
}

/// Random corpus of at most `max_tokens` tokens drawn from random_word_pool().
inline RawCorpus random_raw_corpus(std::mt19937_64& rng, std::size_t max_tokens) {
    const auto& pool = random_word_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> sent_len(1, 14);
    std::uniform_int_distribution<int> doc_sents(1, 8);
    std::uniform_int_distribution<int> year(2008, 2011);
    std::uniform_int_distribution<std::size_t> total(0, max_tokens);
    const std::size_t target = total(rng);
    RawCorpus corpus;
    std::size_t used = 0;
    while (used < target) {
        RawDoc d;
        d.id = "doc" + std::to_string(corpus.size());
        if (rng() % 5 != 0) d.year = year(rng);
        d.source = rng() % 2 ? "a" : "b";
        int n = doc_sents(rng);
        for (int s = 0; s < n && used < target; ++s) {
            Sentence sent;
            int len = sent_len(rng);
            for (int t = 0; t < len && used < target; ++t, ++used) sent.push_back(pool[pick(rng)]);
            if (!sent.empty()) d.sentences.push_back(std::move(sent));
        }
        corpus.push_back(std::move(d));
    }
    return corpus;
}

inline biaslens::Corpus to_corpus(const RawCorpus& raw) {
    std::vector<std::pair<biaslens::DocumentMeta, biaslens::TokenSequence>> docs;
    for (const auto& d : raw) {
        biaslens::DocumentMeta meta{d.id, std::nullopt, d.source};
        if (d.year) meta.date = biaslens::Date{*d.year, 3, 1};
        biaslens::TokenSequence seq;
        for (const auto& s : d.sentences) {
            auto begin = static_cast<std::uint32_t>(seq.tokens.size());
            seq.tokens.insert(seq.tokens.end(), s.begin(), s.end());
            seq.sentences.push_back({begin, static_cast<std::uint32_t>(seq.tokens.size())});
        }
        docs.emplace_back(std::move(meta), std::move(seq));
    }
    return biaslens::build_corpus_from_tokens(std::move(docs));
}

// ---------------------------------------------------------------------------
// Naive oracles

inline std::uint64_t count_words(const RawCorpus& raw, const std::set<std::string>& words) {
    std::uint64_t n = 0;
    for (const auto& d : raw)
        for (const auto& s : d.sentences)
            for (const auto& w : s)
                if (words.count(w)) ++n;
    return n;
}

/// head -> frequency for tokens directly after `modifier` inside a sentence.
inline std::map<std::string, std::uint64_t> naive_heads(const RawCorpus& raw, const std::string& modifier) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& d : raw)
        for (const auto& s : d.sentences)
            for (std::size_t i = 0; i + 1 < s.size(); ++i)
                if (s[i] == modifier) ++out[s[i + 1]];
    return out;
}

struct NaiveOrder {
    std::uint64_t male_first = 0;
    std::uint64_t female_first = 0;
};

/// For every coordinator, look outward for the closest pair term on each
/// side; a candidate within `window` tokens whose ends are the two members
/// of one pair is a match. Matches are collected as position sets so a
/// coordination reached from several coordinators counts once.
inline std::vector<NaiveOrder> naive_binomials(const RawCorpus& raw,
                                               const std::vector<std::pair<std::string, std::string>>& pairs,
                                               std::size_t window) {
    std::map<std::string, std::pair<std::size_t, bool>> role;  // word -> (pair, is_male); first pair wins
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        role.emplace(pairs[p].first, std::make_pair(p, true));
        role.emplace(pairs[p].second, std::make_pair(p, false));
    }
    std::vector<NaiveOrder> out(pairs.size());
    for (const auto& d : raw) {
        for (const auto& s : d.sentences) {
            std::set<std::pair<std::size_t, std::size_t>> matched;
            for (std::size_t c = 0; c < s.size(); ++c) {
                if (role.count(s[c]) || (s[c] != "and" && s[c] != "or")) continue;
                std::optional<std::size_t> left, right;
                for (std::size_t l = c; l-- > 0;)
                    if (role.count(s[l])) {
                        left = l;
                        break;
                    }
                for (std::size_t r = c + 1; r < s.size(); ++r)
                    if (role.count(s[r])) {
                        right = r;
                        break;
                    }
                if (!left || !right || *right - *left + 1 > window) continue;
                auto a = role.at(s[*left]);
                auto b = role.at(s[*right]);
                if (a.first != b.first || a.second == b.second) continue;
                if (!matched.insert({*left, *right}).second) continue;
                if (a.second) ++out[a.first].male_first;
                else ++out[a.first].female_first;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Skewed co-occurrence corpus: "x" appears only in sentences with "she",
// "y" only in sentences with "he".

inline RawCorpus skew_raw_corpus(std::uint64_t seed, std::size_t sentences = 1000) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> common = {"the", "a", "day", "went", "said", "home", "time", "over"};
    const std::vector<std::string> she_side = {"garden", "letter", "river", "song", "window", "bread"};
    const std::vector<std::string> he_side = {"engine", "market", "stone", "field", "ship", "coin"};
    RawCorpus raw;
    RawDoc doc;
    for (std::size_t i = 0; i < sentences; ++i) {
        const bool she = i % 2 == 0;
        const auto& side = she ? she_side : he_side;
        Sentence s;
        int len = 5 + static_cast<int>(rng() % 4);
        for (int t = 0; t < len; ++t) {
            s.push_back(rng() % 2 ? side[rng() % side.size()] : common[rng() % common.size()]);
        }
        const auto pronoun = static_cast<std::ptrdiff_t>(rng() % (s.size() + 1));
        s.insert(s.begin() + pronoun, she ? "she" : "he");
        // x (or its mirror y) joins half the sentences, 1-4 tokens after the pronoun. Always-adjacent
        // bigrams predict each other and end up far apart in input space.
        if (rng() % 2) {
            auto at = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(s.size()),
                                               pronoun + 1 + static_cast<std::ptrdiff_t>(rng() % 4));
            s.insert(s.begin() + at, she ? "x" : "y");
        }
        doc.sentences.push_back(std::move(s));
        if (doc.sentences.size() == 10) {
            doc.id = "skew" + std::to_string(raw.size());
            raw.push_back(std::move(doc));
            doc = RawDoc{};
        }
    }
    if (!doc.sentences.empty()) {
        doc.id = "skew" + std::to_string(raw.size());
        raw.push_back(std::move(doc));
    }
    return raw;
}

/// Occurrences of `b` within `window` positions of an occurrence of `a`, same sentence.
inline std::uint64_t cooccurrences(const RawCorpus& raw, const std::string& a, const std::string& b,
                                   std::size_t window) {
    std::uint64_t n = 0;
    for (const auto& d : raw)
        for (const auto& s : d.sentences)
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] != a) continue;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    std::size_t dist = i > j ? i - j : j - i;
                    if (j != i && dist <= window && s[j] == b) ++n;
                }
            }
    return n;
}

// ---------------------------------------------------------------------------
// Embedding oracles (double precision, written out term by term)

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

/// CBOW negative-sampling loss computed directly from its definition.
inline double cbow_loss(const std::vector<double>& input, const std::vector<double>& output, std::size_t dim,
                        const std::vector<std::uint32_t>& context, std::uint32_t target,
                        const std::vector<std::uint32_t>& negatives) {
    std::vector<double> h(dim, 0.0);
    for (auto c : context)
        for (std::size_t d = 0; d < dim; ++d) h[d] += input[c * dim + d] / double(context.size());
    auto row_dot = [&](std::uint32_t id) {
        double s = 0;
        for (std::size_t d = 0; d < dim; ++d) s += h[d] * output[id * dim + d];
        return s;
    };
    auto log_sigmoid = [](double x) { return -std::log(1.0 + std::exp(-x)); };
    double loss = -log_sigmoid(row_dot(target));
    for (auto n : negatives) loss -= log_sigmoid(-row_dot(n));
    return loss;
}

}  // namespace testing_support
