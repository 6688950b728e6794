#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "biaslens/corpus.hpp"
#include "biaslens/error.hpp"
#include "support.hpp"

using namespace biaslens;
using testing_support::TempDir;

namespace {

std::vector<std::string> words_of(const Corpus& c, std::size_t doc) { return c.token_sequence(doc).tokens; }

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
    return out;
}

}  // namespace

TEST(Tokenize, SplitsWordsAndSentences) {
    auto seq = tokenize("He left. She stayed!");
    EXPECT_EQ(seq.tokens, (std::vector<std::string>{"he", "left", "she", "stayed"}));
    ASSERT_EQ(seq.sentences.size(), 2u);
    EXPECT_EQ(seq.sentences[0], (SentenceSpan{0, 2}));
    EXPECT_EQ(seq.sentences[1], (SentenceSpan{2, 4}));
    EXPECT_TRUE(seq.well_formed());
}

TEST(Tokenize, EmptyTextHasNoSentences) {
    auto seq = tokenize("");
    EXPECT_TRUE(seq.tokens.empty());
    EXPECT_TRUE(seq.sentences.empty());
    EXPECT_TRUE(tokenize("  \n\t ").sentences.empty());
}

TEST(Tokenize, KeepsAdjacentCompoundWords) {
    auto seq = tokenize("career woman, working mother");
    EXPECT_EQ(seq.tokens, (std::vector<std::string>{"career", "woman", "working", "mother"}));
    EXPECT_EQ(seq.sentences.size(), 1u);
}

TEST(Tokenize, HyphensAndApostrophesInsideWords) {
    auto seq = tokenize("Her co-stars weren't there - the doctor's bag was.");
    EXPECT_EQ(seq.tokens, (std::vector<std::string>{"her", "co-stars", "weren't", "there", "the", "doctor's", "bag",
                                                    "was"}));
    TokenizeConfig split;
    split.keep_hyphens = false;
    split.keep_apostrophes = false;
    EXPECT_EQ(tokenize("co-stars weren't", split).tokens, (std::vector<std::string>{"co", "stars", "weren", "t"}));
}

TEST(Tokenize, NormalizesTypographicApostrophe) {
    EXPECT_EQ(tokenize("Doctor\xe2\x80\x99s").tokens, (std::vector<std::string>{"doctor's"}));
}

TEST(Tokenize, LowercasesBeyondAscii) {
    EXPECT_EQ(tokenize("\xc3\x89LAN").tokens, (std::vector<std::string>{"\xc3\xa9lan"}));
    TokenizeConfig keep;
    keep.lowercase = false;
    EXPECT_EQ(tokenize("He", keep).tokens, (std::vector<std::string>{"He"}));
}

TEST(Tokenize, SentenceNeedsCapitalAfterTerminator) {
    EXPECT_EQ(tokenize("pi is 3.14 exactly. no break here").sentences.size(), 1u);
    EXPECT_EQ(tokenize("\"Go!\" She ran. \"Stop.\"").sentences.size(), 3u);
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
    std::mt19937_64 rng(11);
    const char* samples[] = {"Mr. Bennet was so odd a mixture of quick parts.", "\"Well,\" said she; \"it's co-op day!\"",
                             "Women (and men) queued -- quietly.", "caf\xc3\xa9 \xc3\x9c" "ber na\xc3\xafve"};
    for (const char* s : samples) {
        auto once = tokenize(s);
        auto twice = tokenize(join(once.tokens));
        EXPECT_EQ(once.tokens, twice.tokens) << s;
        EXPECT_EQ(tokenize(s), once);
    }
}

TEST(BuildCorpus, CountsTokensAndKeepsOrder) {
    std::vector<RawDocument> docs = {{"a", "one two three", std::nullopt, "s"}, {"b", "four five six seven", std::nullopt, "s"}};
    auto c = build_corpus(docs);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.token_count(), 7u);
    EXPECT_EQ(c.document(1).meta.id, "b");
    EXPECT_EQ(c.position_of("b"), 1u);
    EXPECT_FALSE(c.position_of("zzz"));
    EXPECT_EQ(words_of(c, 0), (std::vector<std::string>{"one", "two", "three"}));
}

TEST(BuildCorpus, DuplicateIdIsErrorNamingId) {
    std::vector<RawDocument> docs = {{"dup", "x", std::nullopt, ""}, {"dup", "y", std::nullopt, ""}};
    try {
        build_corpus(docs);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("dup"), std::string::npos);
    }
}

TEST(BuildCorpus, EmptyStream) {
    auto c = build_corpus({});
    EXPECT_TRUE(c.empty());
    EXPECT_EQ(c.token_count(), 0u);
}

TEST(BuildCorpus, ParallelTokenizationMatchesSerial) {
    std::vector<RawDocument> docs;
    for (int i = 0; i < 200; ++i) {
        docs.push_back({"d" + std::to_string(i), "He said " + std::to_string(i) + ". She said more!", Date{2000 + i % 3, 1, 1}, "s"});
    }
    EXPECT_EQ(build_corpus(docs, {}, 1), build_corpus(docs, {}, 4));
}

TEST(Slice, YearFilters) {
    std::vector<RawDocument> docs = {{"a", "x", Date{2009, 5, 1}, "g"}, {"b", "y", Date{2010, 1, 1}, "g"}};
    auto c = build_corpus(docs);
    SliceFilter f;
    f.year_from = 2009;
    f.year_to = 2009;
    auto v = slice(c, f, "2009");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].meta.id, "a");
    EXPECT_EQ(v.label(), "2009");
    f.year_from = 1990;
    f.year_to = 1991;
    EXPECT_TRUE(slice(c, f, "none").empty());
    EXPECT_EQ(slice(c, {}, "all").size(), 2u);
    SliceFilter by_source;
    by_source.source = "other";
    EXPECT_TRUE(slice(c, by_source, "s").empty());
}

TEST(Slice, YearsPlusUndatedPartitionTheCorpus) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto raw = testing_support::random_raw_corpus(rng, 2000);
        auto c = testing_support::to_corpus(raw);
        std::vector<std::size_t> seen;
        for (int y : years_present(c)) {
            SliceFilter f;
            f.year_from = y;
            f.year_to = y;
            auto v = slice(c, f, std::to_string(y));
            seen.insert(seen.end(), v.selected().begin(), v.selected().end());
        }
        SliceFilter undated;
        undated.undated_only = true;
        auto u = slice(c, undated, "undated");
        seen.insert(seen.end(), u.selected().begin(), u.selected().end());
        std::sort(seen.begin(), seen.end());
        std::vector<std::size_t> all(c.size());
        std::iota(all.begin(), all.end(), 0);
        EXPECT_EQ(seen, all);
    }
}

TEST(GenderSwap, SurfaceSubstitution) {
    auto c = build_corpus({{"a", "He saw her", std::nullopt, ""}});
    auto s = gender_swap(c, default_swap_table());
    EXPECT_EQ(words_of(s, 0), (std::vector<std::string>{"she", "saw", "him"}));
}

TEST(GenderSwap, InvolutionAndTokenCount) {
    std::mt19937_64 rng(17);
    auto table = default_swap_table();
    for (int trial = 0; trial < 10; ++trial) {
        auto c = testing_support::to_corpus(testing_support::random_raw_corpus(rng, 3000));
        auto s = gender_swap(c, table);
        EXPECT_EQ(s.token_count(), c.token_count());
        EXPECT_EQ(gender_swap(s, table), c);
    }
}

TEST(GenderSwap, NoGenderedTokensUnchanged) {
    auto c = build_corpus({{"a", "The cat sat on the mat.", std::nullopt, ""}});
    EXPECT_EQ(gender_swap(c, default_swap_table()), c);
}

TEST(SwapTable, RejectsRepeatsAndSelfPairs) {
    EXPECT_THROW(SwapTable::from_pairs({{"he", "she"}, {"she", "him"}}), PreconditionError);
    EXPECT_THROW(SwapTable::from_pairs({{"x", "x"}}), PreconditionError);
    auto t = SwapTable::from_pairs({{"he", "she"}});
    EXPECT_EQ(t.partner("she"), "he");
    EXPECT_FALSE(t.partner("it"));
}

TEST(CorpusCache, SaveLoadRoundTripAndKey) {
    TempDir dir;
    std::vector<RawDocument> docs = {{"a", "He left. She stayed!", Date{2009, 1, 1}, "g"}, {"b", "More text", std::nullopt, "h"}};
    auto c = build_corpus(docs);
    CorpusCacheKey key{hash_documents(docs), TokenizeConfig{}.hash()};
    save_corpus_cache(c, key, dir / "c.bin");
    EXPECT_TRUE(is_corpus_cache(dir / "c.bin"));
    CorpusCacheKey loaded_key;
    auto back = load_corpus_cache(dir / "c.bin", &loaded_key);
    EXPECT_EQ(back, c);
    EXPECT_EQ(loaded_key, key);
    EXPECT_EQ(back.document(0).sentences, c.document(0).sentences);
}

TEST(CorpusCache, InvalidatesOnConfigChange) {
    TempDir dir;
    std::vector<RawDocument> docs = {{"a", "Co-stars met.", std::nullopt, ""}};
    bool hit = true;
    auto first = load_or_build_cached(docs, {}, dir / "c.bin", 1, &hit);
    EXPECT_FALSE(hit);
    load_or_build_cached(docs, {}, dir / "c.bin", 1, &hit);
    EXPECT_TRUE(hit);
    TokenizeConfig other;
    other.keep_hyphens = false;
    auto rebuilt = load_or_build_cached(docs, other, dir / "c.bin", 1, &hit);
    EXPECT_FALSE(hit);
    EXPECT_EQ(rebuilt.token_count(), 3u);
    EXPECT_NE(TokenizeConfig{}.hash(), other.hash());
}

TEST(CorpusCache, RejectsBadMagicAndTruncation) {
    TempDir dir;
    testing_support::write_file(dir / "bad.bin", "NOTACACHE-------");
    EXPECT_FALSE(is_corpus_cache(dir / "bad.bin"));
    EXPECT_THROW(load_corpus_cache(dir / "bad.bin"), FormatError);

    auto c = build_corpus({{"a", "some words here", std::nullopt, ""}});
    save_corpus_cache(c, {}, dir / "ok.bin");
    auto bytes = testing_support::read_file(dir / "ok.bin");
    testing_support::write_file(dir / "trunc.bin", bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(load_corpus_cache(dir / "trunc.bin"), FormatError);
}
