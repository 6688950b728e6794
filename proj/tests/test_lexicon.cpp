#include <gtest/gtest.h>

#include "biaslens/embedding.hpp"
#include "biaslens/error.hpp"
#include "biaslens/lexicon.hpp"
#include "support.hpp"

using namespace biaslens;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

std::set<std::string> word_set(const Lexicon& l) {
    auto w = l.words();
    return {w.begin(), w.end()};
}

EmbeddingModel five_word_model() {
    return EmbeddingModel::from_vectors({"a", "b", "c", "d", "e"},
                                        {{1, 0, 0}, {0.8f, 0.6f, 0}, {0.2f, 0.9f, 0.1f}, {-1, 0.1f, 0}, {0.6f, 0, 0.8f}});
}

}  // namespace

TEST(Lexicon, LowercasesAndKeepsFirstProvenance) {
    Lexicon l("x", LexiconCategory::Custom);
    EXPECT_TRUE(l.add("Happy"));
    EXPECT_FALSE(l.add("HAPPY", Provenance{Provenance::Kind::Expanded, 0.5}));
    EXPECT_TRUE(l.contains("happy"));
    EXPECT_EQ(l.provenance("happy")->kind, Provenance::Kind::Seed);
}

TEST(Lexicon, ProvenanceTextRoundTrip) {
    for (const auto& p : {Provenance{}, Provenance{Provenance::Kind::Inquirer, 0}, Provenance{Provenance::Kind::Expanded, 0.731}}) {
        auto back = Provenance::parse(p.str());
        ASSERT_TRUE(back) << p.str();
        EXPECT_EQ(*back, p);
    }
    EXPECT_FALSE(Provenance::parse("bogus"));
}

TEST(Lexicon, BuiltinsAreDisjointWhereRequired) {
    auto p = builtin_gender_lexicons();
    EXPECT_TRUE(disjoint(p.male, p.female));
    EXPECT_TRUE(p.male.contains("he"));
    EXPECT_TRUE(p.female.contains("herself"));
    auto n = builtin_gender_nouns();
    EXPECT_TRUE(disjoint(n.male, n.female));
    auto a = builtin_association_anchors();
    EXPECT_EQ(a.male.words(), std::vector<std::string>{"men"});
    EXPECT_EQ(a.female.words(), std::vector<std::string>{"women"});
    EXPECT_TRUE(builtin_occupations().contains("nurse"));
    EXPECT_TRUE(builtin_physical().contains("body"));
}

TEST(Lexicon, GenericsTableRejectsRepeats) {
    EXPECT_THROW(GenericsPairTable(std::vector<GenericsPair>{{"mankind", "humanity"}, {"humanity", "people"}}), PreconditionError);
    EXPECT_THROW(GenericsPairTable(std::vector<GenericsPair>{{"a", "a"}}), PreconditionError);
    auto g = builtin_generics();
    EXPECT_EQ(g.pairs().front(), (GenericsPair{"mankind", "humanity"}));
}

TEST(Inquirer, SingleCategory) {
    TempDir dir;
    write_file(dir / "gi.tsv", "Entry\tTags\nHAPPY\tPositiv Emot\nMOTHER\tKin\n");
    auto lex = load_inquirer(dir / "gi.tsv", {"emotion"});
    ASSERT_EQ(lex.size(), 1u);
    EXPECT_EQ(word_set(lex[0]), (std::set<std::string>{"happy"}));
    EXPECT_EQ(lex[0].category(), LexiconCategory::Emotion);
    EXPECT_EQ(lex[0].provenance("happy")->kind, Provenance::Kind::Inquirer);
}

TEST(Inquirer, TwoCategoriesAndSharedWords) {
    TempDir dir;
    write_file(dir / "gi.tsv", "Entry\tTags\nHAPPY\tEmot\nMOTHER\tKin Emot\nLOVE#1\tEmot\nLOVE#2\tEmot\n");
    auto lex = load_inquirer(dir / "gi.tsv", {"emotion", "family"});
    ASSERT_EQ(lex.size(), 2u);
    EXPECT_EQ(word_set(lex[0]), (std::set<std::string>{"happy", "love", "mother"}));
    EXPECT_EQ(word_set(lex[1]), (std::set<std::string>{"mother"}));
}

TEST(Inquirer, SpreadsheetLayoutAndFixture) {
    auto lex = load_inquirer(testing_support::fixture_dir() / "audit" / "inquirer.tsv", {"Emot", "kin", "action", "vice"});
    ASSERT_EQ(lex.size(), 4u);
    EXPECT_TRUE(lex[0].contains("afraid"));
    EXPECT_TRUE(lex[1].contains("mother"));
    EXPECT_TRUE(lex[2].contains("run"));  // "RUN#1" sense suffix stripped
    EXPECT_TRUE(lex[3].contains("angry"));
    EXPECT_TRUE(lex[0].contains("angry"));
}

TEST(Inquirer, UnknownCategoryListsAvailable) {
    TempDir dir;
    write_file(dir / "gi.tsv", "Entry\tTags\nHAPPY\tEmot\nMOTHER\tKin\n");
    try {
        load_inquirer(dir / "gi.tsv", {"weather"});
        FAIL();
    } catch (const PreconditionError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("emot"), std::string::npos) << msg;
        EXPECT_NE(msg.find("kin"), std::string::npos) << msg;
    }
}

TEST(Inquirer, MalformedRowsStrictAndLenient) {
    TempDir dir;
    write_file(dir / "gi.tsv", "Entry\tTags\nHAPPY\tEmot\nLONELY\n");
    EXPECT_THROW(load_inquirer(dir / "gi.tsv", {"emot"}), FormatError);
    LoadStats stats;
    auto lex = load_inquirer(dir / "gi.tsv", {"emot"}, LoadOptions{false}, &stats);
    EXPECT_EQ(stats.skipped, 1u);
    EXPECT_EQ(word_set(lex[0]), (std::set<std::string>{"happy"}));
}

TEST(Inquirer, RowOrderDoesNotMatter) {
    TempDir dir;
    write_file(dir / "a.tsv", "Entry\tTags\nHAPPY\tEmot\nSAD\tEmot\nMOTHER\tKin\n");
    write_file(dir / "b.tsv", "Entry\tTags\nMOTHER\tKin\nSAD\tEmot\nHAPPY\tEmot\n");
    EXPECT_EQ(load_inquirer(dir / "a.tsv", {"emot", "kin"}), load_inquirer(dir / "b.tsv", {"emot", "kin"}));
}

TEST(Expand, ZeroKAndMaxSimilarityAreIdentity) {
    auto m = five_word_model();
    Lexicon seed("s", LexiconCategory::Custom, {"a", "zzz"});
    auto e0 = expand(seed, m, 0, -1.0);
    EXPECT_EQ(word_set(e0.lexicon), word_set(seed));
    EXPECT_EQ(e0.missing_seeds, std::vector<std::string>{"zzz"});
    EXPECT_EQ(word_set(expand(seed, m, 10, 1.0).lexicon), word_set(seed));
    EXPECT_THROW(expand(seed, m, 1, 1.5), PreconditionError);
}

TEST(Expand, MatchesBruteForceNeighbours) {
    auto m = five_word_model();
    Lexicon seed("s", LexiconCategory::Custom, {"a"});
    auto result = expand(seed, m, 2, -1.0);

    std::vector<std::pair<double, std::string>> sims;
    auto row = [&](const std::string& w) {
        auto r = m.input_row(m.vocab.id(w));
        return std::vector<double>(r.begin(), r.end());
    };
    for (const auto& w : m.vocab.words())
        if (w != "a") sims.emplace_back(-testing_support::naive_cosine(row("a"), row(w)), w);
    std::sort(sims.begin(), sims.end());
    std::set<std::string> expected = {"a", sims[0].second, sims[1].second};
    EXPECT_EQ(word_set(result.lexicon), expected);
    const auto* p = result.lexicon.provenance(sims[0].second);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->kind, Provenance::Kind::Expanded);
    EXPECT_NEAR(p->similarity, -sims[0].first, 1e-6);
    EXPECT_EQ(result.lexicon.provenance("a")->kind, Provenance::Kind::Seed);
}

TEST(Expand, MonotoneInK) {
    auto m = five_word_model();
    Lexicon seed("s", LexiconCategory::Custom, {"a", "d"});
    const auto seeds = word_set(seed);
    for (std::size_t k = 0; k < 5; ++k) {
        auto small = word_set(expand(seed, m, k, 0.0).lexicon);
        auto large = word_set(expand(seed, m, k + 1, 0.0).lexicon);
        EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end())) << k;
        EXPECT_TRUE(std::includes(small.begin(), small.end(), seeds.begin(), seeds.end()));
    }
}

TEST(LexiconFile, SaveLoadRoundTrip) {
    TempDir dir;
    Lexicon l("emotion", LexiconCategory::Emotion, {"happy", "sad"});
    l.add("joyful", Provenance{Provenance::Kind::Expanded, 0.625});
    save_lexicon(l, dir / "emotion.tsv");
    auto back = load_lexicon(dir / "emotion.tsv");
    EXPECT_EQ(back, l);
    EXPECT_EQ(lexicon_to_tsv(l).substr(0, 26), "word\tcategory\tprovenance\nh");
}

TEST(LexiconFile, MixedCategoriesRejected) {
    TempDir dir;
    write_file(dir / "x.tsv", "word\tcategory\tprovenance\na\temotion\tseed\nb\tfamily\tseed\n");
    EXPECT_THROW(load_lexicon(dir / "x.tsv"), FormatError);
}

TEST(LexiconFile, ShippedSeedFilesMatchBuiltins) {
    const auto data = std::filesystem::path(BIASLENS_FIXTURE_DIR).parent_path().parent_path() / "data" / "lexicons";
    EXPECT_EQ(word_set(load_lexicon(data / "occupation.tsv")), word_set(builtin_occupations()));
    EXPECT_EQ(word_set(load_lexicon(data / "characteristic.tsv")), word_set(builtin_characteristics()));
    EXPECT_EQ(word_set(load_lexicon(data / "physical.tsv")), word_set(builtin_physical()));
    EXPECT_EQ(word_set(load_lexicon(data / "male-pronouns.tsv")), word_set(builtin_gender_lexicons().male));
    EXPECT_EQ(word_set(load_lexicon(data / "female-pronouns.tsv")), word_set(builtin_gender_lexicons().female));
}
