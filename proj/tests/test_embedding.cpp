#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biaslens/embedding.hpp"
#include "biaslens/error.hpp"
#include "grad_check.hpp"
#include "support.hpp"

using namespace biaslens;
using testing_support::TempDir;

namespace {

Corpus corpus_from_words(const std::vector<std::vector<std::string>>& sentences) {
    testing_support::RawCorpus raw(1);
    raw[0].id = "d";
    for (const auto& s : sentences) raw[0].sentences.push_back(s);
    return testing_support::to_corpus(raw);
}

TrainConfig small_config() {
    TrainConfig c;
    c.dim = 16;
    c.window = 3;
    c.negatives = 3;
    c.epochs = 3;
    c.min_count = 1;
    c.seed = 42;
    return c;
}

/// A held-out-free quick corpus with some structure.
Corpus toy_corpus() {
    return testing_support::to_corpus(testing_support::skew_raw_corpus(9, 200));
}

}  // namespace

TEST(Vocabulary, MinCountAndOrdering) {
    std::vector<std::string> s;
    for (int i = 0; i < 5; ++i) s.push_back("a");
    for (int i = 0; i < 2; ++i) s.push_back("b");
    s.push_back("c");
    auto v = build_vocab(corpus_from_words({s}), 2);
    EXPECT_EQ(v.words(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(v.count(0), 5u);
    EXPECT_EQ(v.total_tokens(), 7u);
    EXPECT_DOUBLE_EQ(v.negative_table_exponent, 0.75);
    EXPECT_THROW(v.id("c"), PreconditionError);
}

TEST(Vocabulary, EmptyCorpusGivesEmptyVocab) { EXPECT_TRUE(build_vocab(Corpus{}, 1).empty()); }

TEST(Vocabulary, TiesAreLexicographic) {
    auto v = build_vocab(corpus_from_words({{"b", "a", "b", "a", "b", "a"}}), 1);
    EXPECT_EQ(v.words(), (std::vector<std::string>{"a", "b"}));
}

TEST(CbowStep, ZeroVectorsGiveAnalyticLoss) {
    Vocabulary vocab({"a", "b", "c", "d"}, {1, 1, 1, 1});
    for (std::uint32_t negatives : {1u, 2u, 3u}) {
        auto m = EmbeddingModel::zeros(vocab, 5);
        std::vector<WordId> context = {0, 1};
        std::vector<WordId> neg(negatives, 3);
        double loss = cbow_step(m, context, 2, neg, 0.1);
        EXPECT_NEAR(loss, (1 + negatives) * std::numbers::ln2, 1e-12);
    }
}

TEST(CbowStep, ZeroLearningRateLeavesModelUnchanged) {
    auto m = EmbeddingModel::from_vectors({"a", "b", "c"}, {{1, 2}, {0.5f, -1}, {3, 0}});
    m.output_vectors = {0.1f, 0.2f, -0.3f, 0.4f, 0.5f, -0.6f};
    auto before = m;
    std::vector<WordId> context = {0, 1}, neg = {2};
    double loss = cbow_step(m, context, 1, neg, 0.0);
    EXPECT_GT(loss, 0);
    EXPECT_EQ(m, before);
}

TEST(CbowStep, RejectsInvalidIds) {
    auto m = EmbeddingModel::zeros(Vocabulary({"a", "b"}, {1, 1}), 2);
    std::vector<WordId> good = {0}, bad = {7}, empty;
    std::vector<WordId> neg = {1};
    EXPECT_THROW(cbow_step(m, bad, 1, neg, 0.1), PreconditionError);
    EXPECT_THROW(cbow_step(m, good, 9, neg, 0.1), PreconditionError);
    EXPECT_THROW(cbow_step(m, empty, 1, neg, 0.1), PreconditionError);
    std::vector<WordId> self = {1};
    EXPECT_THROW(cbow_step(m, good, 1, self, 0.1), PreconditionError);
}

TEST(CbowStep, GradientMatchesFiniteDifferences) {
    for (std::uint64_t seed = 1000; seed < 1030; ++seed) {
        auto r = testing_support::cbow_gradient_trial(seed);
        EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
    }
}

TEST(CbowStep, FloatStepMatchesDoubleKernel) {
    auto m = EmbeddingModel::from_vectors({"a", "b", "c"}, {{0.1f, 0.2f}, {-0.3f, 0.4f}, {0.5f, 0.05f}});
    m.output_vectors = {0.2f, -0.1f, 0.3f, 0.3f, -0.2f, 0.1f};
    std::vector<double> in(m.input_vectors.begin(), m.input_vectors.end());
    std::vector<double> out(m.output_vectors.begin(), m.output_vectors.end());
    std::vector<WordId> context = {0, 2}, neg = {2};
    std::vector<double> scratch;
    double expected = cbow::update<double>(in, out, 2, context, 1, neg, 0.5, scratch);
    double got = cbow_step(m, context, 1, neg, 0.5);
    EXPECT_NEAR(got, expected, 1e-6);
    for (std::size_t i = 0; i < in.size(); ++i) EXPECT_NEAR(m.input_vectors[i], in[i], 1e-6);
}

TEST(Train, DeterministicSingleThreaded) {
    auto c = toy_corpus();
    auto cfg = small_config();
    auto a = train_cbow(c, cfg);
    auto b = train_cbow(c, cfg);
    EXPECT_EQ(a, b);
    EXPECT_EQ(model_checksum(a), model_checksum(b));
    cfg.seed = 43;
    EXPECT_NE(model_checksum(train_cbow(c, cfg)), model_checksum(a));
}

TEST(Train, LossDecreasesAndVectorsStayFinite) {
    auto c = toy_corpus();
    auto cfg = small_config();
    cfg.epochs = 6;
    cfg.initial_lr = 0.05;
    TrainLog log;
    auto m = train_cbow(c, cfg, &log);
    ASSERT_EQ(log.epoch_mean_loss.size(), 6u);
    EXPECT_LT(log.epoch_mean_loss.back(), log.epoch_mean_loss.front());
    EXPECT_TRUE(m.all_finite());
    for (auto u : log.epoch_updates) EXPECT_GT(u, 0u);
}

TEST(Train, InitializationScale) {
    auto cfg = small_config();
    cfg.epochs = 1;
    cfg.initial_lr = cfg.min_lr = 1e-12;
    auto m = train_cbow(toy_corpus(), cfg);
    const float bound = 0.5f / float(cfg.dim) + 1e-6f;
    for (float x : m.input_vectors) EXPECT_LE(std::abs(x), bound);
}

TEST(Train, EmptyEffectiveCorpusIsError) {
    auto cfg = small_config();
    cfg.min_count = 100;
    EXPECT_THROW(train_cbow(corpus_from_words({{"a", "b"}}), cfg), PreconditionError);
    EXPECT_THROW(train_cbow(Corpus{}, small_config()), PreconditionError);
}

TEST(Train, InvalidConfigRejected) {
    auto cfg = small_config();
    cfg.dim = 0;
    EXPECT_THROW(train_cbow(toy_corpus(), cfg), PreconditionError);
}

TEST(Train, MultiThreadedProducesFiniteModel) {
    auto cfg = small_config();
    cfg.threads = 4;
    auto m = train_cbow(toy_corpus(), cfg);
    EXPECT_TRUE(m.all_finite());
    EXPECT_EQ(m.config.threads, 4u);
}

TEST(Train, SkewedCooccurrenceIsRecovered) {
    auto raw = testing_support::skew_raw_corpus(2024);
    ASSERT_EQ(testing_support::cooccurrences(raw, "x", "he", 5), 0u);
    ASSERT_GT(testing_support::cooccurrences(raw, "x", "she", 5), 0u);
    TrainConfig cfg;
    cfg.min_count = 1;
    cfg.subsample_t = 0;  // every word in a 26-word vocabulary is "frequent"
    cfg.seed = 2024;
    auto m = train_cbow(testing_support::to_corpus(raw), cfg);
    EXPECT_GT(cosine(m, "x", "she") - cosine(m, "x", "he"), 0.1);
}

TEST(Cosine, HandValues) {
    std::vector<float> a = {1, 0}, b = {0, 1}, c = {1, 1};
    EXPECT_NEAR(cosine(a, b), 0.0, 1e-12);
    EXPECT_NEAR(cosine(a, c), 1 / std::sqrt(2.0), 1e-4);
    std::vector<float> z = {0, 0};
    EXPECT_THROW(cosine(a, z), PreconditionError);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<float> u(-1, 1), pos(0.1f, 10);
    for (int t = 0; t < 100; ++t) {
        std::vector<float> v(6), w(6);
        for (auto& x : v) x = u(rng);
        for (auto& x : w) x = u(rng);
        float alpha = pos(rng), beta = pos(rng);
        std::vector<float> av = v, bw = w;
        for (auto& x : av) x *= alpha;
        for (auto& x : bw) x *= beta;
        EXPECT_NEAR(cosine(v, w), cosine(w, v), 1e-12);
        EXPECT_NEAR(cosine(av, bw), cosine(v, w), 1e-6);
    }
}

TEST(Cosine, OutOfVocabularyNamesWord) {
    auto m = EmbeddingModel::from_vectors({"a", "b"}, {{1, 0}, {0, 1}});
    try {
        cosine(m, "a", "zebra");
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("zebra"), std::string::npos);
    }
}

TEST(Neighbors, MatchBruteForce) {
    std::vector<std::string> words = {"w", "p", "q", "r"};
    std::vector<std::vector<float>> vecs = {{1, 0, 0}, {0.9f, 0.1f, 0}, {0, 1, 0}, {0.5f, 0.5f, 0.5f}};
    auto m = EmbeddingModel::from_vectors(words, vecs);
    std::vector<std::pair<double, std::string>> brute;
    for (std::size_t i = 1; i < words.size(); ++i) {
        std::vector<double> a(vecs[0].begin(), vecs[0].end()), b(vecs[i].begin(), vecs[i].end());
        brute.emplace_back(-testing_support::naive_cosine(a, b), words[i]);
    }
    std::sort(brute.begin(), brute.end());
    auto got = neighbors(m, "w", 3);
    ASSERT_EQ(got.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(got[i].word, brute[i].second);
        EXPECT_NEAR(got[i].similarity, -brute[i].first, 1e-6);
    }
    EXPECT_TRUE(neighbors(m, "w", 0).empty());
    EXPECT_EQ(neighbors(m, "w", 10).size(), 3u);
    EXPECT_THROW(neighbors(m, "nope", 1), PreconditionError);
}

TEST(Neighbors, PrefixProperty) {
    auto m = train_cbow(toy_corpus(), small_config());
    for (std::size_t k = 0; k + 1 < m.vocab.size(); ++k) {
        auto a = neighbors(m, "she", k);
        auto b = neighbors(m, "she", k + 1);
        ASSERT_EQ(a.size(), k);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST(ModelIo, SaveLoadRoundTrip) {
    TempDir dir;
    auto m = train_cbow(toy_corpus(), small_config());
    save_model(m, dir / "m.bin");
    auto back = load_model(dir / "m.bin");
    EXPECT_EQ(back, m);
    EXPECT_EQ(back.config, m.config);
}

TEST(ModelIo, TruncatedAndWrongMagicRejected) {
    TempDir dir;
    auto m = EmbeddingModel::from_vectors({"a", "b"}, {{1, 2}, {3, 4}});
    auto bytes = serialize_model(m);
    EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 1)), FormatError);
    EXPECT_THROW(deserialize_model(bytes.substr(0, 5)), FormatError);
    std::string wrong = bytes;
    wrong[0] = 'X';
    EXPECT_THROW(deserialize_model(wrong), FormatError);
    testing_support::write_file(dir / "t.bin", bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW(load_model(dir / "t.bin"), FormatError);
}

TEST(ModelIo, TextExportFormat) {
    TempDir dir;
    auto m = EmbeddingModel::from_vectors({"a", "b"}, {{1, 0.5f}, {-2, 0}});
    export_text_vectors(m, dir / "v.txt");
    std::istringstream in(testing_support::read_file(dir / "v.txt"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "2 2");
    std::getline(in, line);
    std::istringstream row(line);
    std::string word;
    float x, y;
    row >> word >> x >> y;
    EXPECT_EQ(word, "a");
    EXPECT_FLOAT_EQ(x, 1);
    EXPECT_FLOAT_EQ(y, 0.5f);
}
