// Serial reference kernels vs their OpenMP counterparts, plus trainer throughput.
// The argument is the thread count; 1 runs the serial path.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "biaslens/corpus.hpp"
#include "biaslens/embedding.hpp"
#include "biaslens/metrics.hpp"

using namespace biaslens;

namespace {

Corpus make_corpus(std::size_t tokens) {
    std::mt19937_64 rng(42);
    std::vector<std::string> vocab;
    for (int i = 0; i < 5000; ++i) vocab.push_back("w" + std::to_string(i));
    for (const char* w : {"he", "she", "his", "her", "male", "female", "nurse", "husband", "wife", "and", "or",
                          "mankind", "humanity", "man", "woman"})
        vocab.push_back(w);
    std::vector<double> weights(vocab.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / static_cast<double>((i % 997) + 1);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

    std::vector<std::pair<DocumentMeta, TokenSequence>> docs;
    std::size_t used = 0;
    while (used < tokens) {
        TokenSequence seq;
        for (int s = 0; s < 20 && used < tokens; ++s) {
            auto begin = static_cast<std::uint32_t>(seq.tokens.size());
            for (int t = 0; t < 15 && used < tokens; ++t, ++used) seq.tokens.push_back(vocab[pick(rng)]);
            seq.sentences.push_back({begin, static_cast<std::uint32_t>(seq.tokens.size())});
        }
        docs.emplace_back(DocumentMeta{"d" + std::to_string(docs.size()), Date{2010, 1, 1}, "bench"}, std::move(seq));
    }
    return build_corpus_from_tokens(std::move(docs));
}

const Corpus& corpus() {
    static const Corpus c = make_corpus(2'000'000);
    return c;
}

template <class F>
void scan(benchmark::State& state, F&& f) {
    auto view = CorpusView::all(corpus());
    ExecPolicy policy{static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(f(view, policy));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().token_count()));
}

void BM_Presence(benchmark::State& state) {
    auto p = builtin_gender_lexicons();
    scan(state, [&](const CorpusView& v, ExecPolicy e) { return presence(v, p.male, p.female, e); });
}

void BM_Premodified(benchmark::State& state) {
    auto cls = PremodClassifiers::builtin();
    scan(state, [&](const CorpusView& v, ExecPolicy e) { return premodified(v, cls, 1, {}, e); });
}

void BM_Generics(benchmark::State& state) {
    auto g = builtin_generics();
    scan(state, [&](const CorpusView& v, ExecPolicy e) { return generics_trend(v, g, e); });
}

void BM_Binomials(benchmark::State& state) {
    auto pairs = default_binomial_pairs();
    scan(state, [&](const CorpusView& v, ExecPolicy e) { return binomial_order(v, pairs, 3, e); });
}

void BM_TrainCbow(benchmark::State& state) {
    static const Corpus c = make_corpus(200'000);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.threads = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train_cbow(c, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.token_count()));
}

}  // namespace

BENCHMARK(BM_Presence)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();
BENCHMARK(BM_Premodified)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();
BENCHMARK(BM_Generics)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();
BENCHMARK(BM_Binomials)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();
BENCHMARK(BM_TrainCbow)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
