#include <gtest/gtest.h>

#include <random>

#include "biaslens/kernels.hpp"
#include "support.hpp"

using namespace biaslens;
using namespace biaslens::kernels;

namespace {

LabelMap labels_for(const Corpus& c, const std::vector<std::pair<std::string, std::uint16_t>>& assign) {
    LabelMap labels(c.dictionary().size(), 0);
    for (const auto& [w, l] : assign)
        if (auto id = c.dictionary().find(w)) labels[*id] = l;
    return labels;
}

BinomialRoles roles_for(const Corpus& c) {
    BinomialRoles r;
    const auto n = c.dictionary().size();
    r.pair_of.assign(n, 0);
    r.is_male.assign(n, 0);
    r.is_coordinator.assign(n, 0);
    const std::vector<std::pair<std::string, std::string>> pairs = {{"husband", "wife"}, {"boy", "girl"}, {"men", "women"}};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (auto id = c.dictionary().find(pairs[p].first)) {
            r.pair_of[*id] = std::uint32_t(p + 1);
            r.is_male[*id] = 1;
        }
        if (auto id = c.dictionary().find(pairs[p].second)) r.pair_of[*id] = std::uint32_t(p + 1);
    }
    for (const char* w : {"and", "or"})
        if (auto id = c.dictionary().find(w)) r.is_coordinator[*id] = 1;
    return r;
}

}  // namespace

TEST(Kernels, SerialAndParallelAgreeOnRandomCorpora) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = testing_support::to_corpus(testing_support::random_raw_corpus(rng, 8000));
        auto view = CorpusView::all(c);
        auto labels = labels_for(c, {{"he", 1}, {"she", 2}, {"his", 1}, {"her", 2}, {"male", 3}});
        for (int threads : {2, 3, 8}) {
            EXPECT_EQ(count_labels_serial(view, labels, 3), count_labels_parallel(view, labels, 3, threads));
            EXPECT_EQ(term_histogram_serial(view), term_histogram_parallel(view, threads));
            auto mods = labels_for(c, {{"male", 1}, {"female", 2}});
            EXPECT_EQ(following_heads_serial(view, mods, 2), following_heads_parallel(view, mods, 2, threads));
            auto roles = roles_for(c);
            for (std::size_t w : {1u, 3u, 6u}) {
                EXPECT_EQ(binomial_scan_serial(view, roles, 3, w), binomial_scan_parallel(view, roles, 3, w, threads));
            }
        }
    }
}

TEST(Kernels, HistogramSumsToTokenCount) {
    std::mt19937_64 rng(1);
    auto c = testing_support::to_corpus(testing_support::random_raw_corpus(rng, 5000));
    auto h = term_histogram_serial(CorpusView::all(c));
    std::uint64_t total = 0;
    for (auto x : h) total += x;
    EXPECT_EQ(total, c.token_count());
}

TEST(Kernels, EmptyViewGivesZeros) {
    Corpus c;
    CorpusView v = CorpusView::all(c);
    LabelMap labels;
    auto counts = count_labels(v, labels, 2, ExecPolicy{4});
    EXPECT_EQ(counts, (std::vector<std::uint64_t>{0, 0, 0}));
}
