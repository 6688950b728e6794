#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "biaslens/corpus.hpp"

/// Counting kernels over corpus views. Every kernel has a serial reference
/// implementation and an OpenMP implementation that parallelizes over
/// documents; both return identical integer counts.
namespace biaslens::kernels {

struct ExecPolicy {
    /// 1 selects the serial reference kernels.
    int threads = 1;
};

/// Label per term id; 0 means "not counted".
using LabelMap = std::vector<std::uint16_t>;

/// counts[l] = number of tokens whose label is l (index 0 unused).
std::vector<std::uint64_t> count_labels_serial(const CorpusView& view, std::span<const std::uint16_t> labels,
                                               std::size_t num_labels);
std::vector<std::uint64_t> count_labels_parallel(const CorpusView& view, std::span<const std::uint16_t> labels,
                                                 std::size_t num_labels, int threads);
std::vector<std::uint64_t> count_labels(const CorpusView& view, std::span<const std::uint16_t> labels,
                                        std::size_t num_labels, ExecPolicy policy = {});

/// Per-term frequencies over the view, indexed by TermId.
std::vector<std::uint64_t> term_histogram_serial(const CorpusView& view);
std::vector<std::uint64_t> term_histogram_parallel(const CorpusView& view, int threads);

/// heads[m][t] = occurrences of term t directly after a token labelled m+1
/// within the same sentence.
using HeadCounts = std::vector<std::vector<std::uint64_t>>;
HeadCounts following_heads_serial(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                                  std::size_t num_modifiers);
HeadCounts following_heads_parallel(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                                    std::size_t num_modifiers, int threads);
HeadCounts following_heads(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                           std::size_t num_modifiers, ExecPolicy policy = {});

/// Term roles for binomial scanning.
struct BinomialRoles {
    /// Pair index + 1 per term (0 = not a binomial term).
    std::vector<std::uint32_t> pair_of;
    /// 1 when the term is the male member of its pair.
    std::vector<std::uint8_t> is_male;
    /// 1 for coordinators ("and", "or").
    std::vector<std::uint8_t> is_coordinator;
};

struct OrderCounts {
    std::uint64_t male_first = 0;
    std::uint64_t female_first = 0;
    bool operator==(const OrderCounts&) const = default;
};

/// For each coordinator, the nearest binomial term on each side within the
/// sentence forms a candidate; it matches when the two terms are the
/// opposite members of one pair and span at most `window` tokens. Each
/// distinct (left, right) position pair counts once.
std::vector<OrderCounts> binomial_scan_serial(const CorpusView& view, const BinomialRoles& roles,
                                              std::size_t num_pairs, std::size_t window);
std::vector<OrderCounts> binomial_scan_parallel(const CorpusView& view, const BinomialRoles& roles,
                                                std::size_t num_pairs, std::size_t window, int threads);
std::vector<OrderCounts> binomial_scan(const CorpusView& view, const BinomialRoles& roles, std::size_t num_pairs,
                                       std::size_t window, ExecPolicy policy = {});

}  // namespace biaslens::kernels
