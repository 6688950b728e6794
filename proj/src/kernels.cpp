#include "biaslens/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace biaslens::kernels {

namespace {

void count_document(const Document& doc, std::span<const std::uint16_t> labels, std::uint64_t* counts) {
    for (TermId t : doc.tokens) ++counts[labels[t]];
}

void heads_document(const Document& doc, std::span<const std::uint16_t> modifier_labels, HeadCounts& out) {
    for (const auto& s : doc.sentences) {
        for (std::uint32_t p = s.begin; p + 1 < s.end; ++p) {
            std::uint16_t m = modifier_labels[doc.tokens[p]];
            if (m) ++out[m - 1][doc.tokens[p + 1]];
        }
    }
}

void binomial_document(const Document& doc, const BinomialRoles& roles, std::size_t window,
                       std::vector<OrderCounts>& out) {
    for (const auto& s : doc.sentences) {
        std::int64_t left = -1;  // nearest binomial term before the cursor
        std::int64_t last_i = -1, last_j = -1;
        for (std::uint32_t c = s.begin; c < s.end; ++c) {
            TermId t = doc.tokens[c];
            if (roles.pair_of[t]) {
                left = c;
                continue;
            }
            if (!roles.is_coordinator[t] || left < 0) continue;
            const std::int64_t limit = std::min<std::int64_t>(s.end - 1, left + std::int64_t(window) - 1);
            std::int64_t right = -1;
            for (std::int64_t j = c + 1; j <= limit; ++j) {
                if (roles.pair_of[doc.tokens[j]]) {
                    right = j;
                    break;
                }
            }
            if (right < 0 || (left == last_i && right == last_j)) continue;
            TermId a = doc.tokens[left];
            TermId b = doc.tokens[right];
            if (roles.pair_of[a] != roles.pair_of[b] || roles.is_male[a] == roles.is_male[b]) continue;
            last_i = left;
            last_j = right;
            auto& counts = out[roles.pair_of[a] - 1];
            if (roles.is_male[a]) {
                ++counts.male_first;
            } else {
                ++counts.female_first;
            }
        }
    }
}

}  // namespace

std::vector<std::uint64_t> count_labels_serial(const CorpusView& view, std::span<const std::uint16_t> labels,
                                               std::size_t num_labels) {
    std::vector<std::uint64_t> counts(num_labels + 1, 0);
    for (std::size_t i = 0; i < view.size(); ++i) count_document(view[i], labels, counts.data());
    counts[0] = 0;
    return counts;
}

std::vector<std::uint64_t> count_labels_parallel(const CorpusView& view, std::span<const std::uint16_t> labels,
                                                 std::size_t num_labels, int threads) {
    std::vector<std::uint64_t> counts(num_labels + 1, 0);
    const auto n = static_cast<std::ptrdiff_t>(view.size());
#pragma omp parallel num_threads(std::max(1, threads))
    {
        std::vector<std::uint64_t> local(num_labels + 1, 0);
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) count_document(view[std::size_t(i)], labels, local.data());
#pragma omp critical
        for (std::size_t l = 0; l <= num_labels; ++l) counts[l] += local[l];
    }
    counts[0] = 0;
    return counts;
}

std::vector<std::uint64_t> count_labels(const CorpusView& view, std::span<const std::uint16_t> labels,
                                        std::size_t num_labels, ExecPolicy policy) {
    return policy.threads > 1 ? count_labels_parallel(view, labels, num_labels, policy.threads)
                              : count_labels_serial(view, labels, num_labels);
}

std::vector<std::uint64_t> term_histogram_serial(const CorpusView& view) {
    std::vector<std::uint64_t> hist(view.empty() ? 0 : view.parent().dictionary().size(), 0);
    for (std::size_t i = 0; i < view.size(); ++i) {
        for (TermId t : view[i].tokens) ++hist[t];
    }
    return hist;
}

std::vector<std::uint64_t> term_histogram_parallel(const CorpusView& view, int threads) {
    const std::size_t v = view.empty() ? 0 : view.parent().dictionary().size();
    std::vector<std::uint64_t> hist(v, 0);
    const auto n = static_cast<std::ptrdiff_t>(view.size());
#pragma omp parallel num_threads(std::max(1, threads))
    {
        std::vector<std::uint64_t> local(v, 0);
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            for (TermId t : view[std::size_t(i)].tokens) ++local[t];
        }
#pragma omp critical
        for (std::size_t t = 0; t < v; ++t) hist[t] += local[t];
    }
    return hist;
}

HeadCounts following_heads_serial(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                                  std::size_t num_modifiers) {
    const std::size_t v = view.empty() ? 0 : view.parent().dictionary().size();
    HeadCounts out(num_modifiers, std::vector<std::uint64_t>(v, 0));
    for (std::size_t i = 0; i < view.size(); ++i) heads_document(view[i], modifier_labels, out);
    return out;
}

HeadCounts following_heads_parallel(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                                    std::size_t num_modifiers, int threads) {
    const std::size_t v = view.empty() ? 0 : view.parent().dictionary().size();
    HeadCounts out(num_modifiers, std::vector<std::uint64_t>(v, 0));
    const auto n = static_cast<std::ptrdiff_t>(view.size());
#pragma omp parallel num_threads(std::max(1, threads))
    {
        HeadCounts local(num_modifiers, std::vector<std::uint64_t>(v, 0));
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) heads_document(view[std::size_t(i)], modifier_labels, local);
#pragma omp critical
        for (std::size_t m = 0; m < num_modifiers; ++m) {
            for (std::size_t t = 0; t < v; ++t) out[m][t] += local[m][t];
        }
    }
    return out;
}

HeadCounts following_heads(const CorpusView& view, std::span<const std::uint16_t> modifier_labels,
                           std::size_t num_modifiers, ExecPolicy policy) {
    return policy.threads > 1 ? following_heads_parallel(view, modifier_labels, num_modifiers, policy.threads)
                              : following_heads_serial(view, modifier_labels, num_modifiers);
}

std::vector<OrderCounts> binomial_scan_serial(const CorpusView& view, const BinomialRoles& roles,
                                              std::size_t num_pairs, std::size_t window) {
    std::vector<OrderCounts> out(num_pairs);
    for (std::size_t i = 0; i < view.size(); ++i) binomial_document(view[i], roles, window, out);
    return out;
}

std::vector<OrderCounts> binomial_scan_parallel(const CorpusView& view, const BinomialRoles& roles,
                                                std::size_t num_pairs, std::size_t window, int threads) {
    std::vector<OrderCounts> out(num_pairs);
    const auto n = static_cast<std::ptrdiff_t>(view.size());
#pragma omp parallel num_threads(std::max(1, threads))
    {
        std::vector<OrderCounts> local(num_pairs);
#pragma omp for schedule(dynamic, 8) nowait
        for (std::ptrdiff_t i = 0; i < n; ++i) binomial_document(view[std::size_t(i)], roles, window, local);
#pragma omp critical
        for (std::size_t p = 0; p < num_pairs; ++p) {
            out[p].male_first += local[p].male_first;
            out[p].female_first += local[p].female_first;
        }
    }
    return out;
}

std::vector<OrderCounts> binomial_scan(const CorpusView& view, const BinomialRoles& roles, std::size_t num_pairs,
                                       std::size_t window, ExecPolicy policy) {
    return policy.threads > 1 ? binomial_scan_parallel(view, roles, num_pairs, window, policy.threads)
                              : binomial_scan_serial(view, roles, num_pairs, window);
}

}  // namespace biaslens::kernels
