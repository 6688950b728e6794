#include "biaslens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "biaslens/error.hpp"

namespace biaslens {

std::optional<double> share(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

namespace {

std::size_t dictionary_size(const CorpusView& view) {
    return view.empty() ? 0 : view.parent().dictionary().size();
}

/// Assigns `label` to every term of the view's dictionary that is in `words`.
template <class Words>
void label_terms(const CorpusView& view, const Words& words, std::uint16_t label, kernels::LabelMap& labels) {
    if (view.empty()) return;
    const auto& dict = view.parent().dictionary();
    for (const auto& w : words) {
        if (auto id = dict.find(w)) labels[*id] = label;
    }
}

}  // namespace

PresenceResult presence(const CorpusView& view, const Lexicon& male, const Lexicon& female, ExecPolicy policy) {
    if (!disjoint(male, female)) {
        throw PreconditionError("presence: lexicons \"" + male.name() + "\" and \"" + female.name() + "\" overlap");
    }
    kernels::LabelMap labels(dictionary_size(view), 0);
    label_terms(view, male.words(), 1, labels);
    label_terms(view, female.words(), 2, labels);
    auto counts = kernels::count_labels(view, labels, 2, policy);
    PresenceResult r;
    r.label = view.label();
    r.male_count = counts[1];
    r.female_count = counts[2];
    r.female_proportion = share(r.female_count, r.male_count + r.female_count);
    return r;
}

// ---------------------------------------------------------------------------

std::string_view to_string(PremodCategory category) {
    switch (category) {
        case PremodCategory::Occupation: return "occupation";
        case PremodCategory::Characteristic: return "characteristic";
        case PremodCategory::Physical: return "physical";
        case PremodCategory::Unclassified: return "unclassified";
    }
    return "unclassified";
}

std::optional<PremodCategory> parse_premod_category(std::string_view name) {
    for (auto c : {PremodCategory::Occupation, PremodCategory::Characteristic, PremodCategory::Physical,
                   PremodCategory::Unclassified}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

PremodClassifiers PremodClassifiers::builtin() {
    return {builtin_occupations(), builtin_characteristics(), builtin_physical()};
}

PremodCategory PremodClassifiers::classify(std::string_view head) const {
    if (occupation.contains(head)) return PremodCategory::Occupation;
    if (characteristic.contains(head)) return PremodCategory::Characteristic;
    if (physical.contains(head)) return PremodCategory::Physical;
    return PremodCategory::Unclassified;
}

PremodResult premodified(const CorpusView& view, const PremodClassifiers& classifiers, std::uint64_t min_freq,
                         const PremodModifiers& modifiers, ExecPolicy policy) {
    if (min_freq < 1) throw PreconditionError("premodified: min_freq must be >= 1");
    if (modifiers.male == modifiers.female) throw PreconditionError("premodified: modifiers must differ");
    kernels::LabelMap labels(dictionary_size(view), 0);
    label_terms(view, std::array{modifiers.male}, 1, labels);
    label_terms(view, std::array{modifiers.female}, 2, labels);
    auto heads = kernels::following_heads(view, labels, 2, policy);

    PremodResult r;
    r.label = view.label();
    r.min_freq = min_freq;
    auto fill = [&](const std::vector<std::uint64_t>& counts, PremodSide& side) {
        const auto& dict = view.parent().dictionary();
        for (TermId t = 0; t < counts.size(); ++t) {
            if (counts[t] < min_freq || counts[t] == 0) continue;
            PremodHead h{dict.word(t), counts[t], classifiers.classify(dict.word(t))};
            side.unique_terms[static_cast<std::size_t>(h.category)] += 1;
            side.token_counts[static_cast<std::size_t>(h.category)] += h.frequency;
            side.heads.push_back(std::move(h));
        }
        std::sort(side.heads.begin(), side.heads.end(), [](const PremodHead& a, const PremodHead& b) {
            if (a.frequency != b.frequency) return a.frequency > b.frequency;
            return a.head < b.head;
        });
    };
    if (!view.empty()) {
        fill(heads[0], r.male);
        fill(heads[1], r.female);
        for (TermId t = 0; t < heads[0].size(); ++t) {
            if (heads[0][t] >= min_freq && heads[1][t] >= min_freq && heads[0][t] > 0 && heads[1][t] > 0) {
                r.equally_premodified.push_back(view.parent().dictionary().word(t));
            }
        }
        std::sort(r.equally_premodified.begin(), r.equally_premodified.end());
    }
    return r;
}

ModifierRatioResult modifier_ratio(const CorpusView& view, const PremodModifiers& modifiers, ExecPolicy policy) {
    kernels::LabelMap labels(dictionary_size(view), 0);
    label_terms(view, std::array{modifiers.male}, 1, labels);
    label_terms(view, std::array{modifiers.female}, 2, labels);
    auto counts = kernels::count_labels(view, labels, 2, policy);
    ModifierRatioResult r;
    r.label = view.label();
    r.male_count = counts[1];
    r.female_count = counts[2];
    r.female_share = share(r.female_count, r.female_count + r.male_count);
    return r;
}

GenericsResult generics_trend(const CorpusView& view, const GenericsPairTable& table, ExecPolicy policy) {
    const auto& pairs = table.pairs();
    kernels::LabelMap labels(dictionary_size(view), 0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        label_terms(view, std::array{pairs[p].marked}, static_cast<std::uint16_t>(2 * p + 1), labels);
        label_terms(view, std::array{pairs[p].neutral}, static_cast<std::uint16_t>(2 * p + 2), labels);
    }
    auto counts = kernels::count_labels(view, labels, 2 * pairs.size(), policy);
    GenericsResult r;
    r.label = view.label();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        GenericsEntry e{pairs[p].marked, pairs[p].neutral, counts[2 * p + 1], counts[2 * p + 2], std::nullopt};
        e.neutral_share = share(e.neutral_count, e.marked_count + e.neutral_count);
        r.pairs.push_back(std::move(e));
    }
    return r;
}

std::vector<BinomialPair> default_binomial_pairs() {
    return {{"husband", "wife"}, {"boy", "girl"}, {"son", "daughter"}, {"man", "woman"}, {"men", "women"}};
}

BinomialResult binomial_order(const CorpusView& view, const std::vector<BinomialPair>& pairs, std::size_t window,
                              ExecPolicy policy) {
    if (window < 1) throw PreconditionError("binomial_order: window must be >= 1");
    const std::size_t v = dictionary_size(view);
    kernels::BinomialRoles roles{std::vector<std::uint32_t>(v, 0), std::vector<std::uint8_t>(v, 0),
                                 std::vector<std::uint8_t>(v, 0)};
    if (!view.empty()) {
        const auto& dict = view.parent().dictionary();
        for (std::size_t p = pairs.size(); p-- > 0;) {
            if (pairs[p].male_term == pairs[p].female_term) {
                throw PreconditionError("binomial pair uses \"" + pairs[p].male_term + "\" twice");
            }
            // Reverse order so the first pair containing a word wins.
            if (auto id = dict.find(pairs[p].male_term)) {
                roles.pair_of[*id] = static_cast<std::uint32_t>(p + 1);
                roles.is_male[*id] = 1;
            }
            if (auto id = dict.find(pairs[p].female_term)) {
                roles.pair_of[*id] = static_cast<std::uint32_t>(p + 1);
                roles.is_male[*id] = 0;
            }
        }
        for (const char* coord : {"and", "or"}) {
            if (auto id = dict.find(coord)) {
                if (!roles.pair_of[*id]) roles.is_coordinator[*id] = 1;
            }
        }
    }
    auto counts = kernels::binomial_scan(view, roles, pairs.size(), window, policy);
    BinomialResult r;
    r.label = view.label();
    r.window = window;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        BinomialEntry e{pairs[p].male_term, pairs[p].female_term, counts[p].male_first, counts[p].female_first,
                        std::nullopt};
        e.male_first_share = share(e.male_first, e.male_first + e.female_first);
        r.male_first_total += e.male_first;
        r.female_first_total += e.female_first;
        r.pairs.push_back(std::move(e));
    }
    r.male_first_share = share(r.male_first_total, r.male_first_total + r.female_first_total);
    return r;
}

// ---------------------------------------------------------------------------

GenderAssociation association(const EmbeddingModel& model, const Lexicon& gender_terms, const Lexicon& theme,
                              std::size_t top_k) {
    if (top_k < 1) throw PreconditionError("association: top_k must be >= 1");
    const std::size_t dim = model.dim();
    GenderAssociation g;
    g.anchor = gender_terms.name();
    g.top_k = top_k;

    std::vector<double> centroid(dim, 0.0);
    for (const auto& w : gender_terms.words()) {
        auto id = model.vocab.find(w);
        if (!id) continue;
        g.anchor_terms.push_back(w);
        auto row = model.input_row(*id);
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += row[d];
    }
    if (g.anchor_terms.empty()) {
        throw PreconditionError("association: no word of lexicon \"" + gender_terms.name() + "\" is in the vocabulary");
    }
    for (double& x : centroid) x /= static_cast<double>(g.anchor_terms.size());
    double cn = 0;
    for (double x : centroid) cn += x * x;
    cn = std::sqrt(cn);
    if (cn == 0) throw PreconditionError("association: anchor \"" + gender_terms.name() + "\" has a zero centroid");

    std::vector<Neighbor> scored;
    bool any_in_vocab = false;
    for (const auto& w : theme.words()) {
        auto id = model.vocab.find(w);
        if (!id) continue;
        any_in_vocab = true;
        auto row = model.input_row(*id);
        double dot = 0, n = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            dot += centroid[d] * double(row[d]);
            n += double(row[d]) * double(row[d]);
        }
        if (n == 0) continue;
        scored.push_back({w, std::clamp(dot / (cn * std::sqrt(n)), -1.0, 1.0)});
    }
    if (!any_in_vocab) {
        throw PreconditionError("association: no word of lexicon \"" + theme.name() + "\" is in the vocabulary");
    }
    g.theme_terms_in_vocab = scored.size();
    if (!scored.empty()) {
        double total = 0;
        for (const auto& s : scored) total += s.similarity;
        g.lexicon_mean = total / static_cast<double>(scored.size());
    }
    std::sort(scored.begin(), scored.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.word < b.word;
    });
    if (scored.size() > top_k) scored.resize(top_k);
    if (!scored.empty()) {
        double total = 0;
        for (const auto& s : scored) total += s.similarity;
        g.mean_similarity = total / static_cast<double>(scored.size());
    }
    g.top_terms = std::move(scored);
    return g;
}

AssociationResult association_pair(const EmbeddingModel& model, const Lexicon& male, const Lexicon& female,
                                   const Lexicon& theme, std::size_t top_k) {
    AssociationResult r;
    r.theme = theme.name();
    r.male = association(model, male, theme, top_k);
    r.female = association(model, female, theme, top_k);
    r.gap = r.female.mean_similarity - r.male.mean_similarity;
    return r;
}

}  // namespace biaslens
