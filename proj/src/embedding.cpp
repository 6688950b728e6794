#include "biaslens/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <omp.h>

#include "biaslens/binary_io.hpp"
#include "biaslens/cbow_kernel.hpp"
#include "biaslens/error.hpp"
#include "biaslens/hash.hpp"

namespace biaslens {

namespace fs = std::filesystem;

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
    if (counts_.size() != words_.size()) throw PreconditionError("vocabulary words and counts differ in length");
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
            throw PreconditionError("duplicate vocabulary word \"" + words_[i] + "\"");
        }
        total_tokens_ += counts_[i];
    }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
    if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
    return std::nullopt;
}

WordId Vocabulary::id(std::string_view word) const {
    if (auto id = find(word)) return *id;
    throw PreconditionError("word \"" + std::string(word) + "\" is not in the vocabulary");
}

bool Vocabulary::operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_ &&
           std::bit_cast<std::uint64_t>(negative_table_exponent) ==
               std::bit_cast<std::uint64_t>(other.negative_table_exponent);
}

Vocabulary build_vocab(const CorpusView& view, std::uint64_t min_count) {
    if (view.empty()) return {};
    const Corpus& corpus = view.parent();
    std::vector<std::uint64_t> freq(corpus.dictionary().size(), 0);
    for (std::size_t i = 0; i < view.size(); ++i) {
        for (TermId t : view[i].tokens) ++freq[t];
    }
    std::vector<TermId> kept;
    for (TermId t = 0; t < freq.size(); ++t) {
        if (freq[t] > 0 && freq[t] >= min_count) kept.push_back(t);
    }
    const auto& dict = corpus.dictionary();
    std::sort(kept.begin(), kept.end(), [&](TermId a, TermId b) {
        if (freq[a] != freq[b]) return freq[a] > freq[b];
        return dict.word(a) < dict.word(b);
    });
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    for (TermId t : kept) {
        words.push_back(dict.word(t));
        counts.push_back(freq[t]);
    }
    return Vocabulary(std::move(words), std::move(counts));
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count) {
    return build_vocab(CorpusView::all(corpus), min_count);
}

void TrainConfig::validate() const {
    if (dim < 1) throw PreconditionError("dim must be >= 1");
    if (window < 1) throw PreconditionError("window must be >= 1");
    if (negatives < 1) throw PreconditionError("negatives must be >= 1");
    if (epochs < 1) throw PreconditionError("epochs must be >= 1");
    if (!(min_lr > 0) || !(min_lr <= initial_lr)) throw PreconditionError("require 0 < min_lr <= initial_lr");
    if (!(subsample_t >= 0)) throw PreconditionError("subsample_t must be >= 0");
    if (threads < 1) throw PreconditionError("threads must be >= 1");
}

EmbeddingModel EmbeddingModel::zeros(Vocabulary vocab, std::uint32_t dim) {
    EmbeddingModel m;
    m.config.dim = dim;
    m.input_vectors.assign(vocab.size() * dim, 0.0f);
    m.output_vectors.assign(vocab.size() * dim, 0.0f);
    m.vocab = std::move(vocab);
    return m;
}

EmbeddingModel EmbeddingModel::from_vectors(const std::vector<std::string>& words,
                                            const std::vector<std::vector<float>>& vectors) {
    if (words.size() != vectors.size()) throw PreconditionError("words and vectors differ in length");
    std::uint32_t dim = vectors.empty() ? 1 : static_cast<std::uint32_t>(vectors.front().size());
    EmbeddingModel m = zeros(Vocabulary(words, std::vector<std::uint64_t>(words.size(), 1)), dim);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim) throw PreconditionError("vectors must share one dimension");
        std::copy(vectors[i].begin(), vectors[i].end(), m.input_vectors.begin() + i * dim);
    }
    return m;
}

bool EmbeddingModel::all_finite() const {
    auto finite = [](float v) { return std::isfinite(v); };
    return std::all_of(input_vectors.begin(), input_vectors.end(), finite) &&
           std::all_of(output_vectors.begin(), output_vectors.end(), finite);
}

bool EmbeddingModel::operator==(const EmbeddingModel& other) const {
    auto same_bits = [](const std::vector<float>& a, const std::vector<float>& b) {
        return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](float x, float y) {
                   return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y);
               });
    };
    return vocab == other.vocab && config == other.config && same_bits(input_vectors, other.input_vectors) &&
           same_bits(output_vectors, other.output_vectors);
}

double cbow_step(EmbeddingModel& model, std::span<const WordId> context, WordId target,
                 std::span<const WordId> negatives, double lr) {
    const std::size_t v = model.vocab.size();
    if (context.empty()) throw PreconditionError("cbow_step: empty context");
    auto check = [&](WordId id, const char* what) {
        if (id >= v) {
            throw PreconditionError(std::string("cbow_step: ") + what + " id " + std::to_string(id) +
                                    " out of range (V=" + std::to_string(v) + ")");
        }
    };
    for (WordId c : context) check(c, "context");
    check(target, "target");
    for (WordId n : negatives) {
        check(n, "negative");
        if (n == target) throw PreconditionError("cbow_step: target appears among negatives");
    }
    std::vector<float> scratch;
    return cbow::update<float>(model.input_vectors, model.output_vectors, model.dim(), context, target, negatives,
                               lr, scratch);
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, 1) with 53 bits; independent of the standard library's distributions.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Samples word ids proportionally to count^exponent.
class NegativeTable {
public:
    NegativeTable(const Vocabulary& vocab, std::size_t table_size) {
        double total = 0;
        for (auto c : vocab.counts()) total += std::pow(static_cast<double>(c), vocab.negative_table_exponent);
        table_.resize(table_size);
        std::size_t i = 0;
        double cumulative = std::pow(static_cast<double>(vocab.count(0)), vocab.negative_table_exponent) / total;
        for (std::size_t slot = 0; slot < table_size; ++slot) {
            table_[slot] = static_cast<WordId>(i);
            if (static_cast<double>(slot + 1) / static_cast<double>(table_size) > cumulative && i + 1 < vocab.size()) {
                ++i;
                cumulative += std::pow(static_cast<double>(vocab.count(i)), vocab.negative_table_exponent) / total;
            }
        }
    }
    WordId draw(Rng& rng) const { return table_[rng.next() % table_.size()]; }

private:
    std::vector<WordId> table_;
};

std::size_t negative_table_size(std::size_t vocab_size) {
    return std::clamp<std::size_t>(vocab_size * 100, 1u << 16, 1u << 23);
}

struct TrainingSet {
    std::vector<WordId> tokens;
    /// Sentence i spans [offsets[i], offsets[i+1]).
    std::vector<std::size_t> offsets{0};
};

TrainingSet map_sentences(const CorpusView& view, const Vocabulary& vocab) {
    const auto& dict = view.parent().dictionary();
    std::vector<std::int64_t> term_to_word(dict.size(), -1);
    for (TermId t = 0; t < dict.size(); ++t) {
        if (auto id = vocab.find(dict.word(t))) term_to_word[t] = *id;
    }
    TrainingSet set;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const Document& doc = view[i];
        for (const auto& s : doc.sentences) {
            std::size_t before = set.tokens.size();
            for (std::uint32_t p = s.begin; p < s.end; ++p) {
                auto w = term_to_word[doc.tokens[p]];
                if (w >= 0) set.tokens.push_back(static_cast<WordId>(w));
            }
            if (set.tokens.size() > before) set.offsets.push_back(set.tokens.size());
        }
    }
    return set;
}

struct WorkerState {
    Rng rng;
    std::vector<WordId> kept;
    std::vector<WordId> context;
    std::vector<WordId> negatives;
    std::vector<float> scratch;
    double loss = 0;
    std::uint64_t updates = 0;
    std::uint64_t processed = 0;
};

/// Trains over sentences [first, last) of `set`.
void train_range(EmbeddingModel& model, const TrainingSet& set, std::size_t first, std::size_t last,
                 const NegativeTable& table, const std::vector<double>& keep_prob, std::uint64_t planned,
                 std::uint64_t processed_base, std::uint64_t progress_scale, WorkerState& ws) {
    const auto& cfg = model.config;
    const std::size_t dim = cfg.dim;
    for (std::size_t s = first; s < last; ++s) {
        const std::size_t begin = set.offsets[s];
        const std::size_t end = set.offsets[s + 1];
        ws.kept.clear();
        for (std::size_t p = begin; p < end; ++p) {
            WordId w = set.tokens[p];
            if (keep_prob[w] >= 1.0 || ws.rng.uniform() < keep_prob[w]) ws.kept.push_back(w);
        }
        for (std::size_t pos = 0; pos < ws.kept.size(); ++pos) {
            std::uint64_t done = processed_base + ws.processed * progress_scale;
            double lr = cfg.initial_lr -
                        (cfg.initial_lr - cfg.min_lr) * static_cast<double>(done) / static_cast<double>(planned);
            lr = std::max(lr, cfg.min_lr);

            std::size_t radius = cfg.window;
            if (cfg.shrink_window) radius = 1 + ws.rng.next() % cfg.window;
            std::size_t lo = pos >= radius ? pos - radius : 0;
            std::size_t hi = std::min(ws.kept.size(), pos + radius + 1);
            ws.context.clear();
            for (std::size_t c = lo; c < hi; ++c) {
                if (c != pos) ws.context.push_back(ws.kept[c]);
            }
            if (ws.context.empty()) continue;
            const WordId target = ws.kept[pos];
            ws.negatives.clear();
            for (std::uint32_t k = 0; k < cfg.negatives; ++k) {
                for (int attempt = 0; attempt < 16; ++attempt) {
                    WordId n = table.draw(ws.rng);
                    if (n != target) {
                        ws.negatives.push_back(n);
                        break;
                    }
                }
            }
            ws.loss += cbow::update<float>(model.input_vectors, model.output_vectors, dim, ws.context, target,
                                           ws.negatives, lr, ws.scratch);
            ++ws.updates;
        }
        ws.processed += end - begin;
    }
}

}  // namespace

EmbeddingModel train_cbow(const CorpusView& view, const TrainConfig& config, TrainLog* log) {
    config.validate();
    Vocabulary vocab = build_vocab(view, config.min_count);
    if (vocab.empty()) {
        throw PreconditionError("corpus \"" + view.label() + "\" is empty after min_count=" +
                                std::to_string(config.min_count) + " filtering");
    }
    TrainingSet set = map_sentences(view, vocab);

    EmbeddingModel model = EmbeddingModel::zeros(std::move(vocab), config.dim);
    model.config = config;
    Rng init_rng(config.seed);
    const double scale = 1.0 / static_cast<double>(config.dim);
    for (float& x : model.input_vectors) x = static_cast<float>((init_rng.uniform() - 0.5) * scale);

    const Vocabulary& vv = model.vocab;
    std::vector<double> keep_prob(vv.size(), 1.0);
    if (config.subsample_t > 0) {
        for (WordId w = 0; w < vv.size(); ++w) {
            double f = static_cast<double>(vv.count(w)) / static_cast<double>(vv.total_tokens());
            double drop = 1.0 - std::sqrt(config.subsample_t / f);
            keep_prob[w] = drop <= 0 ? 1.0 : 1.0 - drop;
        }
    }
    NegativeTable table(vv, negative_table_size(vv.size()));
    const std::size_t n_sentences = set.offsets.size() - 1;
    const std::uint64_t per_epoch = set.tokens.size();
    const std::uint64_t planned = std::max<std::uint64_t>(1, per_epoch * config.epochs);

    TrainLog local_log;
    const int threads = static_cast<int>(config.threads);
    std::vector<WorkerState> workers;
    for (int t = 0; t < threads; ++t) {
        workers.push_back(WorkerState{Rng(config.seed ^ (0x9e3779b97f4a7c15ULL * std::uint64_t(t + 1))), {}, {}, {}, {}});
    }

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::uint64_t base = per_epoch * epoch;
        for (auto& w : workers) {
            w.loss = 0;
            w.updates = 0;
            w.processed = 0;
        }
        if (threads == 1) {
            train_range(model, set, 0, n_sentences, table, keep_prob, planned, base, 1, workers[0]);
        } else {
#pragma omp parallel num_threads(threads)
            {
                const int t = omp_get_thread_num();
                const int nt = omp_get_num_threads();
                std::size_t first = n_sentences * std::size_t(t) / std::size_t(nt);
                std::size_t last = n_sentences * std::size_t(t + 1) / std::size_t(nt);
                train_range(model, set, first, last, table, keep_prob, planned, base, std::uint64_t(nt),
                            workers[std::size_t(t)]);
            }
        }
        double loss = 0;
        std::uint64_t updates = 0;
        for (const auto& w : workers) {
            loss += w.loss;
            updates += w.updates;
        }
        if (!model.all_finite()) {
            throw Error("training diverged: non-finite weights after epoch " + std::to_string(epoch + 1));
        }
        local_log.epoch_mean_loss.push_back(updates ? loss / static_cast<double>(updates) : 0.0);
        local_log.epoch_updates.push_back(updates);
    }
    if (log) *log = std::move(local_log);
    return model;
}

EmbeddingModel train_cbow(const Corpus& corpus, const TrainConfig& config, TrainLog* log) {
    return train_cbow(CorpusView::all(corpus), config, log);
}

// ---------------------------------------------------------------------------
// Queries

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw PreconditionError("cosine: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0 || nb == 0) throw PreconditionError("cosine: zero vector");
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

double cosine(const EmbeddingModel& model, std::string_view w1, std::string_view w2) {
    WordId a = model.vocab.id(w1);
    WordId b = model.vocab.id(w2);
    try {
        return cosine(model.input_row(a), model.input_row(b));
    } catch (const PreconditionError&) {
        throw PreconditionError("cosine: zero vector for \"" + std::string(w1) + "\" or \"" + std::string(w2) + "\"");
    }
}

std::vector<Neighbor> neighbors(const EmbeddingModel& model, std::string_view word, std::size_t k) {
    WordId query = model.vocab.id(word);
    if (k == 0) return {};
    auto norm = [&](WordId id) {
        double n = 0;
        for (float x : model.input_row(id)) n += double(x) * double(x);
        return std::sqrt(n);
    };
    const double qn = norm(query);
    if (qn == 0) throw PreconditionError("neighbors: zero vector for \"" + std::string(word) + "\"");
    std::vector<Neighbor> all;
    all.reserve(model.vocab.size());
    auto q = model.input_row(query);
    for (WordId id = 0; id < model.vocab.size(); ++id) {
        if (id == query) continue;
        const double n = norm(id);
        if (n == 0) continue;
        auto row = model.input_row(id);
        double dot = 0;
        for (std::size_t d = 0; d < row.size(); ++d) dot += double(q[d]) * double(row[d]);
        all.push_back({model.vocab.word(id), std::clamp(dot / (qn * n), -1.0, 1.0)});
    }
    auto better = [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.word < b.word;
    };
    std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), better);
    all.resize(take);
    return all;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {
constexpr std::string_view kModelMagic = "BLSEMBED";
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

std::string serialize_model(const EmbeddingModel& model) {
    binary::Writer w;
    w.put_raw(kModelMagic);
    w.put<std::uint32_t>(kModelVersion);
    const auto& c = model.config;
    w.put<std::uint32_t>(c.dim);
    w.put<std::uint32_t>(c.window);
    w.put<std::uint32_t>(c.negatives);
    w.put<std::uint32_t>(c.epochs);
    w.put<double>(c.initial_lr);
    w.put<double>(c.min_lr);
    w.put<double>(c.subsample_t);
    w.put<std::uint64_t>(c.min_count);
    w.put<std::uint64_t>(c.seed);
    w.put<std::uint32_t>(c.threads);
    w.put<std::uint8_t>(c.shrink_window);
    const auto& v = model.vocab;
    w.put<double>(v.negative_table_exponent);
    w.put<std::uint64_t>(v.size());
    for (WordId i = 0; i < v.size(); ++i) {
        w.put_string(v.word(i));
        w.put<std::uint64_t>(v.count(i));
    }
    for (float x : model.input_vectors) w.put<float>(x);
    for (float x : model.output_vectors) w.put<float>(x);
    return w.data();
}

EmbeddingModel deserialize_model(std::string_view bytes, const std::string& what) {
    binary::Reader r(bytes, what);
    if (bytes.size() < kModelMagic.size() || r.get_raw(kModelMagic.size()) != kModelMagic) {
        throw FormatError(what + ": not a biaslens model file (bad magic)");
    }
    auto version = r.get<std::uint32_t>();
    if (version != kModelVersion) throw FormatError(what + ": unsupported model version " + std::to_string(version));
    TrainConfig c;
    c.dim = r.get<std::uint32_t>();
    c.window = r.get<std::uint32_t>();
    c.negatives = r.get<std::uint32_t>();
    c.epochs = r.get<std::uint32_t>();
    c.initial_lr = r.get<double>();
    c.min_lr = r.get<double>();
    c.subsample_t = r.get<double>();
    c.min_count = r.get<std::uint64_t>();
    c.seed = r.get<std::uint64_t>();
    c.threads = r.get<std::uint32_t>();
    c.shrink_window = r.get<std::uint8_t>() != 0;
    if (c.dim == 0) throw FormatError(what + ": zero dimension");
    double exponent = r.get<double>();
    auto n = r.get<std::uint64_t>();
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    for (std::uint64_t i = 0; i < n; ++i) {
        words.push_back(r.get_string());
        counts.push_back(r.get<std::uint64_t>());
    }
    const std::size_t cells = static_cast<std::size_t>(n) * c.dim;
    r.need(cells * 2 * sizeof(float));
    EmbeddingModel m;
    try {
        m.vocab = Vocabulary(std::move(words), std::move(counts));
    } catch (const PreconditionError& e) {
        throw FormatError(what + ": " + e.what());
    }
    m.vocab.negative_table_exponent = exponent;
    m.config = c;
    m.input_vectors.resize(cells);
    m.output_vectors.resize(cells);
    for (float& x : m.input_vectors) x = r.get<float>();
    for (float& x : m.output_vectors) x = r.get<float>();
    if (r.remaining() != 0) throw FormatError(what + ": trailing bytes after model");
    return m;
}

void save_model(const EmbeddingModel& model, const fs::path& path) {
    const std::string bytes = serialize_model(model);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

EmbeddingModel load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str(), path.string());
}

void export_text_vectors(const EmbeddingModel& model, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << model.vocab.size() << ' ' << model.dim() << '\n';
    char buf[32];
    for (WordId id = 0; id < model.vocab.size(); ++id) {
        out << model.vocab.word(id);
        for (float x : model.input_row(id)) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::string model_checksum(const EmbeddingModel& model) {
    Fnv1a h;
    h.update(serialize_model(model));
    return h.hex();
}

}  // namespace biaslens
