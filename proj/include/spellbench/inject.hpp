#pragma once

// Spelling-error statistics: estimating an error model from parallel
// noisy/clean text, injecting synthetic errors into clean text, and measuring
// the share of grapheme clusters that differ between the two.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spellbench/align.hpp"
#include "spellbench/parallel.hpp"
#include "spellbench/textnorm.hpp"

namespace spellbench {

enum class ErrorType : std::size_t { substitute = 0, insert = 1, erase = 2, transpose = 3 };

inline constexpr std::array<ErrorType, 4> kErrorTypes = {ErrorType::substitute, ErrorType::insert, ErrorType::erase,
                                                         ErrorType::transpose};

inline std::string_view to_string(ErrorType t) {
    switch (t) {
        case ErrorType::substitute: return "substitute";
        case ErrorType::insert: return "insert";
        case ErrorType::erase: return "delete";
        case ErrorType::transpose: return "transpose";
    }
    return "?";
}

/// Malformed or mismatched input files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An error model that cannot be used as asked.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using GraphemeCounts = std::map<std::string, std::uint64_t>;

struct ErrorModel {
    std::array<double, 4> proportions{};  // indexed by ErrorType
    std::map<std::string, GraphemeCounts> confusion;  // clean grapheme -> noisy grapheme -> count
    GraphemeCounts insert_pool;
    double pass_through_default = 0.9;

    double proportion(ErrorType t) const { return proportions[static_cast<std::size_t>(t)]; }
    double& proportion(ErrorType t) { return proportions[static_cast<std::size_t>(t)]; }

    void validate() const {
        double sum = 0.0;
        for (double p : proportions) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw ModelError("error proportions must be finite and non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ModelError("error proportions must sum to 1");
        for (const auto& [g, row] : confusion) {
            std::uint64_t total = 0;
            for (const auto& [h, n] : row) total += n;
            if (total == 0) throw ModelError("confusion row for '" + g + "' has no counts");
        }
        if (!(pass_through_default >= 0.0 && pass_through_default <= 1.0))
            throw ModelError("pass_through_default must lie in [0, 1]");
    }

    bool operator==(const ErrorModel&) const = default;
};

struct InjectionConfig {
    double pass_through_rate = 0.9;
    std::uint64_t seed = 0;
    unsigned max_edits_per_word = 1;

    void validate() const {
        if (!(pass_through_rate >= 0.0 && pass_through_rate <= 1.0))
            throw std::invalid_argument("pass_through_rate must lie in [0, 1]");
        if (max_edits_per_word == 0) throw std::invalid_argument("max_edits_per_word must be positive");
    }
};

// ---------------------------------------------------------------------------
// estimation

/// Additive tallies behind an ErrorModel. Tallies from disjoint parts of a
/// corpus merge with +=.
struct ErrorTally {
    std::array<std::uint64_t, 4> counts{};
    std::map<std::string, GraphemeCounts> confusion;
    GraphemeCounts insert_pool;
    std::uint64_t clean_words = 0;
    std::uint64_t unchanged_words = 0;

    std::uint64_t& count(ErrorType t) { return counts[static_cast<std::size_t>(t)]; }
    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }

    ErrorTally& operator+=(const ErrorTally& o) {
        for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += o.counts[k];
        for (const auto& [g, row] : o.confusion)
            for (const auto& [h, n] : row) confusion[g][h] += n;
        for (const auto& [g, n] : o.insert_pool) insert_pool[g] += n;
        clean_words += o.clean_words;
        unchanged_words += o.unchanged_words;
        return *this;
    }
};

/// Tallies the grapheme edits that turn `clean` into `noisy`.
///
/// Transpositions are recognised heuristically as an adjacent swap inside the
/// unit-cost alignment: two crossed substitutions (ab -> ba), or a
/// delete/match/insert or insert/match/delete run that moves one grapheme
/// across its neighbour.
inline void tally_word_edits(std::span<const std::string> clean, std::span<const std::string> noisy,
                             ErrorTally& tally) {
    const auto al = grapheme_align(clean, noisy);
    const auto& ops = al.ops;
    auto sub = [&](std::size_t k) { return k < ops.size() && ops[k].kind == OpKind::substitute; };
    auto is = [&](std::size_t k, OpKind kind) { return k < ops.size() && ops[k].kind == kind; };

    for (std::size_t k = 0; k < ops.size();) {
        if (sub(k) && sub(k + 1)) {
            const auto a = *ops[k].a_index, b = *ops[k].b_index;
            if (*ops[k + 1].a_index == a + 1 && *ops[k + 1].b_index == b + 1 && clean[a] == noisy[b + 1] &&
                clean[a + 1] == noisy[b]) {
                ++tally.count(ErrorType::transpose);
                k += 2;
                continue;
            }
        }
        if (is(k, OpKind::delete_a) && is(k + 1, OpKind::match) && is(k + 2, OpKind::insert_b) &&
            clean[*ops[k].a_index] == noisy[*ops[k + 2].b_index]) {
            ++tally.count(ErrorType::transpose);
            k += 3;
            continue;
        }
        if (is(k, OpKind::insert_b) && is(k + 1, OpKind::match) && is(k + 2, OpKind::delete_a) &&
            noisy[*ops[k].b_index] == clean[*ops[k + 2].a_index]) {
            ++tally.count(ErrorType::transpose);
            k += 3;
            continue;
        }

        const auto& op = ops[k];
        switch (op.kind) {
            case OpKind::match: break;
            case OpKind::substitute:
                ++tally.count(ErrorType::substitute);
                ++tally.confusion[clean[*op.a_index]][noisy[*op.b_index]];
                ++tally.insert_pool[noisy[*op.b_index]];
                break;
            case OpKind::insert_b:
                ++tally.count(ErrorType::insert);
                ++tally.insert_pool[noisy[*op.b_index]];
                break;
            case OpKind::delete_a:
                ++tally.count(ErrorType::erase);
                break;
        }
        ++k;
    }
}

/// Tallies one noisy/clean sentence pair. Words are aligned first; a
/// substituted word contributes its grapheme edits, and a word present on
/// only one side counts as a single insertion or deletion.
inline void tally_sentence(const TokenizedSentence& noisy, const TokenizedSentence& clean, ErrorTally& tally) {
    const auto al = word_align(clean, noisy);
    tally.clean_words += clean.size();
    for (const auto& op : al.ops) {
        switch (op.kind) {
            case OpKind::match: ++tally.unchanged_words; break;
            case OpKind::substitute:
                tally_word_edits(clean.token_graphemes[*op.a_index], noisy.token_graphemes[*op.b_index], tally);
                break;
            case OpKind::insert_b: ++tally.count(ErrorType::insert); break;
            case OpKind::delete_a: ++tally.count(ErrorType::erase); break;
        }
    }
}

/// Turns tallies into a model. Throws ModelError when no edit was observed.
inline ErrorModel finish_model(const ErrorTally& tally) {
    const std::uint64_t total = tally.total();
    if (total == 0) throw ModelError("no error signal in corpus");
    ErrorModel m;
    for (auto t : kErrorTypes)
        m.proportion(t) =
            static_cast<double>(tally.counts[static_cast<std::size_t>(t)]) / static_cast<double>(total);
    m.confusion = tally.confusion;
    m.insert_pool = tally.insert_pool;
    m.pass_through_default = tally.clean_words == 0 ? 1.0
                                                    : static_cast<double>(tally.unchanged_words) /
                                                          static_cast<double>(tally.clean_words);
    return m;
}

/// Streaming estimator: feed noisy/clean sentence pairs, then call model().
class ErrorModelEstimator {
public:
    explicit ErrorModelEstimator(NormConfig cfg = {}) : cfg_(cfg) {}

    void add(std::string_view noisy, std::string_view clean) {
        tally_sentence(prepare(noisy, cfg_), prepare(clean, cfg_), tally_);
        ++pairs_;
    }

    void merge(const ErrorModelEstimator& other) {
        tally_ += other.tally_;
        pairs_ += other.pairs_;
    }

    const ErrorTally& tally() const noexcept { return tally_; }
    std::size_t pairs() const noexcept { return pairs_; }

    ErrorModel model() const { return finish_model(tally_); }

private:
    NormConfig cfg_;
    ErrorTally tally_;
    std::size_t pairs_ = 0;
};

inline ErrorModel estimate_error_model(std::span<const std::string> noisy, std::span<const std::string> clean,
                                       const NormConfig& cfg = {}) {
    if (noisy.size() != clean.size())
        throw FormatError("noisy and clean corpora differ in length (" + std::to_string(noisy.size()) + " vs " +
                          std::to_string(clean.size()) + " sentences)");
    if (noisy.empty()) throw FormatError("empty corpus");

    const std::size_t workers = std::min<std::size_t>(thread_count(), noisy.size());
    std::vector<ErrorModelEstimator> parts(workers, ErrorModelEstimator(cfg));
    const std::size_t block = (noisy.size() + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w) {
        const std::size_t end = std::min(noisy.size(), (w + 1) * block);
        for (std::size_t i = w * block; i < end; ++i) parts[w].add(noisy[i], clean[i]);
    });
    for (std::size_t w = 1; w < workers; ++w) parts[0].merge(parts[w]);
    return parts[0].model();
}

// ---------------------------------------------------------------------------
// injection

/// Counter-based random stream keyed by (seed, sentence, word). Draws depend
/// only on the key, never on the order in which words are processed.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t sentence, std::uint64_t word)
        : key_(mix(mix(mix(seed) ^ sentence) ^ (word * 0xD1B54A32D192ED03ull))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0, without modulo bias.
    std::size_t below(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

namespace detail {

inline ErrorType sample_type(const ErrorModel& model, CounterRng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    ErrorType last = ErrorType::substitute;
    for (auto t : kErrorTypes) {
        const double p = model.proportion(t);
        if (p <= 0.0) continue;
        acc += p;
        last = t;
        if (u < acc) return t;
    }
    return last;
}

inline const std::string& sample_weighted(const GraphemeCounts& counts, std::uint64_t total, CounterRng& rng,
                                          const std::string* exclude) {
    std::uint64_t r = rng.below(static_cast<std::size_t>(total));
    for (const auto& [g, n] : counts) {
        if (exclude && g == *exclude) continue;
        if (r < n) return g;
        r -= n;
    }
    throw ModelError("weighted sampling ran past the table");
}

inline std::string pick_insertion(const ErrorModel& model, CounterRng& rng) {
    std::uint64_t total = 0;
    for (const auto& [g, n] : model.insert_pool) total += n;
    if (total == 0) throw ModelError("insertion sampled but insert_pool is empty");
    return sample_weighted(model.insert_pool, total, rng, nullptr);
}

inline std::string pick_substitute(const ErrorModel& model, const std::string& current, CounterRng& rng) {
    if (auto it = model.confusion.find(current); it != model.confusion.end()) {
        std::uint64_t total = 0;
        for (const auto& [g, n] : it->second)
            if (g != current) total += n;
        if (total > 0) return sample_weighted(it->second, total, rng, &current);
    }
    std::vector<const std::string*> pool;
    pool.reserve(model.insert_pool.size());
    for (const auto& [g, n] : model.insert_pool)
        if (g != current && n > 0) pool.push_back(&g);
    if (pool.empty()) throw ModelError("no substitution candidate for '" + current + "'");
    return *pool[rng.below(pool.size())];
}

inline void apply_edit(std::vector<std::string>& g, ErrorType type, const ErrorModel& model, CounterRng& rng) {
    if (type == ErrorType::erase && g.size() < 2) type = ErrorType::substitute;
    if (type == ErrorType::transpose) {
        std::vector<std::size_t> swappable;
        for (std::size_t i = 0; i + 1 < g.size(); ++i)
            if (g[i] != g[i + 1]) swappable.push_back(i);
        if (swappable.empty()) {
            type = ErrorType::substitute;
        } else {
            const std::size_t i = swappable[rng.below(swappable.size())];
            std::swap(g[i], g[i + 1]);
            return;
        }
    }
    switch (type) {
        case ErrorType::substitute: {
            const std::size_t i = rng.below(g.size());
            g[i] = pick_substitute(model, g[i], rng);
            break;
        }
        case ErrorType::insert: {
            const std::size_t i = rng.below(g.size() + 1);
            g.insert(g.begin() + static_cast<std::ptrdiff_t>(i), pick_insertion(model, rng));
            break;
        }
        case ErrorType::erase: {
            const std::size_t i = rng.below(g.size());
            g.erase(g.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
        case ErrorType::transpose: break;
    }
}

}  // namespace detail

/// Corrupts one word, or returns it unchanged with probability
/// cfg.pass_through_rate. A corrupted word receives between 1 and
/// cfg.max_edits_per_word edits and is never empty.
inline std::string inject_word(std::string_view word, const ErrorModel& model, const InjectionConfig& cfg,
                               const NormConfig& norm, CounterRng& rng) {
    if (rng.uniform() < cfg.pass_through_rate) return std::string(word);
    auto g = graphemes(normalize(word, norm), norm);
    if (g.empty()) return std::string(word);
    const std::size_t edits = cfg.max_edits_per_word <= 1 ? 1 : 1 + rng.below(cfg.max_edits_per_word);
    for (std::size_t e = 0; e < edits; ++e) detail::apply_edit(g, detail::sample_type(model, rng), model, rng);
    std::string out;
    for (const auto& s : g) out += s;
    return out;
}

/// Corrupts the words of one sentence. Whitespace between words is copied
/// through, so with pass_through_rate == 1 the output equals the input byte
/// for byte.
inline std::string inject_sentence(std::string_view sentence, std::uint64_t sentence_index, const ErrorModel& model,
                                   const InjectionConfig& cfg, const NormConfig& norm = {}) {
    std::string out;
    out.reserve(sentence.size() + 8);
    std::size_t copied = 0;
    std::uint64_t w = 0;
    for (auto [b, e] : word_spans(sentence)) {
        out.append(sentence.substr(copied, b - copied));
        CounterRng rng(cfg.seed, sentence_index, w++);
        out += inject_word(sentence.substr(b, e - b), model, cfg, norm, rng);
        copied = e;
    }
    out.append(sentence.substr(copied));
    return out;
}

/// Injects errors into every sentence. `first_index` offsets the sentence
/// counter so a corpus processed in chunks gives the same result as one pass.
inline std::vector<std::string> inject_errors(std::span<const std::string> clean, const ErrorModel& model,
                                              const InjectionConfig& cfg, const NormConfig& norm = {},
                                              std::uint64_t first_index = 0) {
    model.validate();
    cfg.validate();
    std::vector<std::string> out(clean.size());
    parallel_for(clean.size(),
                 [&](std::size_t i) { out[i] = inject_sentence(clean[i], first_index + i, model, cfg, norm); });
    return out;
}

// ---------------------------------------------------------------------------
// error percentage

/// Accumulates the grapheme-level difference between noisy and clean text.
///
/// Per sentence pair the words are aligned; an aligned pair contributes its
/// grapheme edit distance and an unaligned word its full grapheme length.
/// The denominator is the clean grapheme count. Whitespace is excluded from
/// both.
class ErrorPercentageMeter {
public:
    explicit ErrorPercentageMeter(NormConfig cfg = {}) : cfg_(cfg) {}

    void add(std::string_view noisy, std::string_view clean) {
        const auto n = prepare(noisy, cfg_);
        const auto c = prepare(clean, cfg_);
        for (const auto& g : c.token_graphemes) clean_graphemes_ += g.size();
        for (const auto& op : word_align(n, c).ops) {
            switch (op.kind) {
                case OpKind::match: break;
                case OpKind::substitute:
                    differing_ += grapheme_distance(n.token_graphemes[*op.a_index], c.token_graphemes[*op.b_index]);
                    break;
                case OpKind::delete_a: differing_ += n.token_graphemes[*op.a_index].size(); break;
                case OpKind::insert_b: differing_ += c.token_graphemes[*op.b_index].size(); break;
            }
        }
    }

    void merge(const ErrorPercentageMeter& o) {
        differing_ += o.differing_;
        clean_graphemes_ += o.clean_graphemes_;
    }

    std::uint64_t differing() const noexcept { return differing_; }
    std::uint64_t clean_graphemes() const noexcept { return clean_graphemes_; }

    /// differing / clean graphemes, capped at 1. An empty clean side gives 0
    /// when nothing differs and 1 otherwise.
    double value() const noexcept {
        if (clean_graphemes_ == 0) return differing_ == 0 ? 0.0 : 1.0;
        return std::min(1.0, static_cast<double>(differing_) / static_cast<double>(clean_graphemes_));
    }

private:
    NormConfig cfg_;
    std::uint64_t differing_ = 0;
    std::uint64_t clean_graphemes_ = 0;
};

inline double measure_error_percentage(std::span<const std::string> noisy, std::span<const std::string> clean,
                                       const NormConfig& cfg = {}) {
    if (noisy.size() != clean.size())
        throw FormatError("noisy and clean corpora differ in length (" + std::to_string(noisy.size()) + " vs " +
                          std::to_string(clean.size()) + " sentences)");
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), noisy.size()));
    std::vector<ErrorPercentageMeter> parts(workers, ErrorPercentageMeter(cfg));
    const std::size_t block = (noisy.size() + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w) {
        const std::size_t end = std::min(noisy.size(), (w + 1) * block);
        for (std::size_t i = w * block; i < end; ++i) parts[w].add(noisy[i], clean[i]);
    });
    for (std::size_t w = 1; w < workers; ++w) parts[0].merge(parts[w]);
    return parts[0].value();
}

}  // namespace spellbench
