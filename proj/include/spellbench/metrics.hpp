#pragma once

// Detection / correction counts and corpus-level scores.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spellbench/triple.hpp"

namespace spellbench {

/// Raised when a record breaks the TripleRecord invariants.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct CountTable {
    std::uint64_t det_tp = 0;
    std::uint64_t det_fp = 0;
    std::uint64_t det_fn = 0;
    std::uint64_t det_tn = 0;
    std::uint64_t cor_tp = 0;
    std::uint64_t cor_fp = 0;
    std::uint64_t cor_fn = 0;

    CountTable& operator+=(const CountTable& o) noexcept {
        det_tp += o.det_tp;
        det_fp += o.det_fp;
        det_fn += o.det_fn;
        det_tn += o.det_tn;
        cor_tp += o.cor_tp;
        cor_fp += o.cor_fp;
        cor_fn += o.cor_fn;
        return *this;
    }
    friend CountTable operator+(CountTable a, const CountTable& b) noexcept { return a += b; }
    bool operator==(const CountTable&) const = default;
};

/// Counts contributed by one record.
///
/// With o, p, e the original, predicted and expected tokens (any may be
/// absent): error = o != e, flagged = p != o.
///   detection:  tp = error & flagged, fp = !error & flagged,
///               fn = error & !flagged, tn = otherwise
///   correction: tp = error & p == e, fp = flagged & p != e,
///               fn = error & p != e
/// A hallucinated record counts as one detection and one correction false
/// positive.
inline CountTable classify(const TripleRecord& rec) {
    const bool any = rec.expected_token || rec.original_token || rec.predicted_token;
    if (!any) throw ConsistencyError("record has no tokens");
    const bool should_hallucinate = rec.predicted_token && !rec.expected_token && !rec.original_token;
    if (rec.hallucinated != should_hallucinate)
        throw ConsistencyError(rec.hallucinated ? "hallucinated record carries an original or expected token"
                                                : "predicted-only record not flagged as hallucinated");

    CountTable c;
    if (rec.hallucinated) {
        c.det_fp = 1;
        c.cor_fp = 1;
        return c;
    }
    const auto& o = rec.original_token;
    const auto& p = rec.predicted_token;
    const auto& e = rec.expected_token;
    const bool error = o != e;
    const bool flagged = p != o;
    const bool corrected = p == e;

    if (error && flagged) c.det_tp = 1;
    else if (flagged) c.det_fp = 1;
    else if (error) c.det_fn = 1;
    else c.det_tn = 1;

    if (error && corrected) c.cor_tp = 1;
    if (flagged && !corrected) c.cor_fp = 1;
    if (error && !corrected) c.cor_fn = 1;
    return c;
}

inline CountTable classify(const std::vector<TripleRecord>& records) {
    CountTable c;
    for (const auto& r : records) c += classify(r);
    return c;
}

/// F-beta from precision and recall; 0 when both are 0.
inline double f_beta(double p, double r, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("f_beta: beta must be positive");
    if (p == 0.0 && r == 0.0) return 0.0;
    const double b2 = beta * beta;
    return (1.0 + b2) * p * r / (b2 * p + r);
}

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f0_5 = 0.0;

    bool operator==(const Scores&) const = default;
};

/// Precision and recall with the empty-denominator convention: a ratio whose
/// denominator is 0 is 1 when the other denominator is 0 as well, else 0.
inline Scores score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    const std::uint64_t pd = tp + fp;
    const std::uint64_t rd = tp + fn;
    Scores s;
    if (pd == 0 && rd == 0) {
        s.precision = s.recall = 1.0;
    } else {
        s.precision = pd == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pd);
        s.recall = rd == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(rd);
    }
    s.f1 = f_beta(s.precision, s.recall, 1.0);
    s.f0_5 = f_beta(s.precision, s.recall, 0.5);
    return s;
}

struct LineError {
    std::size_t line = 0;  // 1-based
    std::string message;

    bool operator==(const LineError&) const = default;
};

struct MetricReport {
    Scores detection;
    Scores correction;
    CountTable counts;
    std::size_t n_sentences = 0;
    std::size_t n_hallucinated = 0;
    std::vector<LineError> errors;

    bool operator==(const MetricReport&) const = default;
};

inline MetricReport make_report(const CountTable& counts, std::size_t n_sentences, std::size_t n_hallucinated) {
    MetricReport r;
    r.counts = counts;
    r.detection = score(counts.det_tp, counts.det_fp, counts.det_fn);
    r.correction = score(counts.cor_tp, counts.cor_fp, counts.cor_fn);
    r.n_sentences = n_sentences;
    r.n_hallucinated = n_hallucinated;
    return r;
}

/// Running micro-aggregate over triples. Accumulators merge associatively,
/// so a corpus can be split, evaluated in pieces and reduced.
class CorpusAccumulator {
public:
    void add_records(const std::vector<TripleRecord>& records) {
        counts_ += classify(records);
        for (const auto& r : records) hallucinated_ += r.hallucinated ? 1 : 0;
        ++sentences_;
    }

    CorpusAccumulator& operator+=(const CorpusAccumulator& o) {
        counts_ += o.counts_;
        sentences_ += o.sentences_;
        hallucinated_ += o.hallucinated_;
        return *this;
    }

    const CountTable& counts() const noexcept { return counts_; }
    std::size_t sentences() const noexcept { return sentences_; }
    std::size_t hallucinated() const noexcept { return hallucinated_; }

    MetricReport report() const { return make_report(counts_, sentences_, hallucinated_); }

private:
    CountTable counts_;
    std::size_t sentences_ = 0;
    std::size_t hallucinated_ = 0;
};

/// Word-by-word positional comparison with no alignment at all. Position i
/// compares original[i], predicted[i] and expected[i]; past the end of a
/// sentence the token is absent. Kept only as a baseline that shows how a
/// single insertion shifts every later position.
inline std::vector<TripleRecord> positional_records(const TokenizedSentence& original,
                                                    const TokenizedSentence& predicted,
                                                    const TokenizedSentence& expected) {
    const std::size_t n = std::max({original.size(), predicted.size(), expected.size()});
    std::vector<TripleRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = out[i];
        if (i < original.size()) {
            r.original_token = original.tokens[i];
            r.original_index = i;
        }
        if (i < predicted.size()) {
            r.predicted_token = predicted.tokens[i];
            r.predicted_index = i;
        }
        if (i < expected.size()) {
            r.expected_token = expected.tokens[i];
            r.expected_index = i;
        }
        r.hallucinated = r.predicted_token && !r.original_token && !r.expected_token;
    }
    return out;
}

enum class EvalMode { aligned, legacy };

namespace detail {

inline void check_triple(const TokenizedSentence& expected) {
    if (expected.empty()) throw std::invalid_argument("expected sentence is empty");
}

}  // namespace detail

/// Records for one triple under the chosen evaluator.
inline std::vector<TripleRecord> evaluation_records(const EvalTriple& t, const NormConfig& cfg, EvalMode mode) {
    const auto o = prepare(t.original, cfg);
    const auto p = prepare(t.predicted, cfg);
    const auto e = prepare(t.expected, cfg);
    detail::check_triple(e);
    return mode == EvalMode::aligned ? triple_records(o, p, e) : positional_records(o, p, e);
}

/// Micro-averaged evaluation of a triple range. A triple that cannot be
/// evaluated (invalid UTF-8, empty expected sentence) is skipped and reported
/// in `errors` with its 1-based position; the rest still count.
template <class Range>
MetricReport evaluate_triples(const Range& triples, const NormConfig& cfg, EvalMode mode) {
    CorpusAccumulator acc;
    std::vector<LineError> errors;
    std::size_t line = 0;
    for (const EvalTriple& t : triples) {
        ++line;
        try {
            acc.add_records(evaluation_records(t, cfg, mode));
        } catch (const std::exception& ex) {
            errors.push_back({line, ex.what()});
        }
    }
    MetricReport r = acc.report();
    r.errors = std::move(errors);
    return r;
}

template <class Range>
MetricReport evaluate_corpus(const Range& triples, const NormConfig& cfg = {}) {
    return evaluate_triples(triples, cfg, EvalMode::aligned);
}

template <class Range>
MetricReport legacy_evaluate(const Range& triples, const NormConfig& cfg = {}) {
    return evaluate_triples(triples, cfg, EvalMode::legacy);
}

}  // namespace spellbench
