#pragma once

// Three-way alignment of (original, predicted, expected) sentences.
//
// Both the original and the predicted sentence are aligned to the expected
// sentence, and the two alignments are joined on it. Every expected word gives
// one pivot record. Words of the original or the prediction with no expected
// counterpart fall into the gap between two pivots; inside a gap, a predicted
// word identical to a leftover original word is paired with it (the system
// kept a word the gold drops), and any other leftover predicted word is a
// hallucination.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spellbench/align.hpp"
#include "spellbench/textnorm.hpp"

namespace spellbench {

struct EvalTriple {
    std::string original;
    std::string predicted;
    std::string expected;

    bool operator==(const EvalTriple&) const = default;
};

struct TripleRecord {
    std::optional<std::string> expected_token;
    std::optional<std::string> original_token;
    std::optional<std::string> predicted_token;
    bool hallucinated = false;

    std::optional<std::size_t> expected_index;
    std::optional<std::size_t> original_index;
    std::optional<std::size_t> predicted_index;

    bool is_pivot() const noexcept { return expected_token.has_value(); }
    bool operator==(const TripleRecord&) const = default;
};

struct TripleAlignment {
    std::vector<TripleRecord> records;
    EvalTriple source;

    std::size_t hallucination_count() const noexcept {
        std::size_t n = 0;
        for (const auto& r : records) n += r.hallucinated ? 1 : 0;
        return n;
    }
};

namespace detail {

struct PivotView {
    // aligned[j] = index in the side sequence paired with expected j
    std::vector<std::optional<std::size_t>> aligned;
    // gaps[g] = side indices with no expected counterpart that sit before
    // expected position g (g == m is the tail)
    std::vector<std::vector<std::size_t>> gaps;
};

inline PivotView pivot_view(const Alignment& al, std::size_t expected_len) {
    PivotView v;
    v.aligned.assign(expected_len, std::nullopt);
    v.gaps.assign(expected_len + 1, {});
    std::size_t consumed = 0;
    for (const auto& op : al.ops) {
        switch (op.kind) {
            case OpKind::match:
            case OpKind::substitute:
                v.aligned[*op.b_index] = op.a_index;
                consumed = *op.b_index + 1;
                break;
            case OpKind::insert_b:
                consumed = *op.b_index + 1;
                break;
            case OpKind::delete_a:
                v.gaps[consumed].push_back(*op.a_index);
                break;
        }
    }
    return v;
}

}  // namespace detail

/// Joins alignments of pre-tokenized sentences. All three must have been
/// tokenized under the same NormConfig.
inline std::vector<TripleRecord> triple_records(const TokenizedSentence& original,
                                                const TokenizedSentence& predicted,
                                                const TokenizedSentence& expected) {
    const std::size_t m = expected.size();
    const auto ov = detail::pivot_view(word_align(original, expected), m);
    const auto pv = detail::pivot_view(word_align(predicted, expected), m);

    std::vector<TripleRecord> records;
    records.reserve(m + original.size() + predicted.size());

    auto original_only = [&](std::size_t i) {
        TripleRecord r;
        r.original_token = original.tokens[i];
        r.original_index = i;
        return r;
    };
    auto predicted_only = [&](std::size_t k) {
        TripleRecord r;
        r.predicted_token = predicted.tokens[k];
        r.predicted_index = k;
        r.hallucinated = true;
        return r;
    };

    for (std::size_t g = 0; g <= m; ++g) {
        const auto& og = ov.gaps[g];
        const auto& pg = pv.gaps[g];
        if (pg.empty()) {
            for (auto i : og) records.push_back(original_only(i));
        } else if (og.empty()) {
            for (auto k : pg) records.push_back(predicted_only(k));
        } else {
            const auto gap = align_indices(og.size(), pg.size(), [&](std::size_t x, std::size_t y) {
                return original.tokens[og[x]] == predicted.tokens[pg[y]] ? 0.0
                                                                        : std::numeric_limits<double>::infinity();
            });
            for (const auto& op : gap.ops) {
                if (op.kind == OpKind::delete_a) {
                    records.push_back(original_only(og[*op.a_index]));
                } else if (op.kind == OpKind::insert_b) {
                    records.push_back(predicted_only(pg[*op.b_index]));
                } else {
                    TripleRecord r = original_only(og[*op.a_index]);
                    r.predicted_token = predicted.tokens[pg[*op.b_index]];
                    r.predicted_index = pg[*op.b_index];
                    records.push_back(std::move(r));
                }
            }
        }

        if (g == m) break;
        TripleRecord r;
        r.expected_token = expected.tokens[g];
        r.expected_index = g;
        if (auto i = ov.aligned[g]) {
            r.original_token = original.tokens[*i];
            r.original_index = *i;
        }
        if (auto k = pv.aligned[g]) {
            r.predicted_token = predicted.tokens[*k];
            r.predicted_index = *k;
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline TripleAlignment triple_align(const EvalTriple& t, const NormConfig& cfg = {}) {
    TripleAlignment out;
    out.records = triple_records(prepare(t.original, cfg), prepare(t.predicted, cfg), prepare(t.expected, cfg));
    out.source = t;
    return out;
}

}  // namespace spellbench
