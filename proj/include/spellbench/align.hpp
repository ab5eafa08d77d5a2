#pragma once

// Monotone edit-distance alignment at word and grapheme level.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spellbench/textnorm.hpp"

namespace spellbench {

enum class OpKind { match, substitute, insert_b, delete_a };

inline std::string_view to_string(OpKind k) {
    switch (k) {
        case OpKind::match: return "match";
        case OpKind::substitute: return "substitute";
        case OpKind::insert_b: return "insert_b";
        case OpKind::delete_a: return "delete_a";
    }
    return "?";
}

/// One step of an alignment between sequences A and B.
/// match/substitute carry both indices, insert_b only b_index, delete_a only
/// a_index.
struct AlignOp {
    OpKind kind;
    std::optional<std::size_t> a_index;
    std::optional<std::size_t> b_index;
    double cost = 0.0;

    bool operator==(const AlignOp&) const = default;
};

struct Alignment {
    std::vector<AlignOp> ops;
    double total_cost = 0.0;

    bool operator==(const Alignment&) const = default;
};

/// Costs closer than this are treated as ties.
inline constexpr double kCostTieTolerance = 1e-9;

/// Minimum-cost monotone alignment of index ranges [0,n) and [0,m).
///
/// `sub_cost(i, j)` gives the cost of pairing a[i] with b[j]; zero marks a
/// match, +infinity forbids the pairing. Insertions and deletions cost
/// `indel`.
///
/// Ties are broken by walking forward from the start and taking, among the
/// optimal continuations, a pairing first, then a deletion from A, then an
/// insertion from B. The result is the lexicographically smallest optimal op
/// sequence under that order, so equal inputs always give equal alignments.
template <class SubCost>
Alignment align_indices(std::size_t n, std::size_t m, SubCost&& sub_cost, double indel = 1.0) {
    const std::size_t w = m + 1;
    // suffix[i*w + j] = optimal cost of aligning a[i..n) with b[j..m)
    std::vector<double> suffix((n + 1) * w, 0.0);
    std::vector<double> sub((n + 1) * w, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) sub[i * w + j] = sub_cost(i, j);

    for (std::size_t i = n + 1; i-- > 0;) {
        for (std::size_t j = m + 1; j-- > 0;) {
            if (i == n && j == m) continue;
            double best = std::numeric_limits<double>::infinity();
            if (i < n && j < m) best = std::min(best, sub[i * w + j] + suffix[(i + 1) * w + j + 1]);
            if (i < n) best = std::min(best, indel + suffix[(i + 1) * w + j]);
            if (j < m) best = std::min(best, indel + suffix[i * w + j + 1]);
            suffix[i * w + j] = best;
        }
    }

    Alignment out;
    out.ops.reserve(n + m);
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        const double target = suffix[i * w + j] + kCostTieTolerance;
        if (i < n && j < m && sub[i * w + j] + suffix[(i + 1) * w + j + 1] <= target) {
            const double c = sub[i * w + j];
            out.ops.push_back({c == 0.0 ? OpKind::match : OpKind::substitute, i, j, c});
            out.total_cost += c;
            ++i;
            ++j;
        } else if (i < n && indel + suffix[(i + 1) * w + j] <= target) {
            out.ops.push_back({OpKind::delete_a, i, std::nullopt, indel});
            out.total_cost += indel;
            ++i;
        } else {
            out.ops.push_back({OpKind::insert_b, std::nullopt, j, indel});
            out.total_cost += indel;
            ++j;
        }
    }
    return out;
}

using Graphemes = std::vector<std::string>;

/// Unit-cost Levenshtein distance over grapheme clusters.
inline std::size_t grapheme_distance(std::span<const std::string> x, std::span<const std::string> y) {
    if (x.size() < y.size()) std::swap(x, y);
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0u : 1u)});
            diag = up;
        }
    }
    return row[y.size()];
}

inline std::size_t grapheme_distance(std::string_view x, std::string_view y, const NormConfig& cfg = {}) {
    const auto gx = graphemes(x, cfg);
    const auto gy = graphemes(y, cfg);
    return grapheme_distance(gx, gy);
}

/// Word substitution cost: grapheme edit distance over the longer length.
/// 0 for identical words, otherwise in (0, 1].
inline double substitution_cost(std::span<const std::string> x, std::span<const std::string> y) {
    if (std::equal(x.begin(), x.end(), y.begin(), y.end())) return 0.0;
    const std::size_t longest = std::max(x.size(), y.size());
    return std::min(1.0, static_cast<double>(grapheme_distance(x, y)) / static_cast<double>(longest));
}

inline Alignment grapheme_align(std::span<const std::string> x, std::span<const std::string> y) {
    return align_indices(x.size(), y.size(), [&](std::size_t i, std::size_t j) { return x[i] == y[j] ? 0.0 : 1.0; });
}

/// Unit-cost alignment of the grapheme clusters of two tokens.
inline Alignment grapheme_align(std::string_view x, std::string_view y, const NormConfig& cfg = {}) {
    const auto gx = graphemes(x, cfg);
    const auto gy = graphemes(y, cfg);
    return grapheme_align(gx, gy);
}

/// Word alignment over pre-segmented tokens (one grapheme list per token).
inline Alignment word_align(std::span<const Graphemes> a, std::span<const Graphemes> b) {
    return align_indices(a.size(), b.size(), [&](std::size_t i, std::size_t j) { return substitution_cost(a[i], b[j]); });
}

inline Alignment word_align(const TokenizedSentence& a, const TokenizedSentence& b) {
    return word_align(std::span<const Graphemes>(a.token_graphemes), std::span<const Graphemes>(b.token_graphemes));
}

/// Word alignment of two normalized token lists.
inline Alignment word_align(std::span<const std::string> a, std::span<const std::string> b, const NormConfig& cfg = {}) {
    std::vector<Graphemes> ga, gb;
    ga.reserve(a.size());
    gb.reserve(b.size());
    for (const auto& t : a) ga.push_back(graphemes(t, cfg));
    for (const auto& t : b) gb.push_back(graphemes(t, cfg));
    return word_align(std::span<const Graphemes>(ga), std::span<const Graphemes>(gb));
}

}  // namespace spellbench
