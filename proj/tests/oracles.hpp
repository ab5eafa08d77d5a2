#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the dynamic-programming aligner.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/brkiter.h>
#include <unicode/unistr.h>

#include "spellbench/align.hpp"

namespace oracle {

/// Minimum alignment cost by enumerating every strictly increasing set of
/// (i, j) pairings. Indel placement never changes the cost, so these sets
/// cover every monotone alignment.
inline double brute_force_cost(std::size_t n, std::size_t m, const std::function<double(std::size_t, std::size_t)>& sub,
                               double indel = 1.0) {
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, std::size_t, double)> rec =
        [&](std::size_t i0, std::size_t j0, std::size_t pairs, double acc) {
            const double total = acc + indel * static_cast<double>((n - pairs) + (m - pairs));
            best = std::min(best, total);
            for (std::size_t i = i0; i < n; ++i)
                for (std::size_t j = j0; j < m; ++j) rec(i + 1, j + 1, pairs + 1, acc + sub(i, j));
        };
    rec(0, 0, 0, 0.0);
    return best;
}

/// Plain recursive edit distance (no memo) over short sequences.
template <class T>
std::size_t naive_edit_distance(const std::vector<T>& x, const std::vector<T>& y, std::size_t i = 0, std::size_t j = 0) {
    if (i == x.size()) return y.size() - j;
    if (j == y.size()) return x.size() - i;
    if (x[i] == y[j]) return naive_edit_distance(x, y, i + 1, j + 1);
    return 1 + std::min({naive_edit_distance(x, y, i + 1, j + 1), naive_edit_distance(x, y, i + 1, j),
                         naive_edit_distance(x, y, i, j + 1)});
}

/// Every monotone op sequence (match/substitute, delete_a, insert_b) in order.
inline void enumerate_op_sequences(std::size_t n, std::size_t m,
                                   const std::function<void(const std::vector<spellbench::AlignOp>&)>& visit,
                                   const std::function<double(std::size_t, std::size_t)>& sub) {
    using spellbench::AlignOp;
    using spellbench::OpKind;
    std::vector<AlignOp> ops;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
        if (i == n && j == m) {
            visit(ops);
            return;
        }
        if (i < n && j < m) {
            const double c = sub(i, j);
            ops.push_back({c == 0.0 ? OpKind::match : OpKind::substitute, i, j, c});
            rec(i + 1, j + 1);
            ops.pop_back();
        }
        if (i < n) {
            ops.push_back({OpKind::delete_a, i, std::nullopt, 1.0});
            rec(i + 1, j);
            ops.pop_back();
        }
        if (j < m) {
            ops.push_back({OpKind::insert_b, std::nullopt, j, 1.0});
            rec(i, j + 1);
            ops.pop_back();
        }
    };
    rec(0, 0);
}

/// The optimal op sequence preferred by the documented tie-break: the
/// lexicographically smallest under pairing < delete_a < insert_b.
inline std::vector<spellbench::AlignOp> preferred_optimal(std::size_t n, std::size_t m,
                                                          const std::function<double(std::size_t, std::size_t)>& sub) {
    auto rank = [](spellbench::OpKind k) {
        return k == spellbench::OpKind::delete_a ? 1 : k == spellbench::OpKind::insert_b ? 2 : 0;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<spellbench::AlignOp> chosen;
    enumerate_op_sequences(
        n, m,
        [&](const std::vector<spellbench::AlignOp>& ops) {
            double c = 0.0;
            for (const auto& op : ops) c += op.cost;
            if (c < best - 1e-9) {
                best = c;
                chosen = ops;
            } else if (c <= best + 1e-9) {
                const bool smaller = std::lexicographical_compare(
                    ops.begin(), ops.end(), chosen.begin(), chosen.end(),
                    [&](const auto& a, const auto& b) { return rank(a.kind) < rank(b.kind); });
                if (smaller) chosen = ops;
            }
        },
        sub);
    return chosen;
}

/// Grapheme clusters as found by ICU's character BreakIterator.
inline std::vector<std::string> icu_graphemes(std::string_view s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) throw std::runtime_error("no ICU character break iterator");
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    it->setText(u);
    int32_t start = it->first();
    for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
        std::string piece;
        u.tempSubStringBetween(start, end).toUTF8String(piece);
        out.push_back(piece);
    }
    return out;
}

}  // namespace oracle
