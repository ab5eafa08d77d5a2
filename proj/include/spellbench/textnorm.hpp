#pragma once

// Unicode normalization, grapheme segmentation and whitespace tokenization.
//
// Every downstream comparison in spellbench works on two units: words
// (whitespace-separated tokens) and "characters", which are extended grapheme
// clusters rather than code points so that a Sinhala or Devanagari base letter
// and its vowel signs count as one edit unit.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/uscript.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

namespace spellbench {

inline constexpr char32_t kZeroWidthJoiner = U'\u200D';

/// How the zero-width joiner (U+200D) is treated.
///   keep    - bytes untouched, default grapheme rules apply
///   strip   - every U+200D is removed during normalization
///   cluster - bytes untouched, and a joiner always binds the clusters on
///             both sides of it into one
enum class ZwjPolicy { keep, strip, cluster };

struct NormConfig {
    bool unicode_form = true;  // NFC
    ZwjPolicy zwj_policy = ZwjPolicy::cluster;
    bool lowercase = false;

    bool operator==(const NormConfig&) const = default;
};

inline std::string_view to_string(ZwjPolicy p) {
    switch (p) {
        case ZwjPolicy::keep: return "keep";
        case ZwjPolicy::strip: return "strip";
        case ZwjPolicy::cluster: return "cluster";
    }
    return "cluster";
}

inline ZwjPolicy parse_zwj_policy(std::string_view s) {
    if (s == "keep") return ZwjPolicy::keep;
    if (s == "strip") return ZwjPolicy::strip;
    if (s == "cluster") return ZwjPolicy::cluster;
    throw std::invalid_argument("unknown zwj policy '" + std::string(s) + "'");
}

/// Raised for malformed UTF-8. byte_offset is the offset of the first byte of
/// the offending sequence.
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::size_t offset, const std::string& what)
        : std::runtime_error("invalid UTF-8 at byte offset " + std::to_string(offset) + ": " + what),
          byte_offset_(offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

namespace utf8 {

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Rejects overlong forms, surrogates and values above U+10FFFF.
inline char32_t next(std::string_view s, std::size_t& pos) {
    const std::size_t start = pos;
    const auto lead = static_cast<unsigned char>(s[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2; cp = lead & 0x1F; min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3; cp = lead & 0x0F; min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4; cp = lead & 0x07; min = 0x10000;
    } else {
        throw DecodeError(start, "invalid lead byte");
    }
    if (start + len > s.size()) throw DecodeError(start, "truncated sequence");
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[start + k]);
        if ((b & 0xC0) != 0x80) throw DecodeError(start, "invalid continuation byte");
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min) throw DecodeError(start, "overlong encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF) throw DecodeError(start, "surrogate code point");
    if (cp > 0x10FFFF) throw DecodeError(start, "code point out of range");
    pos = start + len;
    return cp;
}

inline std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size();) out.push_back(next(s, pos));
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

/// Throws DecodeError if `s` is not well-formed UTF-8.
inline void validate(std::string_view s) {
    for (std::size_t pos = 0; pos < s.size();) next(s, pos);
}

}  // namespace utf8

namespace detail {

inline std::u16string to_utf16(std::string_view s) {
    std::u16string out(s.size() + 1, u'\0');
    int32_t len = 0;
    UErrorCode status = U_ZERO_ERROR;
    u_strFromUTF8(out.data(), static_cast<int32_t>(out.size()), &len, s.data(),
                  static_cast<int32_t>(s.size()), &status);
    if (U_FAILURE(status)) throw std::runtime_error(std::string("UTF-8 to UTF-16 failed: ") + u_errorName(status));
    out.resize(static_cast<std::size_t>(len));
    return out;
}

inline std::string from_utf16(std::u16string_view s) {
    std::string out(s.size() * 3 + 1, '\0');
    int32_t len = 0;
    UErrorCode status = U_ZERO_ERROR;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len, s.data(),
                static_cast<int32_t>(s.size()), &status);
    if (U_FAILURE(status)) throw std::runtime_error(std::string("UTF-16 to UTF-8 failed: ") + u_errorName(status));
    out.resize(static_cast<std::size_t>(len));
    return out;
}

// ICU string transforms follow the preflight protocol: a call with too small
// a buffer reports the needed length.
template <class Fn>
std::u16string icu_transform(std::u16string_view src, Fn&& fn) {
    std::u16string dest(src.size() + 16, u'\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t len = fn(dest.data(), static_cast<int32_t>(dest.size()), src, status);
    if (status == U_BUFFER_OVERFLOW_ERROR) {
        dest.assign(static_cast<std::size_t>(len) + 1, u'\0');
        status = U_ZERO_ERROR;
        len = fn(dest.data(), static_cast<int32_t>(dest.size()), src, status);
    }
    if (U_FAILURE(status)) throw std::runtime_error(std::string("ICU transform failed: ") + u_errorName(status));
    dest.resize(static_cast<std::size_t>(len));
    return dest;
}

inline const UNormalizer2* nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const UNormalizer2* nfc = unorm2_getNFCInstance(&status);
    if (U_FAILURE(status)) throw std::runtime_error(std::string("ICU NFC unavailable: ") + u_errorName(status));
    return nfc;
}

inline bool is_ascii(std::string_view s) {
    for (char c : s)
        if (static_cast<unsigned char>(c) >= 0x80) return false;
    return true;
}

}  // namespace detail

/// Normalizes raw text: optional lowercasing, joiner handling, then NFC.
/// The result is a fixed point: normalize(normalize(x, c), c) == normalize(x, c).
inline std::string normalize(std::string_view text, const NormConfig& cfg = {}) {
    utf8::validate(text);

    if (detail::is_ascii(text) && !cfg.lowercase) return std::string(text);

    std::string stripped;
    if (cfg.zwj_policy == ZwjPolicy::strip) {
        stripped.reserve(text.size());
        for (std::size_t pos = 0; pos < text.size();) {
            const std::size_t start = pos;
            if (utf8::next(text, pos) != kZeroWidthJoiner) stripped.append(text.substr(start, pos - start));
        }
        text = stripped;
    }

    std::u16string u16 = detail::to_utf16(text);
    if (cfg.lowercase) {
        u16 = detail::icu_transform(u16, [](UChar* dst, int32_t cap, std::u16string_view src, UErrorCode& st) {
            return u_strToLower(dst, cap, src.data(), static_cast<int32_t>(src.size()), "", &st);
        });
    }
    if (cfg.unicode_form) {
        const UNormalizer2* nfc = detail::nfc_instance();
        u16 = detail::icu_transform(u16, [nfc](UChar* dst, int32_t cap, std::u16string_view src, UErrorCode& st) {
            return unorm2_normalize(nfc, src.data(), static_cast<int32_t>(src.size()), dst, cap, &st);
        });
    }
    return detail::from_utf16(u16);
}

namespace detail {

inline bool is_control_break(int gcb) {
    return gcb == U_GCB_CONTROL || gcb == U_GCB_CR || gcb == U_GCB_LF;
}

inline int gcb_of(char32_t cp) {
    return u_getIntPropertyValue(static_cast<UChar32>(cp), UCHAR_GRAPHEME_CLUSTER_BREAK);
}

inline bool is_ext_pict(char32_t cp) {
    return u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_EXTENDED_PICTOGRAPHIC);
}

// Scripts covered by the Indic conjunct rule (GB9c).
inline bool conjunct_script(char32_t cp) {
    UErrorCode st = U_ZERO_ERROR;
    switch (uscript_getScript(static_cast<UChar32>(cp), &st)) {
        case USCRIPT_BENGALI:
        case USCRIPT_DEVANAGARI:
        case USCRIPT_GUJARATI:
        case USCRIPT_MALAYALAM:
        case USCRIPT_ORIYA:
        case USCRIPT_TELUGU: return true;
        default: return false;
    }
}

inline int indic_category(char32_t cp) {
    return u_getIntPropertyValue(static_cast<UChar32>(cp), UCHAR_INDIC_SYLLABIC_CATEGORY);
}

}  // namespace detail

/// Byte offsets where grapheme clusters of `token` begin, plus token.size().
/// Implements the extended grapheme cluster rules, including the Indic
/// conjunct rule that ICU applies to Devanagari, Bengali and four other
/// scripts (Sinhala is not among them); under
/// ZwjPolicy::cluster a joiner additionally glues to whatever follows it.
inline std::vector<std::size_t> grapheme_boundaries(std::string_view token, const NormConfig& cfg = {}) {
    std::vector<std::size_t> bounds;
    if (token.empty()) {
        bounds.push_back(0);
        return bounds;
    }

    int prev = -1;
    char32_t prev_cp = 0;
    // GB11 state: saw ExtPict Extend* and (possibly) the trailing ZWJ
    bool in_pict_seq = false;
    bool pict_zwj = false;
    int ri_run = 0;
    // GB9c state: 0 none, 1 consonant [extend]*, 2 consonant [extend]* virama [extend]*
    int conjunct = 0;

    for (std::size_t pos = 0; pos < token.size();) {
        const std::size_t start = pos;
        const char32_t cp = utf8::next(token, pos);
        const int cur = detail::gcb_of(cp);
        const bool pict = detail::is_ext_pict(cp);
        const bool indic = cp >= 0x0900 && cp < 0x0D80 && detail::conjunct_script(cp);
        const int insc = indic ? detail::indic_category(cp) : U_INSC_OTHER;

        bool brk = true;
        if (prev < 0) {
            brk = true;
        } else if (prev == U_GCB_CR && cur == U_GCB_LF) {
            brk = false;
        } else if (detail::is_control_break(prev) || detail::is_control_break(cur)) {
            brk = true;
        } else if (prev == U_GCB_L && (cur == U_GCB_L || cur == U_GCB_V || cur == U_GCB_LV || cur == U_GCB_LVT)) {
            brk = false;
        } else if ((prev == U_GCB_LV || prev == U_GCB_V) && (cur == U_GCB_V || cur == U_GCB_T)) {
            brk = false;
        } else if ((prev == U_GCB_LVT || prev == U_GCB_T) && cur == U_GCB_T) {
            brk = false;
        } else if (cur == U_GCB_EXTEND || cur == U_GCB_ZWJ || cur == U_GCB_SPACING_MARK) {
            brk = false;
        } else if (prev == U_GCB_PREPEND) {
            brk = false;
        } else if (conjunct == 2 && insc == U_INSC_CONSONANT) {
            brk = false;
        } else if (pict_zwj && pict) {
            brk = false;
        } else if (prev == U_GCB_REGIONAL_INDICATOR && cur == U_GCB_REGIONAL_INDICATOR && ri_run % 2 == 1) {
            brk = false;
        } else if (cfg.zwj_policy == ZwjPolicy::cluster && prev_cp == kZeroWidthJoiner) {
            brk = false;
        }

        if (brk) bounds.push_back(start);

        pict_zwj = in_pict_seq && cur == U_GCB_ZWJ;
        if (pict) {
            in_pict_seq = true;
        } else if (cur != U_GCB_EXTEND) {
            in_pict_seq = false;
        }
        if (insc == U_INSC_CONSONANT) {
            conjunct = 1;
        } else if (conjunct && insc == U_INSC_VIRAMA) {
            conjunct = 2;
        } else if (cur != U_GCB_ZWJ && !(cur == U_GCB_EXTEND && u_getCombiningClass(static_cast<UChar32>(cp)) != 0)) {
            conjunct = 0;
        }
        ri_run = cur == U_GCB_REGIONAL_INDICATOR ? ri_run + 1 : 0;
        prev = cur;
        prev_cp = cp;
    }
    bounds.push_back(token.size());
    return bounds;
}

/// Splits a token into grapheme clusters. The clusters concatenate back to
/// the token.
inline std::vector<std::string> graphemes(std::string_view token, const NormConfig& cfg = {}) {
    std::vector<std::string> out;
    if (token.empty()) return out;
    const auto bounds = grapheme_boundaries(token, cfg);
    out.reserve(bounds.size() - 1);
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k)
        out.emplace_back(token.substr(bounds[k], bounds[k + 1] - bounds[k]));
    return out;
}

inline bool is_unicode_space(char32_t cp) {
    return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

/// Byte ranges [first, second) of the whitespace-separated words of `text`.
inline std::vector<std::pair<std::size_t, std::size_t>> word_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t word_start = std::string_view::npos;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        const char32_t cp = utf8::next(text, pos);
        if (is_unicode_space(cp)) {
            if (word_start != std::string_view::npos) {
                spans.emplace_back(word_start, start);
                word_start = std::string_view::npos;
            }
        } else if (word_start == std::string_view::npos) {
            word_start = start;
        }
    }
    if (word_start != std::string_view::npos) spans.emplace_back(word_start, text.size());
    return spans;
}

struct TokenizedSentence {
    std::string raw;
    std::string normalized;
    std::vector<std::string> tokens;
    std::vector<std::vector<std::string>> token_graphemes;

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

/// Splits already-normalized text on runs of Unicode whitespace.
/// Punctuation stays attached to its word.
inline TokenizedSentence tokenize(std::string_view normalized, const NormConfig& cfg = {}) {
    TokenizedSentence out;
    out.raw = std::string(normalized);
    out.normalized = out.raw;
    for (auto [b, e] : word_spans(normalized)) {
        out.tokens.emplace_back(normalized.substr(b, e - b));
        out.token_graphemes.push_back(graphemes(out.tokens.back(), cfg));
    }
    return out;
}

/// normalize + tokenize, keeping the original text in `raw`.
inline TokenizedSentence prepare(std::string_view raw, const NormConfig& cfg = {}) {
    TokenizedSentence out = tokenize(normalize(raw, cfg), cfg);
    out.raw = std::string(raw);
    return out;
}

/// Number of grapheme clusters in a token.
inline std::size_t grapheme_count(std::string_view token, const NormConfig& cfg = {}) {
    return token.empty() ? 0 : grapheme_boundaries(token, cfg).size() - 1;
}

}  // namespace spellbench
