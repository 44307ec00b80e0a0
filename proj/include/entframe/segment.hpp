#pragma once

#include <string>
#include <vector>

#include "entframe/utf8.hpp"

// Rule-based paragraph and sentence segmentation over scalar-value offsets.
//
// Paragraphs: the first non-blank line of a document is a paragraph of its
// own (news headlines carry no terminator); after it, maximal runs of
// non-blank lines form paragraphs. Sentences split inside paragraphs at
// terminator runs from {. ! ? । ॥ …} followed by whitespace or
// paragraph end, with guards against single-letter initials ("J. Smith") and
// decimal numbers. Spans are trimmed, so gaps between them are whitespace
// only.

namespace entframe {

struct Span {
    std::size_t start = 0; // scalar-value offset, inclusive
    std::size_t end = 0;   // scalar-value offset, exclusive
    std::size_t index = 0; // ordinal within the document

    bool contains(std::size_t offset) const { return offset >= start && offset < end; }
    bool operator==(const Span&) const = default;
};

using ParagraphSpan = Span;
using SentenceSpan = Span;

struct Segmentation {
    std::vector<ParagraphSpan> paragraphs;
    std::vector<SentenceSpan> sentences;
};

namespace detail {

inline bool is_terminator(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'।' ||
           cp == U'॥' || cp == U'…';
}

inline bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

inline bool is_letter(char32_t cp) {
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
    return cp >= 0x80 && !is_ascii_space(cp) && !is_terminator(cp);
}

// Trims a [start, end) range to its non-whitespace extent; returns false if
// nothing is left.
inline bool trim_range(const std::u32string& cps, std::size_t& start, std::size_t& end) {
    while (start < end && is_ascii_space(cps[start])) ++start;
    while (end > start && is_ascii_space(cps[end - 1])) --end;
    return start < end;
}

inline void split_sentences(const std::u32string& cps, std::size_t para_start,
                            std::size_t para_end, std::vector<SentenceSpan>& out) {
    std::size_t sent_start = para_start;
    std::size_t i = para_start;
    auto emit = [&](std::size_t from, std::size_t to) {
        if (trim_range(cps, from, to))
            out.push_back(SentenceSpan{from, to, out.size()});
    };
    while (i < para_end) {
        if (!is_terminator(cps[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < para_end && is_terminator(cps[run_end])) ++run_end;
        bool at_end = run_end >= para_end;
        bool followed_by_space = !at_end && is_ascii_space(cps[run_end]);
        bool boundary = at_end || followed_by_space;
        if (boundary && run_end - i == 1 && cps[i] == U'.') {
            // "J. Smith": a lone period after a single letter that starts a
            // token is an initial, not a sentence end.
            if (i >= para_start + 1 && is_letter(cps[i - 1]) &&
                (i == para_start + 1 || is_ascii_space(cps[i - 2])))
                boundary = false;
            // "3.5": digits on both sides never end a sentence.
            if (i >= para_start + 1 && i + 1 < para_end && is_digit(cps[i - 1]) &&
                is_digit(cps[i + 1]))
                boundary = false;
        }
        if (boundary && !at_end) {
            emit(sent_start, run_end);
            sent_start = run_end;
        }
        i = run_end;
    }
    emit(sent_start, para_end);
}

} // namespace detail

// Splits `text` into paragraph and sentence spans. `language` is accepted for
// interface stability; the rules themselves are language-independent (the
// terminator set covers Latin, Cyrillic and Devanagari punctuation).
inline Segmentation segment(const std::string& text, const std::string& language = "") {
    (void)language;
    Segmentation seg;
    if (text.empty()) return seg;
    const std::u32string cps = utf8_decode(text);
    const std::size_t n = cps.size();

    // Line table: [start, end) per line, end excludes the '\n'.
    std::vector<std::pair<std::size_t, std::size_t>> lines;
    {
        std::size_t ls = 0;
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == n || cps[i] == U'\n') {
                lines.emplace_back(ls, i);
                ls = i + 1;
            }
        }
    }
    auto blank = [&](const std::pair<std::size_t, std::size_t>& ln) {
        for (std::size_t i = ln.first; i < ln.second; ++i)
            if (!is_ascii_space(cps[i])) return false;
        return true;
    };

    std::vector<std::pair<std::size_t, std::size_t>> para_ranges;
    std::size_t li = 0;
    while (li < lines.size() && blank(lines[li])) ++li;
    if (li < lines.size()) {
        // Headline rule: the first non-blank line stands alone.
        para_ranges.emplace_back(lines[li].first, lines[li].second);
        ++li;
    }
    while (li < lines.size()) {
        if (blank(lines[li])) {
            ++li;
            continue;
        }
        std::size_t from = lines[li].first;
        std::size_t to = lines[li].second;
        while (li + 1 < lines.size() && !blank(lines[li + 1])) {
            ++li;
            to = lines[li].second;
        }
        para_ranges.emplace_back(from, to);
        ++li;
    }

    for (auto [from, to] : para_ranges) {
        if (!detail::trim_range(cps, from, to)) continue;
        seg.paragraphs.push_back(ParagraphSpan{from, to, seg.paragraphs.size()});
        detail::split_sentences(cps, from, to, seg.sentences);
    }
    return seg;
}

} // namespace entframe
