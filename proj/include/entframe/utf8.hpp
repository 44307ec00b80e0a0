#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "entframe/error.hpp"

// UTF-8 helpers. All character offsets in this library count Unicode scalar
// values, not bytes; these functions translate between the two.

namespace entframe {

namespace detail {

// Returns the byte length of the UTF-8 sequence starting with `lead`,
// or 0 if `lead` is not a valid lead byte.
inline int utf8_seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 0;
}

} // namespace detail

// Decodes one scalar value at byte position `i`, advancing `i`.
// Throws ValidationError on malformed input.
inline char32_t utf8_decode_at(std::string_view s, std::size_t& i) {
    const auto bad = [&] {
        throw Error(ErrorKind::ValidationError,
                    "invalid UTF-8 at byte " + std::to_string(i));
    };
    unsigned char lead = static_cast<unsigned char>(s[i]);
    int len = detail::utf8_seq_len(lead);
    if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) bad();
    char32_t cp = 0;
    switch (len) {
        case 1: cp = lead; break;
        case 2: cp = lead & 0x1Fu; break;
        case 3: cp = lead & 0x0Fu; break;
        case 4: cp = lead & 0x07u; break;
    }
    for (int k = 1; k < len; ++k) {
        unsigned char c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((c & 0xC0) != 0x80) bad();
        cp = (cp << 6) | (c & 0x3Fu);
    }
    // Reject overlong encodings, surrogates and out-of-range values.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad();
    i += static_cast<std::size_t>(len);
    return cp;
}

inline bool utf8_valid(std::string_view s) {
    std::size_t i = 0;
    try {
        while (i < s.size()) utf8_decode_at(s, i);
    } catch (const Error&) {
        return false;
    }
    return true;
}

inline std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out.push_back(utf8_decode_at(s, i));
    return out;
}

inline void utf8_append(std::string& out, char32_t cp) {
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

inline std::string utf8_encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) utf8_append(out, cp);
    return out;
}

// Number of scalar values in `s`.
inline std::size_t cp_length(std::string_view s) {
    std::size_t n = 0, i = 0;
    while (i < s.size()) {
        utf8_decode_at(s, i);
        ++n;
    }
    return n;
}

// Byte offset of the scalar value with index `cp_index` (cp_index may equal
// the total count, giving s.size()). Throws OutOfBounds past the end.
inline std::size_t cp_to_byte(std::string_view s, std::size_t cp_index) {
    std::size_t n = 0, i = 0;
    while (n < cp_index) {
        if (i >= s.size())
            throw Error(ErrorKind::OutOfBounds,
                        "character offset " + std::to_string(cp_index) +
                            " past end of text of length " + std::to_string(n));
        utf8_decode_at(s, i);
        ++n;
    }
    return i;
}

// Slice [start, end) in scalar-value offsets.
inline std::string cp_slice(std::string_view s, std::size_t start, std::size_t end) {
    if (end < start)
        throw Error(ErrorKind::OutOfBounds, "slice end before start");
    std::size_t b0 = cp_to_byte(s, start);
    std::size_t b1 = b0;
    std::size_t n = start;
    while (n < end) {
        if (b1 >= s.size())
            throw Error(ErrorKind::OutOfBounds,
                        "character offset " + std::to_string(end) + " past end of text");
        utf8_decode_at(s, b1);
        ++n;
    }
    return std::string(s.substr(b0, b1 - b0));
}

inline bool is_ascii_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
           cp == U'\v';
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ascii_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// FNV-1a 64-bit; the stable string hash used for feature indexing and
// request fingerprints.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace entframe
