// Copyright 2026 The geopost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geopost/text.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

namespace geopost {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty())
        return std::nullopt;
    if (s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_i64(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

DecodedChar decode_utf8(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80)
        return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (pos + len > s.size())
        return {0xFFFD, 1};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80)
            return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    // overlong or surrogate
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
        return {0xFFFD, 1};
    return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
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

namespace {

// Base letters for U+00C0..U+00FF; "" marks the two symbols in the block.
constexpr std::array<std::string_view, 64> kLatin1Fold = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y",
};

struct FoldRun {
    std::string_view base;
    int count;
};

// Latin Extended-A, U+0100..U+017F, as runs of identical base letters.
constexpr std::array<FoldRun, 22> kLatinExtAFoldRuns = {{
    {"a", 6}, {"c", 8}, {"d", 4}, {"e", 10}, {"g", 8}, {"h", 4}, {"i", 10}, {"ij", 2},
    {"j", 2}, {"k", 3}, {"l", 10}, {"n", 9}, {"o", 6}, {"oe", 2}, {"r", 6}, {"s", 8},
    {"t", 6}, {"u", 12}, {"w", 2}, {"y", 3}, {"z", 6}, {"s", 1},
}};

constexpr std::array<std::string_view, 128> make_ext_a_table() {
    std::array<std::string_view, 128> t{};
    std::size_t i = 0;
    for (const auto& run : kLatinExtAFoldRuns)
        for (int k = 0; k < run.count; ++k)
            t[i++] = run.base;
    return t;
}

constexpr auto kLatinExtAFold = make_ext_a_table();

constexpr bool ext_a_total_is_128() {
    int n = 0;
    for (const auto& run : kLatinExtAFoldRuns)
        n += run.count;
    return n == 128;
}
static_assert(ext_a_total_is_128());

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

/// Folded lowercase ASCII spelling of a Latin letter, or empty if cp is not one.
std::string_view latin_fold(char32_t cp) {
    if (cp >= 0xC0 && cp <= 0xFF)
        return kLatin1Fold[cp - 0xC0];
    if (cp >= 0x100 && cp <= 0x17F)
        return kLatinExtAFold[cp - 0x100];
    return {};
}

} // namespace

bool is_word_codepoint(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0)
        return false;
    if (cp == 0xD7 || cp == 0xF7)
        return false;
    if (cp == 0xFFFD)
        return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) // punctuation, symbols, arrows, box drawing
        return false;
    if (cp >= 0x3000 && cp <= 0x303F)
        return false;
    if ((cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20))
        return false;
    if (cp >= 0x1F000) // emoji and pictographs
        return false;
    return true;
}

bool is_upper_codepoint(char32_t cp) { return to_lower_codepoint(cp) != cp; }

char32_t to_lower_codepoint(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z')
        return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
        return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x17F) {
        if (cp == 0x178)
            return 0xFF;
        const bool even = (cp % 2) == 0;
        if ((cp <= 0x137 || (cp >= 0x14A && cp <= 0x177)) && even)
            return cp + 1;
        if (((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) && !even)
            return cp + 1;
    }
    return cp;
}

std::string to_lower_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        auto [cp, len] = decode_utf8(s, i);
        if (cp == 0xFFFD && len == 1 && static_cast<unsigned char>(s[i]) >= 0x80)
            out.push_back(s[i]);
        else
            append_utf8(out, to_lower_codepoint(cp));
        i += len;
    }
    return out;
}

std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    auto emit = [&](std::string_view piece) {
        if (pending_space && !out.empty())
            out.push_back(' ');
        pending_space = false;
        out.append(piece);
    };
    for (std::size_t i = 0; i < raw.size();) {
        auto [cp, len] = decode_utf8(raw, i);
        i += len;
        if (is_combining_mark(cp))
            continue;
        if (!is_word_codepoint(cp)) {
            pending_space = true;
            continue;
        }
        if (cp < 0x80) {
            const char c = static_cast<char>(to_lower_codepoint(cp));
            emit(std::string_view(&c, 1));
        } else if (auto folded = latin_fold(cp); !folded.empty()) {
            emit(folded);
        } else {
            std::string enc;
            append_utf8(enc, to_lower_codepoint(cp));
            emit(enc);
        }
    }
    return out;
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    s = trim(s);
    if (auto n = parse_i64(s))
        return n;
    // YYYY-MM-DDTHH:MM:SS
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
        s[16] != ':')
        return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        auto v = parse_i64(s.substr(pos, len));
        if (!v || s[pos] == '-' || s[pos] == '+')
            return std::nullopt;
        return static_cast<int>(*v);
    };
    auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), se = num(17, 2);
    if (!y || !mo || !d || !h || !mi || !se)
        return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 60)
        return std::nullopt;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        const auto digits_start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9')
            ++pos;
        if (pos == digits_start)
            return std::nullopt;
    }
    std::int64_t offset_s = 0;
    if (pos == s.size()) {
        // no zone designator: treated as UTC
    } else if (s.substr(pos) == "Z" || s.substr(pos) == "z") {
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() - pos == 6 && s[pos + 3] == ':') {
        auto oh = num(pos + 1, 2), om = num(pos + 4, 2);
        if (!oh || !om || *oh > 23 || *om > 59)
            return std::nullopt;
        offset_s = (*oh * 3600 + *om * 60) * (s[pos] == '+' ? 1 : -1);
    } else {
        return std::nullopt;
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + *h * 3600 + *mi * 60 + *se - offset_s;
}

std::string format_iso8601(std::int64_t epoch_s) {
    using namespace std::chrono;
    const auto day_count = static_cast<std::int64_t>(std::floor(static_cast<double>(epoch_s) / 86400.0));
    const std::int64_t rem = epoch_s - day_count * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), rem / 3600,
                       (rem / 60) % 60, rem % 60);
}

} // namespace geopost
