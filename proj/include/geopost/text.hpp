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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geopost {

// String helpers shared by the parsers.

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);
std::optional<std::int64_t> parse_i64(std::string_view s);

// UTF-8. Invalid sequences decode to U+FFFD one byte at a time.

struct DecodedChar {
    char32_t cp;
    std::size_t len;
};
DecodedChar decode_utf8(std::string_view s, std::size_t pos);
void append_utf8(std::string& out, char32_t cp);

/// Letters and digits across the scripts we care about; everything else is a
/// separator for tokenization purposes. '_' is not a word character here.
bool is_word_codepoint(char32_t cp);
bool is_upper_codepoint(char32_t cp);
char32_t to_lower_codepoint(char32_t cp);

/// Case-folds without stripping accents.
std::string to_lower_utf8(std::string_view s);

/// Lowercase, accents folded to base letters, punctuation replaced by spaces,
/// whitespace collapsed, trimmed. Total.
std::string normalize_name(std::string_view raw);

/// Seconds since the epoch from "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)"
/// or a plain integer. Returns nullopt on anything else.
std::optional<std::int64_t> parse_timestamp(std::string_view s);
std::string format_iso8601(std::int64_t epoch_s);

} // namespace geopost
