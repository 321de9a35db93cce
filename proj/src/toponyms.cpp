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

#include "geopost/geocode.hpp"
#include "geopost/ingest.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <set>

namespace geopost {

namespace {

struct Token {
    std::string raw;
    std::string norm;
    std::size_t segment = 0;
    bool from_hashtag = false;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Appends the word runs of one text stretch as a new segment.
void tokenize_segment(std::string_view text, std::size_t segment, bool from_hashtag, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < text.size()) {
        auto [cp, len] = decode_utf8(text, i);
        if (!is_word_codepoint(cp)) {
            i += len;
            continue;
        }
        std::size_t end = i + len;
        while (end < text.size()) {
            auto [next, next_len] = decode_utf8(text, end);
            if (!is_word_codepoint(next) && !(next >= 0x0300 && next <= 0x036F))
                break;
            end += next_len;
        }
        std::string raw(text.substr(i, end - i));
        auto norm = normalize_name(raw);
        if (!norm.empty())
            out.push_back({std::move(raw), std::move(norm), segment, from_hashtag});
        i = end;
    }
}

// Text with hashtags, mentions and links removed; each removal ends a segment.
std::vector<std::string> text_segments(std::string_view text) {
    std::vector<std::string> segments(1);
    char32_t prev = ' ';
    for (std::size_t i = 0; i < text.size();) {
        const bool at_link = (text.substr(i, 7) == "http://" || text.substr(i, 8) == "https://") &&
                             !is_word_codepoint(prev);
        if (at_link) {
            while (i < text.size() && !is_space(text[i]))
                ++i;
            segments.emplace_back();
            prev = ' ';
            continue;
        }
        const char c = text[i];
        if ((c == '#' || c == '@') && !is_word_codepoint(prev) && prev != '_') {
            std::size_t end = i + 1;
            while (end < text.size()) {
                auto [cp, len] = decode_utf8(text, end);
                if (cp != '_' && !is_word_codepoint(cp))
                    break;
                end += len;
            }
            if (end > i + 1) {
                i = end;
                segments.emplace_back();
                prev = ' ';
                continue;
            }
        }
        auto [cp, len] = decode_utf8(text, i);
        segments.back().append(text.substr(i, len));
        prev = cp;
        i += len;
    }
    return segments;
}

} // namespace

std::vector<std::string> split_hashtag(std::string_view tag) {
    enum class Cat { upper, lower, digit, sep };
    struct Unit {
        std::string_view bytes;
        Cat cat;
    };
    std::vector<Unit> units;
    for (std::size_t i = 0; i < tag.size();) {
        auto [cp, len] = decode_utf8(tag, i);
        Cat cat = Cat::sep;
        if (cp >= '0' && cp <= '9')
            cat = Cat::digit;
        else if (is_word_codepoint(cp))
            cat = is_upper_codepoint(cp) ? Cat::upper : Cat::lower;
        units.push_back({tag.substr(i, len), cat});
        i += len;
    }

    // boundary[i] == true: a new word starts at unit i
    std::vector<bool> boundary(units.size(), false);
    std::size_t upper_run = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const Cat cur = units[i].cat;
        if (i > 0) {
            const Cat prev = units[i - 1].cat;
            if ((prev == Cat::digit) != (cur == Cat::digit))
                boundary[i] = true;
            if (prev == Cat::lower && cur == Cat::upper)
                boundary[i] = true;
            if (prev == Cat::upper && cur == Cat::lower && upper_run >= 2) {
                // "UKfloods" -> UK|floods, "UKFloods" -> UK|Floods
                if (upper_run == 2)
                    boundary[i] = true;
                else
                    boundary[i - 1] = true;
            }
        }
        upper_run = cur == Cat::upper ? upper_run + 1 : 0;
    }

    std::vector<std::string> words;
    std::string current;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].cat == Cat::sep || boundary[i]) {
            if (!current.empty())
                words.push_back(std::move(current));
            current.clear();
        }
        if (units[i].cat != Cat::sep)
            current.append(units[i].bytes);
    }
    if (!current.empty())
        words.push_back(std::move(current));
    return words;
}

std::vector<ToponymMention> extract_toponyms(const Post& post, const Gazetteer& g, const CimeConfig& cfg) {
    std::vector<Token> tokens;
    std::size_t segment = 0;
    for (const auto& seg : text_segments(post.text))
        tokenize_segment(seg, segment++, false, tokens);

    // One segment per distinct hashtag, preferring the text spelling (it
    // keeps the case boundaries) over the lowercased dedicated field.
    std::set<std::string> seen_tags;
    auto add_tag = [&](const std::string& spelling) {
        if (!seen_tags.insert(to_lower_utf8(spelling)).second)
            return;
        std::string joined;
        for (const auto& word : split_hashtag(spelling)) {
            joined += word;
            joined += ' ';
        }
        tokenize_segment(joined, segment++, true, tokens);
    };
    for (const auto& tag : raw_hashtags(post.text))
        add_tag(tag);
    for (const auto& tag : post.hashtags)
        add_tag(tag);

    const std::size_t max_n = std::min(cfg.max_ngram, std::max<std::size_t>(g.max_name_tokens(), 1));
    std::vector<ToponymMention> mentions;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        for (std::size_t n = max_n; n >= 1; --n) {
            if (i + n > tokens.size() || tokens[i + n - 1].segment != tokens[i].segment)
                continue;
            std::string key = tokens[i].norm;
            for (std::size_t k = i + 1; k < i + n; ++k) {
                key += ' ';
                key += tokens[k].norm;
            }
            auto ids = g.ids_for_normalized(key);
            if (ids.empty())
                continue;
            if (n == 1 && cfg.stopwords.contains(key))
                break;
            ToponymMention m;
            m.surface = tokens[i].raw;
            for (std::size_t k = i + 1; k < i + n; ++k) {
                m.surface += ' ';
                m.surface += tokens[k].raw;
            }
            m.token_begin = i;
            m.token_end = i + n;
            m.from_hashtag = tokens[i].from_hashtag;
            m.candidates.assign(ids.begin(), ids.end());
            mentions.push_back(std::move(m));
            i += n;
            matched = true;
            break;
        }
        if (!matched)
            ++i;
    }
    return mentions;
}

} // namespace geopost
