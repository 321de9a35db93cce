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

#include "geopost/ingest.hpp"

#include "geopost/error.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

namespace geopost {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_tag_codepoint(char32_t cp) { return cp == '_' || is_word_codepoint(cp); }

struct Span {
    enum Kind { hashtag, mention, link } kind;
    std::string_view body; // without the sigil; for links the whole URL
};

std::size_t link_start_len(std::string_view text, std::size_t i) {
    for (std::string_view scheme : {"http://", "https://"})
        if (text.substr(i, scheme.size()) == scheme)
            return scheme.size();
    return 0;
}

template <typename Fn>
void scan_entities(std::string_view text, Fn&& on_span) {
    char32_t prev = ' ';
    for (std::size_t i = 0; i < text.size();) {
        if (const auto scheme = link_start_len(text, i); scheme > 0 && !is_word_codepoint(prev)) {
            std::size_t end = i;
            while (end < text.size() && !is_space(text[end]))
                ++end;
            std::string_view url = text.substr(i, end - i);
            while (!url.empty() && std::string_view(".,;!?)").find(url.back()) != std::string_view::npos)
                url.remove_suffix(1);
            if (url.size() > scheme)
                on_span(Span{Span::link, url});
            i = end;
            prev = ' ';
            continue;
        }
        const char c = text[i];
        if ((c == '#' || c == '@') && !is_tag_codepoint(prev)) {
            std::size_t end = i + 1;
            while (end < text.size()) {
                auto [cp, len] = decode_utf8(text, end);
                if (!is_tag_codepoint(cp))
                    break;
                end += len;
            }
            if (end > i + 1) {
                on_span(Span{c == '#' ? Span::hashtag : Span::mention, text.substr(i + 1, end - i - 1)});
                prev = 'x';
                i = end;
                continue;
            }
        }
        auto [cp, len] = decode_utf8(text, i);
        prev = cp;
        i += len;
    }
}

template <typename T>
void push_unique(std::vector<T>& v, T value) {
    if (std::find(v.begin(), v.end(), value) == v.end())
        v.push_back(std::move(value));
}

} // namespace

Entities extract_entities(std::string_view text) {
    Entities e;
    scan_entities(text, [&](const Span& s) {
        switch (s.kind) {
        case Span::hashtag: push_unique(e.hashtags, to_lower_utf8(s.body)); break;
        case Span::mention: push_unique(e.mentions, std::string(s.body)); break;
        case Span::link: push_unique(e.links, std::string(s.body)); break;
        }
    });
    return e;
}

std::vector<std::string> raw_hashtags(std::string_view text) {
    std::vector<std::string> out;
    scan_entities(text, [&](const Span& s) {
        if (s.kind == Span::hashtag)
            out.emplace_back(s.body);
    });
    return out;
}

ParseResult parse_posts(std::istream& in) {
    ParseResult result;
    std::unordered_set<PostId> seen;
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        ++records;
        try {
            auto j = nlohmann::json::parse(line);
            Post p = post_from_json(j);
            if (!seen.insert(p.post_id).second)
                throw InputError(fmt::format("duplicate post id {}", p.post_id));
            result.posts.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            result.errors.push_back({line_no, fmt::format("invalid JSON: {}", e.what())});
        } catch (const InputError& e) {
            result.errors.push_back({line_no, e.what()});
        }
    }
    if (records > 0 && result.posts.empty()) {
        const auto& first = result.errors.front();
        throw InputError(
            fmt::format("all {} records malformed (line {}: {})", records, first.line, first.message));
    }
    return result;
}

ParseResult parse_posts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(fmt::format("cannot open posts file '{}'", path.string()));
    return parse_posts(in);
}

void write_posts(std::ostream& out, const std::vector<Post>& posts) {
    for (const auto& p : posts)
        out << to_json(p).dump() << '\n';
}

std::optional<Source> platform_for_url(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos)
        return std::nullopt;
    std::string_view rest = url.substr(scheme_end + 3);
    auto host_end = rest.find_first_of("/?#:");
    std::string host = to_lower_utf8(rest.substr(0, host_end));
    auto matches = [&](std::string_view domain) {
        return host == domain ||
               (host.size() > domain.size() && host.ends_with(domain) && host[host.size() - domain.size() - 1] == '.');
    };
    if (matches("flickr.com") || matches("flic.kr"))
        return Source::flickr;
    if (matches("youtube.com") || matches("youtu.be"))
        return Source::youtube;
    if (matches("instagram.com") || matches("instagr.am"))
        return Source::instagram;
    return std::nullopt;
}

FixturePlatformClient::FixturePlatformClient(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_))
        throw InputError(fmt::format("fixture directory '{}' does not exist", dir_.string()));
}

std::string FixturePlatformClient::fixture_file_name(std::string_view url) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : url) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}.json", h);
}

MediaLookup FixturePlatformClient::lookup(std::string_view url, Source platform) const {
    const auto path = dir_ / fixture_file_name(url);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        return NotResolvable{};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return TransportFailure{fmt::format("cannot read {}", path.string())};
    try {
        auto j = nlohmann::json::parse(in);
        std::vector<MediaItem> items;
        auto add = [&](nlohmann::json obj) {
            obj["origin"] = "linked_platform";
            obj["platform"] = std::string(to_string(platform));
            items.push_back(media_from_json(obj));
        };
        if (j.is_array())
            for (const auto& obj : j)
                add(obj);
        else
            add(j);
        return items;
    } catch (const std::exception& e) {
        return TransportFailure{fmt::format("bad fixture {}: {}", path.filename().string(), e.what())};
    }
}

Post resolve_linked_media(Post post, const PlatformClient& client, ResolveReport& report) {
    std::vector<MediaItem> added;
    auto known = [&](const std::string& url) {
        auto same = [&](const MediaItem& m) { return m.url == url; };
        return std::any_of(post.media.begin(), post.media.end(), same) ||
               std::any_of(added.begin(), added.end(), same);
    };
    for (const auto& link : post.links) {
        auto platform = platform_for_url(link);
        if (!platform)
            continue;
        ++report.links_queried;
        auto result = client.lookup(link, *platform);
        if (auto* failure = std::get_if<TransportFailure>(&result)) {
            report.failures.push_back(fmt::format("post {}: {}: {}", post.post_id, link, failure->message));
            return post;
        }
        if (auto* items = std::get_if<std::vector<MediaItem>>(&result)) {
            for (auto& item : *items) {
                if (known(item.url))
                    continue;
                item.origin = MediaOrigin::linked_platform;
                item.platform = *platform;
                added.push_back(std::move(item));
            }
        }
    }
    report.items_added += added.size();
    for (auto& item : added)
        post.media.push_back(std::move(item));
    return post;
}

} // namespace geopost
