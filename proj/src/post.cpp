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

#include "geopost/post.hpp"

#include "geopost/error.hpp"
#include "geopost/ingest.hpp"
#include "geopost/text.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace geopost {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Source s) {
    switch (s) {
    case Source::twitter: return "twitter";
    case Source::flickr: return "flickr";
    case Source::youtube: return "youtube";
    case Source::instagram: return "instagram";
    }
    return "?";
}

std::string_view to_string(MediaKind k) { return k == MediaKind::image ? "image" : "video"; }

std::string_view to_string(MediaOrigin o) { return o == MediaOrigin::embedded ? "embedded" : "linked_platform"; }

std::optional<Source> parse_source(std::string_view s) {
    if (s == "twitter") return Source::twitter;
    if (s == "flickr") return Source::flickr;
    if (s == "youtube") return Source::youtube;
    if (s == "instagram") return Source::instagram;
    return std::nullopt;
}

std::optional<MediaKind> parse_media_kind(std::string_view s) {
    if (s == "image") return MediaKind::image;
    if (s == "video") return MediaKind::video;
    return std::nullopt;
}

std::optional<MediaOrigin> parse_media_origin(std::string_view s) {
    if (s == "embedded") return MediaOrigin::embedded;
    if (s == "linked_platform") return MediaOrigin::linked_platform;
    return std::nullopt;
}

ordered_json to_json(const MediaItem& m) {
    ordered_json j;
    j["url"] = m.url;
    j["kind"] = to_string(m.kind);
    j["origin"] = to_string(m.origin);
    if (m.platform)
        j["platform"] = to_string(*m.platform);
    j["image_tags"] = m.image_tags;
    return j;
}

ordered_json to_json(const Post& p) {
    ordered_json j;
    j["id"] = p.post_id;
    j["source"] = to_string(p.source);
    j["author"] = p.author_id;
    j["created_at"] = p.created_at;
    j["text"] = p.text;
    j["hashtags"] = p.hashtags;
    j["mentions"] = p.mentions;
    j["links"] = p.links;
    if (p.native_geotag)
        j["geo"] = ordered_json::array({p.native_geotag->lat, p.native_geotag->lon});
    if (p.retweet_of)
        j["retweet_of"] = *p.retweet_of;
    if (p.reply_to)
        j["reply_to"] = *p.reply_to;
    auto media = ordered_json::array();
    for (const auto& m : p.media)
        media.push_back(to_json(m));
    j["media"] = std::move(media);
    return j;
}

namespace {

[[noreturn]] void bad(std::string_view field, std::string_view what) {
    throw InputError(fmt::format("field '{}': {}", field, what));
}

PostId read_id(const json& j, std::string_view field) {
    if (j.is_number_unsigned())
        return j.get<PostId>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<PostId>(j.get<std::int64_t>());
    if (j.is_string())
        if (auto v = parse_u64(j.get<std::string>()))
            return *v;
    bad(field, "expected a non-negative integer id");
}

std::vector<std::string> read_strings(const json& j, std::string_view field) {
    if (!j.is_array())
        bad(field, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string())
            bad(field, "expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

template <typename T>
void push_unique(std::vector<T>& v, T value) {
    if (std::find(v.begin(), v.end(), value) == v.end())
        v.push_back(std::move(value));
}

} // namespace

MediaItem media_from_json(const json& j) {
    if (!j.is_object())
        bad("media", "expected objects");
    MediaItem m;
    if (!j.contains("url") || !j["url"].is_string() || j["url"].get<std::string>().empty())
        bad("media.url", "missing or not a string");
    m.url = j["url"].get<std::string>();
    if (j.contains("kind")) {
        auto kind = j["kind"].is_string() ? parse_media_kind(j["kind"].get<std::string>()) : std::nullopt;
        if (!kind)
            bad("media.kind", "expected image|video");
        m.kind = *kind;
    }
    if (j.contains("origin")) {
        auto origin = j["origin"].is_string() ? parse_media_origin(j["origin"].get<std::string>()) : std::nullopt;
        if (!origin)
            bad("media.origin", "expected embedded|linked_platform");
        m.origin = *origin;
    }
    if (j.contains("platform") && !j["platform"].is_null()) {
        auto platform = j["platform"].is_string() ? parse_source(j["platform"].get<std::string>()) : std::nullopt;
        if (!platform || *platform == Source::twitter)
            bad("media.platform", "expected flickr|youtube|instagram");
        m.platform = platform;
    }
    if (m.origin == MediaOrigin::linked_platform && !m.platform)
        bad("media.platform", "required for linked_platform media");
    if (m.origin == MediaOrigin::embedded && m.platform)
        bad("media.platform", "not allowed on embedded media");
    if (j.contains("image_tags"))
        m.image_tags = read_strings(j["image_tags"], "media.image_tags");
    return m;
}

Post post_from_json(const json& j) {
    if (!j.is_object())
        throw InputError("record is not a JSON object");
    Post p;
    if (!j.contains("id"))
        bad("id", "missing");
    p.post_id = read_id(j["id"], "id");

    if (!j.contains("source") || !j["source"].is_string())
        bad("source", "missing or not a string");
    auto source = parse_source(j["source"].get<std::string>());
    if (!source)
        bad("source", "expected twitter|flickr|youtube|instagram");
    p.source = *source;

    if (!j.contains("author") || !j["author"].is_string())
        bad("author", "missing or not a string");
    p.author_id = j["author"].get<std::string>();

    if (!j.contains("created_at"))
        bad("created_at", "missing");
    const auto& ts = j["created_at"];
    std::optional<std::int64_t> created;
    if (ts.is_number_integer())
        created = ts.get<std::int64_t>();
    else if (ts.is_string())
        created = parse_timestamp(ts.get<std::string>());
    if (!created)
        bad("created_at", "expected ISO-8601 UTC or epoch seconds");
    if (*created <= 0)
        bad("created_at", "must be after the epoch");
    p.created_at = *created;

    if (!j.contains("text") || !j["text"].is_string())
        bad("text", "missing or not a string");
    p.text = j["text"].get<std::string>();

    const bool has_entity_fields = j.contains("hashtags") || j.contains("mentions") || j.contains("links");
    const Entities extracted = has_entity_fields ? Entities{} : extract_entities(p.text);
    if (j.contains("hashtags")) {
        for (auto tag : read_strings(j["hashtags"], "hashtags")) {
            if (!tag.empty() && tag.front() == '#')
                tag.erase(0, 1);
            if (tag.empty() || has_whitespace(tag))
                bad("hashtags", "empty or contains whitespace");
            push_unique(p.hashtags, to_lower_utf8(tag));
        }
    } else {
        p.hashtags = extracted.hashtags;
    }
    if (j.contains("mentions")) {
        for (auto m : read_strings(j["mentions"], "mentions")) {
            if (!m.empty() && m.front() == '@')
                m.erase(0, 1);
            if (m.empty() || has_whitespace(m))
                bad("mentions", "empty or contains whitespace");
            push_unique(p.mentions, m);
        }
    } else {
        p.mentions = extracted.mentions;
    }
    if (j.contains("links"))
        p.links = read_strings(j["links"], "links");
    else
        p.links = extracted.links;

    if (j.contains("geo") && !j["geo"].is_null()) {
        const auto& g = j["geo"];
        if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
            bad("geo", "expected [lat, lon]");
        LatLon pt{g[0].get<double>(), g[1].get<double>()};
        if (!valid_coordinate(pt))
            bad("geo", "coordinate out of range");
        p.native_geotag = pt;
    }
    if (j.contains("retweet_of") && !j["retweet_of"].is_null())
        p.retweet_of = read_id(j["retweet_of"], "retweet_of");
    if (j.contains("reply_to") && !j["reply_to"].is_null())
        p.reply_to = read_id(j["reply_to"], "reply_to");
    if (j.contains("media")) {
        if (!j["media"].is_array())
            bad("media", "expected an array");
        for (const auto& m : j["media"])
            p.media.push_back(media_from_json(m));
    }
    return p;
}

} // namespace geopost
