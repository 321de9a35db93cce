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

#include "geopost/geo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace geopost {

using PostId = std::uint64_t;

enum class Source { twitter, flickr, youtube, instagram };
enum class MediaKind { image, video };
enum class MediaOrigin { embedded, linked_platform };

std::string_view to_string(Source s);
std::string_view to_string(MediaKind k);
std::string_view to_string(MediaOrigin o);
std::optional<Source> parse_source(std::string_view s);
std::optional<MediaKind> parse_media_kind(std::string_view s);
std::optional<MediaOrigin> parse_media_origin(std::string_view s);

struct MediaItem {
    std::string url;
    MediaKind kind = MediaKind::image;
    MediaOrigin origin = MediaOrigin::embedded;
    std::optional<Source> platform; // present iff origin == linked_platform
    std::vector<std::string> image_tags;

    friend bool operator==(const MediaItem&, const MediaItem&) = default;
};

struct Post {
    PostId post_id = 0;
    Source source = Source::twitter;
    std::string author_id;
    std::int64_t created_at = 0; // UTC epoch seconds
    std::string text;
    std::vector<std::string> hashtags; // lowercase, no '#'
    std::vector<std::string> mentions; // no '@'
    std::optional<PostId> retweet_of;
    std::optional<PostId> reply_to;
    std::optional<LatLon> native_geotag;
    std::vector<std::string> links;
    std::vector<MediaItem> media;

    friend bool operator==(const Post&, const Post&) = default;
};

/// Serialized form used by every newline-delimited post file we write. It is
/// a superset of the raw input format (media carries origin and platform),
/// so it parses back through post_from_json unchanged.
nlohmann::ordered_json to_json(const Post& p);
nlohmann::ordered_json to_json(const MediaItem& m);

/// Throws InputError describing the first problem with the record.
Post post_from_json(const nlohmann::json& j);
MediaItem media_from_json(const nlohmann::json& j);

} // namespace geopost
