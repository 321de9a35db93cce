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

#include "geopost/post.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geopost {

struct Entities {
    std::vector<std::string> hashtags; // lowercased, deduplicated, first-seen order
    std::vector<std::string> mentions; // case preserved, deduplicated
    std::vector<std::string> links;    // terminal .,;!?) stripped
};

/// Pulls #hashtags, @mentions and http(s) links out of free text. Link spans
/// are consumed first, so a fragment like ".../#top" is not a hashtag.
Entities extract_entities(std::string_view text);

/// Raw '#tag' spellings in text, original case, in order of appearance.
std::vector<std::string> raw_hashtags(std::string_view text);

struct RecordError {
    std::size_t line = 0;
    std::string message;
};

struct ParseResult {
    std::vector<Post> posts;
    std::vector<RecordError> errors;
};

/// Newline-delimited JSON posts. Malformed records are skipped and reported;
/// InputError only when every non-blank record is malformed.
ParseResult parse_posts(std::istream& in);
ParseResult parse_posts(const std::filesystem::path& path);

void write_posts(std::ostream& out, const std::vector<Post>& posts);

// Linked media.

/// Platform a link points at, judged by host name.
std::optional<Source> platform_for_url(std::string_view url);

struct NotResolvable {};
struct TransportFailure {
    std::string message;
};
using MediaLookup = std::variant<std::vector<MediaItem>, NotResolvable, TransportFailure>;

/// Answers "what media lives behind this URL". Implementations must be safe
/// for concurrent calls and stable for a given URL within a run.
class PlatformClient {
public:
    virtual ~PlatformClient() = default;
    virtual MediaLookup lookup(std::string_view url, Source platform) const = 0;
};

/// Serves lookups from a directory of JSON files, one per URL, named by
/// fixture_file_name(url). A file holds one media object or an array of
/// them; a missing file means the link is not resolvable and an unreadable
/// one is reported as a transport failure.
class FixturePlatformClient final : public PlatformClient {
public:
    explicit FixturePlatformClient(std::filesystem::path dir);
    MediaLookup lookup(std::string_view url, Source platform) const override;

    /// "<16 hex digits of FNV-1a 64 of the url>.json"
    static std::string fixture_file_name(std::string_view url);

private:
    std::filesystem::path dir_;
};

struct ResolveReport {
    std::size_t links_queried = 0;
    std::size_t items_added = 0;
    std::vector<std::string> failures; // "post <id>: <url>: <message>"
};

/// Appends media found behind platform links as linked_platform items.
/// Never drops or rewrites existing media; URLs already present are skipped,
/// so running it twice is a no-op the second time.
Post resolve_linked_media(Post post, const PlatformClient& client, ResolveReport& report);

} // namespace geopost
