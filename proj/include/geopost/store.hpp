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

#include "geopost/geocode.hpp"
#include "geopost/post.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <nlohmann/json.hpp>

namespace geopost {

struct StoredItem {
    Post post;
    Geolocation geo;
    std::int64_t inserted_at = 0;

    friend bool operator==(const StoredItem&, const StoredItem&) = default;
};

nlohmann::ordered_json to_json(const StoredItem& item);
StoredItem stored_item_from_json(const nlohmann::json& j);

enum class Layer { native, cime, all };
std::string_view to_string(Layer l);
std::optional<Layer> parse_layer(std::string_view s);

struct QueryFilter {
    std::optional<BBox> bbox;
    std::optional<std::int64_t> time_from; // inclusive, on created_at
    std::optional<std::int64_t> time_to;   // inclusive
    Layer layer = Layer::all;
    std::optional<PlaceClass> min_precision; // keep this class and finer
    bool only_with_media = false;
    std::optional<std::size_t> limit;

    /// Throws InputError on an inverted box or window.
    void validate() const;
    bool matches(const StoredItem& item) const;
};

enum class SyncMode {
    fsync, // fdatasync before acknowledging each insert
    flush  // hand to the OS only; survives process crashes, not power loss
};

struct StoreOptions {
    SyncMode sync = SyncMode::fsync;
};

struct LoadReport {
    std::size_t records = 0;         // log lines replayed
    std::size_t truncated_bytes = 0; // torn tail removed on open
    std::vector<std::string> warnings;
};

/// Append-log backed store of (post, geolocation) pairs with an R-tree over
/// points and an ordered index over created_at. One writer at a time; readers
/// share a lock and never see a half-applied upsert.
class Store {
public:
    /// Opens or creates the log at `log_path` and replays it. A torn final
    /// record is truncated away with a warning; corruption anywhere else
    /// throws StorageError.
    explicit Store(std::filesystem::path log_path, StoreOptions options = {});
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Durable once this returns. Re-inserting a post_id replaces the item.
    void insert(const StoredItem& item);

    /// Sets crowd_validated through the same append path. nullopt if unknown.
    std::optional<StoredItem> set_validated(PostId id, bool validated, std::int64_t now);

    /// Ordered by created_at descending, then post_id ascending; limit last.
    std::vector<StoredItem> query(const QueryFilter& filter) const;
    std::optional<StoredItem> get(PostId id) const;
    std::vector<StoredItem> all() const; // ascending post_id
    std::size_t size() const;

    /// Writes a compacted log (one record per post, ascending post_id).
    void snapshot(const std::filesystem::path& out) const;

    const LoadReport& load_report() const { return report_; }
    const std::filesystem::path& path() const { return path_; }

private:
    using Point = boost::geometry::model::point<double, 2, boost::geometry::cs::cartesian>;
    using Entry = std::pair<Point, PostId>;
    using RTree = boost::geometry::index::rtree<Entry, boost::geometry::index::rstar<16>>;

    void replay();
    void append_line(const std::string& line);
    void apply(StoredItem item); // caller holds the write lock

    std::filesystem::path path_;
    StoreOptions options_;
    int fd_ = -1;
    LoadReport report_;

    mutable std::shared_mutex mutex_;
    std::unordered_map<PostId, StoredItem> items_;
    RTree spatial_;
    std::set<std::pair<std::int64_t, PostId>> by_time_;
};

} // namespace geopost
