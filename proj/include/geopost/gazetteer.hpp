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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

namespace geopost {

using PlaceId = std::uint64_t;

struct Place {
    PlaceId place_id = 0;
    std::string canonical_name;
    std::vector<std::string> alt_names;
    PlaceClass place_class = PlaceClass::locality;
    LatLon centroid;
    BBox bbox;
    std::vector<PlaceId> admin_parents; // innermost first
    double importance = 0.5;

    friend bool operator==(const Place&, const Place&) = default;
};

/// Immutable place directory with a normalized-name index and an R-tree over
/// centroids. Construction validates every Place invariant and throws
/// InputError on the first violation.
class Gazetteer {
public:
    Gazetteer() = default;
    explicit Gazetteer(std::vector<Place> places);

    std::size_t size() const { return places_.size(); }
    bool empty() const { return places_.empty(); }

    /// Sorted by place_id.
    const std::vector<Place>& places() const { return places_; }

    const Place* find(PlaceId id) const;
    const Place& at(PlaceId id) const;

    /// All places whose canonical or alternative name normalizes to
    /// normalize_name(name), ordered by (importance desc, place_id asc).
    std::vector<Place> lookup_name(std::string_view name) const;

    /// Same ordering as lookup_name, keyed by an already normalized name.
    std::span<const PlaceId> ids_for_normalized(const std::string& normalized) const;

    /// Places whose centroid lies in the box, edges inclusive, ordered by
    /// place_id. Throws InputError on an inverted box.
    std::vector<Place> places_in_bbox(const BBox& box) const;

    /// Longest indexed name, in tokens.
    std::size_t max_name_tokens() const { return max_name_tokens_; }

private:
    using Point = boost::geometry::model::point<double, 2, boost::geometry::cs::cartesian>;
    using Entry = std::pair<Point, std::size_t>;
    using RTree = boost::geometry::index::rtree<Entry, boost::geometry::index::quadratic<16>>;

    std::vector<Place> places_;
    std::unordered_map<PlaceId, std::size_t> by_id_;
    std::unordered_map<std::string, std::vector<PlaceId>> name_index_;
    RTree spatial_;
    std::size_t max_name_tokens_ = 0;
};

inline constexpr std::string_view kGazetteerHeader =
    "place_id\tcanonical_name\talt_names\tclass\tlat\tlon\tmin_lon\tmin_lat\tmax_lon\tmax_lat\tadmin_parents\t"
    "importance";

/// Reads the tab-separated extract format. Errors name the line and field.
Gazetteer parse_gazetteer(std::istream& in, std::string_view source_name = "<stream>");
Gazetteer load_gazetteer(const std::filesystem::path& path);

/// Writes the same format back, one row per place in place_id order.
void write_gazetteer(std::ostream& out, const Gazetteer& g);

} // namespace geopost
