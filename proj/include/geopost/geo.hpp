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

#include <optional>
#include <string>
#include <string_view>

namespace geopost {

inline constexpr double kEarthRadiusM = 6371000.0;

/// WGS84 point in degrees.
struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

bool valid_coordinate(const LatLon& p);

/// Axis-aligned box in degrees, (min_lon, min_lat, max_lon, max_lat).
/// Edges are inclusive everywhere boxes are used for containment.
struct BBox {
    double min_lon = -180.0;
    double min_lat = -90.0;
    double max_lon = 180.0;
    double max_lat = 90.0;

    static BBox world() { return {}; }

    bool contains(const LatLon& p) const {
        return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
    }
    bool inverted() const { return min_lon > max_lon || min_lat > max_lat; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Throws InputError when the box is inverted or has a corner off the globe.
void validate_bbox(const BBox& box);

/// Parses "minLon,minLat,maxLon,maxLat". Throws InputError.
BBox parse_bbox(std::string_view text);

/// Great-circle distance on a sphere of radius kEarthRadiusM.
double haversine_m(const LatLon& a, const LatLon& b);

enum class PlaceClass { poi, street, locality, region };

std::string_view to_string(PlaceClass c);
std::optional<PlaceClass> parse_place_class(std::string_view s);

/// Rank of a class by fineness: poi is 0, region is 3.
constexpr int fineness_rank(PlaceClass c) { return static_cast<int>(c); }

/// Representative radius per precision class, in meters.
struct PrecisionRadii {
    double poi = 100.0;
    double street = 500.0;
    double locality = 5000.0;
    double region = 50000.0;

    double of(PlaceClass c) const;
    /// Radii must strictly increase from poi to region.
    bool valid() const { return 0.0 < poi && poi < street && street < locality && locality < region; }
};

} // namespace geopost
