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

#include "geopost/geo.hpp"

#include "geopost/error.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace geopost {

bool valid_coordinate(const LatLon& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

void validate_bbox(const BBox& box) {
    if (!valid_coordinate({box.min_lat, box.min_lon}) || !valid_coordinate({box.max_lat, box.max_lon}))
        throw InputError("bbox corner out of range");
    if (box.inverted())
        throw InputError(fmt::format("inverted bbox {},{},{},{}", box.min_lon, box.min_lat, box.max_lon,
                                     box.max_lat));
}

BBox parse_bbox(std::string_view text) {
    auto parts = split(text, ',');
    if (parts.size() != 4)
        throw InputError(fmt::format("bbox must have 4 comma-separated numbers, got '{}'", text));
    double v[4];
    for (int i = 0; i < 4; ++i) {
        auto d = parse_double(trim(parts[i]));
        if (!d)
            throw InputError(fmt::format("bbox component '{}' is not a number", parts[i]));
        v[i] = *d;
    }
    BBox box{v[0], v[1], v[2], v[3]};
    validate_bbox(box);
    return box;
}

double haversine_m(const LatLon& a, const LatLon& b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(a.lat * rad) * std::cos(b.lat * rad) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

std::string_view to_string(PlaceClass c) {
    switch (c) {
    case PlaceClass::poi: return "poi";
    case PlaceClass::street: return "street";
    case PlaceClass::locality: return "locality";
    case PlaceClass::region: return "region";
    }
    return "?";
}

std::optional<PlaceClass> parse_place_class(std::string_view s) {
    if (s == "poi") return PlaceClass::poi;
    if (s == "street") return PlaceClass::street;
    if (s == "locality") return PlaceClass::locality;
    if (s == "region") return PlaceClass::region;
    return std::nullopt;
}

double PrecisionRadii::of(PlaceClass c) const {
    switch (c) {
    case PlaceClass::poi: return poi;
    case PlaceClass::street: return street;
    case PlaceClass::locality: return locality;
    case PlaceClass::region: return region;
    }
    return region;
}

} // namespace geopost
