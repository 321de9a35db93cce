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

#include "geopost/error.hpp"
#include "geopost/geocode.hpp"

#include <fmt/format.h>

namespace geopost {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const Geolocation& geo) {
    ordered_json j;
    j["post_id"] = geo.post_id;
    j["method"] = to_string(geo.method);
    if (geo.place_id)
        j["place_id"] = *geo.place_id;
    if (geo.point) {
        j["lat"] = geo.point->lat;
        j["lon"] = geo.point->lon;
    }
    if (geo.precision_class)
        j["precision_class"] = to_string(*geo.precision_class);
    if (geo.radius_m)
        j["radius_m"] = *geo.radius_m;
    j["confidence"] = geo.confidence;
    j["crowd_validated"] = geo.crowd_validated;
    j["image_tags"] = geo.image_tags;
    j["evidence"] = geo.evidence;
    return j;
}

Geolocation geolocation_from_json(const json& j) {
    auto bad = [](std::string_view what) { throw InputError(fmt::format("geolocation record: {}", what)); };
    if (!j.is_object())
        bad("not an object");
    Geolocation geo;
    try {
        geo.post_id = j.at("post_id").get<PostId>();
        auto method = parse_geo_method(j.at("method").get<std::string>());
        if (!method)
            bad("unknown method");
        geo.method = *method;
        if (j.contains("place_id"))
            geo.place_id = j["place_id"].get<PlaceId>();
        if (j.contains("lat") != j.contains("lon"))
            bad("lat and lon must appear together");
        if (j.contains("lat")) {
            geo.point = LatLon{j["lat"].get<double>(), j["lon"].get<double>()};
            if (!valid_coordinate(*geo.point))
                bad("coordinate out of range");
        }
        if (j.contains("precision_class")) {
            auto cls = parse_place_class(j["precision_class"].get<std::string>());
            if (!cls)
                bad("unknown precision_class");
            geo.precision_class = cls;
        }
        if (j.contains("radius_m"))
            geo.radius_m = j["radius_m"].get<double>();
        geo.confidence = j.at("confidence").get<double>();
        geo.crowd_validated = j.value("crowd_validated", false);
        if (j.contains("image_tags"))
            geo.image_tags = j["image_tags"].get<std::vector<std::string>>();
        if (j.contains("evidence"))
            geo.evidence = j["evidence"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        bad(e.what());
    }
    if (!(geo.confidence >= 0.0 && geo.confidence <= 1.0))
        bad("confidence outside [0,1]");
    switch (geo.method) {
    case GeoMethod::native:
        if (!geo.point)
            bad("native geolocation without a point");
        break;
    case GeoMethod::cime_local:
    case GeoMethod::cime_global:
        if (!geo.place_id || !geo.point || !geo.precision_class || !geo.radius_m)
            bad("inferred geolocation missing place, point, class or radius");
        break;
    case GeoMethod::unresolved:
        if (geo.point || geo.confidence != 0.0)
            bad("unresolved geolocation with a point or non-zero confidence");
        break;
    }
    return geo;
}

} // namespace geopost
