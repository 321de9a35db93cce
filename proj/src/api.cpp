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

#include "geopost/api.hpp"

#include "geopost/error.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

namespace geopost {

using nlohmann::json;
using nlohmann::ordered_json;

std::int64_t system_clock_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string original_post_url(Source source, PostId id) {
    switch (source) {
    case Source::twitter: return fmt::format("https://twitter.com/i/web/status/{}", id);
    case Source::flickr: return fmt::format("https://www.flickr.com/photo.gne?id={}", id);
    case Source::youtube: return fmt::format("https://www.youtube.com/watch?v={}", id);
    case Source::instagram: return fmt::format("https://www.instagram.com/p/{}/", id);
    }
    return {};
}

std::string streetview_url(const LatLon& p) {
    return fmt::format("https://www.google.com/maps?layer=c&cbll={},{}", p.lat, p.lon);
}

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
    ordered_json j;
    j["error"] = code;
    j["message"] = message;
    return {status, std::string(kJsonType), j.dump()};
}

ApiService::ApiService(Store& store, RankingParams params, Clock clock)
    : store_(store), clock_(std::move(clock)), params_(params) {
    if (!params_.valid())
        throw InputError("invalid initial ranking params");
}

RankingParams ApiService::ranking() const {
    std::shared_lock lock(params_mutex_);
    return params_;
}

ordered_json ApiService::feature(const StoredItem& item, const RankingParams& params, std::int64_t now,
                                 bool detail) const {
    const auto& post = item.post;
    const auto& geo = item.geo;
    ordered_json f;
    f["type"] = "Feature";
    f["id"] = post.post_id;
    if (geo.point) {
        ordered_json geom;
        geom["type"] = "Point";
        geom["coordinates"] = ordered_json::array({geo.point->lon, geo.point->lat});
        f["geometry"] = std::move(geom);
    } else {
        f["geometry"] = nullptr;
    }
    ordered_json p;
    p["post_id"] = post.post_id;
    p["source"] = to_string(post.source);
    p["created_at"] = format_iso8601(post.created_at);
    p["text"] = post.text;
    p["method"] = to_string(geo.method);
    p["precision_class"] = geo.precision_class ? ordered_json(to_string(*geo.precision_class)) : ordered_json();
    p["radius_m"] = geo.radius_m ? ordered_json(*geo.radius_m) : ordered_json();
    p["confidence"] = geo.confidence;
    p["crowd_validated"] = geo.crowd_validated;
    p["rank_score"] = rank_score(geo, post, params, now);
    auto media = ordered_json::array();
    for (const auto& m : post.media) {
        ordered_json mj;
        mj["url"] = m.url;
        mj["kind"] = to_string(m.kind);
        mj["origin"] = to_string(m.origin);
        mj["image_tags"] = m.image_tags;
        media.push_back(std::move(mj));
    }
    p["media"] = std::move(media);
    p["original_post_url"] = original_post_url(post.source, post.post_id);
    if (geo.point)
        p["streetview_url"] = streetview_url(*geo.point);
    if (detail) {
        p["author"] = post.author_id;
        p["place_id"] = geo.place_id ? ordered_json(*geo.place_id) : ordered_json();
        p["image_tags"] = geo.image_tags;
        p["evidence"] = geo.evidence;
    }
    f["properties"] = std::move(p);
    return f;
}

namespace {

std::optional<PostId> parse_id(std::string_view s) { return parse_u64(s); }

} // namespace

ApiResponse ApiService::list_posts(const QueryParams& query) const {
    QueryFilter filter;
    std::optional<std::size_t> limit;
    auto param = [&](std::string_view key) -> std::optional<std::string_view> {
        auto it = query.find(key);
        if (it == query.end() || it->second.empty())
            return std::nullopt;
        return std::string_view(it->second);
    };
    if (auto v = param("bbox")) {
        try {
            filter.bbox = parse_bbox(*v);
        } catch (const InputError& e) {
            return error_response(400, "bad_bbox", e.what());
        }
    }
    for (auto [key, slot] : {std::pair{"from", &filter.time_from}, std::pair{"to", &filter.time_to}}) {
        if (auto v = param(key)) {
            auto t = parse_timestamp(*v);
            if (!t)
                return error_response(400, "bad_time", fmt::format("'{}' is not an ISO-8601 UTC timestamp", *v));
            *slot = *t;
        }
    }
    if (filter.time_from && filter.time_to && *filter.time_from > *filter.time_to)
        return error_response(400, "bad_time", "from is after to");
    if (auto v = param("layer")) {
        auto layer = parse_layer(*v);
        if (!layer)
            return error_response(400, "bad_layer", fmt::format("unknown layer '{}' (native|cime|all)", *v));
        filter.layer = *layer;
    }
    if (auto v = param("min_precision")) {
        auto cls = parse_place_class(*v);
        if (!cls)
            return error_response(400, "bad_precision",
                                  fmt::format("unknown precision class '{}' (poi|street|locality|region)", *v));
        filter.min_precision = cls;
    }
    if (auto v = param("limit")) {
        auto n = parse_u64(*v);
        if (!n)
            return error_response(400, "bad_limit", fmt::format("'{}' is not a non-negative integer", *v));
        limit = static_cast<std::size_t>(*n);
    }
    if (auto v = param("media_only")) {
        if (*v == "true" || *v == "1")
            filter.only_with_media = true;
        else if (*v != "false" && *v != "0")
            return error_response(400, "bad_media_only", "media_only must be true or false");
    }

    std::vector<StoredItem> items;
    try {
        items = store_.query(filter);
    } catch (const InputError& e) {
        return error_response(400, "bad_query", e.what());
    }
    // map layers carry geometry only
    std::erase_if(items, [](const StoredItem& item) { return !item.geo.point; });

    const auto params = ranking();
    const auto now = clock_();
    std::vector<PostGeo> refs;
    refs.reserve(items.size());
    for (const auto& item : items)
        refs.push_back({&item.post, &item.geo});
    const auto ranked = rank_posts(refs, params, now, limit);

    ordered_json fc;
    fc["type"] = "FeatureCollection";
    auto features = ordered_json::array();
    for (const auto& r : ranked)
        features.push_back(feature(items[r.index], params, now, false));
    fc["features"] = std::move(features);
    return {200, std::string(kGeoJsonType), fc.dump()};
}

ApiResponse ApiService::post_detail(std::string_view id) const {
    auto pid = parse_id(id);
    if (!pid)
        return error_response(400, "bad_id", fmt::format("'{}' is not a numeric post id", id));
    auto item = store_.get(*pid);
    if (!item)
        return error_response(404, "not_found", fmt::format("post {} not found", *pid));
    return {200, std::string(kGeoJsonType), feature(*item, ranking(), clock_(), true).dump()};
}

ApiResponse ApiService::validate(std::string_view id, std::string_view body) {
    auto pid = parse_id(id);
    if (!pid)
        return error_response(400, "bad_id", fmt::format("'{}' is not a numeric post id", id));
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("validated") || !j["validated"].is_boolean())
        return error_response(400, "bad_body", "expected {\"validated\": true|false}");
    const auto now = clock_();
    std::optional<StoredItem> updated;
    try {
        updated = store_.set_validated(*pid, j["validated"].get<bool>(), now);
    } catch (const StorageError& e) {
        return error_response(500, "storage", e.what());
    }
    if (!updated)
        return error_response(404, "not_found", fmt::format("post {} not found", *pid));
    return {200, std::string(kGeoJsonType), feature(*updated, ranking(), now, true).dump()};
}

ApiResponse ApiService::get_ranking() const { return {200, std::string(kJsonType), to_json(ranking()).dump()}; }

ApiResponse ApiService::put_ranking(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded())
        return error_response(400, "bad_body", "body is not JSON");
    RankingParams next;
    try {
        next = ranking_params_from_json(j);
    } catch (const InputError& e) {
        return error_response(400, "bad_params", e.what());
    }
    {
        std::unique_lock lock(params_mutex_);
        params_ = next;
    }
    return {200, std::string(kJsonType), to_json(next).dump()};
}

ApiResponse ApiService::stats() const {
    const auto items = store_.all();
    ordered_json by_method, by_precision, by_source;
    for (auto m : {GeoMethod::native, GeoMethod::cime_local, GeoMethod::cime_global, GeoMethod::unresolved})
        by_method[std::string(to_string(m))] = 0;
    for (auto c : {PlaceClass::poi, PlaceClass::street, PlaceClass::locality, PlaceClass::region})
        by_precision[std::string(to_string(c))] = 0;
    by_precision["none"] = 0;
    for (auto s : {Source::twitter, Source::flickr, Source::youtube, Source::instagram})
        by_source[std::string(to_string(s))] = 0;
    std::size_t validated = 0;
    std::optional<std::int64_t> t_min, t_max;
    for (const auto& item : items) {
        auto& m = by_method[std::string(to_string(item.geo.method))];
        m = m.get<std::size_t>() + 1;
        auto& c = by_precision[item.geo.precision_class ? std::string(to_string(*item.geo.precision_class)) : "none"];
        c = c.get<std::size_t>() + 1;
        auto& s = by_source[std::string(to_string(item.post.source))];
        s = s.get<std::size_t>() + 1;
        validated += item.geo.crowd_validated ? 1 : 0;
        t_min = std::min(t_min.value_or(item.post.created_at), item.post.created_at);
        t_max = std::max(t_max.value_or(item.post.created_at), item.post.created_at);
    }
    ordered_json j;
    j["total"] = items.size();
    j["by_method"] = std::move(by_method);
    j["by_precision"] = std::move(by_precision);
    j["by_source"] = std::move(by_source);
    ordered_json v;
    v["true"] = validated;
    v["false"] = items.size() - validated;
    j["validated"] = std::move(v);
    j["time_min"] = t_min ? ordered_json(format_iso8601(*t_min)) : ordered_json();
    j["time_max"] = t_max ? ordered_json(format_iso8601(*t_max)) : ordered_json();
    return {200, std::string(kJsonType), j.dump()};
}

} // namespace geopost
