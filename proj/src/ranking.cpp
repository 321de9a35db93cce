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

#include "geopost/ranking.hpp"

#include "geopost/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace geopost {

bool RankingParams::valid() const {
    const double weights[] = {w_precision, w_confidence, w_recency, w_validated};
    bool any_positive = false;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            return false;
        any_positive = any_positive || w > 0.0;
    }
    return any_positive && recency_halflife_s > 0.0 && std::isfinite(recency_halflife_s);
}

nlohmann::ordered_json to_json(const RankingParams& p) {
    nlohmann::ordered_json j;
    j["w_precision"] = p.w_precision;
    j["w_confidence"] = p.w_confidence;
    j["w_recency"] = p.w_recency;
    j["w_validated"] = p.w_validated;
    j["recency_halflife_s"] = p.recency_halflife_s;
    return j;
}

RankingParams ranking_params_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw InputError("ranking params must be an object");
    auto field = [&](const char* name) {
        if (!j.contains(name) || !j[name].is_number())
            throw InputError(fmt::format("ranking params: '{}' missing or not a number", name));
        return j[name].get<double>();
    };
    RankingParams p;
    p.w_precision = field("w_precision");
    p.w_confidence = field("w_confidence");
    p.w_recency = field("w_recency");
    p.w_validated = field("w_validated");
    p.recency_halflife_s = field("recency_halflife_s");
    if (!p.valid())
        throw InputError("ranking params: weights must be >= 0 and not all zero, halflife > 0");
    return p;
}

double precision_factor(const Geolocation& geo) {
    switch (geo.method) {
    case GeoMethod::native: return 1.0;
    case GeoMethod::unresolved: return 0.0;
    case GeoMethod::cime_local:
    case GeoMethod::cime_global: break;
    }
    if (!geo.precision_class)
        return 0.0;
    switch (*geo.precision_class) {
    case PlaceClass::poi: return 1.0;
    case PlaceClass::street: return 0.8;
    case PlaceClass::locality: return 0.5;
    case PlaceClass::region: return 0.2;
    }
    return 0.0;
}

double rank_score(const Geolocation& geo, const Post& post, const RankingParams& params, std::int64_t now) {
    const double age = std::max<double>(0.0, static_cast<double>(now - post.created_at));
    const double recency = std::pow(0.5, age / params.recency_halflife_s);
    return params.w_precision * precision_factor(geo) + params.w_confidence * geo.confidence +
           params.w_recency * recency + params.w_validated * (geo.crowd_validated ? 1.0 : 0.0);
}

std::vector<RankedRef> rank_posts(std::span<const PostGeo> items, const RankingParams& params, std::int64_t now,
                                  std::optional<std::size_t> limit) {
    std::vector<RankedRef> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back({i, rank_score(*items[i].geo, *items[i].post, params, now)});
    std::sort(out.begin(), out.end(), [&](const RankedRef& a, const RankedRef& b) {
        if (a.score != b.score)
            return a.score > b.score;
        const PostId ia = items[a.index].post->post_id, ib = items[b.index].post->post_id;
        if (ia != ib)
            return ia < ib;
        return a.index < b.index;
    });
    if (limit && out.size() > *limit)
        out.resize(*limit);
    return out;
}

} // namespace geopost
