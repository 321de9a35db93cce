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
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace geopost {

struct RankingParams {
    double w_precision = 0.4;
    double w_confidence = 0.3;
    double w_recency = 0.2;
    double w_validated = 0.1;
    double recency_halflife_s = 21600.0;

    /// Weights non-negative and not all zero, halflife positive.
    bool valid() const;

    friend bool operator==(const RankingParams&, const RankingParams&) = default;
};

nlohmann::ordered_json to_json(const RankingParams& p);
/// Every field is required. Throws InputError; the result is validated.
RankingParams ranking_params_from_json(const nlohmann::json& j);

/// Precision factor: native 1.0, unresolved 0.0, otherwise by class
/// (poi 1.0, street 0.8, locality 0.5, region 0.2).
double precision_factor(const Geolocation& geo);

double rank_score(const Geolocation& geo, const Post& post, const RankingParams& params, std::int64_t now);

struct RankedRef {
    std::size_t index; // into the input
    double score;
};

struct PostGeo {
    const Post* post;
    const Geolocation* geo;
};

/// Descending score, ties by ascending post_id. Truncated to limit if given.
std::vector<RankedRef> rank_posts(std::span<const PostGeo> items, const RankingParams& params, std::int64_t now,
                                  std::optional<std::size_t> limit = std::nullopt);

} // namespace geopost
