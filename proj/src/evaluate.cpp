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
#include "geopost/scenario.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace geopost {

nlohmann::ordered_json to_json(const EvalReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["resolution_rate"] = opt(r.resolution_rate);
    j["within_radius_rate"] = opt(r.within_radius_rate);
    j["median_error_m"] = opt(r.median_error_m);
    auto at_k = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.precision_at_k)
        at_k[std::to_string(k)] = opt(v);
    j["precision_at_k"] = std::move(at_k);
    return j;
}

namespace {

template <typename T, typename IdFn>
std::unordered_map<PostId, const T*> by_id(std::span<const T> items, IdFn id, std::string_view what) {
    std::unordered_map<PostId, const T*> out;
    for (const auto& item : items)
        if (!out.emplace(id(item), &item).second)
            throw InputError(fmt::format("duplicate post_id {} in {}", id(item), what));
    return out;
}

} // namespace

EvalReport evaluate(std::span<const Post> posts, std::span<const Geolocation> geos, std::span<const GroundTruth> truth,
                    std::span<const std::size_t> ks, const RankingParams& params) {
    const auto post_by = by_id(posts, [](const Post& p) { return p.post_id; }, "posts");
    const auto geo_by = by_id(geos, [](const Geolocation& g) { return g.post_id; }, "geolocations");
    const auto truth_by = by_id(truth, [](const GroundTruth& t) { return t.post_id; }, "truth");

    std::set<PostId> offenders;
    for (const auto& [id, _] : post_by)
        if (!geo_by.contains(id) || !truth_by.contains(id))
            offenders.insert(id);
    for (const auto& [id, _] : geo_by)
        if (!post_by.contains(id) || !truth_by.contains(id))
            offenders.insert(id);
    for (const auto& [id, _] : truth_by)
        if (!post_by.contains(id) || !geo_by.contains(id))
            offenders.insert(id);
    if (!offenders.empty()) {
        std::vector<PostId> shown(offenders.begin(), offenders.end());
        const auto total = shown.size();
        if (shown.size() > 20)
            shown.resize(20);
        throw InputError(fmt::format("post_id mismatch across inputs ({} ids): {}{}", total, fmt::join(shown, ", "),
                                     total > 20 ? ", ..." : ""));
    }

    EvalReport report;
    std::size_t non_geotagged = 0, resolved_non_geotagged = 0;
    std::vector<PostGeo> resolved;
    std::vector<double> errors;
    std::unordered_map<PostId, bool> within;
    for (const auto& p : posts) {
        const Geolocation& geo = *geo_by.at(p.post_id);
        if (!p.native_geotag) {
            ++non_geotagged;
            if (geo.method != GeoMethod::unresolved)
                ++resolved_non_geotagged;
        }
        if (geo.method == GeoMethod::unresolved || !geo.point)
            continue;
        const double err = haversine_m(*geo.point, truth_by.at(p.post_id)->point);
        errors.push_back(err);
        within[p.post_id] = geo.radius_m && err <= *geo.radius_m;
        resolved.push_back({&p, &geo});
    }
    if (non_geotagged > 0)
        report.resolution_rate = static_cast<double>(resolved_non_geotagged) / static_cast<double>(non_geotagged);

    if (!errors.empty()) {
        std::size_t hits = 0;
        for (const auto& [id, ok] : within)
            hits += ok ? 1 : 0;
        report.within_radius_rate = static_cast<double>(hits) / static_cast<double>(resolved.size());
        std::sort(errors.begin(), errors.end());
        const auto n = errors.size();
        report.median_error_m = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
    }

    std::int64_t now = 0;
    for (const auto& p : posts)
        now = std::max(now, p.created_at);
    const auto ranked = rank_posts(resolved, params, now);
    for (std::size_t k : ks) {
        if (ranked.empty() || k == 0) {
            report.precision_at_k[k] = std::nullopt;
            continue;
        }
        const std::size_t top = std::min(k, ranked.size());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < top; ++i)
            hits += within.at(resolved[ranked[i].index].post->post_id) ? 1 : 0;
        report.precision_at_k[k] = static_cast<double>(hits) / static_cast<double>(top);
    }
    return report;
}

} // namespace geopost
