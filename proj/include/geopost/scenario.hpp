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

// Seeded synthetic event corpora with ground truth, and the metrics used to
// score a geolocation run against them.

#pragma once

#include "geopost/gazetteer.hpp"
#include "geopost/geocode.hpp"
#include "geopost/post.hpp"
#include "geopost/ranking.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace geopost {

/// Deterministic across platforms: only the raw std::mt19937_64 stream is
/// used, never the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    double uniform(); // [0,1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n); // [0,n), unbiased
    bool chance(double p) { return uniform() < p; }
    std::size_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

struct ScenarioConfig {
    std::string name = "flood";
    std::uint64_t seed = 1;
    std::size_t n_posts = 1000;
    LatLon event_center{50.5833, -3.4656};
    double event_radius_m = 25000.0;
    double geotag_rate = 0.03;
    double ambiguity_rate = 0.3;
    double relation_density = 2.0; // relations initiated per post
    std::int64_t start_time = 1391558400; // 2014-02-05T00:00:00Z
    std::int64_t time_span_s = 3 * 86400;
    std::vector<std::string> templates; // "{place}" marks the toponym

    /// "flood", "earthquake" or "storm". Throws InputError otherwise.
    static ScenarioConfig preset(std::string_view name);
    void validate() const;
};

/// `template = <name>` selects the preset; other keys override it.
ScenarioConfig parse_scenario_config(std::istream& in, std::string_view source_name = "<scenario>");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct GroundTruth {
    PostId post_id = 0;
    LatLon point;
    PlaceId place_id = 0;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

void write_truth_csv(std::ostream& out, std::span<const GroundTruth> truth);
std::vector<GroundTruth> read_truth_csv(std::istream& in, std::string_view source_name = "<truth>");

struct Scenario {
    std::vector<Post> posts;
    std::vector<GroundTruth> truth; // parallel to posts
};

/// Every post names its true place in its text; exactly
/// round(geotag_rate * n_posts) posts carry a native geotag.
Scenario simulate(const ScenarioConfig& cfg, const Gazetteer& g);

/// Places around the three preset event centers plus same-named twins and
/// unrelated places elsewhere in the world.
Gazetteer synthetic_gazetteer(std::uint64_t seed);

// Evaluation.

struct EvalReport {
    std::optional<double> resolution_rate;
    std::optional<double> within_radius_rate;
    std::optional<double> median_error_m;
    std::map<std::size_t, std::optional<double>> precision_at_k;
};

nlohmann::ordered_json to_json(const EvalReport& r);

/// The three inputs must cover the same post ids; InputError lists offenders.
/// Ranking for precision@k uses `params` at the newest post's timestamp.
EvalReport evaluate(std::span<const Post> posts, std::span<const Geolocation> geos, std::span<const GroundTruth> truth,
                    std::span<const std::size_t> ks, const RankingParams& params = {});

} // namespace geopost
