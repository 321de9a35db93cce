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

#include "support.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string_view>
#include <unistd.h>

#include <fmt/format.h>

namespace geopost::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return GEOPOST_TEST_DATA_DIR; }
fs::path golden_dir() { return GEOPOST_TEST_GOLDEN_DIR; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

bool matches_golden(const std::string& name, const std::string& actual) {
    const auto path = golden_dir() / name;
    if (const char* update = std::getenv("GEOPOST_UPDATE_GOLDEN"); update && std::string_view(update) == "1") {
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << actual;
        return true;
    }
    return fs::exists(path) && read_file(path) == actual;
}

const Gazetteer& toy_gazetteer() {
    static const Gazetteer g = load_gazetteer(data_dir() / "toy_gazetteer.tsv");
    return g;
}

Place make_place(PlaceId id, std::string name, PlaceClass cls, LatLon at, double importance) {
    Place p;
    p.place_id = id;
    p.canonical_name = std::move(name);
    p.place_class = cls;
    p.centroid = at;
    p.bbox = {at.lon - 0.01, at.lat - 0.01, at.lon + 0.01, at.lat + 0.01};
    p.importance = importance;
    return p;
}

Post make_post(PostId id, std::string text, std::int64_t created_at) {
    Post p;
    p.post_id = id;
    p.author_id = fmt::format("author{}", id);
    p.created_at = created_at;
    p.text = std::move(text);
    return p;
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() / fmt::format("geopost-test-{}-{}", ::getpid(), counter++);
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

StoredItem random_item(Rng& rng, PostId id) {
    StoredItem item;
    auto& p = item.post;
    p.post_id = id;
    p.source = static_cast<Source>(rng.below(4));
    p.author_id = fmt::format("u{}", rng.below(50));
    // coarse grid so bbox edges and equal timestamps actually occur
    p.created_at = 1400000000 + static_cast<std::int64_t>(rng.below(500)) * 60;
    p.text = fmt::format("post {}", id);
    if (rng.chance(0.3))
        p.media.push_back({fmt::format("https://img.example/{}.jpg", id), MediaKind::image, MediaOrigin::embedded,
                           std::nullopt, {"tag"}});

    auto& g = item.geo;
    g.post_id = id;
    const LatLon point{static_cast<double>(rng.below(161)) * 0.5 - 40.0,
                       static_cast<double>(rng.below(321)) * 0.5 - 80.0};
    const double r = rng.uniform();
    if (r < 0.15) {
        p.native_geotag = point;
        g.method = GeoMethod::native;
        g.point = point;
        g.confidence = 1.0;
        g.precision_class = PlaceClass::poi;
        g.radius_m = 100.0;
    } else if (r < 0.85) {
        g.method = rng.chance(0.5) ? GeoMethod::cime_local : GeoMethod::cime_global;
        g.place_id = 1000 + rng.below(100);
        g.point = point;
        g.precision_class = static_cast<PlaceClass>(rng.below(4));
        g.radius_m = PrecisionRadii{}.of(*g.precision_class);
        g.confidence = std::round(rng.uniform() * 1000.0) / 1000.0;
    } else {
        g.method = GeoMethod::unresolved;
    }
    g.crowd_validated = rng.chance(0.2);
    item.inserted_at = p.created_at + 10;
    return item;
}

} // namespace geopost::testing
