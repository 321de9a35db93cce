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
#include "geopost/ingest.hpp"
#include "geopost/scenario.hpp"
#include "geopost/text.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <doctest.h>

using namespace geopost;
using namespace geopost::testing;

namespace {

const Gazetteer& synth() {
    static const Gazetteer g = synthetic_gazetteer(1);
    return g;
}

std::string serialized(const Scenario& s) {
    std::ostringstream out;
    write_posts(out, s.posts);
    write_truth_csv(out, s.truth);
    return out.str();
}

std::size_t geotagged(const Scenario& s) {
    return static_cast<std::size_t>(
        std::count_if(s.posts.begin(), s.posts.end(), [](const Post& p) { return p.native_geotag.has_value(); }));
}

ScenarioConfig parse_scenario(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario_config(in, "scn.conf");
}

Geolocation at(PostId id, GeoMethod method, LatLon point, PlaceClass cls, double confidence) {
    Geolocation g;
    g.post_id = id;
    g.method = method;
    g.point = point;
    g.precision_class = cls;
    g.radius_m = PrecisionRadii{}.of(cls);
    g.confidence = confidence;
    if (method != GeoMethod::native)
        g.place_id = 1;
    return g;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("rng primitives are deterministic and in range") {
    Rng a(5), b(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(a.below(7) == b.below(7));
    }
    Rng r(6);
    double sum = 0;
    for (int i = 0; i < 20000; ++i)
        sum += static_cast<double>(r.poisson(2.0));
    CHECK(sum / 20000 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
    const auto cfg = ScenarioConfig::preset("flood");
    CHECK(serialized(simulate(cfg, synth())) == serialized(simulate(cfg, synth())));
    auto other = cfg;
    other.seed = 2;
    CHECK(serialized(simulate(other, synth())) != serialized(simulate(cfg, synth())));
}

TEST_CASE("exact geotag count") {
    auto cfg = ScenarioConfig::preset("flood");
    CHECK(cfg.n_posts == 1000);
    CHECK(cfg.geotag_rate == 0.03);
    CHECK(geotagged(simulate(cfg, synth())) == 30);
    for (std::size_t n : {1u, 10u, 17u, 250u, 999u}) {
        cfg.n_posts = n;
        CHECK(geotagged(simulate(cfg, synth())) == static_cast<std::size_t>(std::llround(0.03 * static_cast<double>(n))));
    }
    cfg.n_posts = 40;
    cfg.geotag_rate = 1.0;
    CHECK(geotagged(simulate(cfg, synth())) == 40);
}

TEST_CASE("geotags sit within 30 m of the truth") {
    const auto s = simulate(ScenarioConfig::preset("earthquake"), synth());
    for (std::size_t i = 0; i < s.posts.size(); ++i)
        if (s.posts[i].native_geotag)
            CHECK(oracle::distance_m(*s.posts[i].native_geotag, s.truth[i].point) <= 30.0 + 1e-6);
}

TEST_CASE("each post names its true place") {
    for (const char* name : {"flood", "earthquake", "storm"}) {
        const auto cfg = ScenarioConfig::preset(name);
        const auto s = simulate(cfg, synth());
        REQUIRE(s.posts.size() == s.truth.size());
        for (std::size_t i = 0; i < s.posts.size(); ++i) {
            const auto& truth = s.truth[i];
            CHECK(truth.post_id == s.posts[i].post_id);
            CHECK(synth().at(truth.place_id).centroid == truth.point);
            CHECK(oracle::distance_m(truth.point, cfg.event_center) <= cfg.event_radius_m);
            const auto ms = extract_toponyms(s.posts[i], synth());
            const bool named = std::any_of(ms.begin(), ms.end(), [&](const ToponymMention& m) {
                return std::find(m.candidates.begin(), m.candidates.end(), truth.place_id) != m.candidates.end();
            });
            CHECK(named);
        }
    }
}

TEST_CASE("zero ambiguity gives single-candidate mentions") {
    auto cfg = ScenarioConfig::preset("storm");
    cfg.ambiguity_rate = 0.0;
    const auto s = simulate(cfg, synth());
    std::size_t mentions = 0;
    for (const auto& p : s.posts)
        for (const auto& m : extract_toponyms(p, synth())) {
            CHECK(m.candidates.size() == 1);
            ++mentions;
        }
    CHECK(mentions >= s.posts.size());
}

TEST_CASE("relation density controls the graph") {
    auto cfg = ScenarioConfig::preset("flood");
    cfg.relation_density = 0.0;
    const auto none = simulate(cfg, synth());
    CHECK(build_context_graph(none.posts, CimeConfig{}).edges.empty());

    cfg.relation_density = 2.0;
    const auto some = simulate(cfg, synth());
    CHECK(build_context_graph(some.posts, CimeConfig{}).edges.size() > 1000);
    // direct reply and retweet targets mostly sit near the source's truth
    std::map<PostId, LatLon> truth;
    for (const auto& t : some.truth)
        truth[t.post_id] = t.point;
    std::size_t links = 0, near = 0;
    for (const auto& p : some.posts)
        for (const auto& target : {p.reply_to, p.retweet_of})
            if (target) {
                ++links;
                near += oracle::distance_m(truth[p.post_id], truth[*target]) <= 10000.0 ? 1 : 0;
            }
    REQUIRE(links > 300);
    CHECK(static_cast<double>(near) / static_cast<double>(links) > 0.8);
}

TEST_CASE("scenario config files") {
    const auto cfg = parse_scenario("# custom\ntemplate=earthquake\nseed=9\nn_posts=50\ngeotag_rate=0.1\n");
    CHECK(cfg.name == "earthquake");
    CHECK(cfg.seed == 9);
    CHECK(cfg.n_posts == 50);
    CHECK(cfg.geotag_rate == 0.1);
    CHECK(cfg.event_center == ScenarioConfig::preset("earthquake").event_center);

    const auto moved = parse_scenario("event_center=10,20\nevent_radius_m=5000\ntemplate=storm\n");
    CHECK(moved.event_center == LatLon{10, 20});
    CHECK(moved.name == "storm");

    CHECK_THROWS_AS(parse_scenario("template=volcano\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("geotag_rate=1.5\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("ambiguity_rate=-0.1\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("n_posts=0\n"), InputError);
    CHECK_THROWS_AS(parse_scenario("colour=blue\n"), InputError);
    CHECK_THROWS_AS(ScenarioConfig::preset("tsunami"), InputError);
}

TEST_CASE("templates must not contain toponyms") {
    auto cfg = ScenarioConfig::preset("flood");
    const auto& some_place = synth().places().at(5);
    cfg.templates = {"Flooding near " + some_place.canonical_name + " and at {place}"};
    CHECK_THROWS_AS(simulate(cfg, synth()), InputError);
}

TEST_CASE("truth csv round-trip and errors") {
    const auto s = simulate(ScenarioConfig::preset("flood"), synth());
    std::stringstream io;
    write_truth_csv(io, s.truth);
    CHECK(read_truth_csv(io) == s.truth);

    std::istringstream bad_header("id,lat,lon\n");
    CHECK_THROWS_AS(read_truth_csv(bad_header), InputError);
    std::istringstream bad_row("post_id,lat,lon,place_id\n1,95,0,3\n");
    CHECK_THROWS_AS(read_truth_csv(bad_row), InputError);
}

TEST_CASE("synthetic gazetteer shape") {
    const auto& g = synth();
    CHECK(g.size() > 300);
    std::size_t regions = 0, ambiguous = 0;
    std::set<std::string> seen;
    for (const auto& p : g.places()) {
        regions += p.place_class == PlaceClass::region ? 1 : 0;
        if (g.ids_for_normalized(normalize_name(p.canonical_name)).size() > 1 && seen.insert(p.canonical_name).second)
            ++ambiguous;
    }
    CHECK(regions == 3);
    CHECK(ambiguous > 20);
    std::ostringstream a, b;
    write_gazetteer(a, synthetic_gazetteer(1));
    write_gazetteer(b, synthetic_gazetteer(1));
    CHECK(a.str() == b.str());
}

TEST_CASE("evaluate on a hand-built four-post case") {
    const std::int64_t t0 = 1391600000;
    std::vector<Post> posts{make_post(1, "a", t0), make_post(2, "b", t0 + 3600), make_post(3, "c", t0 + 7200),
                            make_post(4, "d", t0 + 100)};
    const LatLon base{50.0, -3.0};
    posts[0].native_geotag = base;
    const std::vector<GroundTruth> truth{{1, base, 10}, {2, {50.1, -3.0}, 11}, {3, {50.2, -3.0}, 12}, {4, {50.3, -3.0}, 13}};
    const LatLon p2{50.1 + 3000.0 / 111195.0, -3.0}; // about 3 km north, locality radius 5 km
    const LatLon p3{50.2, -3.0 + 0.014};              // about 1 km east, poi radius 100 m
    std::vector<Geolocation> geos{at(1, GeoMethod::native, base, PlaceClass::poi, 1.0),
                                  at(2, GeoMethod::cime_local, p2, PlaceClass::locality, 0.6),
                                  at(3, GeoMethod::cime_global, p3, PlaceClass::poi, 0.9), Geolocation{}};
    geos[3].post_id = 4;

    const double e2 = oracle::distance_m(p2, truth[1].point);
    const double e3 = oracle::distance_m(p3, truth[2].point);
    REQUIRE(e2 < 5000.0);
    REQUIRE(e3 > 100.0);
    REQUIRE(e3 < e2);

    const std::vector<std::size_t> ks{1, 2, 10};
    const auto r = evaluate(posts, geos, truth, ks);
    CHECK(*r.resolution_rate == doctest::Approx(2.0 / 3.0));
    CHECK(*r.within_radius_rate == doctest::Approx(2.0 / 3.0));
    CHECK(*r.median_error_m == doctest::Approx(e3).epsilon(1e-9));

    // precision@k over the resolved posts ranked at the newest timestamp
    const std::vector<Post> rp{posts[0], posts[1], posts[2]};
    const std::vector<Geolocation> rg{geos[0], geos[1], geos[2]};
    const auto order = oracle::rank(rp, rg, RankingParams{}, t0 + 7200);
    const bool within[] = {true, true, false};
    auto expected_at = [&](std::size_t k) {
        double hits = 0;
        for (std::size_t i = 0; i < std::min<std::size_t>(k, 3); ++i)
            hits += within[order[i]] ? 1 : 0;
        return hits / static_cast<double>(std::min<std::size_t>(k, 3));
    };
    CHECK(*r.precision_at_k.at(1) == doctest::Approx(expected_at(1)));
    CHECK(*r.precision_at_k.at(2) == doctest::Approx(expected_at(2)));
    CHECK(*r.precision_at_k.at(10) == doctest::Approx(2.0 / 3.0));

    const auto j = to_json(r);
    CHECK(j.size() == 4);
    CHECK(j.contains("resolution_rate"));
    CHECK(j["precision_at_k"].contains("10"));
}

TEST_CASE("evaluate degenerate inputs") {
    const auto s = simulate(ScenarioConfig::preset("storm"), synth());
    std::vector<Geolocation> perfect, none;
    for (const auto& t : s.truth) {
        perfect.push_back(at(t.post_id, GeoMethod::cime_local, t.point, PlaceClass::locality, 0.5));
        Geolocation u;
        u.post_id = t.post_id;
        none.push_back(u);
    }
    const std::vector<std::size_t> ks{10, 50};
    const auto best = evaluate(s.posts, perfect, s.truth, ks);
    CHECK(*best.resolution_rate == 1.0);
    CHECK(*best.within_radius_rate == 1.0);
    CHECK(*best.median_error_m == 0.0);
    CHECK(*best.precision_at_k.at(10) == 1.0);
    CHECK(*best.precision_at_k.at(50) == 1.0);

    std::vector<Post> untagged = s.posts;
    for (auto& p : untagged)
        p.native_geotag.reset();
    const auto worst = evaluate(untagged, none, s.truth, ks);
    CHECK(*worst.resolution_rate == 0.0);
    CHECK_FALSE(worst.within_radius_rate);
    CHECK_FALSE(worst.median_error_m);
    CHECK_FALSE(worst.precision_at_k.at(10));
    CHECK(to_json(worst)["within_radius_rate"].is_null());
}

TEST_CASE("evaluate rejects misaligned inputs, naming offenders") {
    const auto s = simulate(ScenarioConfig::preset("flood"), synth());
    auto geos = geolocate_corpus(s.posts, synth(), CimeConfig{});
    geos.erase(geos.begin() + 3);
    auto truth = s.truth;
    truth.push_back({42, {0, 0}, 1});
    const std::vector<std::size_t> ks{10};
    try {
        evaluate(s.posts, geos, truth, ks);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string(s.posts[3].post_id)) != std::string::npos);
        CHECK(msg.find("42") != std::string::npos);
    }
}

} // TEST_SUITE
