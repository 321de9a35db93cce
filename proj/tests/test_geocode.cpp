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
#include "geopost/ingest.hpp"
#include "geopost/scenario.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include <doctest.h>

using namespace geopost;
using namespace geopost::testing;
using Strings = std::vector<std::string>;

namespace {

// Entity fields filled the way ingest would.
Post post_with_entities(PostId id, std::string text) {
    auto p = make_post(id, std::move(text));
    auto e = extract_entities(p.text);
    p.hashtags = e.hashtags;
    p.mentions = e.mentions;
    p.links = e.links;
    return p;
}

const CandidateState& candidate(const PostState& s, std::size_t mention, PlaceId id) {
    for (const auto& c : s.mentions.at(mention))
        if (c.place_id == id)
            return c;
    throw std::logic_error("no such candidate");
}

double local_by_hand(double coherence, double area, double importance, double prec) {
    return 0.4 * coherence + 0.25 * area + 0.2 * importance + 0.15 * prec;
}

CimeConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_cime_config(in, "test.conf");
}

} // namespace

TEST_SUITE("geocode") {

TEST_CASE("hashtag splitting") {
    CHECK(split_hashtag("UKfloods") == Strings{"UK", "floods"});
    CHECK(split_hashtag("UKFloods") == Strings{"UK", "Floods"});
    CHECK(split_hashtag("DawlishFloods2014") == Strings{"Dawlish", "Floods", "2014"});
    CHECK(split_hashtag("exeter_flood") == Strings{"exeter", "flood"});
    CHECK(split_hashtag("dawlish") == Strings{"dawlish"});
    CHECK(split_hashtag("") == Strings{});
}

TEST_CASE("extract_toponyms examples on the toy gazetteer") {
    const auto& g = toy_gazetteer();
    const auto ms = extract_toponyms(post_with_entities(1, "Flooding in Dawlish near Exeter"), g);
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].surface == "Dawlish");
    CHECK(ms[0].candidates == std::vector<PlaceId>{kDawlish});
    CHECK_FALSE(ms[0].from_hashtag);
    CHECK(ms[0].token_begin == 2);
    CHECK(ms[0].token_end == 3);
    CHECK(ms[1].surface == "Exeter");
    CHECK(ms[1].candidates == std::vector<PlaceId>{kExeterUk, kExeterUs});

    CHECK(extract_toponyms(post_with_entities(2, ""), g).empty());

    const auto tag = extract_toponyms(post_with_entities(3, "#DawlishFloods"), g);
    REQUIRE(tag.size() == 1);
    CHECK(tag[0].from_hashtag);
    CHECK(tag[0].candidates == std::vector<PlaceId>{kDawlish});
}

TEST_CASE("longest match wins and spans never overlap") {
    const auto& g = toy_gazetteer();
    const auto ms = extract_toponyms(post_with_entities(1, "the Devon seaside town of Dawlish"), g);
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].surface == "Devon seaside town");
    CHECK(ms[0].token_end - ms[0].token_begin == 3);
    CHECK(ms[1].token_begin >= ms[0].token_end);
}

TEST_CASE("matches do not cross links, mentions or hashtags") {
    Gazetteer g({make_place(1, "Exeter Dawlish", PlaceClass::street, {50.6, -3.5})});
    CHECK(extract_toponyms(post_with_entities(1, "Exeter Dawlish"), g).size() == 1);
    CHECK(extract_toponyms(post_with_entities(2, "Exeter @someone Dawlish"), g).empty());
    CHECK(extract_toponyms(post_with_entities(3, "Exeter http://x.co/1 Dawlish"), g).empty());
}

TEST_CASE("single-token stopword names are dropped") {
    Gazetteer g({make_place(1, "Help", PlaceClass::locality, {10, 10}),
                 make_place(2, "Help Point", PlaceClass::poi, {10, 10})});
    CHECK(extract_toponyms(post_with_entities(1, "please help"), g).empty());
    const auto two = extract_toponyms(post_with_entities(2, "meet at the Help Point"), g);
    REQUIRE(two.size() == 1);
    CHECK(two[0].candidates == std::vector<PlaceId>{2});
    CimeConfig cfg;
    cfg.stopwords.clear();
    CHECK(extract_toponyms(post_with_entities(3, "please help"), g, cfg).size() == 1);
}

TEST_CASE("hashtags from the entity field are matched even without text") {
    auto p = make_post(1, "water everywhere");
    p.hashtags = {"exeter"};
    const auto ms = extract_toponyms(p, toy_gazetteer());
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].from_hashtag);
    CHECK(ms[0].candidates.size() == 2);
}

TEST_CASE("context graph examples") {
    CimeConfig cfg;
    auto a = post_with_entities(1, "#ukfloods #dawlish");
    auto b = post_with_entities(2, "#dawlish and #ukfloods again");
    auto graph = build_context_graph(std::vector<Post>{a, b}, cfg);
    REQUIRE(graph.edges.size() == 1);
    CHECK(graph.edges[0].kind == EdgeKind::shared_hashtag);
    CHECK(graph.edges[0].weight == doctest::Approx(0.6));
    CHECK(graph.nodes == std::vector<PostId>{1, 2});

    auto lonely = make_post(3, "rt");
    lonely.retweet_of = 999;
    CHECK(build_context_graph(std::vector<Post>{lonely}, cfg).edges.empty());
    CHECK(build_context_graph(std::vector<Post>{make_post(1, "a"), make_post(2, "b")}, cfg).edges.empty());
}

TEST_CASE("context graph relation kinds and ordering") {
    CimeConfig cfg;
    auto p1 = make_post(10, "x");
    auto p2 = make_post(5, "y");
    p2.retweet_of = 10;
    p2.reply_to = 10;
    auto p3 = make_post(7, "hello @AUTHOR10");
    p3.mentions = {"AUTHOR10"};
    auto p4 = make_post(8, "#a #b #c #d");
    p4.hashtags = {"a", "b", "c", "d"};
    auto p5 = make_post(9, "#a #b #c #d #e");
    p5.hashtags = {"a", "b", "c", "d", "e"};
    const auto graph = build_context_graph(std::vector<Post>{p1, p2, p3, p4, p5}, cfg);
    REQUIRE(graph.edges.size() == 4);
    CHECK(graph.edges[0] == ContextEdge{5, 10, EdgeKind::retweet, 1.0});
    CHECK(graph.edges[1] == ContextEdge{5, 10, EdgeKind::reply, 0.8});
    CHECK(graph.edges[2] == ContextEdge{7, 10, EdgeKind::mention, 0.5});
    CHECK(graph.edges[3].kind == EdgeKind::shared_hashtag);
    CHECK(graph.edges[3].weight == 1.0); // 4 shared tags, capped
    for (const auto& e : graph.edges) {
        CHECK(e.a < e.b);
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
    }
}

TEST_CASE("score_local examples") {
    const CimeConfig cfg;
    Gazetteer g({make_place(1, "Alpha", PlaceClass::locality, {45, 10}, 0.5),
                 make_place(2, "Beta", PlaceClass::locality, {46, 11}, 0.5)});
    ToponymMention m{"Alpha", 0, 1, false, {1}};
    const std::vector<ToponymMention> alone{m};
    const auto t = score_local(alone, 0, g.at(1), g, cfg);
    CHECK(t.coherence == 0.5);
    CHECK(t.area == 0.5);
    CHECK(t.score == doctest::Approx(0.515).epsilon(1e-12));

    CimeConfig inside = cfg, outside = cfg;
    inside.event_area = BBox{9, 44, 11, 46};
    outside.event_area = BBox{20, 20, 21, 21};
    const double in = score_local(alone, 0, g.at(1), g, inside).score;
    const double out = score_local(alone, 0, g.at(1), g, outside).score;
    CHECK(in - out == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("Exeter disambiguated by the Dawlish anchor") {
    const auto& g = toy_gazetteer();
    const CimeConfig cfg;
    const auto post = post_with_entities(1, "Flooding in Dawlish near Exeter");
    const auto ms = extract_toponyms(post, g);
    const auto uk = score_local(ms, 1, g.at(kExeterUk), g, cfg);
    const auto us = score_local(ms, 1, g.at(kExeterUs), g, cfg);

    const double d_uk = oracle::distance_m(g.at(kDawlish).centroid, g.at(kExeterUk).centroid);
    const double d_us = oracle::distance_m(g.at(kDawlish).centroid, g.at(kExeterUs).centroid);
    CHECK(d_uk == doctest::Approx(16200).epsilon(0.01));
    CHECK(d_us > 4.5e6);
    CHECK(uk.coherence == doctest::Approx(std::exp(-d_uk / 30000.0)).epsilon(1e-9));
    CHECK(us.coherence < 1e-60);
    CHECK(uk.score == doctest::Approx(local_by_hand(std::exp(-d_uk / 30000.0), 0.5, 0.8, 0.6)).epsilon(1e-9));
    CHECK(us.score == doctest::Approx(local_by_hand(0.0, 0.5, 0.6, 0.6)).epsilon(1e-9));
    CHECK(uk.score > us.score);
}

TEST_CASE("one propagation step from a geotagged neighbour") {
    const auto& g = toy_gazetteer();
    CimeConfig cfg;
    cfg.iterations = 1;
    auto p = post_with_entities(1, "#Exeter");
    auto q = post_with_entities(2, "on the sea wall");
    q.native_geotag = g.at(kDawlish).centroid;
    p.retweet_of = 2;
    const std::vector<Post> posts{p, q};
    const auto a = analyze_corpus(posts, g, cfg);
    REQUIRE(a.states[0].mentions.size() == 1);

    const double d = oracle::distance_m(g.at(kDawlish).centroid, g.at(kExeterUk).centroid);
    const auto& uk = candidate(a.states[0], 0, kExeterUk);
    const auto& us = candidate(a.states[0], 0, kExeterUs);
    CHECK(uk.support == doctest::Approx(std::exp(-d / 50000.0)).epsilon(1e-9));
    CHECK(us.support < 1e-30);
    CHECK(uk.combined == doctest::Approx(0.6 * uk.local.score + 0.4 * uk.support).epsilon(1e-12));
    CHECK(a.geolocations[0].place_id == kExeterUk);
    CHECK(a.geolocations[0].method == GeoMethod::cime_global);
    CHECK(a.geolocations[1].method == GeoMethod::native);
}

TEST_CASE("isolated posts keep the local argmax") {
    const auto& g = toy_gazetteer();
    const CimeConfig cfg;
    const std::vector<Post> posts{post_with_entities(1, "Flooding in Dawlish near Exeter")};
    const auto a = analyze_corpus(posts, g, cfg);
    for (const auto& list : a.states[0].mentions)
        for (const auto& c : list) {
            CHECK(c.support == 0.0);
            CHECK(c.combined == doctest::Approx((1.0 - cfg.damping) * c.local.score).epsilon(1e-15));
        }
    CHECK(a.geolocations[0].method == GeoMethod::cime_local);
}

TEST_CASE("running example winner and confidence") {
    const auto& g = toy_gazetteer();
    const CimeConfig cfg;
    const auto post = post_with_entities(1, "Flooding in Dawlish near Exeter");
    const auto geo = geolocate_corpus(std::vector<Post>{post}, g, cfg).at(0);

    const double d_uk = oracle::distance_m(g.at(kDawlish).centroid, g.at(kExeterUk).centroid);
    const double s_uk = 0.6 * local_by_hand(std::exp(-d_uk / 30000.0), 0.5, 0.8, 0.6);
    const double s_us = 0.6 * local_by_hand(0.0, 0.5, 0.6, 0.6);
    const double s_dawlish = 0.6 * local_by_hand(0.5, 0.5, 0.5, 0.6);
    REQUIRE(s_uk > s_dawlish);
    CHECK(geo.method == GeoMethod::cime_local);
    CHECK(geo.place_id == kExeterUk);
    CHECK(geo.point == g.at(kExeterUk).centroid);
    CHECK(geo.precision_class == PlaceClass::locality);
    CHECK(geo.radius_m == 5000.0);
    CHECK(geo.confidence == doctest::Approx(s_uk * (1.0 - s_us / (2.0 * s_uk))).epsilon(1e-9));
    CHECK(geo.evidence.size() >= 6);
}

TEST_CASE("single candidate confidence is the score itself") {
    const auto& g = toy_gazetteer();
    const auto geo = geolocate_corpus(std::vector<Post>{post_with_entities(1, "Dawlish")}, g, CimeConfig{}).at(0);
    CHECK(geo.method == GeoMethod::cime_local);
    CHECK(geo.place_id == kDawlish);
    CHECK(geo.confidence == doctest::Approx(0.6 * 0.515).epsilon(1e-12));
}

TEST_CASE("native passthrough, thresholds and empty posts") {
    const auto& g = toy_gazetteer();
    CimeConfig cfg;
    auto tagged = post_with_entities(1, "Exeter");
    tagged.native_geotag = LatLon{50.123456789012345, -3.987654321098765};
    tagged.media.push_back({"u", MediaKind::image, MediaOrigin::embedded, std::nullopt, {"flood", "bridge"}});
    const auto nothing = post_with_entities(2, "water everywhere");
    const auto weak = post_with_entities(3, "Exeter");
    cfg.accept_threshold = 0.99;
    const auto out = geolocate_corpus(std::vector<Post>{tagged, nothing, weak}, g, cfg);

    CHECK(out[0].method == GeoMethod::native);
    CHECK(out[0].confidence == 1.0);
    CHECK(std::memcmp(&*out[0].point, &*tagged.native_geotag, sizeof(LatLon)) == 0);
    CHECK(out[0].precision_class == PlaceClass::poi);
    CHECK(out[0].radius_m == cfg.radii.poi);
    CHECK(out[0].image_tags == Strings{"flood", "bridge"});

    for (const auto* geo : {&out[1], &out[2]}) {
        CHECK(geo->method == GeoMethod::unresolved);
        CHECK(geo->confidence == 0.0);
        CHECK_FALSE(geo->point);
        CHECK_FALSE(geo->place_id);
    }
}

TEST_CASE("ties break on importance, then place id") {
    Gazetteer g({make_place(7, "Twin", PlaceClass::locality, {10, 10}, 0.5),
                 make_place(4, "Twin", PlaceClass::locality, {20, 20}, 0.5),
                 make_place(9, "Pair", PlaceClass::locality, {30, 30}, 0.5),
                 make_place(2, "Pair", PlaceClass::locality, {40, 40}, 0.5)});
    const auto out = geolocate_corpus(std::vector<Post>{post_with_entities(1, "Twin"), post_with_entities(2, "Pair")},
                                      g, CimeConfig{});
    CHECK(out[0].place_id == 4);
    CHECK(out[1].place_id == 2);
}

TEST_CASE("damping zero leaves combined equal to local") {
    CimeConfig cfg;
    cfg.damping = 0.0;
    auto sc = simulate(ScenarioConfig::preset("flood"), synthetic_gazetteer(1));
    sc.posts.resize(300);
    const auto a = analyze_corpus(sc.posts, synthetic_gazetteer(1), cfg);
    for (const auto& s : a.states)
        for (const auto& list : s.mentions)
            for (const auto& c : list)
                CHECK(c.combined == c.local.score);
}

TEST_CASE("argmax invariance under local score scaling when undamped") {
    CimeConfig cfg;
    cfg.damping = 0.0;
    cfg.accept_threshold = 0.0;
    const auto g = synthetic_gazetteer(1);
    auto sc = simulate(ScenarioConfig::preset("earthquake"), g);
    sc.posts.resize(300);
    const auto a = analyze_corpus(sc.posts, g, cfg);
    for (double c : {0.01, 0.5, 3.0, 1e6}) {
        for (std::size_t i = 0; i < sc.posts.size(); ++i) {
            auto scaled = a.states[i];
            for (auto& list : scaled.mentions)
                for (auto& cand : list) {
                    cand.local.score *= c;
                    cand.combined *= c;
                }
            const auto geo = geolocate_post(sc.posts[i], a.mentions[i], scaled, g, cfg);
            CHECK(geo.place_id == a.geolocations[i].place_id);
            CHECK(geo.point == a.geolocations[i].point);
        }
    }
}

TEST_CASE("adding an edge to a nearby resolved neighbour never lowers a candidate") {
    const auto g = synthetic_gazetteer(1);
    auto sc = simulate(ScenarioConfig::preset("flood"), g);
    sc.posts.resize(200);
    const CimeConfig cfg;
    const auto before = analyze_corpus(sc.posts, g, cfg);
    Rng rng(77);
    int checked = 0;
    for (std::size_t i = 0; i < sc.posts.size() && checked < 40; ++i) {
        const auto& st = before.states[i];
        if (st.native || st.mentions.empty() || st.mentions[0].size() < 2)
            continue;
        const auto& target = st.mentions[0][rng.below(st.mentions[0].size())];
        auto posts = sc.posts;
        auto anchor = make_post(900000 + i, "on site");
        anchor.native_geotag = LatLon{target.point.lat + 0.05, target.point.lon}; // about 5.6 km away
        posts.push_back(anchor);
        if (!posts[i].retweet_of)
            posts[i].retweet_of = anchor.post_id;
        else
            posts[i].reply_to = anchor.post_id;
        const auto after = analyze_corpus(posts, g, cfg);
        CHECK(candidate(after.states[i], 0, target.place_id).combined >=
              candidate(st, 0, target.place_id).combined);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("propagation respects the iteration cap and settles") {
    const auto g = synthetic_gazetteer(1);
    auto cfg_scn = ScenarioConfig::preset("storm");
    cfg_scn.relation_density = 3.0;
    const auto sc = simulate(cfg_scn, g);
    for (int iterations : {1, 2, 5, 30}) {
        CimeConfig cfg;
        cfg.iterations = iterations;
        cfg.epsilon = 0.0;
        const auto a = analyze_corpus(sc.posts, g, cfg);
        CHECK(a.trace.iterations_run <= iterations);
        CHECK(a.trace.max_change.size() == static_cast<std::size_t>(a.trace.iterations_run));
        for (std::size_t k = 2; k < a.trace.max_change.size(); ++k)
            CHECK(a.trace.max_change[k] <= a.trace.max_change[k - 1] + 1e-15);
    }
    CimeConfig early;
    early.iterations = 50;
    const auto a = analyze_corpus(sc.posts, g, early);
    CHECK(a.trace.iterations_run < 50);
    CHECK(a.trace.max_change.back() < early.epsilon);
}

TEST_CASE("geolocate_corpus is deterministic and order preserving") {
    const auto g = synthetic_gazetteer(1);
    const auto sc = simulate(ScenarioConfig::preset("flood"), g);
    const auto a = geolocate_corpus(sc.posts, g, CimeConfig{});
    const auto b = geolocate_corpus(sc.posts, g, CimeConfig{});
    REQUIRE(a.size() == sc.posts.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].post_id == sc.posts[i].post_id);
        CHECK(to_json(a[i]).dump() == to_json(b[i]).dump());
    }
}

TEST_CASE("agreement with the brute-force enumerator under varied configs") {
    const auto g = synthetic_gazetteer(4);
    Rng rng(99);
    for (int round = 0; round < 6; ++round) {
        auto scn = ScenarioConfig::preset(round % 2 ? "flood" : "storm");
        scn.seed = 500 + round;
        scn.n_posts = 150;
        scn.ambiguity_rate = 0.5;
        scn.relation_density = 1.0 + round;
        scn.geotag_rate = 0.05;
        const auto sc = simulate(scn, g);
        CimeConfig cfg;
        cfg.damping = rng.uniform(0.0, 0.9);
        cfg.iterations = 1 + static_cast<int>(rng.below(8));
        cfg.accept_threshold = rng.uniform(0.1, 0.4);
        if (round % 3 == 0)
            cfg.event_area = BBox{scn.event_center.lon - 0.2, scn.event_center.lat - 0.2, scn.event_center.lon + 0.2,
                                  scn.event_center.lat + 0.2};
        const auto a = analyze_corpus(sc.posts, g, cfg);
        const auto expect = oracle::disambiguate(sc.posts, a.mentions, g, cfg);
        for (std::size_t i = 0; i < sc.posts.size(); ++i) {
            CAPTURE(round);
            CAPTURE(i);
            CHECK(a.geolocations[i].method == expect[i].method);
            CHECK(a.geolocations[i].place_id == expect[i].place_id);
            CHECK(a.geolocations[i].confidence == doctest::Approx(expect[i].confidence).epsilon(1e-9));
        }
    }
}

TEST_CASE("geolocation json round-trip and invariants") {
    const auto g = synthetic_gazetteer(1);
    const auto sc = simulate(ScenarioConfig::preset("flood"), g);
    for (const auto& geo : geolocate_corpus(sc.posts, g, CimeConfig{}))
        CHECK(geolocation_from_json(nlohmann::json::parse(to_json(geo).dump())) == geo);

    auto bad = nlohmann::json::parse(R"({"post_id":1,"method":"cime_local","confidence":0.5})");
    CHECK_THROWS_AS(geolocation_from_json(bad), InputError);
    bad = nlohmann::json::parse(R"({"post_id":1,"method":"unresolved","confidence":0.5})");
    CHECK_THROWS_AS(geolocation_from_json(bad), InputError);
}

TEST_CASE("config file parsing") {
    const auto cfg = parse_config("# tuned\nlambda_local_m = 20000\ndamping=0.5\niterations=3\n"
                                  "event_area=-4,50,-3,51\nstopwords=near, the\n");
    CHECK(cfg.lambda_local_m == 20000.0);
    CHECK(cfg.damping == 0.5);
    CHECK(cfg.iterations == 3);
    CHECK(cfg.event_area == BBox{-4, 50, -3, 51});
    CHECK(cfg.stopwords == std::unordered_set<std::string>{"near", "the"});
    CHECK(cfg.w_coherence == 0.4);

    CHECK_THROWS_AS(parse_config("lambda=3\n"), InputError);
    CHECK_THROWS_AS(parse_config("damping=1\n"), InputError);
    CHECK_THROWS_AS(parse_config("w_area=0.5\n"), InputError);
    CHECK_THROWS_AS(parse_config("iterations=0\n"), InputError);
    CHECK_THROWS_AS(parse_config("edge_reply=0\n"), InputError);
    CHECK_THROWS_AS(parse_config("radius_poi=900\n"), InputError);
    CHECK_THROWS_AS(parse_config("damping\n"), InputError);
    CHECK_NOTHROW(parse_config("w_coherence=0.5\nw_area=0.15\n"));
    try {
        parse_config("\n\ndamping=abc\n");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("test.conf:3") != std::string::npos);
    }
}

} // TEST_SUITE
