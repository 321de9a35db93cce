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

#include "geopost/scenario.hpp"

#include "geopost/error.hpp"
#include "geopost/ingest.hpp"
#include "geopost/kvconfig.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace geopost {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
    if (n <= 1)
        return 0;
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

std::size_t Rng::poisson(double mean) {
    if (mean <= 0.0)
        return 0;
    // Knuth; means here are small
    const double l = std::exp(-mean);
    std::size_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform();
    } while (p > l);
    return k - 1;
}

namespace {

LatLon offset_m(const LatLon& origin, double north_m, double east_m) {
    constexpr double m_per_deg = 111320.0;
    LatLon p{origin.lat + north_m / m_per_deg,
             origin.lon + east_m / (m_per_deg * std::cos(origin.lat * std::numbers::pi / 180.0))};
    p.lat = std::clamp(p.lat, -90.0, 90.0);
    p.lon = std::clamp(p.lon, -180.0, 180.0);
    return p;
}

LatLon random_in_disk(Rng& rng, const LatLon& center, double radius_m) {
    const double r = radius_m * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    return offset_m(center, r * std::cos(theta), r * std::sin(theta));
}

BBox box_around(const LatLon& c, double half_deg) {
    return {std::max(-180.0, c.lon - half_deg), std::max(-90.0, c.lat - half_deg), std::min(180.0, c.lon + half_deg),
            std::min(90.0, c.lat + half_deg)};
}

std::string replace_place(std::string_view tmpl, std::string_view place) {
    std::string out(tmpl);
    auto pos = out.find("{place}");
    if (pos != std::string::npos)
        out.replace(pos, 7, place);
    return out;
}

} // namespace

ScenarioConfig ScenarioConfig::preset(std::string_view name) {
    ScenarioConfig c;
    if (name == "flood") {
        c.name = "flood";
        c.event_center = {50.5833, -3.4656};
        c.event_radius_m = 25000.0;
        c.start_time = 1391558400; // 2014-02-05
        c.time_span_s = 3 * 86400;
        c.templates = {"Flooding in {place} this morning", "Water levels rising fast at {place}",
                       "Roads closed around {place} because of flooding", "Evacuations underway in {place}",
                       "Sandbags needed in {place} right away", "River burst its banks at {place}"};
    } else if (name == "earthquake") {
        c.name = "earthquake";
        c.event_center = {42.6294, 13.2922};
        c.event_radius_m = 30000.0;
        c.start_time = 1471996800; // 2016-08-24
        c.time_span_s = 2 * 86400;
        c.templates = {"Strong shaking felt in {place}", "Buildings collapsed in {place}",
                       "Rescue teams arriving at {place}", "Another aftershock hit {place}",
                       "Families sleeping outside in {place}", "Rubble blocking the road to {place}"};
    } else if (name == "storm") {
        c.name = "storm";
        c.event_center = {29.7604, -95.3698};
        c.event_radius_m = 60000.0;
        c.start_time = 1503705600; // 2017-08-26
        c.time_span_s = 4 * 86400;
        c.templates = {"Heavy rain and wind in {place}", "Streets under water in {place}",
                       "Power outage across {place}", "Shelter open at {place} tonight",
                       "Boats rescuing people in {place}", "Trees down all over {place}"};
    } else {
        throw InputError(fmt::format("unknown scenario template '{}' (flood|earthquake|storm)", name));
    }
    return c;
}

void ScenarioConfig::validate() const {
    auto fail = [](std::string_view what) { throw InputError(fmt::format("invalid scenario: {}", what)); };
    if (n_posts < 1)
        fail("n_posts must be >= 1");
    for (double r : {geotag_rate, ambiguity_rate})
        if (!(r >= 0.0 && r <= 1.0))
            fail("rates must be in [0,1]");
    if (!(relation_density >= 0.0))
        fail("relation_density must be >= 0");
    if (!valid_coordinate(event_center))
        fail("event_center out of range");
    if (!(event_radius_m > 0.0))
        fail("event_radius_m must be positive");
    if (start_time <= 0 || time_span_s < 1)
        fail("start_time must be after the epoch and time_span_s >= 1");
    if (templates.empty())
        fail("no text templates");
    for (const auto& t : templates)
        if (t.find("{place}") == std::string::npos)
            fail(fmt::format("template '{}' has no {{place}}", t));
}

ScenarioConfig parse_scenario_config(std::istream& in, std::string_view source_name) {
    auto kvs = read_key_values(in, source_name);
    ScenarioConfig cfg = ScenarioConfig::preset("flood");
    for (const auto& kv : kvs)
        if (kv.key == "template")
            cfg = ScenarioConfig::preset(kv.value);
    for (const auto& kv : kvs) {
        const auto& k = kv.key;
        if (k == "template") continue;
        else if (k == "seed") cfg.seed = kv.as_u64();
        else if (k == "n_posts") cfg.n_posts = kv.as_u64();
        else if (k == "event_center") cfg.event_center = kv.as_latlon();
        else if (k == "event_radius_m") cfg.event_radius_m = kv.as_double();
        else if (k == "geotag_rate") cfg.geotag_rate = kv.as_double();
        else if (k == "ambiguity_rate") cfg.ambiguity_rate = kv.as_double();
        else if (k == "relation_density") cfg.relation_density = kv.as_double();
        else if (k == "start_time") {
            auto t = parse_timestamp(kv.value);
            if (!t)
                kv.reject("expected ISO-8601 or epoch seconds");
            cfg.start_time = *t;
        } else if (k == "time_span_s") cfg.time_span_s = kv.as_int();
        else kv.reject("unknown key");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open scenario '{}'", path.string()));
    return parse_scenario_config(in, path.string());
}

void write_truth_csv(std::ostream& out, std::span<const GroundTruth> truth) {
    out << "post_id,lat,lon,place_id\n";
    for (const auto& t : truth)
        out << fmt::format("{},{},{},{}\n", t.post_id, t.point.lat, t.point.lon, t.place_id);
}

std::vector<GroundTruth> read_truth_csv(std::istream& in, std::string_view source_name) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "post_id,lat,lon,place_id")
        throw InputError(fmt::format("{}:1: expected header post_id,lat,lon,place_id", source_name));
    std::vector<GroundTruth> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto f = split(trim(line), ',');
        std::optional<std::uint64_t> id, place;
        std::optional<double> lat, lon;
        if (f.size() == 4) {
            id = parse_u64(f[0]);
            lat = parse_double(f[1]);
            lon = parse_double(f[2]);
            place = parse_u64(f[3]);
        }
        if (!id || !lat || !lon || !place || !valid_coordinate({*lat, *lon}))
            throw InputError(fmt::format("{}:{}: malformed truth row", source_name, line_no));
        out.push_back({*id, {*lat, *lon}, *place});
    }
    return out;
}

Scenario simulate(const ScenarioConfig& cfg, const Gazetteer& g) {
    cfg.validate();

    // No template word may itself be a toponym.
    for (const auto& tmpl : cfg.templates) {
        const auto text = normalize_name(replace_place(tmpl, " "));
        std::vector<std::string> words;
        for (auto w : split(text, ' '))
            if (!w.empty())
                words.emplace_back(w);
        for (std::size_t i = 0; i < words.size(); ++i) {
            std::string key;
            for (std::size_t n = 1; n <= 4 && i + n <= words.size(); ++n) {
                key += (n == 1 ? "" : " ") + words[i + n - 1];
                if (!g.ids_for_normalized(key).empty())
                    throw InputError(fmt::format("template word '{}' is a gazetteer name", key));
            }
        }
    }

    // Candidate true places: non-region places inside the event radius,
    // split by whether their name is shared with another place.
    std::vector<const Place*> ambiguous, unique;
    for (const auto& p : g.places()) {
        if (p.place_class == PlaceClass::region || haversine_m(p.centroid, cfg.event_center) > cfg.event_radius_m)
            continue;
        const auto n = g.ids_for_normalized(normalize_name(p.canonical_name)).size();
        (n > 1 ? ambiguous : unique).push_back(&p);
    }
    if (cfg.ambiguity_rate > 0.0 && ambiguous.empty())
        throw InputError("gazetteer has no ambiguous places inside the event radius");
    if (cfg.ambiguity_rate < 1.0 && unique.empty())
        throw InputError("gazetteer has no unambiguous places inside the event radius");
    auto is_unique_name = [&](const Place& p) {
        return g.ids_for_normalized(normalize_name(p.canonical_name)).size() == 1;
    };

    Rng rng(cfg.seed);
    Scenario s;
    s.posts.reserve(cfg.n_posts);
    s.truth.reserve(cfg.n_posts);
    const std::size_t n_authors = std::max<std::size_t>(1, cfg.n_posts / 3);
    const PostId first_id = 100000;

    for (std::size_t i = 0; i < cfg.n_posts; ++i) {
        Post p;
        p.post_id = first_id + i;
        p.source = Source::twitter;
        p.author_id = fmt::format("user{}", rng.below(n_authors));
        p.created_at = cfg.start_time + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(cfg.time_span_s)));

        const bool pick_ambiguous = rng.chance(cfg.ambiguity_rate);
        const auto& pool = pick_ambiguous ? ambiguous : unique;
        const Place& truth = *pool[rng.below(pool.size())];
        std::string name = truth.canonical_name;
        // streets and pois sometimes carry their locality as context
        if (truth.place_class != PlaceClass::locality && !truth.admin_parents.empty() && rng.chance(0.5)) {
            const Place* parent = g.find(truth.admin_parents.front());
            if (parent != nullptr && parent->place_class == PlaceClass::locality && is_unique_name(*parent))
                name += ", " + parent->canonical_name;
        }
        p.text = replace_place(cfg.templates[rng.below(cfg.templates.size())], name);
        if (rng.chance(0.25))
            p.media.push_back({fmt::format("https://media.example.org/{}/{}.jpg", cfg.name, p.post_id),
                               MediaKind::image, MediaOrigin::embedded, std::nullopt, {cfg.name}});
        s.posts.push_back(std::move(p));
        s.truth.push_back({first_id + i, truth.centroid, truth.place_id});
    }

    // exactly round(rate * n) geotags, chosen by partial Fisher-Yates
    const auto n_geo = static_cast<std::size_t>(std::llround(cfg.geotag_rate * static_cast<double>(cfg.n_posts)));
    std::vector<std::size_t> idx(cfg.n_posts);
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    for (std::size_t i = 0; i < n_geo; ++i) {
        std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
        auto& post = s.posts[idx[i]];
        post.native_geotag = random_in_disk(rng, s.truth[idx[i]].point, 30.0);
    }

    // Relations, preferring posts whose true places are within 10 km.
    std::unordered_map<PlaceId, std::vector<std::size_t>> posts_at;
    for (std::size_t i = 0; i < s.truth.size(); ++i)
        posts_at[s.truth[i].place_id].push_back(i);
    std::vector<PlaceId> used_places;
    for (const auto& [id, list] : posts_at)
        used_places.push_back(id);
    std::sort(used_places.begin(), used_places.end());
    std::unordered_map<PlaceId, std::vector<std::size_t>> nearby_posts;
    for (PlaceId a : used_places) {
        auto& list = nearby_posts[a];
        for (PlaceId b : used_places)
            if (haversine_m(g.at(a).centroid, g.at(b).centroid) <= 10000.0)
                list.insert(list.end(), posts_at[b].begin(), posts_at[b].end());
        std::sort(list.begin(), list.end());
    }

    std::size_t tag_counter = 0;
    for (std::size_t i = 0; i < s.posts.size() && s.posts.size() > 1; ++i) {
        const std::size_t k = rng.poisson(cfg.relation_density);
        for (std::size_t r = 0; r < k; ++r) {
            std::size_t target = i;
            const auto& near = nearby_posts[s.truth[i].place_id];
            if (near.size() > 1 && rng.chance(0.85)) {
                while (target == i)
                    target = near[rng.below(near.size())];
            } else {
                while (target == i)
                    target = rng.below(s.posts.size());
            }
            auto& p = s.posts[i];
            auto& t = s.posts[target];
            const double kind = rng.uniform();
            if (kind < 0.35 && !p.retweet_of) {
                p.retweet_of = t.post_id;
            } else if (kind < 0.55 && !p.reply_to) {
                p.reply_to = t.post_id;
            } else if (kind < 0.75) {
                p.text += " @" + t.author_id;
            } else {
                const auto tag = fmt::format("zone{}", tag_counter++);
                p.text += " #" + tag;
                t.text += " #" + tag;
            }
        }
    }
    for (auto& p : s.posts) {
        auto e = extract_entities(p.text);
        p.hashtags = std::move(e.hashtags);
        p.mentions = std::move(e.mentions);
        p.links = std::move(e.links);
    }
    return s;
}

Gazetteer synthetic_gazetteer(std::uint64_t seed) {
    Rng rng(seed);
    static constexpr std::string_view kHeads[] = {"ash",  "brad", "cal", "dun", "el",  "fen",  "gar", "hal",
                                                  "ken",  "lin",  "mar", "nor", "ped", "quin", "ros", "sal",
                                                  "tor",  "ul",   "ven", "wex", "yar", "zel",  "brom", "cran"};
    static constexpr std::string_view kMids[] = {"", "", "", "a", "e", "ing", "er", "o"};
    static constexpr std::string_view kTails[] = {"bury", "combe", "den",  "field", "ford",  "gate", "ham", "hurst",
                                                  "ley",  "mouth", "stead", "ton",  "wick",  "worth", "vale", "more"};
    std::set<std::string> taken;
    auto fresh_name = [&]() {
        for (;;) {
            std::string n = std::string(kHeads[rng.below(std::size(kHeads))]) +
                            std::string(kMids[rng.below(std::size(kMids))]) +
                            std::string(kTails[rng.below(std::size(kTails))]);
            n[0] = static_cast<char>(n[0] - 'a' + 'A');
            if (taken.insert(n).second)
                return n;
        }
    };

    const ScenarioConfig centers[] = {ScenarioConfig::preset("flood"), ScenarioConfig::preset("earthquake"),
                                      ScenarioConfig::preset("storm")};
    auto far_from_events = [&](const LatLon& p) {
        for (const auto& c : centers)
            if (haversine_m(p, c.event_center) < 1500000.0)
                return false;
        return true;
    };
    auto random_far_point = [&]() {
        for (;;) {
            LatLon p{rng.uniform(-55.0, 65.0), rng.uniform(-179.0, 179.0)};
            if (far_from_events(p))
                return p;
        }
    };

    std::vector<Place> places;
    PlaceId next_id = 1000;
    auto make = [&](std::string name, PlaceClass cls, LatLon at, double half_deg, double importance,
                    std::vector<PlaceId> parents) {
        Place p;
        p.place_id = next_id++;
        p.canonical_name = std::move(name);
        p.place_class = cls;
        p.centroid = at;
        p.bbox = box_around(at, half_deg);
        p.admin_parents = std::move(parents);
        p.importance = std::round(importance * 1000.0) / 1000.0;
        places.push_back(p);
        return places.back().place_id;
    };

    static constexpr std::string_view kStreetKinds[] = {"Road", "Street", "Lane", "Avenue"};
    static constexpr std::string_view kPoiKinds[] = {"Bridge", "School", "Church", "Station", "Hospital"};
    std::vector<std::size_t> local_places;
    for (const auto& c : centers) {
        const PlaceId region =
            make(fresh_name() + "shire", PlaceClass::region, c.event_center, 0.6, 0.9, {});
        std::vector<std::pair<PlaceId, LatLon>> localities;
        for (int i = 0; i < 40; ++i) {
            const LatLon at = random_in_disk(rng, c.event_center, c.event_radius_m * 0.95);
            const PlaceId id =
                make(fresh_name(), PlaceClass::locality, at, 0.02, rng.uniform(0.3, 0.8), {region});
            localities.emplace_back(id, at);
            local_places.push_back(places.size() - 1);
        }
        for (int i = 0; i < 30; ++i) {
            const auto& [parent, base] = localities[rng.below(localities.size())];
            const LatLon at = random_in_disk(rng, base, 1500.0);
            make(fresh_name() + " " + std::string(kStreetKinds[rng.below(std::size(kStreetKinds))]),
                 PlaceClass::street, at, 0.005, rng.uniform(0.1, 0.4), {parent, region});
            local_places.push_back(places.size() - 1);
        }
        for (int i = 0; i < 20; ++i) {
            const auto& [parent, base] = localities[rng.below(localities.size())];
            const LatLon at = random_in_disk(rng, base, 800.0);
            make(fresh_name() + " " + std::string(kPoiKinds[rng.below(std::size(kPoiKinds))]), PlaceClass::poi,
                 at, 0.001, rng.uniform(0.1, 0.5), {parent, region});
            local_places.push_back(places.size() - 1);
        }
    }
    // Same-named twins far away; importance drawn independently, so the
    // local prior alone picks the right one only about half the time.
    for (std::size_t idx : local_places) {
        if (!rng.chance(0.4))
            continue;
        const std::size_t twins = 1 + rng.below(2);
        for (std::size_t t = 0; t < twins; ++t) {
            const Place src = places[idx];
            const double half = src.place_class == PlaceClass::locality ? 0.02 : 0.005;
            make(src.canonical_name, src.place_class, random_far_point(), half, rng.uniform(0.2, 0.9), {});
        }
    }
    for (int i = 0; i < 100; ++i)
        make(fresh_name(), PlaceClass::locality, random_far_point(), 0.02, rng.uniform(0.1, 0.9), {});
    return Gazetteer(std::move(places));
}

} // namespace geopost
