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

#include "geopost/geocode.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace geopost {

double precision_prior(PlaceClass c) {
    switch (c) {
    case PlaceClass::poi: return 1.0;
    case PlaceClass::street: return 0.85;
    case PlaceClass::locality: return 0.6;
    case PlaceClass::region: return 0.3;
    }
    return 0.0;
}

LocalTerms score_local(std::span<const ToponymMention> mentions, std::size_t mention_index, const Place& candidate,
                       const Gazetteer& g, const CimeConfig& cfg) {
    LocalTerms t;
    double sum = 0.0;
    std::size_t anchors = 0;
    for (std::size_t i = 0; i < mentions.size(); ++i) {
        if (i == mention_index || mentions[i].candidates.size() != 1)
            continue;
        const Place& anchor = g.at(mentions[i].candidates.front());
        sum += std::exp(-haversine_m(candidate.centroid, anchor.centroid) / cfg.lambda_local_m);
        ++anchors;
    }
    t.coherence = anchors == 0 ? 0.5 : sum / static_cast<double>(anchors);
    if (cfg.event_area)
        t.area = cfg.event_area->contains(candidate.centroid) ? 1.0 : 0.0;
    else
        t.area = 0.5;
    t.importance = candidate.importance;
    t.precision = precision_prior(candidate.place_class);
    t.score = cfg.w_coherence * t.coherence + cfg.w_area * t.area + cfg.w_importance * t.importance +
              cfg.w_precision * t.precision;
    return t;
}

PostState score_post(const Post& post, std::span<const ToponymMention> mentions, const Gazetteer& g,
                     const CimeConfig& cfg) {
    PostState state;
    state.post_id = post.post_id;
    if (post.native_geotag) {
        state.native = post.native_geotag;
        return state;
    }
    state.mentions.reserve(mentions.size());
    for (std::size_t m = 0; m < mentions.size(); ++m) {
        auto& list = state.mentions.emplace_back();
        for (PlaceId id : mentions[m].candidates) {
            const Place& place = g.at(id);
            CandidateState c;
            c.place_id = id;
            c.point = place.centroid;
            c.importance = place.importance;
            c.local = score_local(mentions, m, place, g, cfg);
            c.combined = c.local.score;
            list.push_back(c);
        }
    }
    return state;
}

namespace {

// Strict "a ranks above b" for equal-score resolution.
bool ranks_above(double score_a, const CandidateState& a, double score_b, const CandidateState& b) {
    if (score_a != score_b)
        return score_a > score_b;
    if (a.importance != b.importance)
        return a.importance > b.importance;
    return a.place_id < b.place_id;
}

struct Anchor {
    LatLon point;
    double score;
};

} // namespace

PropagationTrace propagate_global(const ContextGraph& graph, std::vector<PostState>& states, const CimeConfig& cfg) {
    PropagationTrace trace;

    // visit order: ascending post_id
    std::vector<std::size_t> order(states.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return states[a].post_id < states[b].post_id; });
    std::unordered_map<PostId, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i)
        index.emplace(states[i].post_id, i);

    // One weight per neighbor pair: the strongest relation between them.
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(states.size());
    for (const auto& e : graph.edges) {
        auto ia = index.find(e.a), ib = index.find(e.b);
        if (ia == index.end() || ib == index.end())
            continue;
        auto add = [&](std::size_t from, std::size_t to) {
            auto& list = adjacency[from];
            auto it = std::find_if(list.begin(), list.end(), [&](const auto& n) { return n.first == to; });
            if (it == list.end())
                list.emplace_back(to, e.weight);
            else
                it->second = std::max(it->second, e.weight);
        };
        add(ia->second, ib->second);
        add(ib->second, ia->second);
    }
    for (auto& list : adjacency)
        std::sort(list.begin(), list.end(),
                  [&](const auto& x, const auto& y) { return states[x.first].post_id < states[y.first].post_id; });

    std::vector<std::vector<Anchor>> best(states.size());
    std::vector<std::vector<std::vector<double>>> next(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        next[s].resize(states[s].mentions.size());
        for (std::size_t m = 0; m < states[s].mentions.size(); ++m)
            next[s][m].resize(states[s].mentions[m].size());
    }

    for (int k = 1; k <= cfg.iterations; ++k) {
        // Best candidate of every mention, read from the previous iteration.
        for (std::size_t s : order) {
            best[s].clear();
            if (states[s].native) {
                best[s].push_back({*states[s].native, 1.0});
                continue;
            }
            for (const auto& cands : states[s].mentions) {
                const CandidateState* top = nullptr;
                for (const auto& c : cands)
                    if (top == nullptr || ranks_above(c.combined, c, top->combined, *top))
                        top = &c;
                if (top != nullptr)
                    best[s].push_back({top->point, top->combined});
            }
        }

        double max_change = 0.0;
        for (std::size_t s : order) {
            auto& st = states[s];
            for (std::size_t m = 0; m < st.mentions.size(); ++m) {
                for (std::size_t c = 0; c < st.mentions[m].size(); ++c) {
                    auto& cand = st.mentions[m][c];
                    double support = 0.0;
                    for (const auto& [q, weight] : adjacency[s]) {
                        for (const auto& anchor : best[q]) {
                            const double v = weight * anchor.score *
                                             std::exp(-haversine_m(cand.point, anchor.point) / cfg.lambda_global_m);
                            support = std::max(support, v);
                        }
                    }
                    cand.support = support;
                    const double value = (1.0 - cfg.damping) * cand.local.score + cfg.damping * support;
                    max_change = std::max(max_change, std::abs(value - cand.combined));
                    next[s][m][c] = value;
                }
            }
        }
        for (std::size_t s = 0; s < states.size(); ++s)
            for (std::size_t m = 0; m < states[s].mentions.size(); ++m)
                for (std::size_t c = 0; c < states[s].mentions[m].size(); ++c)
                    states[s].mentions[m][c].combined = next[s][m][c];

        trace.iterations_run = k;
        trace.max_change.push_back(max_change);
        if (max_change < cfg.epsilon)
            break;
    }
    return trace;
}

std::string_view to_string(GeoMethod m) {
    switch (m) {
    case GeoMethod::native: return "native";
    case GeoMethod::cime_local: return "cime_local";
    case GeoMethod::cime_global: return "cime_global";
    case GeoMethod::unresolved: return "unresolved";
    }
    return "?";
}

std::optional<GeoMethod> parse_geo_method(std::string_view s) {
    if (s == "native") return GeoMethod::native;
    if (s == "cime_local") return GeoMethod::cime_local;
    if (s == "cime_global") return GeoMethod::cime_global;
    if (s == "unresolved") return GeoMethod::unresolved;
    return std::nullopt;
}

namespace {

std::vector<std::string> collect_image_tags(const Post& post) {
    std::vector<std::string> tags;
    for (const auto& m : post.media)
        for (const auto& t : m.image_tags)
            if (std::find(tags.begin(), tags.end(), t) == tags.end())
                tags.push_back(t);
    return tags;
}

struct Pick {
    std::size_t mention = 0;
    std::size_t candidate = 0;
    bool found = false;
};

template <typename ScoreFn>
Pick argmax(const PostState& state, ScoreFn score) {
    Pick pick;
    for (std::size_t m = 0; m < state.mentions.size(); ++m) {
        for (std::size_t c = 0; c < state.mentions[m].size(); ++c) {
            const auto& cand = state.mentions[m][c];
            if (!pick.found) {
                pick = {m, c, true};
                continue;
            }
            const auto& cur = state.mentions[pick.mention][pick.candidate];
            if (ranks_above(score(cand), cand, score(cur), cur))
                pick = {m, c, true};
        }
    }
    return pick;
}

} // namespace

Geolocation geolocate_post(const Post& post, std::span<const ToponymMention> mentions, const PostState& state,
                           const Gazetteer& g, const CimeConfig& cfg) {
    Geolocation geo;
    geo.post_id = post.post_id;
    geo.image_tags = collect_image_tags(post);

    if (post.native_geotag) {
        geo.method = GeoMethod::native;
        geo.point = post.native_geotag;
        geo.confidence = 1.0;
        geo.precision_class = PlaceClass::poi;
        geo.radius_m = cfg.radii.poi;
        geo.evidence.push_back("native geotag supplied by the platform");
        return geo;
    }

    for (std::size_t m = 0; m < mentions.size() && m < state.mentions.size(); ++m) {
        const auto& mention = mentions[m];
        geo.evidence.push_back(fmt::format("mention {} '{}' ({}, tokens {}-{}): {} candidate(s)", m, mention.surface,
                                           mention.from_hashtag ? "hashtag" : "text", mention.token_begin,
                                           mention.token_end, mention.candidates.size()));
        for (const auto& c : state.mentions[m]) {
            const Place& place = g.at(c.place_id);
            geo.evidence.push_back(fmt::format(
                "  candidate {} '{}' {}: local={:.6f} (coherence={:.6f} area={:.6f} importance={:.6f} "
                "precision={:.6f}) support={:.6f} combined={:.6f}",
                c.place_id, place.canonical_name, to_string(place.place_class), c.local.score, c.local.coherence,
                c.local.area, c.local.importance, c.local.precision, c.support, c.combined));
        }
    }

    const Pick winner = argmax(state, [](const CandidateState& c) { return c.combined; });
    if (!winner.found) {
        geo.evidence.push_back("no toponym candidates");
        return geo;
    }
    const auto& top = state.mentions[winner.mention][winner.candidate];
    if (top.combined < cfg.accept_threshold) {
        geo.evidence.push_back(
            fmt::format("best score {:.6f} below threshold {:.6f}", top.combined, cfg.accept_threshold));
        return geo;
    }

    const Pick local_winner = argmax(state, [](const CandidateState& c) { return c.local.score; });
    const bool argmax_moved = state.mentions[local_winner.mention][local_winner.candidate].place_id != top.place_id ||
                              local_winner.mention != winner.mention;
    geo.method = (argmax_moved || top.support > 0.0) ? GeoMethod::cime_global : GeoMethod::cime_local;

    // runner-up within the winning mention
    const double s1 = top.combined;
    std::optional<double> s2;
    for (std::size_t c = 0; c < state.mentions[winner.mention].size(); ++c) {
        if (c == winner.candidate)
            continue;
        const double v = state.mentions[winner.mention][c].combined;
        if (!s2 || v > *s2)
            s2 = v;
    }
    if (!s2)
        geo.confidence = s1;
    else
        geo.confidence = s1 > 0.0 ? s1 * (1.0 - *s2 / (2.0 * s1)) : 0.0;
    geo.confidence = std::clamp(geo.confidence, 0.0, 1.0);

    const Place& place = g.at(top.place_id);
    geo.place_id = place.place_id;
    geo.point = place.centroid;
    geo.precision_class = place.place_class;
    geo.radius_m = cfg.radii.of(place.place_class);
    geo.evidence.push_back(fmt::format("winner {} '{}' via mention {}: combined={:.6f} runner-up={} confidence={:.6f}",
                                       place.place_id, place.canonical_name, winner.mention, s1,
                                       s2 ? fmt::format("{:.6f}", *s2) : std::string("none"), geo.confidence));
    return geo;
}

CorpusAnalysis analyze_corpus(std::span<const Post> posts, const Gazetteer& g, const CimeConfig& cfg) {
    CorpusAnalysis out;
    out.mentions.reserve(posts.size());
    out.states.reserve(posts.size());
    for (const auto& p : posts) {
        out.mentions.push_back(p.native_geotag ? std::vector<ToponymMention>{} : extract_toponyms(p, g, cfg));
        out.states.push_back(score_post(p, out.mentions.back(), g, cfg));
    }
    out.graph = build_context_graph(posts, cfg);
    out.trace = propagate_global(out.graph, out.states, cfg);
    out.geolocations.reserve(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i)
        out.geolocations.push_back(geolocate_post(posts[i], out.mentions[i], out.states[i], g, cfg));
    return out;
}

std::vector<Geolocation> geolocate_corpus(std::span<const Post> posts, const Gazetteer& g, const CimeConfig& cfg) {
    return analyze_corpus(posts, g, cfg).geolocations;
}

} // namespace geopost
