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

// Toponym extraction and context-based disambiguation.
//
// A post is geolocated in three stages. Toponyms are found by longest-match
// lookup of token n-grams against the gazetteer name index. Each candidate
// place of each toponym gets a local score from the post alone (agreement
// with the post's unambiguous toponyms, the optional event area, the place's
// importance and its granularity). Local scores are then blended with support
// propagated over a graph linking related posts (retweets, replies, mentions
// and shared hashtags), and the best-scoring candidate wins if it clears the
// acceptance threshold.

#pragma once

#include "geopost/gazetteer.hpp"
#include "geopost/post.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

namespace geopost {

struct CimeConfig {
    double lambda_local_m = 30000.0;  // coherence decay length
    double lambda_global_m = 50000.0; // neighbor support decay length
    double damping = 0.4;             // share of the global term, in [0,1)
    int iterations = 5;
    double epsilon = 1e-6;
    double accept_threshold = 0.2;

    double w_coherence = 0.4;
    double w_area = 0.25;
    double w_importance = 0.2;
    double w_precision = 0.15;

    std::optional<BBox> event_area;

    double edge_retweet = 1.0;
    double edge_reply = 0.8;
    double edge_mention = 0.5;
    double edge_shared_hashtag = 0.3; // per shared tag, capped at 1

    PrecisionRadii radii;
    std::size_t max_ngram = 4;
    std::unordered_set<std::string> stopwords = default_stopwords();

    static std::unordered_set<std::string> default_stopwords();

    /// Throws InputError when an invariant does not hold.
    void validate() const;
};

/// Unknown keys are rejected. Missing keys keep their defaults.
CimeConfig parse_cime_config(std::istream& in, std::string_view source_name = "<config>");
CimeConfig load_cime_config(const std::filesystem::path& path);

/// Prior on granularity used by the local score.
double precision_prior(PlaceClass c);

// Toponyms.

struct ToponymMention {
    std::string surface;
    std::size_t token_begin = 0; // token index over the post's token stream
    std::size_t token_end = 0;   // exclusive
    bool from_hashtag = false;
    std::vector<PlaceId> candidates; // lookup order: importance desc, id asc

    friend bool operator==(const ToponymMention&, const ToponymMention&) = default;
};

/// Splits a hashtag body on case changes, digit runs and underscores:
/// "UKfloods" -> {"UK", "floods"}, "DawlishFloods2014" -> {"Dawlish", "Floods", "2014"}.
std::vector<std::string> split_hashtag(std::string_view tag);

/// The token stream is the post text (hashtags, mentions and links cut out,
/// each cut acting as a boundary) followed by one segment per distinct
/// hashtag. Matching is greedy left to right, longest n-gram first, and never
/// crosses a segment boundary.
std::vector<ToponymMention> extract_toponyms(const Post& post, const Gazetteer& g, const CimeConfig& cfg = {});

// Context graph.

enum class EdgeKind { retweet, reply, mention, shared_hashtag };
std::string_view to_string(EdgeKind k);

struct ContextEdge {
    PostId a = 0; // a < b
    PostId b = 0;
    EdgeKind kind = EdgeKind::retweet;
    double weight = 0.0;

    friend bool operator==(const ContextEdge&, const ContextEdge&) = default;
};

struct ContextGraph {
    std::vector<PostId> nodes;       // ascending
    std::vector<ContextEdge> edges;  // ordered by (a, b, kind)
};

/// Post ids must be unique. References to posts outside the corpus create no edges.
ContextGraph build_context_graph(std::span<const Post> posts, const CimeConfig& cfg);

// Scoring.

struct LocalTerms {
    double coherence = 0.0;
    double area = 0.0;
    double importance = 0.0;
    double precision = 0.0;
    double score = 0.0; // weighted sum
};

/// Local score of one candidate of mentions[mention_index]. Anchors are the
/// other mentions of the same post that have exactly one candidate.
LocalTerms score_local(std::span<const ToponymMention> mentions, std::size_t mention_index, const Place& candidate,
                       const Gazetteer& g, const CimeConfig& cfg);

struct CandidateState {
    PlaceId place_id = 0;
    LatLon point;
    double importance = 0.0;
    LocalTerms local;
    double support = 0.0;
    double combined = 0.0;
};

/// Per-post scoring state. A natively geotagged post has no candidate lists
/// and acts as a single unit-score pseudo-candidate at its geotag.
struct PostState {
    PostId post_id = 0;
    std::optional<LatLon> native;
    std::vector<std::vector<CandidateState>> mentions;
};

/// Local scores for every candidate of every mention; combined starts equal
/// to local.
PostState score_post(const Post& post, std::span<const ToponymMention> mentions, const Gazetteer& g,
                     const CimeConfig& cfg);

struct PropagationTrace {
    int iterations_run = 0;
    std::vector<double> max_change; // one entry per iteration
};

/// Damped max-support propagation. Each iteration reads only the previous
/// iteration's combined scores. States are visited in post_id order.
PropagationTrace propagate_global(const ContextGraph& graph, std::vector<PostState>& states, const CimeConfig& cfg);

// Geolocation.

enum class GeoMethod { native, cime_local, cime_global, unresolved };
std::string_view to_string(GeoMethod m);
std::optional<GeoMethod> parse_geo_method(std::string_view s);

struct Geolocation {
    PostId post_id = 0;
    GeoMethod method = GeoMethod::unresolved;
    std::optional<PlaceId> place_id;
    std::optional<LatLon> point;
    std::optional<PlaceClass> precision_class;
    std::optional<double> radius_m;
    double confidence = 0.0;
    std::vector<std::string> evidence;
    bool crowd_validated = false;
    std::vector<std::string> image_tags;

    friend bool operator==(const Geolocation&, const Geolocation&) = default;
};

nlohmann::ordered_json to_json(const Geolocation& geo);
Geolocation geolocation_from_json(const nlohmann::json& j);

/// Picks the winning (mention, candidate) of a scored post. Ties go to the
/// higher importance, then the smaller place_id, then the earlier mention.
Geolocation geolocate_post(const Post& post, std::span<const ToponymMention> mentions, const PostState& state,
                           const Gazetteer& g, const CimeConfig& cfg);

struct CorpusAnalysis {
    std::vector<std::vector<ToponymMention>> mentions; // parallel to input posts
    ContextGraph graph;
    std::vector<PostState> states; // parallel to input posts
    PropagationTrace trace;
    std::vector<Geolocation> geolocations; // parallel to input posts
};

CorpusAnalysis analyze_corpus(std::span<const Post> posts, const Gazetteer& g, const CimeConfig& cfg);
std::vector<Geolocation> geolocate_corpus(std::span<const Post> posts, const Gazetteer& g, const CimeConfig& cfg);

} // namespace geopost
