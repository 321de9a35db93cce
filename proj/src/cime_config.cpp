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
#include "geopost/kvconfig.hpp"
#include "geopost/text.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace geopost {

std::unordered_set<std::string> CimeConfig::default_stopwords() {
    return {
        // English
        "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "has", "have", "i", "in", "is",
        "it", "its", "me", "my", "near", "no", "not", "of", "on", "or", "our", "out", "so", "that", "the",
        "this", "to", "up", "us", "was", "we", "were", "what", "will", "with", "you", "your", "rt", "via",
        "new", "now", "here", "there", "all", "more", "just", "help", "today",
        // Italian
        "il", "lo", "la", "le", "gli", "di", "da", "del", "della", "e", "ed", "che", "per", "con", "su", "un",
        "una", "non", "si", "sono", "nel", "nella", "al", "alla",
    };
}

void CimeConfig::validate() const {
    auto fail = [](std::string_view what) { throw InputError(fmt::format("invalid geolocation config: {}", what)); };
    if (!(lambda_local_m > 0.0) || !(lambda_global_m > 0.0))
        fail("decay lengths must be positive");
    if (!(damping >= 0.0 && damping < 1.0))
        fail("damping must be in [0,1)");
    if (iterations < 1)
        fail("iterations must be >= 1");
    if (!(epsilon >= 0.0))
        fail("epsilon must be >= 0");
    if (!(accept_threshold >= 0.0 && accept_threshold <= 1.0))
        fail("threshold must be in [0,1]");
    for (double w : {w_coherence, w_area, w_importance, w_precision})
        if (!(w >= 0.0))
            fail("local weights must be >= 0");
    if (std::abs(w_coherence + w_area + w_importance + w_precision - 1.0) > 1e-9)
        fail("local weights must sum to 1");
    for (double w : {edge_retweet, edge_reply, edge_mention, edge_shared_hashtag})
        if (!(w > 0.0 && w <= 1.0))
            fail("edge weights must be in (0,1]");
    if (event_area && event_area->inverted())
        fail("event_area is inverted");
    if (!radii.valid())
        fail("precision radii must strictly increase poi < street < locality < region");
    if (max_ngram < 1)
        fail("max_ngram must be >= 1");
}

CimeConfig parse_cime_config(std::istream& in, std::string_view source_name) {
    CimeConfig cfg;
    for (const auto& kv : read_key_values(in, source_name)) {
        const auto& k = kv.key;
        if (k == "lambda_local_m") cfg.lambda_local_m = kv.as_double();
        else if (k == "lambda_global_m") cfg.lambda_global_m = kv.as_double();
        else if (k == "damping") cfg.damping = kv.as_double();
        else if (k == "iterations") cfg.iterations = static_cast<int>(kv.as_int());
        else if (k == "epsilon") cfg.epsilon = kv.as_double();
        else if (k == "threshold") cfg.accept_threshold = kv.as_double();
        else if (k == "w_coherence") cfg.w_coherence = kv.as_double();
        else if (k == "w_area") cfg.w_area = kv.as_double();
        else if (k == "w_importance") cfg.w_importance = kv.as_double();
        else if (k == "w_precision") cfg.w_precision = kv.as_double();
        else if (k == "event_area") cfg.event_area = kv.value.empty() ? std::nullopt : std::optional(kv.as_bbox());
        else if (k == "edge_retweet") cfg.edge_retweet = kv.as_double();
        else if (k == "edge_reply") cfg.edge_reply = kv.as_double();
        else if (k == "edge_mention") cfg.edge_mention = kv.as_double();
        else if (k == "edge_shared_hashtag") cfg.edge_shared_hashtag = kv.as_double();
        else if (k == "radius_poi") cfg.radii.poi = kv.as_double();
        else if (k == "radius_street") cfg.radii.street = kv.as_double();
        else if (k == "radius_locality") cfg.radii.locality = kv.as_double();
        else if (k == "radius_region") cfg.radii.region = kv.as_double();
        else if (k == "max_ngram") cfg.max_ngram = kv.as_u64();
        else if (k == "stopwords") {
            cfg.stopwords.clear();
            for (auto w : split(kv.value, ','))
                if (auto n = normalize_name(w); !n.empty())
                    cfg.stopwords.insert(std::move(n));
        } else {
            kv.reject("unknown key");
        }
    }
    cfg.validate();
    return cfg;
}

CimeConfig load_cime_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open config '{}'", path.string()));
    return parse_cime_config(in, path.string());
}

} // namespace geopost
