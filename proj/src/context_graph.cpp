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
#include "geopost/text.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace geopost {

std::string_view to_string(EdgeKind k) {
    switch (k) {
    case EdgeKind::retweet: return "retweet";
    case EdgeKind::reply: return "reply";
    case EdgeKind::mention: return "mention";
    case EdgeKind::shared_hashtag: return "shared_hashtag";
    }
    return "?";
}

ContextGraph build_context_graph(std::span<const Post> posts, const CimeConfig& cfg) {
    ContextGraph graph;
    std::unordered_map<PostId, std::size_t> index;
    index.reserve(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        graph.nodes.push_back(posts[i].post_id);
        index.emplace(posts[i].post_id, i);
    }
    std::sort(graph.nodes.begin(), graph.nodes.end());

    // (min id, max id, kind) -> weight; std::map keeps the required order
    std::map<std::tuple<PostId, PostId, EdgeKind>, double> edges;
    auto link = [&](PostId x, PostId y, EdgeKind kind, double weight) {
        if (x == y)
            return;
        edges[{std::min(x, y), std::max(x, y), kind}] = weight;
    };

    std::unordered_map<std::string, std::vector<PostId>> by_author;
    for (const auto& p : posts)
        by_author[to_lower_utf8(p.author_id)].push_back(p.post_id);

    std::map<std::pair<PostId, PostId>, std::size_t> shared_tags;
    std::unordered_map<std::string, std::vector<PostId>> by_tag;

    for (const auto& p : posts) {
        if (p.retweet_of && index.contains(*p.retweet_of))
            link(p.post_id, *p.retweet_of, EdgeKind::retweet, cfg.edge_retweet);
        if (p.reply_to && index.contains(*p.reply_to))
            link(p.post_id, *p.reply_to, EdgeKind::reply, cfg.edge_reply);
        for (const auto& m : p.mentions) {
            auto it = by_author.find(to_lower_utf8(m));
            if (it == by_author.end())
                continue;
            for (PostId other : it->second)
                link(p.post_id, other, EdgeKind::mention, cfg.edge_mention);
        }
        std::vector<std::string> tags = p.hashtags;
        std::sort(tags.begin(), tags.end());
        tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
        for (auto& tag : tags)
            by_tag[std::move(tag)].push_back(p.post_id);
    }
    for (const auto& [tag, ids] : by_tag)
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                if (ids[i] != ids[j])
                    ++shared_tags[{std::min(ids[i], ids[j]), std::max(ids[i], ids[j])}];
    for (const auto& [pair, count] : shared_tags)
        link(pair.first, pair.second, EdgeKind::shared_hashtag,
             std::min(1.0, cfg.edge_shared_hashtag * static_cast<double>(count)));

    graph.edges.reserve(edges.size());
    for (const auto& [key, weight] : edges)
        graph.edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), weight});
    return graph;
}

} // namespace geopost
