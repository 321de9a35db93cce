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

#include "geopost/gazetteer.hpp"

#include "geopost/error.hpp"
#include "geopost/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <boost/iterator/function_output_iterator.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace geopost {

namespace bgi = boost::geometry::index;

namespace {

std::size_t count_tokens(const std::string& normalized) {
    if (normalized.empty())
        return 0;
    return static_cast<std::size_t>(std::count(normalized.begin(), normalized.end(), ' ')) + 1;
}

void check_place(const Place& p) {
    auto fail = [&](std::string_view what) {
        throw InputError(fmt::format("place {}: {}", p.place_id, what));
    };
    if (!valid_coordinate(p.centroid))
        fail("centroid out of range");
    if (!valid_coordinate({p.bbox.min_lat, p.bbox.min_lon}) || !valid_coordinate({p.bbox.max_lat, p.bbox.max_lon}))
        fail("bbox corner out of range");
    if (p.bbox.inverted())
        fail("bbox is inverted");
    if (!p.bbox.contains(p.centroid))
        fail("bbox does not contain centroid");
    if (!(p.importance >= 0.0 && p.importance <= 1.0))
        fail("importance outside [0,1]");
    if (std::find(p.admin_parents.begin(), p.admin_parents.end(), p.place_id) != p.admin_parents.end())
        fail("admin_parents contains the place itself");
    if (normalize_name(p.canonical_name).empty())
        fail("canonical name is empty after normalization");
}

// Parent links pointing outside the gazetteer are allowed (partial extracts);
// only cycles among loaded places are rejected.
void check_admin_acyclic(const std::vector<Place>& places,
                         const std::unordered_map<PlaceId, std::size_t>& by_id) {
    enum class Mark : unsigned char { none, active, done };
    std::vector<Mark> mark(places.size(), Mark::none);
    for (std::size_t root = 0; root < places.size(); ++root) {
        if (mark[root] != Mark::none)
            continue;
        // iterative DFS: (node, next parent position)
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        mark[root] = Mark::active;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& parents = places[node].admin_parents;
            if (next == parents.size()) {
                mark[node] = Mark::done;
                stack.pop_back();
                continue;
            }
            const PlaceId parent = parents[next++];
            auto it = by_id.find(parent);
            if (it == by_id.end())
                continue;
            if (mark[it->second] == Mark::active)
                throw InputError(fmt::format("admin_parents cycle through place {}", parent));
            if (mark[it->second] == Mark::none) {
                mark[it->second] = Mark::active;
                stack.emplace_back(it->second, 0);
            }
        }
    }
}

} // namespace

Gazetteer::Gazetteer(std::vector<Place> places) : places_(std::move(places)) {
    std::sort(places_.begin(), places_.end(),
              [](const Place& a, const Place& b) { return a.place_id < b.place_id; });
    by_id_.reserve(places_.size());
    for (std::size_t i = 0; i < places_.size(); ++i) {
        check_place(places_[i]);
        if (!by_id_.emplace(places_[i].place_id, i).second)
            throw InputError(fmt::format("duplicate place_id {}", places_[i].place_id));
    }
    check_admin_acyclic(places_, by_id_);

    for (const auto& p : places_) {
        auto add = [&](std::string_view name) {
            auto key = normalize_name(name);
            if (key.empty())
                return;
            max_name_tokens_ = std::max(max_name_tokens_, count_tokens(key));
            auto& ids = name_index_[key];
            if (std::find(ids.begin(), ids.end(), p.place_id) == ids.end())
                ids.push_back(p.place_id);
        };
        add(p.canonical_name);
        for (const auto& alt : p.alt_names)
            add(alt);
    }
    for (auto& [key, ids] : name_index_) {
        std::sort(ids.begin(), ids.end(), [this](PlaceId a, PlaceId b) {
            const double ia = at(a).importance, ib = at(b).importance;
            if (ia != ib)
                return ia > ib;
            return a < b;
        });
    }

    std::vector<Entry> entries;
    entries.reserve(places_.size());
    for (std::size_t i = 0; i < places_.size(); ++i)
        entries.emplace_back(Point(places_[i].centroid.lon, places_[i].centroid.lat), i);
    spatial_ = RTree(entries.begin(), entries.end());
}

const Place* Gazetteer::find(PlaceId id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &places_[it->second];
}

const Place& Gazetteer::at(PlaceId id) const {
    const Place* p = find(id);
    if (p == nullptr)
        throw std::out_of_range(fmt::format("unknown place_id {}", id));
    return *p;
}

std::span<const PlaceId> Gazetteer::ids_for_normalized(const std::string& normalized) const {
    auto it = name_index_.find(normalized);
    if (it == name_index_.end())
        return {};
    return it->second;
}

std::vector<Place> Gazetteer::lookup_name(std::string_view name) const {
    std::vector<Place> out;
    for (PlaceId id : ids_for_normalized(normalize_name(name)))
        out.push_back(at(id));
    return out;
}

std::vector<Place> Gazetteer::places_in_bbox(const BBox& box) const {
    if (box.inverted())
        throw InputError("inverted bbox");
    using Box = boost::geometry::model::box<Point>;
    const Box query(Point(box.min_lon, box.min_lat), Point(box.max_lon, box.max_lat));
    std::vector<std::size_t> hits;
    spatial_.query(bgi::intersects(query), boost::make_function_output_iterator([&](const Entry& e) {
                       hits.push_back(e.second);
                   }));
    std::sort(hits.begin(), hits.end());
    std::vector<Place> out;
    out.reserve(hits.size());
    for (auto i : hits)
        out.push_back(places_[i]);
    return out;
}

Gazetteer parse_gazetteer(std::istream& in, std::string_view source_name) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line))
        throw InputError(fmt::format("{}: missing header row", source_name));
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kGazetteerHeader)
        throw InputError(fmt::format("{}:1: unexpected header", source_name));

    std::vector<Place> places;
    std::unordered_map<PlaceId, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fail = [&](std::string_view field, std::string_view what) {
            throw InputError(fmt::format("{}:{}: field '{}': {}", source_name, line_no, field, what));
        };
        auto fields = split(line, '\t');
        if (fields.size() != 12)
            fail("row", fmt::format("expected 12 tab-separated fields, got {}", fields.size()));

        Place p;
        auto id = parse_u64(fields[0]);
        if (!id)
            fail("place_id", "not an unsigned integer");
        p.place_id = *id;
        if (auto [it, fresh] = seen.emplace(p.place_id, line_no); !fresh)
            fail("place_id", fmt::format("duplicate of line {}", it->second));

        p.canonical_name = std::string(fields[1]);
        if (normalize_name(p.canonical_name).empty())
            fail("canonical_name", "empty");
        if (!fields[2].empty())
            for (auto alt : split(fields[2], ';'))
                if (!trim(alt).empty())
                    p.alt_names.emplace_back(trim(alt));

        auto cls = parse_place_class(fields[3]);
        if (!cls)
            fail("class", "expected poi|street|locality|region");
        p.place_class = *cls;

        auto number = [&](std::size_t idx, std::string_view name, double lo, double hi) {
            auto v = parse_double(fields[idx]);
            if (!v)
                fail(name, "not a number");
            if (*v < lo || *v > hi)
                fail(name, fmt::format("{} outside [{}, {}]", *v, lo, hi));
            return *v;
        };
        p.centroid.lat = number(4, "lat", -90, 90);
        p.centroid.lon = number(5, "lon", -180, 180);
        p.bbox.min_lon = number(6, "min_lon", -180, 180);
        p.bbox.min_lat = number(7, "min_lat", -90, 90);
        p.bbox.max_lon = number(8, "max_lon", -180, 180);
        p.bbox.max_lat = number(9, "max_lat", -90, 90);
        if (p.bbox.inverted())
            fail("bbox", "min exceeds max");
        if (!p.bbox.contains(p.centroid))
            fail("bbox", "does not contain centroid");

        if (!fields[10].empty()) {
            for (auto part : split(fields[10], ';')) {
                auto parent = parse_u64(trim(part));
                if (!parent)
                    fail("admin_parents", fmt::format("'{}' is not an id", part));
                if (*parent == p.place_id)
                    fail("admin_parents", "contains the place itself");
                p.admin_parents.push_back(*parent);
            }
        }
        p.importance = fields[11].empty() ? 0.5 : number(11, "importance", 0, 1);
        places.push_back(std::move(p));
    }
    try {
        return Gazetteer(std::move(places));
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", source_name, e.what()));
    }
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(fmt::format("cannot open gazetteer '{}'", path.string()));
    return parse_gazetteer(in, path.string());
}

void write_gazetteer(std::ostream& out, const Gazetteer& g) {
    out << kGazetteerHeader << '\n';
    for (const auto& p : g.places()) {
        out << fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", p.place_id, p.canonical_name,
                           fmt::join(p.alt_names, ";"), to_string(p.place_class), p.centroid.lat, p.centroid.lon,
                           p.bbox.min_lon, p.bbox.min_lat, p.bbox.max_lon, p.bbox.max_lat,
                           fmt::join(p.admin_parents, ";"), p.importance);
    }
}

} // namespace geopost
