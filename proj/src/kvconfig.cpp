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

#include "geopost/kvconfig.hpp"

#include "geopost/error.hpp"
#include "geopost/text.hpp"

#include <fstream>
#include <istream>

#include <fmt/format.h>

namespace geopost {

void KeyValue::reject(std::string_view why) const {
    throw InputError(fmt::format("{}: {}: {}", origin, key, why));
}

double KeyValue::as_double() const {
    auto v = parse_double(value);
    if (!v)
        reject(fmt::format("'{}' is not a number", value));
    return *v;
}

std::int64_t KeyValue::as_int() const {
    auto v = parse_i64(value);
    if (!v)
        reject(fmt::format("'{}' is not an integer", value));
    return *v;
}

std::uint64_t KeyValue::as_u64() const {
    auto v = parse_u64(value);
    if (!v)
        reject(fmt::format("'{}' is not an unsigned integer", value));
    return *v;
}

LatLon KeyValue::as_latlon() const {
    auto parts = split(value, ',');
    if (parts.size() == 2) {
        auto lat = parse_double(trim(parts[0]));
        auto lon = parse_double(trim(parts[1]));
        if (lat && lon && valid_coordinate({*lat, *lon}))
            return {*lat, *lon};
    }
    reject(fmt::format("'{}' is not a valid lat,lon pair", value));
}

BBox KeyValue::as_bbox() const {
    try {
        return parse_bbox(value);
    } catch (const InputError& e) {
        reject(e.what());
    }
}

std::vector<KeyValue> read_key_values(std::istream& in, std::string_view source_name) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#')
            continue;
        auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw InputError(fmt::format("{}:{}: expected key=value", source_name, line_no));
        KeyValue kv{std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))),
                    fmt::format("{}:{}", source_name, line_no)};
        if (kv.key.empty())
            throw InputError(fmt::format("{}:{}: empty key", source_name, line_no));
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<KeyValue> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError(fmt::format("cannot open config '{}'", path.string()));
    return read_key_values(in, path.string());
}

} // namespace geopost
