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

#pragma once

#include "geopost/geo.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace geopost {

/// One `key = value` line of a flat config file. '#' starts a comment line.
struct KeyValue {
    std::string key;
    std::string value;
    std::string origin; // "file:line", for error messages

    double as_double() const;
    std::int64_t as_int() const;
    std::uint64_t as_u64() const;
    LatLon as_latlon() const; // "lat,lon"
    BBox as_bbox() const;     // "minLon,minLat,maxLon,maxLat"
    [[noreturn]] void reject(std::string_view why) const;
};

std::vector<KeyValue> read_key_values(std::istream& in, std::string_view source_name);
std::vector<KeyValue> read_key_values(const std::filesystem::path& path);

} // namespace geopost
