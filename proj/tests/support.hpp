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

// Fixtures shared by the unit and acceptance suites.

#pragma once

#include "geopost/gazetteer.hpp"
#include "geopost/geocode.hpp"
#include "geopost/post.hpp"
#include "geopost/scenario.hpp"
#include "geopost/store.hpp"

#include <filesystem>
#include <string>

namespace geopost::testing {

inline constexpr PlaceId kDawlish = 1;
inline constexpr PlaceId kExeterUk = 2;
inline constexpr PlaceId kExeterUs = 3;

std::filesystem::path data_dir();
std::filesystem::path golden_dir();

std::string read_file(const std::filesystem::path& p);

/// Compares `actual` with golden_dir()/name. With GEOPOST_UPDATE_GOLDEN=1 set
/// the file is rewritten instead and the check passes.
bool matches_golden(const std::string& name, const std::string& actual);

/// Dawlish, Exeter (UK) and Exeter (New Hampshire), read from the TSV fixture.
const Gazetteer& toy_gazetteer();

Place make_place(PlaceId id, std::string name, PlaceClass cls, LatLon at, double importance = 0.5);

Post make_post(PostId id, std::string text, std::int64_t created_at = 1391600000);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Random but well-formed stored item. Method, class, media and validation
/// are all drawn so every filter predicate has both outcomes.
StoredItem random_item(Rng& rng, PostId id);

} // namespace geopost::testing
