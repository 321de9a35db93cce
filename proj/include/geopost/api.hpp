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

#include "geopost/ranking.hpp"
#include "geopost/store.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace geopost {

inline constexpr std::string_view kGeoJsonType = "application/geo+json";
inline constexpr std::string_view kJsonType = "application/json";

struct ApiResponse {
    int status = 200;
    std::string content_type{kJsonType};
    std::string body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;
using Clock = std::function<std::int64_t()>;

std::int64_t system_clock_now();

std::string original_post_url(Source source, PostId id);
std::string streetview_url(const LatLon& p);

/// Request handling for the map service, independent of the HTTP transport.
/// rank_score is computed per request from the live RankingParams.
class ApiService {
public:
    explicit ApiService(Store& store, RankingParams params = {}, Clock clock = system_clock_now);

    /// GET /api/posts
    ApiResponse list_posts(const QueryParams& query) const;
    /// GET /api/posts/{id}
    ApiResponse post_detail(std::string_view id) const;
    /// POST /api/posts/{id}/validate
    ApiResponse validate(std::string_view id, std::string_view body);
    /// GET /api/ranking
    ApiResponse get_ranking() const;
    /// PUT /api/ranking; all-or-nothing
    ApiResponse put_ranking(std::string_view body);
    /// GET /api/stats
    ApiResponse stats() const;

    RankingParams ranking() const;

    nlohmann::ordered_json feature(const StoredItem& item, const RankingParams& params, std::int64_t now,
                                   bool detail) const;

private:
    Store& store_;
    Clock clock_;
    mutable std::shared_mutex params_mutex_;
    RankingParams params_;
};

ApiResponse error_response(int status, std::string_view code, std::string_view message);

/// cpp-httplib binding of ApiService.
class HttpServer {
public:
    HttpServer(ApiService& api, std::string cors_origin = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and returns the port (pass 0 for an ephemeral one). Throws on failure.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace geopost
