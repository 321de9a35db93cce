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

#include "geopost/api.hpp"

#include "geopost/error.hpp"

#include <fmt/format.h>
#include <httplib.h>

namespace geopost {

struct HttpServer::Impl {
    ApiService& api;
    std::string cors_origin;
    httplib::Server server;
    std::string host;
    int port = 0;

    void send(httplib::Response& res, const ApiResponse& r) const {
        res.status = r.status;
        res.set_content(r.body, r.content_type.c_str());
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            try {
                send(res, fn(req));
            } catch (const std::exception& e) {
                send(res, error_response(500, "internal", e.what()));
            }
        };
    }

    Impl(ApiService& a, std::string origin) : api(a), cors_origin(std::move(origin)) {
        if (!cors_origin.empty()) {
            server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
                res.set_header("Access-Control-Allow-Origin", cors_origin);
                res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
                res.set_header("Access-Control-Allow-Headers", "Content-Type");
            });
            server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        }

        server.Get("/api/posts", guarded([this](const httplib::Request& req) {
                       QueryParams q;
                       for (const auto& [k, v] : req.params)
                           q.insert_or_assign(k, v);
                       return api.list_posts(q);
                   }));
        server.Get(R"(/api/posts/([^/]+))",
                   guarded([this](const httplib::Request& req) { return api.post_detail(req.matches[1].str()); }));
        server.Post(R"(/api/posts/([^/]+)/validate)", guarded([this](const httplib::Request& req) {
                        return api.validate(req.matches[1].str(), req.body);
                    }));
        server.Get("/api/ranking", guarded([this](const httplib::Request&) { return api.get_ranking(); }));
        server.Put("/api/ranking", guarded([this](const httplib::Request& req) { return api.put_ranking(req.body); }));
        server.Get("/api/stats", guarded([this](const httplib::Request&) { return api.stats(); }));

        server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (res.body.empty() && res.status == 404)
                send(res, error_response(404, "not_found", fmt::format("no route for {} {}", req.method, req.path)));
        });
    }
};

HttpServer::HttpServer(ApiService& api, std::string cors_origin)
    : impl_(std::make_unique<Impl>(api, std::move(cors_origin))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    impl_->host = host;
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host);
    } else {
        impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (impl_->port <= 0)
        throw InputError(fmt::format("cannot bind {}:{}", host, port));
    return impl_->port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running())
        impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace geopost
