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

#include "cli.hpp"

#include "geopost/api.hpp"
#include "geopost/error.hpp"
#include "geopost/gazetteer.hpp"
#include "geopost/geocode.hpp"
#include "geopost/ingest.hpp"
#include "geopost/scenario.hpp"
#include "geopost/store.hpp"
#include "geopost/text.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace geopost::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& p, std::string_view what) {
    if (!fs::is_regular_file(p))
        throw InputError(fmt::format("{} '{}' does not exist or is not a file", what, p.string()));
}

std::ofstream open_output(const fs::path& p) {
    if (p.has_parent_path() && !fs::is_directory(p.parent_path()))
        throw InputError(fmt::format("output directory '{}' does not exist", p.parent_path().string()));
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError(fmt::format("cannot write '{}'", p.string()));
    return out;
}

void finish_output(std::ofstream& out, const fs::path& p) {
    out.flush();
    if (!out)
        throw StorageError(fmt::format("write to '{}' failed", p.string()));
}

fs::path store_log(const fs::path& dir) { return dir / "store.log"; }

std::vector<Post> read_posts(const fs::path& path, std::ostream& err) {
    require_file(path, "posts file");
    auto parsed = parse_posts(path);
    for (const auto& e : parsed.errors)
        fmt::print(err, "warning: {}:{}: {}\n", path.string(), e.line, e.message);
    return std::move(parsed.posts);
}

std::vector<Geolocation> read_geolocations(const fs::path& path) {
    require_file(path, "geolocations file");
    std::ifstream in(path, std::ios::binary);
    std::vector<Geolocation> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        try {
            out.push_back(geolocation_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        } catch (const InputError& e) {
            throw InputError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
    }
    return out;
}

std::vector<std::size_t> parse_ks(const std::string& s) {
    std::vector<std::size_t> ks;
    for (auto part : split(s, ',')) {
        auto k = parse_u64(trim(part));
        if (!k || *k == 0)
            throw InputError(fmt::format("--k: '{}' is not a positive integer", part));
        ks.push_back(static_cast<std::size_t>(*k));
    }
    if (ks.empty())
        throw InputError("--k: empty list");
    return ks;
}

std::int64_t parse_now(const std::string& s) {
    if (s.empty())
        return system_clock_now();
    auto t = parse_timestamp(s);
    if (!t)
        throw InputError(fmt::format("--now: '{}' is not an ISO-8601 UTC timestamp or epoch seconds", s));
    return *t;
}

// SIGINT/SIGTERM are blocked process-wide and consumed by a sigwait thread,
// so the server shuts down from ordinary thread context.
int serve(ApiService& api, const std::string& host, int port, const std::string& cors, std::ostream& out) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    HttpServer server(api, cors);
    const int bound = server.bind(host, port);
    fmt::print(out, "listening on http://{}:{}\n", host, bound);
    out.flush();
    std::thread waiter([&server, set] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    waiter.detach();
    server.run();
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geolocation pipeline for social-media posts"};
    app.require_subcommand(1);

    // gazetteer
    auto* gaz = app.add_subcommand("gazetteer", "Gazetteer tools");
    gaz->require_subcommand(1);
    std::string gaz_in, gaz_out;
    std::uint64_t gaz_seed = 1;
    auto* gaz_build = gaz->add_subcommand("build", "Validate a gazetteer TSV and write the canonical index");
    gaz_build->add_option("--in", gaz_in, "Input TSV")->required();
    gaz_build->add_option("--out", gaz_out, "Output index")->required();
    auto* gaz_synth = gaz->add_subcommand("synth", "Write the synthetic scenario gazetteer");
    gaz_synth->add_option("--seed", gaz_seed, "Seed")->capture_default_str();
    gaz_synth->add_option("--out", gaz_out, "Output index")->required();

    // ingest
    std::string ing_posts, ing_fixtures, ing_out;
    auto* ingest = app.add_subcommand("ingest", "Normalize posts and resolve linked media");
    ingest->add_option("--posts", ing_posts, "Raw posts (NDJSON)")->required();
    ingest->add_option("--fixtures", ing_fixtures, "Platform fixture directory");
    ingest->add_option("--out", ing_out, "Normalized posts (NDJSON)")->required();

    // geolocate
    std::string geo_posts, geo_gaz, geo_cfg, geo_out, geo_store, geo_now;
    auto* geolocate = app.add_subcommand("geolocate", "Geolocate posts");
    geolocate->add_option("--posts", geo_posts, "Posts (NDJSON)")->required();
    geolocate->add_option("--gazetteer", geo_gaz, "Gazetteer index")->required();
    geolocate->add_option("--config", geo_cfg, "Geocoder config (key=value)");
    geolocate->add_option("--out", geo_out, "Geolocations (NDJSON)")->required();
    geolocate->add_option("--store", geo_store, "Also upsert results into this store directory");
    geolocate->add_option("--now", geo_now, "Insertion timestamp for --store (default: current time)");

    // serve
    std::string srv_store, srv_host = "127.0.0.1", srv_cors, srv_now;
    int srv_port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the map API");
    serve_cmd->add_option("--store", srv_store, "Store directory")->required();
    serve_cmd->add_option("--host", srv_host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--port", srv_port, "Listen port (0 = ephemeral)")->capture_default_str()->check(
        CLI::Range(0, 65535));
    serve_cmd->add_option("--cors-origin", srv_cors, "Allowed CORS origin");
    serve_cmd->add_option("--now", srv_now, "Fixed clock for rank_score (default: current time)");

    // simulate
    std::string sim_cfg, sim_gaz, sim_posts, sim_truth;
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic scenario");
    simulate_cmd->add_option("--config", sim_cfg, "Scenario config (key=value)")->required();
    simulate_cmd->add_option("--gazetteer", sim_gaz, "Gazetteer index")->required();
    simulate_cmd->add_option("--out-posts", sim_posts, "Posts (NDJSON)")->required();
    simulate_cmd->add_option("--out-truth", sim_truth, "Ground truth (CSV)")->required();

    // evaluate
    std::string ev_geos, ev_truth, ev_posts, ev_k = "10,50", ev_out;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score geolocations against ground truth");
    evaluate_cmd->add_option("--geolocations", ev_geos, "Geolocations (NDJSON)")->required();
    evaluate_cmd->add_option("--truth", ev_truth, "Ground truth (CSV)")->required();
    evaluate_cmd->add_option("--posts", ev_posts, "Posts (NDJSON)")->required();
    evaluate_cmd->add_option("--k", ev_k, "Comma-separated k values for precision@k")->capture_default_str();
    evaluate_cmd->add_option("--out", ev_out, "Report file (JSON)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*gaz_build) {
            require_file(gaz_in, "gazetteer TSV");
            const auto g = load_gazetteer(gaz_in);
            auto f = open_output(gaz_out);
            write_gazetteer(f, g);
            finish_output(f, gaz_out);
            fmt::print(out, "gazetteer: {} places -> {}\n", g.size(), gaz_out);
        } else if (*gaz_synth) {
            const auto g = synthetic_gazetteer(gaz_seed);
            auto f = open_output(gaz_out);
            write_gazetteer(f, g);
            finish_output(f, gaz_out);
            fmt::print(out, "gazetteer: {} places -> {}\n", g.size(), gaz_out);
        } else if (*ingest) {
            auto posts = read_posts(ing_posts, err);
            ResolveReport report;
            if (!ing_fixtures.empty()) {
                if (!fs::is_directory(ing_fixtures))
                    throw InputError(fmt::format("fixture directory '{}' does not exist", ing_fixtures));
                FixturePlatformClient client(ing_fixtures);
                for (auto& p : posts)
                    p = resolve_linked_media(std::move(p), client, report);
            }
            for (const auto& f : report.failures)
                fmt::print(err, "warning: media lookup failed: {}\n", f);
            auto f = open_output(ing_out);
            write_posts(f, posts);
            finish_output(f, ing_out);
            fmt::print(out, "ingest: {} posts, {} links queried, {} media added, {} failures -> {}\n", posts.size(),
                       report.links_queried, report.items_added, report.failures.size(), ing_out);
        } else if (*geolocate) {
            const auto posts = read_posts(geo_posts, err);
            require_file(geo_gaz, "gazetteer");
            const auto g = load_gazetteer(geo_gaz);
            CimeConfig cfg;
            if (!geo_cfg.empty()) {
                require_file(geo_cfg, "config");
                cfg = load_cime_config(geo_cfg);
            }
            const std::int64_t now = geo_store.empty() ? 0 : parse_now(geo_now);
            const auto geos = geolocate_corpus(posts, g, cfg);
            auto f = open_output(geo_out);
            for (const auto& geo : geos)
                f << to_json(geo).dump() << '\n';
            finish_output(f, geo_out);
            std::size_t counts[4] = {};
            for (const auto& geo : geos)
                ++counts[static_cast<int>(geo.method)];
            fmt::print(out, "geolocate: {} posts (native {}, cime_local {}, cime_global {}, unresolved {}) -> {}\n",
                       geos.size(), counts[0], counts[1], counts[2], counts[3], geo_out);
            if (!geo_store.empty()) {
                fs::create_directories(geo_store);
                Store store(store_log(geo_store));
                for (const auto& w : store.load_report().warnings)
                    fmt::print(err, "warning: {}\n", w);
                for (std::size_t i = 0; i < posts.size(); ++i)
                    store.insert(StoredItem{posts[i], geos[i], now});
                fmt::print(out, "store: {} items in {}\n", store.size(), store.path().string());
            }
        } else if (*serve_cmd) {
            if (!fs::is_directory(srv_store))
                throw InputError(fmt::format("store directory '{}' does not exist", srv_store));
            const auto fixed = srv_now.empty() ? std::optional<std::int64_t>{} : parse_now(srv_now);
            Store store(store_log(srv_store));
            for (const auto& w : store.load_report().warnings)
                fmt::print(err, "warning: {}\n", w);
            ApiService api(store, RankingParams{},
                           fixed ? Clock([t = *fixed] { return t; }) : Clock(system_clock_now));
            return serve(api, srv_host, srv_port, srv_cors, out);
        } else if (*simulate_cmd) {
            require_file(sim_cfg, "scenario config");
            require_file(sim_gaz, "gazetteer");
            const auto cfg = load_scenario_config(sim_cfg);
            const auto g = load_gazetteer(sim_gaz);
            const auto sc = simulate(cfg, g);
            auto fp = open_output(sim_posts);
            write_posts(fp, sc.posts);
            finish_output(fp, sim_posts);
            auto ft = open_output(sim_truth);
            write_truth_csv(ft, sc.truth);
            finish_output(ft, sim_truth);
            std::size_t geotagged = 0;
            for (const auto& p : sc.posts)
                geotagged += p.native_geotag ? 1 : 0;
            fmt::print(out, "simulate: {} posts ({} geotagged) -> {}, {}\n", sc.posts.size(), geotagged, sim_posts,
                       sim_truth);
        } else if (*evaluate_cmd) {
            const auto ks = parse_ks(ev_k);
            const auto geos = read_geolocations(ev_geos);
            require_file(ev_truth, "truth file");
            std::ifstream tin(ev_truth, std::ios::binary);
            const auto truth = read_truth_csv(tin, ev_truth);
            const auto posts = read_posts(ev_posts, err);
            const auto report = evaluate(posts, geos, truth, ks);
            const auto text = to_json(report).dump(2);
            out << text << '\n';
            if (!ev_out.empty()) {
                auto f = open_output(ev_out);
                f << text << '\n';
                finish_output(f, ev_out);
            }
        }
    } catch (const InputError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        fmt::print(err, "internal error: {}\n", e.what());
        return kExitInternal;
    }
    return kExitOk;
}

} // namespace geopost::cli
