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

#include "geopost/store.hpp"

#include "geopost/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <boost/iterator/function_output_iterator.hpp>
#include <fmt/format.h>

namespace geopost {

namespace bgi = boost::geometry::index;

nlohmann::ordered_json to_json(const StoredItem& item) {
    nlohmann::ordered_json j;
    j["post"] = to_json(item.post);
    j["geo"] = to_json(item.geo);
    j["inserted_at"] = item.inserted_at;
    return j;
}

StoredItem stored_item_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("post") || !j.contains("geo") || !j.contains("inserted_at") ||
        !j["inserted_at"].is_number_integer())
        throw InputError("stored item needs post, geo and inserted_at");
    StoredItem item{post_from_json(j["post"]), geolocation_from_json(j["geo"]), j["inserted_at"].get<std::int64_t>()};
    if (item.geo.post_id != item.post.post_id)
        throw InputError("stored item geolocation belongs to another post");
    return item;
}

std::string_view to_string(Layer l) {
    switch (l) {
    case Layer::native: return "native";
    case Layer::cime: return "cime";
    case Layer::all: return "all";
    }
    return "?";
}

std::optional<Layer> parse_layer(std::string_view s) {
    if (s == "native") return Layer::native;
    if (s == "cime") return Layer::cime;
    if (s == "all") return Layer::all;
    return std::nullopt;
}

void QueryFilter::validate() const {
    if (bbox)
        validate_bbox(*bbox);
    if (time_from && time_to && *time_from > *time_to)
        throw InputError(fmt::format("inverted time window {}..{}", *time_from, *time_to));
}

bool QueryFilter::matches(const StoredItem& item) const {
    const auto& geo = item.geo;
    if (bbox && (!geo.point || !bbox->contains(*geo.point)))
        return false;
    if (time_from && item.post.created_at < *time_from)
        return false;
    if (time_to && item.post.created_at > *time_to)
        return false;
    switch (layer) {
    case Layer::native:
        if (geo.method != GeoMethod::native)
            return false;
        break;
    case Layer::cime:
        if (geo.method != GeoMethod::cime_local && geo.method != GeoMethod::cime_global)
            return false;
        break;
    case Layer::all: break;
    }
    if (min_precision &&
        (!geo.precision_class || fineness_rank(*geo.precision_class) > fineness_rank(*min_precision)))
        return false;
    if (only_with_media && item.post.media.empty())
        return false;
    return true;
}

Store::Store(std::filesystem::path log_path, StoreOptions options)
    : path_(std::move(log_path)), options_(options) {
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw StorageError(fmt::format("cannot open store log '{}': {}", path_.string(), std::strerror(errno)));
    try {
        replay();
    } catch (...) {
        ::close(fd_);
        throw;
    }
}

Store::~Store() {
    if (fd_ >= 0)
        ::close(fd_);
}

void Store::replay() {
    std::ifstream in(path_, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string data = buffer.str();

    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    while (pos < data.size()) {
        ++line_no;
        const auto nl = data.find('\n', pos);
        const bool complete = nl != std::string::npos;
        const std::string_view line(data.data() + pos, (complete ? nl : data.size()) - pos);
        const std::size_t next = complete ? nl + 1 : data.size();
        const bool last = next == data.size();
        try {
            if (!complete)
                throw InputError("record has no terminating newline");
            if (!line.empty())
                apply(stored_item_from_json(nlohmann::json::parse(line)));
            ++report_.records;
            good_end = next;
        } catch (const std::exception& e) {
            if (!last)
                throw StorageError(
                    fmt::format("{}:{}: corrupt record before end of log: {}", path_.string(), line_no, e.what()));
            report_.warnings.push_back(fmt::format("{}:{}: torn final record dropped ({} bytes): {}", path_.string(),
                                                   line_no, data.size() - good_end, e.what()));
        }
        pos = next;
    }
    if (good_end < data.size()) {
        report_.truncated_bytes = data.size() - good_end;
        if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0)
            throw StorageError(fmt::format("cannot truncate '{}': {}", path_.string(), std::strerror(errno)));
    }
}

void Store::append_line(const std::string& line) {
    struct stat st {};
    if (::fstat(fd_, &st) != 0)
        throw StorageError(fmt::format("stat '{}': {}", path_.string(), std::strerror(errno)));
    const off_t before = st.st_size;

    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            const int err = errno;
            // roll back a partial record so the log stays at the last acknowledged state
            [[maybe_unused]] auto rc = ::ftruncate(fd_, before);
            throw StorageError(fmt::format("append to '{}' failed: {}", path_.string(), std::strerror(err)));
        }
        written += static_cast<std::size_t>(n);
    }
    if (options_.sync == SyncMode::fsync && ::fdatasync(fd_) != 0) {
        const int err = errno;
        [[maybe_unused]] auto rc = ::ftruncate(fd_, before);
        throw StorageError(fmt::format("fdatasync '{}' failed: {}", path_.string(), std::strerror(err)));
    }
}

void Store::apply(StoredItem item) {
    const PostId id = item.post.post_id;
    if (auto it = items_.find(id); it != items_.end()) {
        const auto& old = it->second;
        if (old.geo.point)
            spatial_.remove(Entry(Point(old.geo.point->lon, old.geo.point->lat), id));
        by_time_.erase({old.post.created_at, id});
    }
    if (item.geo.point)
        spatial_.insert(Entry(Point(item.geo.point->lon, item.geo.point->lat), id));
    by_time_.insert({item.post.created_at, id});
    items_.insert_or_assign(id, std::move(item));
}

void Store::insert(const StoredItem& item) {
    if (item.geo.post_id != item.post.post_id)
        throw InputError("geolocation post_id does not match post");
    const std::string line = to_json(item).dump() + "\n";
    std::unique_lock lock(mutex_);
    append_line(line);
    apply(item);
}

std::optional<StoredItem> Store::set_validated(PostId id, bool validated, std::int64_t now) {
    std::unique_lock lock(mutex_);
    auto it = items_.find(id);
    if (it == items_.end())
        return std::nullopt;
    StoredItem updated = it->second;
    updated.geo.crowd_validated = validated;
    updated.inserted_at = now;
    append_line(to_json(updated).dump() + "\n");
    apply(updated);
    return updated;
}

std::vector<StoredItem> Store::query(const QueryFilter& filter) const {
    filter.validate();
    std::shared_lock lock(mutex_);
    std::vector<const StoredItem*> hits;
    auto consider = [&](PostId id) {
        const auto& item = items_.at(id);
        if (filter.matches(item))
            hits.push_back(&item);
    };
    if (filter.bbox) {
        using Box = boost::geometry::model::box<Point>;
        const Box box(Point(filter.bbox->min_lon, filter.bbox->min_lat),
                      Point(filter.bbox->max_lon, filter.bbox->max_lat));
        spatial_.query(bgi::intersects(box),
                       boost::make_function_output_iterator([&](const Entry& e) { consider(e.second); }));
    } else if (filter.time_from || filter.time_to) {
        auto lo = by_time_.lower_bound({filter.time_from.value_or(INT64_MIN), 0});
        auto hi = filter.time_to ? by_time_.upper_bound({*filter.time_to, UINT64_MAX}) : by_time_.end();
        for (auto it = lo; it != hi; ++it)
            consider(it->second);
    } else {
        for (const auto& [id, item] : items_)
            if (filter.matches(item))
                hits.push_back(&item);
    }
    std::sort(hits.begin(), hits.end(), [](const StoredItem* a, const StoredItem* b) {
        if (a->post.created_at != b->post.created_at)
            return a->post.created_at > b->post.created_at;
        return a->post.post_id < b->post.post_id;
    });
    if (filter.limit && hits.size() > *filter.limit)
        hits.resize(*filter.limit);
    std::vector<StoredItem> out;
    out.reserve(hits.size());
    for (const auto* h : hits)
        out.push_back(*h);
    return out;
}

std::optional<StoredItem> Store::get(PostId id) const {
    std::shared_lock lock(mutex_);
    auto it = items_.find(id);
    if (it == items_.end())
        return std::nullopt;
    return it->second;
}

std::vector<StoredItem> Store::all() const {
    std::shared_lock lock(mutex_);
    std::vector<StoredItem> out;
    out.reserve(items_.size());
    for (const auto& [id, item] : items_)
        out.push_back(item);
    std::sort(out.begin(), out.end(),
              [](const StoredItem& a, const StoredItem& b) { return a.post.post_id < b.post.post_id; });
    return out;
}

std::size_t Store::size() const {
    std::shared_lock lock(mutex_);
    return items_.size();
}

void Store::snapshot(const std::filesystem::path& out) const {
    const auto items = all();
    auto tmp = out;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw StorageError(fmt::format("cannot write snapshot '{}'", tmp.string()));
        for (const auto& item : items)
            f << to_json(item).dump() << '\n';
        f.flush();
        if (!f)
            throw StorageError(fmt::format("write to '{}' failed", tmp.string()));
    }
    const int fd = ::open(tmp.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, out, ec);
    if (ec)
        throw StorageError(fmt::format("cannot move snapshot into place at '{}': {}", out.string(), ec.message()));
}

} // namespace geopost
