/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * This file is part of leakscope.
 */

#include "leakscope/events.hpp"
#include "leakscope/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace leakscope {

std::string_view event_kind_name(EventKind kind) {
    switch (kind) {
    case EventKind::Hardware:
        return "hardware";
    case EventKind::Software:
        return "software";
    case EventKind::Cache:
        return "cache";
    }
    return "hardware";
}

EventKind event_kind_from_name(std::string_view name) {
    if (name == "hardware")
        return EventKind::Hardware;
    if (name == "software")
        return EventKind::Software;
    if (name == "cache")
        return EventKind::Cache;
    throw Error(Errc::InvalidArgument,
                "unknown event kind '" + std::string(name) +
                    "' (expected hardware, software or cache)");
}

std::string normalize_event_name(std::string_view name) {
    std::size_t begin = 0;
    std::size_t end = name.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(name[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(name[end - 1])))
        --end;
    std::string out(name.substr(begin, end - begin));
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

namespace {

bool is_canonical_name(std::string_view name) {
    if (name.empty())
        return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    });
}

} // namespace

std::vector<std::string> EventSet::names() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto &e : events_)
        out.push_back(e.name);
    return out;
}

bool EventSet::contains(std::string_view name) const {
    return std::any_of(events_.begin(), events_.end(),
                       [&](const EventSpec &e) { return e.name == name; });
}

void EventCatalog::add(EventSpec spec) {
    if (!is_canonical_name(spec.name))
        throw Error(Errc::InvalidArgument,
                    "event name '" + spec.name +
                        "' is not canonical (want lowercase [a-z0-9-]+)");
    if (contains(spec.name))
        throw Error(Errc::DuplicateEvent,
                    "event '" + spec.name + "' already in catalog");
    entries_.push_back(std::move(spec));
}

const EventCatalog &EventCatalog::builtin() {
    static const EventCatalog catalog = [] {
        EventCatalog c;
        c.add({"cache-misses", EventKind::Cache,
               "last-level cache misses"});
        c.add({"cache-references", EventKind::Cache,
               "last-level cache accesses"});
        c.add({"branches", EventKind::Hardware,
               "retired branch instructions"});
        c.add({"branch-misses", EventKind::Hardware,
               "mispredicted branch instructions"});
        c.add({"instructions", EventKind::Hardware,
               "retired instructions"});
        c.add({"cpu-cycles", EventKind::Hardware,
               "processor clock cycles"});
        c.add({"page-faults", EventKind::Software,
               "page faults taken"});
        c.add({"context-switches", EventKind::Software,
               "context switches"});
        return c;
    }();
    return catalog;
}

EventCatalog EventCatalog::with_extensions(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::IoError, "cannot open event catalog file '" + path + "'");

    EventCatalog catalog = builtin();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        std::string name, kind, description;
        if (!std::getline(fields, name, ',') || !std::getline(fields, kind, ','))
            throw Error(Errc::InvalidArgument,
                        path + ":" + std::to_string(line_no) +
                            ": expected 'name,kind,description'");
        std::getline(fields, description);
        catalog.add({normalize_event_name(name),
                     event_kind_from_name(normalize_event_name(kind)),
                     description});
    }
    return catalog;
}

const EventSpec &EventCatalog::resolve(std::string_view name) const {
    const std::string canonical = normalize_event_name(name);
    for (const auto &entry : entries_)
        if (entry.name == canonical)
            return entry;
    throw Error(Errc::UnknownEvent,
                "event '" + canonical + "' is not in the catalog");
}

bool EventCatalog::contains(std::string_view name) const {
    const std::string canonical = normalize_event_name(name);
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const EventSpec &e) { return e.name == canonical; });
}

EventSet EventCatalog::make_event_set_unchecked(
    const std::vector<std::string> &names) const {
    std::vector<EventSpec> events;
    std::unordered_set<std::string> seen;
    for (const auto &name : names) {
        const EventSpec &spec = resolve(name);
        if (!seen.insert(spec.name).second)
            throw Error(Errc::DuplicateEvent,
                        "event '" + spec.name + "' requested twice");
        events.push_back(spec);
    }
    if (events.empty())
        throw Error(Errc::InvalidArgument, "event set must not be empty");
    return EventSet(std::move(events));
}

EventSet build_event_set(const std::vector<std::string> &names,
                         std::size_t max_parallel,
                         const EventCatalog &catalog) {
    if (max_parallel == 0)
        throw Error(Errc::InvalidArgument, "max_parallel must be at least 1");
    if (names.empty())
        throw Error(Errc::InvalidArgument, "event set must not be empty");
    if (names.size() > max_parallel)
        throw Error(Errc::TooManyEvents,
                    std::to_string(names.size()) +
                        " events requested, but at most " +
                        std::to_string(max_parallel) +
                        " can be counted in parallel");
    return catalog.make_event_set_unchecked(names);
}

} // namespace leakscope
