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

#ifndef LEAKSCOPE_EVENTS_HPP
#define LEAKSCOPE_EVENTS_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace leakscope {

enum class EventKind { Hardware, Software, Cache };

std::string_view event_kind_name(EventKind kind);
EventKind event_kind_from_name(std::string_view name);

/// One countable hardware event, identified by its canonical perf-style name
/// (lowercase, `[a-z0-9-]+`).
struct EventSpec {
    std::string name;
    EventKind kind = EventKind::Hardware;
    std::string description;

    friend bool operator==(const EventSpec &, const EventSpec &) = default;
};

/// Ordered, duplicate-free set of events selected for one measurement
/// session. Counting hardware can only track a handful of events at once,
/// so construction through build_event_set enforces a parallelism cap.
class EventSet {
  public:
    EventSet() = default;

    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const std::vector<EventSpec> &events() const noexcept { return events_; }
    std::vector<std::string> names() const;
    bool contains(std::string_view name) const;

    friend class EventCatalog;
    friend EventSet build_event_set(const std::vector<std::string> &names,
                                    std::size_t max_parallel,
                                    const class EventCatalog &catalog);

  private:
    explicit EventSet(std::vector<EventSpec> events)
        : events_(std::move(events)) {}

    std::vector<EventSpec> events_;
};

/// Vocabulary of events the tool understands. Immutable once built; the
/// builtin() instance covers the portable subset most PMUs can count.
class EventCatalog {
  public:
    /// cache-misses, cache-references, branches, branch-misses,
    /// instructions, cpu-cycles, page-faults, context-switches.
    static const EventCatalog &builtin();

    /// builtin() plus extra entries read from a config file, one
    /// `name,kind,description` line each. Blank lines and lines starting
    /// with '#' are ignored.
    static EventCatalog with_extensions(const std::string &path);

    /// Trims surrounding whitespace, lowercases, then looks the name up.
    /// Throws Errc::UnknownEvent when absent.
    const EventSpec &resolve(std::string_view name) const;

    bool contains(std::string_view name) const;

    const std::vector<EventSpec> &entries() const noexcept { return entries_; }

    /// Builds an EventSet from the requested names (resolved through this
    /// catalog), applying the parallel-counting cap. Used internally by
    /// read paths that reconstruct event sets from recorded data, where
    /// the hardware cap does not apply.
    EventSet make_event_set_unchecked(const std::vector<std::string> &names) const;

  private:
    void add(EventSpec spec);

    std::vector<EventSpec> entries_;
};

/// Default cap on events counted in parallel; PMUs typically expose 6 to 8
/// programmable counters.
inline constexpr std::size_t kDefaultMaxParallelEvents = 8;

/// Resolves every name against the catalog, rejecting duplicates and sets
/// larger than max_parallel. Input order of first occurrences is preserved.
/// Throws Errc::TooManyEvents, Errc::DuplicateEvent, Errc::UnknownEvent,
/// Errc::InvalidArgument (max_parallel == 0 or empty name list).
EventSet build_event_set(const std::vector<std::string> &names,
                         std::size_t max_parallel = kDefaultMaxParallelEvents,
                         const EventCatalog &catalog = EventCatalog::builtin());

/// Canonical form of an event or category token: surrounding whitespace
/// trimmed, ASCII lowercased.
std::string normalize_event_name(std::string_view name);

} // namespace leakscope

#endif // LEAKSCOPE_EVENTS_HPP
