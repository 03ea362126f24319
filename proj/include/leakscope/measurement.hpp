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

#ifndef LEAKSCOPE_MEASUREMENT_HPP
#define LEAKSCOPE_MEASUREMENT_HPP

#include "leakscope/events.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace leakscope {

/// One measurement window: per-event counts for a single classification run
/// of one labeled category.
struct Sample {
    std::string category;
    std::uint64_t run_index = 0;
    std::map<std::string, std::uint64_t> counts;

    friend bool operator==(const Sample &, const Sample &) = default;
};

struct MeasurementMetadata {
    std::string backend;
    /// ISO-8601 UTC; empty for deterministic backends so outputs stay
    /// byte-reproducible.
    std::string timestamp;
    std::optional<std::uint64_t> seed;
    std::string host;
};

/// Everything one collection session produced: the event set, all samples
/// across categories, and provenance. Immutable once returned by a
/// collector; content equality ignores metadata and presentation order.
struct MeasurementSet {
    EventSet events;
    std::vector<Sample> samples;
    MeasurementMetadata metadata;

    /// Distinct category labels, sorted.
    std::vector<std::string> categories() const;

    /// Counts of one event for one category, ordered by run index: the
    /// distribution the t-test consumes.
    std::vector<std::uint64_t> counts_for(const std::string &category,
                                          const std::string &event) const;

    /// Enforces the structural invariants: at least one category, every
    /// sample keyed by exactly the event set's names, (category, event,
    /// run) triples unique, labels safe for the trace format.
    void validate() const;
};

/// Same event-name set and same sample contents; sample order, event order
/// and metadata are not significant. The trace format does not persist
/// them, so this is the equality round-trips are measured by.
bool content_equal(const MeasurementSet &a, const MeasurementSet &b);

} // namespace leakscope

#endif // LEAKSCOPE_MEASUREMENT_HPP
