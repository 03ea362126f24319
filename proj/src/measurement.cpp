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

#include "leakscope/measurement.hpp"
#include "leakscope/errors.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace leakscope {

namespace {

// Labels end up as bare fields in the comma-separated trace format.
bool is_safe_label(const std::string &label) {
    if (label.empty())
        return false;
    return label.find_first_of(",\n\r") == std::string::npos;
}

} // namespace

std::vector<std::string> MeasurementSet::categories() const {
    std::set<std::string> labels;
    for (const auto &sample : samples)
        labels.insert(sample.category);
    return {labels.begin(), labels.end()};
}

std::vector<std::uint64_t>
MeasurementSet::counts_for(const std::string &category,
                           const std::string &event) const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> indexed;
    for (const auto &sample : samples) {
        if (sample.category != category)
            continue;
        auto it = sample.counts.find(event);
        if (it != sample.counts.end())
            indexed.emplace_back(sample.run_index, it->second);
    }
    std::sort(indexed.begin(), indexed.end());
    std::vector<std::uint64_t> counts;
    counts.reserve(indexed.size());
    for (const auto &[run, count] : indexed)
        counts.push_back(count);
    return counts;
}

void MeasurementSet::validate() const {
    if (events.empty())
        throw Error(Errc::InvalidArgument, "measurement set has no events");
    if (samples.empty())
        throw Error(Errc::InvalidArgument, "measurement set has no samples");

    const std::vector<std::string> names = events.names();
    std::set<std::pair<std::string, std::uint64_t>> seen;
    for (const auto &sample : samples) {
        if (!is_safe_label(sample.category))
            throw Error(Errc::InvalidArgument,
                        "category label '" + sample.category +
                            "' is empty or contains a separator character");
        if (sample.counts.size() != names.size())
            throw Error(Errc::InvalidArgument,
                        "sample (" + sample.category + ", run " +
                            std::to_string(sample.run_index) +
                            ") does not cover the event set");
        for (const auto &name : names)
            if (!sample.counts.contains(name))
                throw Error(Errc::InvalidArgument,
                            "sample (" + sample.category + ", run " +
                                std::to_string(sample.run_index) +
                                ") is missing event '" + name + "'");
        if (!seen.insert({sample.category, sample.run_index}).second)
            throw Error(Errc::InvalidArgument,
                        "duplicate sample (" + sample.category + ", run " +
                            std::to_string(sample.run_index) + ")");
    }
}

bool content_equal(const MeasurementSet &a, const MeasurementSet &b) {
    std::vector<std::string> ea = a.events.names();
    std::vector<std::string> eb = b.events.names();
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    if (ea != eb)
        return false;

    auto canonical = [](const MeasurementSet &ms) {
        std::vector<Sample> sorted = ms.samples;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Sample &x, const Sample &y) {
                      return std::tie(x.category, x.run_index) <
                             std::tie(y.category, y.run_index);
                  });
        return sorted;
    };
    return canonical(a) == canonical(b);
}

} // namespace leakscope
