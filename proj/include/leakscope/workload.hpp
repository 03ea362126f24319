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

#ifndef LEAKSCOPE_WORKLOAD_HPP
#define LEAKSCOPE_WORKLOAD_HPP

#include "leakscope/events.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace leakscope {

/// Count model for one event under one input category.
struct EventModel {
    double mean = 0.0;
    double stddev = 0.0;
};

/// The synthetic embodiment of a category-dependent hardware footprint.
struct CategoryProfile {
    std::string category;
    std::map<std::string, EventModel> event_models;
};

/// A full synthetic target: one count model per (category, event), plus the
/// seed all draws derive from. Categories must be distinct and cover the
/// same event-name set.
struct WorkloadProfile {
    std::vector<CategoryProfile> categories;
    std::uint64_t seed = 0;

    /// Throws Errc::InvalidProfile / Errc::UnknownEvent on violations.
    void validate(const EventCatalog &catalog = EventCatalog::builtin()) const;

    std::vector<std::string> category_labels() const;
    /// Event names shared by every category, in sorted order.
    std::vector<std::string> event_names() const;
    const CategoryProfile &find_category(const std::string &label) const;
    const EventModel &find_model(const std::string &category,
                                 const std::string &event) const;

    /// JSON document {"seed": u64, "categories": [{"category": str,
    /// "events": {name: {"mean": f, "stddev": f}}}]}.
    static WorkloadProfile from_json_text(const std::string &text);
    static WorkloadProfile load(const std::string &path);
    std::string to_json_text() const;
};

/// Deterministic stream of normal draws. The engine is mt19937_64 (bit-exact
/// across platforms) and the transform is a fixed Box-Muller variant, so a
/// given stream seed always yields the same sequence everywhere.
class NormalStream {
  public:
    NormalStream(std::uint64_t stream_seed, double mean, double stddev);

    /// Next draw, rounded to the nearest integer and clamped below at 0.
    std::uint64_t next_count();

  private:
    std::mt19937_64 engine_;
    double mean_;
    double stddev_;
};

/// Stream seed for the (profile seed, category, event) substream. Distinct
/// substreams keep each (category, event) series independent of catalog
/// order and of other categories.
std::uint64_t substream_seed(std::uint64_t seed, const std::string &category,
                             const std::string &event);

/// n deterministic counts for (category, event): round-to-nearest draws
/// from normal(mean, stddev), clamped at 0. Pure function of its inputs.
/// Throws Errc::UnknownCategory / Errc::UnknownEvent.
std::vector<std::uint64_t> simulate_counts(const WorkloadProfile &profile,
                                           const std::string &category,
                                           const std::string &event,
                                           std::size_t n);

/// Runs a real busy-loop whose memory-walk length scales with the
/// category's cache-miss mean and whose data-dependent branch count scales
/// with its branches mean, giving the perf backend a genuine child process
/// to measure. Returns the process exit status (0 on success).
/// Throws Errc::UnknownCategory before doing any work.
int run_scripted_workload(const WorkloadProfile &profile,
                          const std::string &category);

} // namespace leakscope

#endif // LEAKSCOPE_WORKLOAD_HPP
