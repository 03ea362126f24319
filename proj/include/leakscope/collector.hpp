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

#ifndef LEAKSCOPE_COLLECTOR_HPP
#define LEAKSCOPE_COLLECTOR_HPP

#include "leakscope/measurement.hpp"
#include "leakscope/workload.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace leakscope {

enum class TargetMode { Spawn, Attach, Synthetic, Replay };

std::string_view target_mode_name(TargetMode mode);

/// What to measure. Exactly the fields for the chosen mode are meaningful;
/// use the factory functions rather than aggregate construction.
struct TargetSpec {
    TargetMode mode = TargetMode::Synthetic;
    /// Spawn: argv of the command run once per sample; counts cover the
    /// whole child-process lifetime.
    std::vector<std::string> command;
    /// Attach: process id to monitor and the fixed wall-clock window per
    /// sample. Window attribution is approximate by design.
    std::int64_t pid = -1;
    std::chrono::milliseconds window{0};
    /// Synthetic: category count models.
    std::shared_ptr<const WorkloadProfile> profile;
    /// Replay: recorded trace to feed back.
    std::string trace_path;

    static TargetSpec spawn(std::vector<std::string> command);
    static TargetSpec attach(std::int64_t pid, std::chrono::milliseconds window);
    static TargetSpec synthetic(std::shared_ptr<const WorkloadProfile> profile);
    static TargetSpec replay(std::string trace_path);
};

/// Environment variable overriding the perf binary location.
inline constexpr const char *kPerfPathEnv = "LEAKSCOPE_PERF_PATH";

/// Resolved perf binary ($LEAKSCOPE_PERF_PATH or "perf").
std::string perf_binary();

/// One measurement session against one target. Single-threaded: hardware
/// counters are a shared resource, so a session performs one measurement at
/// a time. Distinct sessions on distinct targets may run concurrently.
class Session {
  public:
    /// Validates the target and probes the backend (perf presence for
    /// spawn/attach, profile/trace validity for synthetic/replay). No
    /// counting happens yet. Throws Errc::InvalidTarget,
    /// Errc::BackendUnavailable, Errc::PermissionDenied.
    static Session open(const TargetSpec &target, const EventSet &events,
                        const EventCatalog &catalog = EventCatalog::builtin());

    Session(Session &&) noexcept;
    Session &operator=(Session &&) noexcept;
    ~Session();
    Session(const Session &) = delete;
    Session &operator=(const Session &) = delete;

    const EventSet &events() const;

    /// One measurement window for one classification run of `category`.
    /// Throws Errc::TargetFailed, Errc::CounterReadError,
    /// Errc::PermissionDenied, Errc::ReplayExhausted.
    Sample measure_once(const std::string &category);

    /// Runs the whole plan category-by-category in plan order; run_count
    /// samples per category. Backend errors are rethrown annotated with
    /// the category and run index. Throws Errc::InvalidPlan on run_count
    /// < 1 or repeated categories.
    MeasurementSet
    collect(const std::vector<std::pair<std::string, std::uint64_t>> &plan);

    /// Measurement strategy behind a session; defined in the
    /// implementation file, one subclass per TargetMode.
    class Backend;

  private:
    explicit Session(std::unique_ptr<Backend> backend);
    std::unique_ptr<Backend> backend_;
};

/// Parses the machine-readable (-x,) output of `perf stat` into per-event
/// counts for the given event set. "<not counted>" and "<not supported>"
/// values raise Errc::CounterReadError rather than turning into silent
/// zeros. Exposed for tests.
std::map<std::string, std::uint64_t>
parse_perf_stat_output(const std::string &text, const EventSet &events);

} // namespace leakscope

#endif // LEAKSCOPE_COLLECTOR_HPP
