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

#include "leakscope/collector.hpp"
#include "leakscope/errors.hpp"
#include "leakscope/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <signal.h>
#include <sys/utsname.h>
#include <sys/wait.h>
#include <unistd.h>

namespace leakscope {

std::string_view target_mode_name(TargetMode mode) {
    switch (mode) {
    case TargetMode::Spawn:
        return "spawn";
    case TargetMode::Attach:
        return "attach";
    case TargetMode::Synthetic:
        return "synthetic";
    case TargetMode::Replay:
        return "replay";
    }
    return "spawn";
}

TargetSpec TargetSpec::spawn(std::vector<std::string> command) {
    TargetSpec spec;
    spec.mode = TargetMode::Spawn;
    spec.command = std::move(command);
    return spec;
}

TargetSpec TargetSpec::attach(std::int64_t pid,
                              std::chrono::milliseconds window) {
    TargetSpec spec;
    spec.mode = TargetMode::Attach;
    spec.pid = pid;
    spec.window = window;
    return spec;
}

TargetSpec
TargetSpec::synthetic(std::shared_ptr<const WorkloadProfile> profile) {
    TargetSpec spec;
    spec.mode = TargetMode::Synthetic;
    spec.profile = std::move(profile);
    return spec;
}

TargetSpec TargetSpec::replay(std::string trace_path) {
    TargetSpec spec;
    spec.mode = TargetMode::Replay;
    spec.trace_path = std::move(trace_path);
    return spec;
}

std::string perf_binary() {
    const char *override = std::getenv(kPerfPathEnv);
    if (override != nullptr && override[0] != '\0')
        return override;
    return "perf";
}

namespace {

struct ProcessResult {
    int exit_code = -1;       // -1 when terminated by signal
    int term_signal = 0;
    std::string stderr_text;
};

/// Runs argv with stdout discarded and stderr captured.
ProcessResult run_capture(const std::vector<std::string> &argv) {
    int pipe_fds[2];
    if (pipe(pipe_fds) != 0)
        throw Error(Errc::IoError, "pipe() failed");

    const pid_t child = fork();
    if (child < 0) {
        close(pipe_fds[0]);
        close(pipe_fds[1]);
        throw Error(Errc::IoError, "fork() failed");
    }

    if (child == 0) {
        close(pipe_fds[0]);
        dup2(pipe_fds[1], STDERR_FILENO);
        close(pipe_fds[1]);
        const int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) {
            dup2(devnull, STDOUT_FILENO);
            close(devnull);
        }
        std::vector<char *> args;
        args.reserve(argv.size() + 1);
        for (const auto &arg : argv)
            args.push_back(const_cast<char *>(arg.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        // exec failed; 127 mirrors the shell convention.
        _exit(127);
    }

    close(pipe_fds[1]);
    std::string captured;
    char buffer[4096];
    ssize_t bytes;
    while ((bytes = read(pipe_fds[0], buffer, sizeof(buffer))) > 0)
        captured.append(buffer, static_cast<std::size_t>(bytes));
    close(pipe_fds[0]);

    int status = 0;
    if (waitpid(child, &status, 0) < 0)
        throw Error(Errc::IoError, "waitpid() failed");

    ProcessResult result;
    result.stderr_text = std::move(captured);
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.term_signal = WTERMSIG(status);
    return result;
}

bool perf_available() {
    try {
        const ProcessResult r = run_capture({perf_binary(), "--version"});
        return r.exit_code == 0;
    } catch (const Error &) {
        return false;
    }
}

bool stderr_signals_permission_problem(const std::string &text) {
    return text.find("Permission denied") != std::string::npos ||
           text.find("perf_event_paranoid") != std::string::npos ||
           text.find("Access to performance monitoring") != std::string::npos ||
           text.find("EACCES") != std::string::npos;
}

std::string join_names(const std::vector<std::string> &names) {
    std::string joined;
    for (const auto &name : names) {
        if (!joined.empty())
            joined += ',';
        joined += name;
    }
    return joined;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string host_description() {
    utsname info{};
    if (uname(&info) != 0)
        return "";
    return std::string(info.sysname) + " " + info.release + " " + info.machine;
}

} // namespace

std::map<std::string, std::uint64_t>
parse_perf_stat_output(const std::string &text, const EventSet &events) {
    std::map<std::string, std::uint64_t> counts;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        // -x, format: value,unit,event,runtime,percentage[,...]
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (fields.size() < 3) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() < 3)
            continue;

        // perf may suffix the event with a modifier, e.g. "cache-misses:u".
        std::string event = fields[2];
        if (const std::size_t colon = event.find(':'); colon != std::string::npos)
            event.resize(colon);
        event = normalize_event_name(event);
        if (!events.contains(event))
            continue;

        const std::string &value = fields[0];
        if (value == "<not counted>" || value == "<not supported>")
            throw Error(Errc::CounterReadError,
                        "perf reported '" + value + "' for event '" + event +
                            "'");
        std::uint64_t parsed = 0;
        const char *first = value.data();
        const char *last = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(first, last, parsed);
        if (ec != std::errc() || ptr != last || value.empty())
            throw Error(Errc::CounterReadError,
                        "cannot parse perf count '" + value + "' for event '" +
                            event + "'");
        counts[event] = parsed;
    }

    for (const auto &name : events.names())
        if (!counts.contains(name))
            throw Error(Errc::CounterReadError,
                        "perf output is missing event '" + name + "'");
    return counts;
}

// ---------------------------------------------------------------------------
// Backends

class Session::Backend {
  public:
    Backend(EventSet events, MeasurementMetadata metadata)
        : events_(std::move(events)), metadata_(std::move(metadata)) {}
    virtual ~Backend() = default;

    const EventSet &events() const { return events_; }
    const MeasurementMetadata &metadata() const { return metadata_; }

    virtual Sample measure_once(const std::string &category) = 0;

    /// Replay hands back recorded run indices; generating backends number
    /// runs 0..n-1 themselves.
    virtual bool preserves_run_indices() const { return false; }

  protected:
    EventSet events_;
    MeasurementMetadata metadata_;
};

namespace {

class SyntheticBackend final : public Session::Backend {
  public:
    SyntheticBackend(EventSet events,
                     std::shared_ptr<const WorkloadProfile> profile)
        : Backend(std::move(events),
                  MeasurementMetadata{.backend = "synthetic",
                                      .timestamp = "",
                                      .seed = profile->seed,
                                      .host = ""}),
          profile_(std::move(profile)) {}

    Sample measure_once(const std::string &category) override {
        profile_->find_category(category);

        Sample sample;
        sample.category = category;
        sample.run_index = run_counter_[category]++;
        for (const auto &spec : events_.events()) {
            auto key = std::make_pair(category, spec.name);
            auto it = streams_.find(key);
            if (it == streams_.end()) {
                const EventModel &model =
                    profile_->find_model(category, spec.name);
                it = streams_
                         .emplace(key, NormalStream(substream_seed(
                                                        profile_->seed,
                                                        category, spec.name),
                                                    model.mean, model.stddev))
                         .first;
            }
            sample.counts[spec.name] = it->second.next_count();
        }
        return sample;
    }

  private:
    std::shared_ptr<const WorkloadProfile> profile_;
    std::map<std::pair<std::string, std::string>, NormalStream> streams_;
    std::map<std::string, std::uint64_t> run_counter_;
};

class ReplayBackend final : public Session::Backend {
  public:
    ReplayBackend(EventSet events, MeasurementSet recorded)
        : Backend(std::move(events),
                  MeasurementMetadata{.backend = "replay",
                                      .timestamp = "",
                                      .seed = {},
                                      .host = ""}) {
        std::sort(recorded.samples.begin(), recorded.samples.end(),
                  [](const Sample &a, const Sample &b) {
                      return std::tie(a.category, a.run_index) <
                             std::tie(b.category, b.run_index);
                  });
        for (auto &sample : recorded.samples)
            queues_[sample.category].push_back(std::move(sample));
    }

    Sample measure_once(const std::string &category) override {
        auto it = queues_.find(category);
        if (it == queues_.end() || it->second.empty())
            throw Error(Errc::ReplayExhausted,
                        "no recorded samples left for category '" + category +
                            "'");
        Sample sample = std::move(it->second.front());
        it->second.pop_front();
        return sample;
    }

    bool preserves_run_indices() const override { return true; }

  private:
    std::map<std::string, std::deque<Sample>> queues_;
};

class PerfBackend final : public Session::Backend {
  public:
    PerfBackend(EventSet events, TargetSpec target)
        : Backend(std::move(events),
                  MeasurementMetadata{
                      .backend = std::string("perf-") +
                                 std::string(target_mode_name(target.mode)),
                      .timestamp = utc_timestamp(),
                      .seed = {},
                      .host = host_description()}),
          target_(std::move(target)) {}

    Sample measure_once(const std::string &category) override {
        std::vector<std::string> argv = {perf_binary(), "stat", "-x", ",",
                                         "-e", join_names(events_.names())};
        if (target_.mode == TargetMode::Spawn) {
            argv.push_back("--");
            argv.insert(argv.end(), target_.command.begin(),
                        target_.command.end());
        } else {
            argv.push_back("-p");
            argv.push_back(std::to_string(target_.pid));
            argv.push_back("--");
            argv.push_back("sleep");
            const double seconds =
                static_cast<double>(target_.window.count()) / 1000.0;
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.3f", seconds);
            argv.push_back(buffer);
        }

        const ProcessResult result = run_capture(argv);
        if (result.exit_code != 0) {
            if (stderr_signals_permission_problem(result.stderr_text))
                throw Error(Errc::PermissionDenied,
                            "perf needs elevated privilege (run as root or "
                            "lower kernel.perf_event_paranoid): " +
                                result.stderr_text);
            if (result.term_signal != 0)
                throw Error(Errc::TargetFailed,
                            "measured process terminated by signal " +
                                std::to_string(result.term_signal));
            throw Error(Errc::TargetFailed,
                        "target exited with status " +
                            std::to_string(result.exit_code) +
                            (result.stderr_text.empty()
                                 ? ""
                                 : ": " + result.stderr_text));
        }

        Sample sample;
        sample.category = category;
        sample.counts = parse_perf_stat_output(result.stderr_text, events_);
        return sample;
    }

  private:
    TargetSpec target_;
};

} // namespace

// ---------------------------------------------------------------------------
// Session

Session::Session(std::unique_ptr<Backend> backend)
    : backend_(std::move(backend)) {}

Session::Session(Session &&) noexcept = default;
Session &Session::operator=(Session &&) noexcept = default;
Session::~Session() = default;

const EventSet &Session::events() const { return backend_->events(); }

Session Session::open(const TargetSpec &target, const EventSet &events,
                      const EventCatalog &catalog) {
    if (events.empty())
        throw Error(Errc::InvalidArgument, "session needs a non-empty event set");

    switch (target.mode) {
    case TargetMode::Spawn: {
        if (target.command.empty())
            throw Error(Errc::InvalidTarget, "spawn mode needs a command");
        if (!perf_available())
            throw Error(Errc::BackendUnavailable,
                        "perf binary '" + perf_binary() +
                            "' not found or not runnable; set " +
                            kPerfPathEnv + " to override");
        return Session(std::make_unique<PerfBackend>(events, target));
    }
    case TargetMode::Attach: {
        if (target.pid <= 0)
            throw Error(Errc::InvalidTarget, "attach mode needs a process id");
        if (target.window.count() <= 0)
            throw Error(Errc::InvalidTarget,
                        "attach mode needs a positive window duration");
        if (kill(static_cast<pid_t>(target.pid), 0) != 0 && errno == ESRCH)
            throw Error(Errc::InvalidTarget,
                        "no such process: " + std::to_string(target.pid));
        if (!perf_available())
            throw Error(Errc::BackendUnavailable,
                        "perf binary '" + perf_binary() +
                            "' not found or not runnable; set " +
                            kPerfPathEnv + " to override");
        return Session(std::make_unique<PerfBackend>(events, target));
    }
    case TargetMode::Synthetic: {
        if (!target.profile)
            throw Error(Errc::InvalidTarget, "synthetic mode needs a profile");
        try {
            target.profile->validate(catalog);
        } catch (const Error &e) {
            throw Error(Errc::InvalidTarget,
                        std::string("invalid synthetic profile: ") + e.what());
        }
        // Every session event must be modeled by the profile.
        const auto modeled = target.profile->event_names();
        for (const auto &name : events.names())
            if (std::find(modeled.begin(), modeled.end(), name) == modeled.end())
                throw Error(Errc::InvalidTarget,
                            "profile does not model event '" + name + "'");
        return Session(std::make_unique<SyntheticBackend>(events, target.profile));
    }
    case TargetMode::Replay: {
        MeasurementSet recorded;
        try {
            recorded = read_trace_file(target.trace_path, catalog);
        } catch (const Error &e) {
            throw Error(Errc::InvalidTarget,
                        std::string("cannot replay trace: ") + e.what());
        }
        std::vector<std::string> want = events.names();
        std::vector<std::string> have = recorded.events.names();
        std::sort(want.begin(), want.end());
        std::sort(have.begin(), have.end());
        if (want != have)
            throw Error(Errc::InvalidTarget,
                        "trace event set does not match the requested events");
        return Session(
            std::make_unique<ReplayBackend>(events, std::move(recorded)));
    }
    }
    throw Error(Errc::InvalidTarget, "unknown target mode");
}

Sample Session::measure_once(const std::string &category) {
    Sample sample = backend_->measure_once(category);
    sample.category = category;
    return sample;
}

MeasurementSet Session::collect(
    const std::vector<std::pair<std::string, std::uint64_t>> &plan) {
    if (plan.empty())
        throw Error(Errc::InvalidPlan, "empty collection plan");
    std::set<std::string> seen;
    for (const auto &[category, run_count] : plan) {
        if (run_count < 1)
            throw Error(Errc::InvalidPlan,
                        "category '" + category +
                            "' has run count 0; need at least 1");
        if (!seen.insert(category).second)
            throw Error(Errc::InvalidPlan,
                        "category '" + category + "' appears twice in the plan");
    }

    MeasurementSet ms;
    ms.events = backend_->events();
    ms.metadata = backend_->metadata();
    for (const auto &[category, run_count] : plan) {
        for (std::uint64_t run = 0; run < run_count; ++run) {
            try {
                Sample sample = backend_->measure_once(category);
                sample.category = category;
                if (!backend_->preserves_run_indices())
                    sample.run_index = run;
                ms.samples.push_back(std::move(sample));
            } catch (const Error &e) {
                throw Error(e.code(), "category '" + category + "', run " +
                                          std::to_string(run) + ": " +
                                          e.what());
            }
        }
    }
    ms.validate();
    return ms;
}

} // namespace leakscope
