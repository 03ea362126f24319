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

// Command-line front end. Exit codes form the CI contract:
//   0  success, and for `analyze` no leakage alarm
//   1  operational error (bad flags, malformed input, collection failure)
//   2  `analyze` succeeded and raised the leakage alarm

#include "leakscope/collector.hpp"
#include "leakscope/errors.hpp"
#include "leakscope/evaluator.hpp"
#include "leakscope/events.hpp"
#include "leakscope/trace.hpp"
#include "leakscope/version.hpp"
#include "leakscope/workload.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace leakscope;

std::vector<std::string> split_list(const std::string &joined) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(joined);
    while (std::getline(in, item, ','))
        out.push_back(item);
    return out;
}

std::string read_all(const std::string &path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_all(const std::string &path, const std::string &bytes) {
    if (path == "-") {
        std::cout << bytes;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
    out << bytes;
    if (!out)
        throw Error(Errc::IoError, "failed writing '" + path + "'");
}

EventCatalog load_catalog(const std::string &catalog_path) {
    if (catalog_path.empty())
        return EventCatalog::builtin();
    return EventCatalog::with_extensions(catalog_path);
}

struct CollectOptions {
    std::string events;
    std::string mode;
    std::uint64_t runs = 1000;
    std::vector<std::string> labels;
    std::int64_t pid = -1;
    std::uint64_t window_ms = 500;
    std::string profile_path;
    std::string trace_path;
    std::size_t max_events = kDefaultMaxParallelEvents;
    std::string catalog_path;
    std::string out = "-";
    bool runs_given = false;
    std::vector<std::string> command;
};

int run_collect(const CollectOptions &opt) {
    const EventCatalog catalog = load_catalog(opt.catalog_path);

    TargetSpec target;
    std::shared_ptr<WorkloadProfile> profile;
    if (opt.mode == "spawn") {
        target = TargetSpec::spawn(opt.command);
    } else if (opt.mode == "attach") {
        target = TargetSpec::attach(opt.pid,
                                    std::chrono::milliseconds(opt.window_ms));
    } else if (opt.mode == "synthetic") {
        if (opt.profile_path.empty())
            throw Error(Errc::InvalidTarget,
                        "synthetic mode needs --profile");
        profile = std::make_shared<WorkloadProfile>(
            WorkloadProfile::load(opt.profile_path));
        target = TargetSpec::synthetic(profile);
    } else if (opt.mode == "replay") {
        if (opt.trace_path.empty())
            throw Error(Errc::InvalidTarget, "replay mode needs --trace");
        target = TargetSpec::replay(opt.trace_path);
    } else {
        throw Error(Errc::InvalidArgument,
                    "unknown mode '" + opt.mode +
                        "' (expected spawn, attach, synthetic or replay)");
    }

    // Event set: explicit flag, else the profile's (synthetic) or the
    // trace's (replay) full set. Spawn and attach default to the two
    // events most worth watching.
    std::vector<std::string> event_names;
    if (!opt.events.empty()) {
        event_names = split_list(opt.events);
    } else if (opt.mode == "synthetic") {
        event_names = profile->event_names();
    } else if (opt.mode == "replay") {
        event_names = read_trace_file(opt.trace_path, catalog).events.names();
    } else {
        event_names = {"cache-misses", "branches"};
    }
    const EventSet events = build_event_set(event_names, opt.max_events, catalog);

    // Labels: explicit, else every category the backend knows about.
    std::vector<std::string> labels = opt.labels;
    if (labels.empty()) {
        if (opt.mode == "synthetic")
            labels = profile->category_labels();
        else if (opt.mode == "replay")
            labels = read_trace_file(opt.trace_path, catalog).categories();
        else
            throw Error(Errc::InvalidArgument,
                        opt.mode + " mode needs at least one --label");
    }
    if ((opt.mode == "spawn" || opt.mode == "attach") && labels.size() != 1)
        throw Error(Errc::InvalidArgument,
                    opt.mode + " mode measures one labeled category per "
                               "invocation; merge traces for more");

    Session session = Session::open(target, events, catalog);

    std::vector<std::pair<std::string, std::uint64_t>> plan;
    std::optional<MeasurementSet> recorded;
    for (const auto &label : labels) {
        std::uint64_t runs = opt.runs;
        if (opt.mode == "replay" && !opt.runs_given) {
            // Default to everything the trace holds for this category.
            if (!recorded)
                recorded = read_trace_file(opt.trace_path, catalog);
            std::uint64_t available = 0;
            for (const auto &sample : recorded->samples)
                if (sample.category == label)
                    ++available;
            runs = available;
        }
        plan.emplace_back(label, runs);
    }

    const MeasurementSet ms = session.collect(plan);
    std::ostringstream bytes;
    write_trace(ms, bytes);
    write_all(opt.out, bytes.str());
    std::cerr << "collected " << ms.samples.size() << " samples over "
              << events.size() << " events via " << ms.metadata.backend
              << "\n";
    return 0;
}

struct SimulateOptions {
    std::string profile_path;
    std::uint64_t runs = 1000;
    std::optional<std::uint64_t> seed;
    std::string catalog_path;
    std::string out = "-";
};

int run_simulate(const SimulateOptions &opt) {
    const EventCatalog catalog = load_catalog(opt.catalog_path);
    auto profile = std::make_shared<WorkloadProfile>(
        WorkloadProfile::load(opt.profile_path));
    if (opt.seed)
        profile->seed = *opt.seed;
    profile->validate(catalog);

    const EventSet events = catalog.make_event_set_unchecked(
        profile->event_names());
    Session session =
        Session::open(TargetSpec::synthetic(profile), events, catalog);

    std::vector<std::pair<std::string, std::uint64_t>> plan;
    for (const auto &label : profile->category_labels())
        plan.emplace_back(label, opt.runs);

    const MeasurementSet ms = session.collect(plan);
    std::ostringstream bytes;
    write_trace(ms, bytes);
    write_all(opt.out, bytes.str());
    std::cerr << "simulated " << ms.samples.size() << " samples (seed "
              << profile->seed << ")\n";
    return 0;
}

struct AnalyzeOptions {
    std::string trace_path = "-";
    double alpha = 0.05;
    std::string correction = "none";
    std::size_t bins = kDefaultHistogramBins;
    std::string catalog_path;
    std::string out = "-";
};

int run_analyze(const AnalyzeOptions &opt) {
    const EventCatalog catalog = load_catalog(opt.catalog_path);
    const MeasurementSet ms = read_trace_file(opt.trace_path, catalog);

    LeakageReport report = evaluate(ms, opt.alpha,
                                    correction_from_name(opt.correction),
                                    opt.bins);
    report.metadata.source = opt.trace_path;

    write_all(opt.out, render_report(report, ReportFormat::Json));
    // Human summary goes to stderr so the JSON stream stays clean.
    std::cerr << render_report(report, ReportFormat::Text);
    return report.alarm ? 2 : 0;
}

struct ReportOptions {
    std::string in = "-";
    std::string format = "text";
    std::string out = "-";
};

int run_report(const ReportOptions &opt) {
    const LeakageReport report = report_from_json(read_all(opt.in));
    write_all(opt.out, render_report(report,
                                     report_format_from_name(opt.format)));
    return 0;
}

struct WorkloadOptions {
    std::string profile_path;
    std::string category;
};

int run_workload(const WorkloadOptions &opt) {
    const WorkloadProfile profile = WorkloadProfile::load(opt.profile_path);
    return run_scripted_workload(profile, opt.category);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"hardware-counter leakage evaluator"};
    app.set_version_flag("--version", leakscope::kVersion);
    app.require_subcommand(1);

    CollectOptions collect_opt;
    CLI::App *collect = app.add_subcommand(
        "collect", "measure per-category event counts from a target");
    collect->add_option("--events", collect_opt.events,
                        "comma-separated event names");
    collect->add_option("--mode", collect_opt.mode,
                        "spawn, attach, synthetic or replay")
        ->required();
    collect->add_option("--runs", collect_opt.runs,
                        "classification runs per category (default 1000)");
    collect->add_option("--label", collect_opt.labels,
                        "category label (repeatable)");
    collect->add_option("--pid", collect_opt.pid, "process id (attach mode)");
    collect->add_option("--window-ms", collect_opt.window_ms,
                        "measurement window per run in ms (attach mode)");
    collect->add_option("--profile", collect_opt.profile_path,
                        "workload profile JSON (synthetic mode)");
    collect->add_option("--trace", collect_opt.trace_path,
                        "recorded trace to replay (replay mode)");
    collect->add_option("--max-events", collect_opt.max_events,
                        "parallel event cap (default 8)");
    collect->add_option("--catalog", collect_opt.catalog_path,
                        "extra event catalog entries, one name,kind,description per line");
    collect->add_option("--out", collect_opt.out,
                        "output trace path, - for stdout");
    collect->add_option("command", collect_opt.command,
                        "target command after -- (spawn mode)");

    SimulateOptions simulate_opt;
    CLI::App *simulate = app.add_subcommand(
        "simulate", "write a deterministic trace from a workload profile");
    simulate->add_option("--profile", simulate_opt.profile_path,
                         "workload profile JSON")
        ->required();
    simulate->add_option("--runs", simulate_opt.runs,
                         "runs per category (default 1000)");
    simulate->add_option("--seed", simulate_opt.seed,
                         "override the profile seed");
    simulate->add_option("--catalog", simulate_opt.catalog_path,
                         "extra event catalog entries");
    simulate->add_option("--out", simulate_opt.out,
                         "output trace path, - for stdout");

    AnalyzeOptions analyze_opt;
    CLI::App *analyze = app.add_subcommand(
        "analyze", "t-test every (event, category pair) of a trace");
    analyze->add_option("--trace", analyze_opt.trace_path,
                        "input trace path, - for stdin");
    analyze->add_option("--alpha", analyze_opt.alpha,
                        "significance level (default 0.05)");
    analyze->add_option("--correction", analyze_opt.correction,
                        "multiple-testing correction: none or bonferroni");
    analyze->add_option("--bins", analyze_opt.bins,
                        "histogram bin count (default 30)");
    analyze->add_option("--catalog", analyze_opt.catalog_path,
                        "extra event catalog entries");
    analyze->add_option("--out", analyze_opt.out,
                        "output report JSON path, - for stdout");

    ReportOptions report_opt;
    CLI::App *report = app.add_subcommand(
        "report", "render a report JSON as text, json or markdown");
    report->add_option("--in", report_opt.in,
                       "report JSON path, - for stdin");
    report->add_option("--format", report_opt.format,
                       "text, json or markdown");
    report->add_option("--out", report_opt.out,
                       "output path, - for stdout");

    WorkloadOptions workload_opt;
    CLI::App *workload = app.add_subcommand(
        "workload", "run the scripted busy-loop for one profile category");
    workload->add_option("--profile", workload_opt.profile_path,
                         "workload profile JSON")
        ->required();
    workload->add_option("--category", workload_opt.category,
                         "category whose footprint to emit")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 1;
    }

    collect_opt.runs_given = collect->count("--runs") > 0;

    try {
        if (collect->parsed())
            return run_collect(collect_opt);
        if (simulate->parsed())
            return run_simulate(simulate_opt);
        if (analyze->parsed())
            return run_analyze(analyze_opt);
        if (report->parsed())
            return run_report(report_opt);
        if (workload->parsed())
            return run_workload(workload_opt);
    } catch (const leakscope::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
