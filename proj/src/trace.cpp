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

#include "leakscope/trace.hpp"
#include "leakscope/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace leakscope {

namespace {

constexpr const char *kHeader = "category,event,run,count";

bool is_safe_label(const std::string &label) {
    if (label.empty())
        return false;
    return label.find_first_of(",\n\r") == std::string::npos;
}

struct TraceRow {
    std::string category;
    std::string event;
    std::uint64_t run;
    std::uint64_t count;
};

std::uint64_t parse_u64(const std::string &field, const char *what,
                        std::size_t line_no) {
    std::uint64_t value = 0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty())
        throw Error(Errc::MalformedTrace,
                    "line " + std::to_string(line_no) + ": " + what + " '" +
                        field + "' is not a nonnegative integer");
    return value;
}

} // namespace

void write_trace(const MeasurementSet &ms, std::ostream &out) {
    ms.validate();

    std::vector<TraceRow> rows;
    rows.reserve(ms.samples.size() * ms.events.size());
    for (const auto &sample : ms.samples)
        for (const auto &[event, count] : sample.counts)
            rows.push_back({sample.category, event, sample.run_index, count});

    std::sort(rows.begin(), rows.end(), [](const TraceRow &a, const TraceRow &b) {
        return std::tie(a.category, a.event, a.run) <
               std::tie(b.category, b.event, b.run);
    });

    out << kHeader << '\n';
    for (const auto &row : rows)
        out << row.category << ',' << row.event << ',' << row.run << ','
            << row.count << '\n';
    if (!out)
        throw Error(Errc::IoError, "failed writing trace");
}

void write_trace_file(const MeasurementSet &ms, const std::string &path) {
    if (path == "-") {
        write_trace(ms, std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
    write_trace(ms, out);
}

MeasurementSet read_trace(std::istream &in, const EventCatalog &catalog) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line))
        throw Error(Errc::MalformedTrace, "empty input, expected header");
    ++line_no;
    if (line != kHeader)
        throw Error(Errc::MalformedTrace,
                    "line 1: bad header '" + line + "', expected '" +
                        std::string(kHeader) + "'");

    std::vector<TraceRow> rows;
    std::set<std::tuple<std::string, std::string, std::uint64_t>> triples;
    std::set<std::string> event_names;

    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 4)
            throw Error(Errc::MalformedTrace,
                        "line " + std::to_string(line_no) + ": expected 4 " +
                            "fields, got " + std::to_string(fields.size()));

        TraceRow row;
        row.category = fields[0];
        row.event = fields[1];
        if (!is_safe_label(row.category))
            throw Error(Errc::MalformedTrace,
                        "line " + std::to_string(line_no) +
                            ": empty category label");
        row.run = parse_u64(fields[2], "run", line_no);
        row.count = parse_u64(fields[3], "count", line_no);

        if (!triples.insert({row.category, row.event, row.run}).second)
            throw Error(Errc::MalformedTrace,
                        "line " + std::to_string(line_no) + ": duplicate (" +
                            row.category + ", " + row.event + ", " +
                            std::to_string(row.run) + ")");
        event_names.insert(row.event);
        rows.push_back(std::move(row));
    }

    if (rows.empty())
        throw Error(Errc::MalformedTrace, "no samples");

    MeasurementSet ms;
    ms.events = catalog.make_event_set_unchecked(
        {event_names.begin(), event_names.end()});
    ms.metadata.backend = "trace";

    std::map<std::pair<std::string, std::uint64_t>, Sample> grouped;
    for (const auto &row : rows) {
        Sample &sample = grouped[{row.category, row.run}];
        sample.category = row.category;
        sample.run_index = row.run;
        sample.counts.emplace(row.event, row.count);
    }
    for (auto &[key, sample] : grouped) {
        if (sample.counts.size() != event_names.size())
            throw Error(Errc::MalformedTrace,
                        "sample (" + sample.category + ", run " +
                            std::to_string(sample.run_index) +
                            ") covers only " +
                            std::to_string(sample.counts.size()) + " of " +
                            std::to_string(event_names.size()) + " events");
        ms.samples.push_back(std::move(sample));
    }

    ms.validate();
    return ms;
}

MeasurementSet read_trace_file(const std::string &path,
                               const EventCatalog &catalog) {
    if (path == "-")
        return read_trace(std::cin, catalog);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
    return read_trace(in, catalog);
}

MeasurementSet merge_traces(const MeasurementSet &a, const MeasurementSet &b) {
    a.validate();
    b.validate();

    std::vector<std::string> ea = a.events.names();
    std::vector<std::string> eb = b.events.names();
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    if (ea != eb)
        throw Error(Errc::EventSetMismatch,
                    "cannot merge traces over different event sets");

    // b's run indices are shifted past a's per-category maxima.
    std::map<std::string, std::uint64_t> next_run;
    for (const auto &sample : a.samples) {
        auto [it, inserted] = next_run.emplace(sample.category,
                                               sample.run_index + 1);
        if (!inserted)
            it->second = std::max(it->second, sample.run_index + 1);
    }

    MeasurementSet merged;
    merged.events = a.events;
    merged.samples = a.samples;
    merged.metadata = a.metadata;
    merged.metadata.backend = "merged";
    for (const auto &sample : b.samples) {
        Sample shifted = sample;
        auto it = next_run.find(sample.category);
        if (it != next_run.end())
            shifted.run_index += it->second;
        merged.samples.push_back(std::move(shifted));
    }

    merged.validate();
    return merged;
}

} // namespace leakscope
