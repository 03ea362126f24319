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

#ifndef LEAKSCOPE_TRACE_HPP
#define LEAKSCOPE_TRACE_HPP

#include "leakscope/measurement.hpp"

#include <iosfwd>
#include <string>

namespace leakscope {

/// Trace file format: the exact header `category,event,run,count`, then one
/// row per (sample, event) pair, sorted by (category, event, run). UTF-8,
/// `\n` line endings, no trailing whitespace: identical measurement content
/// always serializes to identical bytes.

/// Serializes ms to the trace format. Throws Errc::IoError on stream
/// failure; ms is validated first.
void write_trace(const MeasurementSet &ms, std::ostream &out);

/// Writes to a file path; "-" writes to standard output.
void write_trace_file(const MeasurementSet &ms, const std::string &path);

/// Parses a trace, inferring the event set from the rows and validating
/// every event against the catalog. Malformed input (bad header, ragged
/// row, non-integer count, duplicate triple, incomplete sample) raises
/// Errc::MalformedTrace with a line number where one applies;
/// unknown events raise Errc::UnknownEvent.
MeasurementSet read_trace(std::istream &in,
                          const EventCatalog &catalog = EventCatalog::builtin());

/// Reads from a file path; "-" reads standard input.
MeasurementSet read_trace_file(const std::string &path,
                               const EventCatalog &catalog = EventCatalog::builtin());

/// Union of two measurement sets over identical event sets. Run indices of
/// b are offset past a's per-category maxima, so the (category, event, run)
/// uniqueness invariant is preserved. Throws Errc::EventSetMismatch.
MeasurementSet merge_traces(const MeasurementSet &a, const MeasurementSet &b);

} // namespace leakscope

#endif // LEAKSCOPE_TRACE_HPP
