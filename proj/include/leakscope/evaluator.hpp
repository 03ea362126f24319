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

#ifndef LEAKSCOPE_EVALUATOR_HPP
#define LEAKSCOPE_EVALUATOR_HPP

#include "leakscope/measurement.hpp"
#include "leakscope/stats.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace leakscope {

/// Result of the t-test on one event for one unordered category pair.
/// category_a < category_b lexicographically; t is computed with
/// category_a's distribution first.
struct PairResult {
    std::string event;
    std::string category_a;
    std::string category_b;
    TTestResult result;
};

/// Equal-width binned view of one (category, event) distribution; the data
/// behind the usual per-category histogram plots.
struct HistogramData {
    std::vector<double> bin_edges;          // length k+1, strictly increasing
    std::vector<std::uint64_t> frequencies; // length k, sums to sample count
};

enum class Correction { None, Bonferroni };

std::string_view correction_name(Correction c);
Correction correction_from_name(std::string_view name);

struct ReportMetadata {
    std::string source;
    std::string backend;
    std::string tool_version;
};

struct EventPair {
    std::string event;
    std::string category_a;
    std::string category_b;

    auto operator<=>(const EventPair &) const = default;
};

/// Full pairwise leakage assessment: one t-test per (event, category pair),
/// per-category summaries and histograms, and the alarm verdict.
struct LeakageReport {
    double alpha = 0.05;
    Correction correction = Correction::None;
    std::vector<std::string> events;
    std::vector<std::string> categories;
    /// Keyed by (category, event).
    std::map<std::pair<std::string, std::string>, SummaryStats> summaries;
    std::vector<PairResult> pairs;
    std::vector<EventPair> distinguishable;
    bool alarm = false;
    std::map<std::pair<std::string, std::string>, HistogramData> histograms;
    ReportMetadata metadata;

    /// Recomputes `distinguishable` and `alarm` from the pairs' reject
    /// flags, restoring the report invariants after manual assembly.
    void recompute_decisions();
};

inline constexpr std::size_t kDefaultHistogramBins = 30;

/// Runs the two-step methodology: per-category distributions of every
/// event, then a Welch t-test per (event, unordered category pair). With
/// Bonferroni correction the per-pair level is alpha / C(|categories|, 2).
/// Requires >= 2 categories (Errc::InsufficientCategories) and >= 2 samples
/// per (category, event) (Errc::InsufficientSamples, naming the offender).
LeakageReport evaluate(const MeasurementSet &ms, double alpha = 0.05,
                       Correction correction = Correction::None,
                       std::size_t histogram_bins = kDefaultHistogramBins);

/// Projection of the reject flags, keyed for golden-file comparison.
std::map<EventPair, bool> decision_pattern(const LeakageReport &report);

/// Equal-width bins spanning [min, max], right edge inclusive on the last
/// bin. All-equal input degenerates to one bin of width 1 centered on the
/// value. Throws Errc::EmptySample / Errc::InvalidArgument (bins == 0).
HistogramData histogram(std::span<const std::uint64_t> counts,
                        std::size_t bins);

enum class ReportFormat { Text, Json, Markdown };

ReportFormat report_format_from_name(std::string_view name);

/// Byte-deterministic rendering. Text and markdown mirror the paper-style
/// per-event pairwise table of t and p values with distinguishable pairs
/// marked; json is the canonical machine format.
std::string render_report(const LeakageReport &report, ReportFormat format);

/// Parses the canonical JSON format back into a report. Throws
/// Errc::InvalidArgument on schema mismatch. render(Json) of the result
/// reproduces the input bytes.
LeakageReport report_from_json(const std::string &text);

} // namespace leakscope

#endif // LEAKSCOPE_EVALUATOR_HPP
