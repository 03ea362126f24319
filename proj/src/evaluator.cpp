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

#include "leakscope/evaluator.hpp"
#include "leakscope/errors.hpp"
#include "leakscope/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace leakscope {

std::string_view correction_name(Correction c) {
    switch (c) {
    case Correction::None:
        return "none";
    case Correction::Bonferroni:
        return "bonferroni";
    }
    return "none";
}

Correction correction_from_name(std::string_view name) {
    if (name == "none")
        return Correction::None;
    if (name == "bonferroni")
        return Correction::Bonferroni;
    throw Error(Errc::InvalidArgument,
                "unknown correction '" + std::string(name) +
                    "' (expected none or bonferroni)");
}

ReportFormat report_format_from_name(std::string_view name) {
    if (name == "text")
        return ReportFormat::Text;
    if (name == "json")
        return ReportFormat::Json;
    if (name == "markdown")
        return ReportFormat::Markdown;
    throw Error(Errc::InvalidArgument,
                "unknown format '" + std::string(name) +
                    "' (expected text, json or markdown)");
}

void LeakageReport::recompute_decisions() {
    distinguishable.clear();
    for (const auto &pair : pairs)
        if (pair.result.reject)
            distinguishable.push_back(
                {pair.event, pair.category_a, pair.category_b});
    alarm = !distinguishable.empty();
}

HistogramData histogram(std::span<const std::uint64_t> counts,
                        std::size_t bins) {
    if (counts.empty())
        throw Error(Errc::EmptySample, "cannot bin an empty sample");
    if (bins == 0)
        throw Error(Errc::InvalidArgument, "need at least one bin");

    const auto [min_it, max_it] = std::minmax_element(counts.begin(),
                                                      counts.end());
    const double lo = static_cast<double>(*min_it);
    const double hi = static_cast<double>(*max_it);

    HistogramData data;
    if (lo == hi) {
        data.bin_edges = {lo - 0.5, lo + 0.5};
        data.frequencies = {counts.size()};
        return data;
    }

    const double width = (hi - lo) / static_cast<double>(bins);
    data.bin_edges.reserve(bins + 1);
    for (std::size_t i = 0; i < bins; ++i)
        data.bin_edges.push_back(lo + width * static_cast<double>(i));
    data.bin_edges.push_back(hi);

    data.frequencies.assign(bins, 0);
    for (std::uint64_t value : counts) {
        auto idx = static_cast<std::size_t>(
            (static_cast<double>(value) - lo) / width);
        if (idx >= bins)
            idx = bins - 1; // right edge of the last bin is inclusive
        ++data.frequencies[idx];
    }
    return data;
}

LeakageReport evaluate(const MeasurementSet &ms, double alpha,
                       Correction correction, std::size_t histogram_bins) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(Errc::InvalidArgument,
                    "alpha must lie strictly between 0 and 1");
    ms.validate();

    LeakageReport report;
    report.alpha = alpha;
    report.correction = correction;
    report.events = ms.events.names();
    report.categories = ms.categories();
    report.metadata = {.source = "",
                       .backend = ms.metadata.backend,
                       .tool_version = kVersion};

    const std::size_t k = report.categories.size();
    if (k < 2)
        throw Error(Errc::InsufficientCategories,
                    "need at least 2 categories, got " + std::to_string(k));

    // Per-category distributions, summaries and histograms.
    std::map<std::pair<std::string, std::string>, std::vector<std::uint64_t>>
        distributions;
    for (const auto &category : report.categories) {
        for (const auto &event : report.events) {
            auto counts = ms.counts_for(category, event);
            if (counts.size() < 2)
                throw Error(Errc::InsufficientSamples,
                            "category '" + category + "', event '" + event +
                                "' has " + std::to_string(counts.size()) +
                                " samples; need at least 2");
            const auto key = std::make_pair(category, event);
            report.summaries[key] = summarize(counts);
            report.histograms[key] = histogram(counts, histogram_bins);
            distributions[key] = std::move(counts);
        }
    }

    const std::size_t pairs_per_event = k * (k - 1) / 2;
    const double effective_alpha = correction == Correction::Bonferroni
                                       ? alpha / static_cast<double>(pairs_per_event)
                                       : alpha;

    for (const auto &event : report.events) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                const std::string &a = report.categories[i];
                const std::string &b = report.categories[j];
                PairResult pair;
                pair.event = event;
                pair.category_a = a;
                pair.category_b = b;
                pair.result = t_test(
                    std::span<const std::uint64_t>(distributions.at({a, event})),
                    std::span<const std::uint64_t>(distributions.at({b, event})),
                    effective_alpha);
                report.pairs.push_back(std::move(pair));
            }
        }
    }

    report.recompute_decisions();
    return report;
}

std::map<EventPair, bool> decision_pattern(const LeakageReport &report) {
    std::map<EventPair, bool> pattern;
    for (const auto &pair : report.pairs)
        pattern[{pair.event, pair.category_a, pair.category_b}] =
            pair.result.reject;
    return pattern;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string format_fixed(double value, int decimals) {
    if (std::isinf(value))
        return value > 0 ? "+inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

nlohmann::ordered_json t_to_json(double t) {
    if (std::isinf(t))
        return t > 0 ? "+inf" : "-inf";
    return t;
}

double t_from_json(const nlohmann::json &j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        throw Error(Errc::InvalidArgument,
                    "bad t value '" + s + "' in report");
    }
    return j.get<double>();
}

nlohmann::ordered_json report_to_json(const LeakageReport &report) {
    nlohmann::ordered_json doc;
    doc["alpha"] = report.alpha;
    doc["correction"] = std::string(correction_name(report.correction));
    doc["events"] = report.events;
    doc["categories"] = report.categories;

    doc["summaries"] = nlohmann::ordered_json::array();
    for (const auto &category : report.categories) {
        for (const auto &event : report.events) {
            auto it = report.summaries.find({category, event});
            if (it == report.summaries.end())
                continue;
            doc["summaries"].push_back({{"category", category},
                                        {"event", event},
                                        {"n", it->second.n},
                                        {"mean", it->second.mean},
                                        {"variance", it->second.variance}});
        }
    }

    doc["pairs"] = nlohmann::ordered_json::array();
    for (const auto &pair : report.pairs) {
        nlohmann::ordered_json jpair;
        jpair["event"] = pair.event;
        jpair["a"] = pair.category_a;
        jpair["b"] = pair.category_b;
        jpair["t"] = t_to_json(pair.result.t);
        jpair["df"] = pair.result.df ? nlohmann::ordered_json(*pair.result.df)
                                     : nlohmann::ordered_json(nullptr);
        jpair["p"] = pair.result.p;
        jpair["reject"] = pair.result.reject;
        doc["pairs"].push_back(std::move(jpair));
    }

    doc["distinguishable"] = nlohmann::ordered_json::array();
    for (const auto &entry : report.distinguishable)
        doc["distinguishable"].push_back({{"event", entry.event},
                                          {"a", entry.category_a},
                                          {"b", entry.category_b}});

    doc["alarm"] = report.alarm;

    doc["histograms"] = nlohmann::ordered_json::array();
    for (const auto &category : report.categories) {
        for (const auto &event : report.events) {
            auto it = report.histograms.find({category, event});
            if (it == report.histograms.end())
                continue;
            doc["histograms"].push_back({{"category", category},
                                         {"event", event},
                                         {"bin_edges", it->second.bin_edges},
                                         {"frequencies", it->second.frequencies}});
        }
    }

    doc["metadata"] = {{"source", report.metadata.source},
                       {"backend", report.metadata.backend},
                       {"tool_version", report.metadata.tool_version}};
    return doc;
}

std::string render_text(const LeakageReport &report) {
    std::ostringstream out;
    out << "leakage evaluation (alpha " << format_fixed(report.alpha, 4)
        << ", correction " << correction_name(report.correction) << ")\n";
    out << report.categories.size() << " categories, " << report.events.size()
        << " events, " << report.pairs.size() << " category pairs tested\n";

    out << "\nper-category means\n";
    for (const auto &event : report.events) {
        out << "  " << event << "\n";
        for (const auto &category : report.categories) {
            auto it = report.summaries.find({category, event});
            if (it == report.summaries.end())
                continue;
            out << "    " << category << ": n=" << it->second.n
                << " mean=" << format_fixed(it->second.mean, 2)
                << " variance=" << format_fixed(it->second.variance, 2) << "\n";
        }
    }

    for (const auto &event : report.events) {
        std::size_t rejected = 0;
        out << "\n" << event << "\n";
        out << "  pair                     t-value      p-value  distinguishable\n";
        for (const auto &pair : report.pairs) {
            if (pair.event != event)
                continue;
            char label[64];
            std::snprintf(label, sizeof(label), "(%s, %s)",
                          pair.category_a.c_str(), pair.category_b.c_str());
            char line[160];
            std::snprintf(line, sizeof(line), "  %-20s %12s %12s  %s\n", label,
                          format_fixed(pair.result.t, 4).c_str(),
                          format_fixed(pair.result.p, 4).c_str(),
                          pair.result.reject ? "yes" : "no");
            out << line;
            if (pair.result.reject)
                ++rejected;
        }
        out << "  " << rejected << "/" << (report.pairs.size() /
                                           std::max<std::size_t>(
                                               report.events.size(), 1))
            << " pairs distinguishable\n";
    }

    out << "\n";
    if (report.alarm)
        out << "ALARM: input-dependent leakage detected ("
            << report.distinguishable.size() << " distinguishable pairs)\n";
    else
        out << "OK: no category pair is distinguishable at alpha "
            << format_fixed(report.alpha, 4) << "\n";
    return out.str();
}

std::string render_markdown(const LeakageReport &report) {
    std::ostringstream out;
    out << "# Leakage report\n\n";
    out << "- alpha: " << format_fixed(report.alpha, 4) << "\n";
    out << "- correction: " << correction_name(report.correction) << "\n";
    out << "- alarm: " << (report.alarm ? "**yes**" : "no") << "\n\n";

    // One row per category pair, one (t, p) column group per event;
    // distinguishable entries in bold.
    out << "| pair |";
    for (const auto &event : report.events)
        out << " " << event << " t | " << event << " p |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.events.size(); ++i)
        out << "---|---|";
    out << "\n";

    const std::size_t k = report.categories.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const std::string &a = report.categories[i];
            const std::string &b = report.categories[j];
            out << "| (" << a << ", " << b << ") |";
            for (const auto &event : report.events) {
                const PairResult *found = nullptr;
                for (const auto &pair : report.pairs)
                    if (pair.event == event && pair.category_a == a &&
                        pair.category_b == b) {
                        found = &pair;
                        break;
                    }
                if (found == nullptr) {
                    out << " - | - |";
                    continue;
                }
                const std::string t = format_fixed(found->result.t, 4);
                const std::string p = format_fixed(found->result.p, 4);
                if (found->result.reject)
                    out << " **" << t << "** | **" << p << "** |";
                else
                    out << " " << t << " | " << p << " |";
            }
            out << "\n";
        }
    }

    out << "\n";
    if (report.alarm)
        out << "ALARM: input-dependent leakage detected ("
            << report.distinguishable.size() << " distinguishable pairs)\n";
    else
        out << "OK: no category pair is distinguishable at alpha "
            << format_fixed(report.alpha, 4) << "\n";
    return out.str();
}

} // namespace

std::string render_report(const LeakageReport &report, ReportFormat format) {
    switch (format) {
    case ReportFormat::Json:
        return report_to_json(report).dump(2) + "\n";
    case ReportFormat::Text:
        return render_text(report);
    case ReportFormat::Markdown:
        return render_markdown(report);
    }
    throw Error(Errc::InvalidArgument, "unknown report format");
}

LeakageReport report_from_json(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::InvalidArgument,
                    std::string("report is not valid JSON: ") + e.what());
    }

    try {
        LeakageReport report;
        report.alpha = doc.at("alpha").get<double>();
        report.correction =
            correction_from_name(doc.at("correction").get<std::string>());
        report.events = doc.at("events").get<std::vector<std::string>>();
        report.categories =
            doc.at("categories").get<std::vector<std::string>>();

        for (const auto &jsummary : doc.at("summaries")) {
            SummaryStats stats;
            stats.n = jsummary.at("n").get<std::size_t>();
            stats.mean = jsummary.at("mean").get<double>();
            stats.variance = jsummary.at("variance").get<double>();
            report.summaries[{jsummary.at("category").get<std::string>(),
                              jsummary.at("event").get<std::string>()}] = stats;
        }

        // The per-pair decision level is derivable from the report-level
        // alpha and correction.
        const std::size_t k = report.categories.size();
        const std::size_t pairs_per_event = k >= 2 ? k * (k - 1) / 2 : 1;
        const double effective_alpha =
            report.correction == Correction::Bonferroni
                ? report.alpha / static_cast<double>(pairs_per_event)
                : report.alpha;

        for (const auto &jpair : doc.at("pairs")) {
            PairResult pair;
            pair.event = jpair.at("event").get<std::string>();
            pair.category_a = jpair.at("a").get<std::string>();
            pair.category_b = jpair.at("b").get<std::string>();
            pair.result.t = t_from_json(jpair.at("t"));
            if (!jpair.at("df").is_null())
                pair.result.df = jpair.at("df").get<double>();
            pair.result.p = jpair.at("p").get<double>();
            pair.result.alpha = effective_alpha;
            pair.result.reject = jpair.at("reject").get<bool>();
            report.pairs.push_back(std::move(pair));
        }

        for (const auto &jhist : doc.at("histograms")) {
            HistogramData data;
            data.bin_edges = jhist.at("bin_edges").get<std::vector<double>>();
            data.frequencies =
                jhist.at("frequencies").get<std::vector<std::uint64_t>>();
            report.histograms[{jhist.at("category").get<std::string>(),
                               jhist.at("event").get<std::string>()}] =
                std::move(data);
        }

        const auto &jmeta = doc.at("metadata");
        report.metadata.source = jmeta.at("source").get<std::string>();
        report.metadata.backend = jmeta.at("backend").get<std::string>();
        report.metadata.tool_version =
            jmeta.at("tool_version").get<std::string>();

        report.recompute_decisions();
        if (report.alarm != doc.at("alarm").get<bool>())
            throw Error(Errc::InvalidArgument,
                        "alarm flag contradicts the pairs' reject flags");
        return report;
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::InvalidArgument,
                    std::string("report schema mismatch: ") + e.what());
    }
}

} // namespace leakscope
