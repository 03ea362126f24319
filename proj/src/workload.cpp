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

#include "leakscope/workload.hpp"
#include "leakscope/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace leakscope {

void WorkloadProfile::validate(const EventCatalog &catalog) const {
    if (categories.empty())
        throw Error(Errc::InvalidProfile, "profile has no categories");

    std::set<std::string> labels;
    for (const auto &cat : categories) {
        if (cat.category.empty())
            throw Error(Errc::InvalidProfile, "empty category label");
        if (!labels.insert(cat.category).second)
            throw Error(Errc::InvalidProfile,
                        "duplicate category label '" + cat.category + "'");
        if (cat.event_models.empty())
            throw Error(Errc::InvalidProfile,
                        "category '" + cat.category + "' models no events");
        for (const auto &[event, model] : cat.event_models) {
            catalog.resolve(event);
            if (!(model.mean >= 0.0) || !std::isfinite(model.mean))
                throw Error(Errc::InvalidProfile,
                            "negative or non-finite mean for (" +
                                cat.category + ", " + event + ")");
            if (!(model.stddev >= 0.0) || !std::isfinite(model.stddev))
                throw Error(Errc::InvalidProfile,
                            "negative or non-finite stddev for (" +
                                cat.category + ", " + event + ")");
        }
    }

    // Every category must model the same events.
    const auto &first = categories.front();
    for (const auto &cat : categories) {
        if (cat.event_models.size() != first.event_models.size())
            throw Error(Errc::InvalidProfile,
                        "categories cover different event sets");
        auto it = first.event_models.begin();
        for (const auto &[event, model] : cat.event_models) {
            if (event != it->first)
                throw Error(Errc::InvalidProfile,
                            "categories cover different event sets");
            ++it;
        }
    }
}

std::vector<std::string> WorkloadProfile::category_labels() const {
    std::vector<std::string> out;
    out.reserve(categories.size());
    for (const auto &cat : categories)
        out.push_back(cat.category);
    return out;
}

std::vector<std::string> WorkloadProfile::event_names() const {
    std::vector<std::string> out;
    if (categories.empty())
        return out;
    for (const auto &[event, model] : categories.front().event_models)
        out.push_back(event);
    return out;
}

const CategoryProfile &
WorkloadProfile::find_category(const std::string &label) const {
    for (const auto &cat : categories)
        if (cat.category == label)
            return cat;
    throw Error(Errc::UnknownCategory,
                "category '" + label + "' is not in the profile");
}

const EventModel &WorkloadProfile::find_model(const std::string &category,
                                              const std::string &event) const {
    const CategoryProfile &cat = find_category(category);
    auto it = cat.event_models.find(event);
    if (it == cat.event_models.end())
        throw Error(Errc::UnknownEvent,
                    "event '" + event + "' is not modeled by the profile");
    return it->second;
}

WorkloadProfile WorkloadProfile::from_json_text(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::InvalidProfile,
                    std::string("profile is not valid JSON: ") + e.what());
    }

    try {
        WorkloadProfile profile;
        profile.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto &jcat : doc.at("categories")) {
            CategoryProfile cat;
            cat.category = jcat.at("category").get<std::string>();
            for (const auto &[event, jmodel] : jcat.at("events").items()) {
                EventModel model;
                model.mean = jmodel.at("mean").get<double>();
                model.stddev = jmodel.at("stddev").get<double>();
                cat.event_models.emplace(normalize_event_name(event), model);
            }
            profile.categories.push_back(std::move(cat));
        }
        return profile;
    } catch (const nlohmann::json::exception &e) {
        throw Error(Errc::InvalidProfile,
                    std::string("profile schema mismatch: ") + e.what());
    }
}

WorkloadProfile WorkloadProfile::load(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::IoError, "cannot open profile '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string WorkloadProfile::to_json_text() const {
    nlohmann::ordered_json doc;
    doc["seed"] = seed;
    doc["categories"] = nlohmann::ordered_json::array();
    for (const auto &cat : categories) {
        nlohmann::ordered_json jcat;
        jcat["category"] = cat.category;
        jcat["events"] = nlohmann::ordered_json::object();
        for (const auto &[event, model] : cat.event_models) {
            jcat["events"][event] = {{"mean", model.mean},
                                     {"stddev", model.stddev}};
        }
        doc["categories"].push_back(std::move(jcat));
    }
    return doc.dump(2) + "\n";
}

std::uint64_t substream_seed(std::uint64_t seed, const std::string &category,
                             const std::string &event) {
    // FNV-1a over (seed bytes, 0x1f, category, 0x1f, event). Adding a
    // category or event never perturbs another substream.
    constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    std::uint64_t hash = kOffset;
    auto mix = [&hash](unsigned char byte) {
        hash ^= byte;
        hash *= kPrime;
    };
    for (int i = 0; i < 8; ++i)
        mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
    mix(0x1f);
    for (char c : category)
        mix(static_cast<unsigned char>(c));
    mix(0x1f);
    for (char c : event)
        mix(static_cast<unsigned char>(c));
    return hash;
}

NormalStream::NormalStream(std::uint64_t stream_seed, double mean,
                           double stddev)
    : engine_(stream_seed), mean_(mean), stddev_(stddev) {}

std::uint64_t NormalStream::next_count() {
    // Box-Muller on two engine outputs per draw. std::normal_distribution
    // is implementation-defined, so it cannot back a cross-platform
    // golden-file contract; this transform can.
    const double u1 =
        1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53; // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    const double value = mean_ + stddev_ * z;
    if (value <= 0.0)
        return 0;
    return static_cast<std::uint64_t>(std::llround(value));
}

std::vector<std::uint64_t> simulate_counts(const WorkloadProfile &profile,
                                           const std::string &category,
                                           const std::string &event,
                                           std::size_t n) {
    const EventModel &model = profile.find_model(category, event);
    NormalStream stream(substream_seed(profile.seed, category, event),
                        model.mean, model.stddev);
    std::vector<std::uint64_t> counts;
    counts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        counts.push_back(stream.next_count());
    return counts;
}

namespace {

// Coarse, monotone mapping from profile means to loop work. Exact count
// targeting is hardware-specific; only ordering between categories matters.
constexpr std::size_t kWalkBufferBytes = std::size_t(64) << 20;
constexpr std::size_t kCacheLine = 64;
constexpr std::size_t kMaxTouches = std::size_t(1) << 28;
constexpr std::size_t kMaxBranches = std::size_t(1) << 30;

} // namespace

int run_scripted_workload(const WorkloadProfile &profile,
                          const std::string &category) {
    const CategoryProfile &cat = profile.find_category(category);

    auto mean_of = [&cat](const char *event) -> double {
        auto it = cat.event_models.find(event);
        return it != cat.event_models.end() ? it->second.mean : 0.0;
    };

    const auto touches = static_cast<std::size_t>(
        std::min(std::max(mean_of("cache-misses"), 0.0),
                 static_cast<double>(kMaxTouches)));
    const auto branch_iters = static_cast<std::size_t>(
        std::min(std::max(mean_of("branches"), 0.0),
                 static_cast<double>(kMaxBranches)));

    volatile std::uint64_t sink = 0;

    if (touches > 0) {
        // Pseudo-random walk over a buffer much larger than typical LLCs;
        // each touched line is a likely miss, so misses scale with the
        // touch count.
        std::vector<unsigned char> buffer(kWalkBufferBytes, 1);
        const std::size_t lines = buffer.size() / kCacheLine;
        std::uint64_t index = 0x9e3779b97f4a7c15ULL ^ touches;
        for (std::size_t i = 0; i < touches; ++i) {
            index = index * 6364136223846793005ULL + 1442695040888963407ULL;
            sink += buffer[(index % lines) * kCacheLine];
        }
    }

    if (branch_iters > 0) {
        // Data-dependent branches driven by an xorshift stream.
        std::uint64_t state = 0x2545f4914f6cdd1dULL ^ branch_iters;
        for (std::size_t i = 0; i < branch_iters; ++i) {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            if (state & 1)
                sink += i;
            else
                sink ^= i;
        }
    }

    (void)sink;
    return 0;
}

} // namespace leakscope
