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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "leakscope/errors.hpp"
#include "leakscope/events.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

using namespace leakscope;

namespace {

Errc code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::InvalidArgument;
}

} // namespace

TEST_CASE("builtin catalog content") {
    const EventCatalog &cat = EventCatalog::builtin();
    CHECK(cat.entries().size() == 8);
    CHECK(cat.resolve("cache-misses").kind == EventKind::Cache);
    CHECK(cat.resolve("cache-references").kind == EventKind::Cache);
    CHECK(cat.resolve("branches").kind == EventKind::Hardware);
    CHECK(cat.resolve("branch-misses").kind == EventKind::Hardware);
    CHECK(cat.resolve("instructions").kind == EventKind::Hardware);
    CHECK(cat.resolve("cpu-cycles").kind == EventKind::Hardware);
    CHECK(cat.resolve("page-faults").kind == EventKind::Software);
    CHECK(cat.resolve("context-switches").kind == EventKind::Software);
}

TEST_CASE("resolve normalizes case and whitespace") {
    const EventCatalog &cat = EventCatalog::builtin();
    CHECK(cat.resolve("  Cache-Misses ").name == "cache-misses");
    CHECK(cat.resolve("BRANCHES").name == "branches");
    CHECK(code_of([&] { cat.resolve("tlb-misses"); }) == Errc::UnknownEvent);
}

TEST_CASE("normalize_event_name") {
    CHECK(normalize_event_name("  Foo-Bar\t") == "foo-bar");
    CHECK(normalize_event_name("x") == "x");
    CHECK(normalize_event_name("   ") == "");
}

TEST_CASE("build_event_set preserves order and rejects bad input") {
    const EventSet set = build_event_set({"branches", "cache-misses"});
    REQUIRE(set.size() == 2);
    CHECK(set.names() == std::vector<std::string>{"branches", "cache-misses"});
    CHECK(set.contains("cache-misses"));
    CHECK_FALSE(set.contains("instructions"));

    CHECK(code_of([] { build_event_set({}); }) == Errc::InvalidArgument);
    CHECK(code_of([] {
              build_event_set({"branches"}, 0);
          }) == Errc::InvalidArgument);
    CHECK(code_of([] {
              build_event_set({"branches", "Branches"});
          }) == Errc::DuplicateEvent);
    CHECK(code_of([] {
              build_event_set({"nope"});
          }) == Errc::UnknownEvent);
}

TEST_CASE("build_event_set enforces the parallel cap") {
    std::vector<std::string> all{"cache-misses",  "cache-references",
                                 "branches",      "branch-misses",
                                 "instructions",  "cpu-cycles",
                                 "page-faults",   "context-switches"};
    CHECK(build_event_set(all).size() == 8);
    CHECK(code_of([&] {
              build_event_set(all, 4);
          }) == Errc::TooManyEvents);

    // Cap check fires before duplicate detection.
    std::vector<std::string> nine = all;
    nine.push_back("branches");
    CHECK(code_of([&] { build_event_set(nine); }) == Errc::TooManyEvents);
}

TEST_CASE("catalog extension file") {
    const std::string path = "extensions_test.csv";
    {
        std::ofstream out(path);
        out << "# custom PMU events\n";
        out << "\n";
        out << "llc-load-misses,cache,last-level cache load misses\n";
        out << "stalled-cycles-frontend , hardware , frontend stalls\n";
    }
    const EventCatalog cat = EventCatalog::with_extensions(path);
    CHECK(cat.entries().size() == 10);
    CHECK(cat.resolve("llc-load-misses").kind == EventKind::Cache);
    CHECK(cat.resolve("stalled-cycles-frontend").kind == EventKind::Hardware);
    CHECK(cat.resolve("branches").name == "branches");

    const EventSet set =
        build_event_set({"llc-load-misses", "branches"}, 8, cat);
    CHECK(set.size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("catalog extension rejects redefinition and bad lines") {
    const std::string path = "extensions_bad.csv";
    {
        std::ofstream out(path);
        out << "branches,hardware,shadowing a builtin\n";
    }
    CHECK(code_of([&] {
              EventCatalog::with_extensions(path);
          }) == Errc::DuplicateEvent);

    {
        std::ofstream out(path);
        out << "no-kind-field\n";
    }
    CHECK(code_of([&] {
              EventCatalog::with_extensions(path);
          }) == Errc::InvalidArgument);

    CHECK(code_of([] {
              EventCatalog::with_extensions("missing-file.csv");
          }) == Errc::IoError);
    std::remove(path.c_str());
}

TEST_CASE("event kind names round-trip") {
    for (EventKind k :
         {EventKind::Hardware, EventKind::Software, EventKind::Cache})
        CHECK(event_kind_from_name(event_kind_name(k)) == k);
    CHECK_THROWS_AS(event_kind_from_name("quantum"), Error);
}
