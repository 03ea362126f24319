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

#ifndef LEAKSCOPE_ERRORS_HPP
#define LEAKSCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace leakscope {

/// Machine-checkable classification of every failure the library can raise.
enum class Errc {
    UnknownEvent,
    DuplicateEvent,
    TooManyEvents,
    UnknownCategory,
    InvalidProfile,
    InvalidTarget,
    PermissionDenied,
    BackendUnavailable,
    TargetFailed,
    CounterReadError,
    ReplayExhausted,
    InvalidPlan,
    MalformedTrace,
    EventSetMismatch,
    EmptySample,
    InsufficientSamples,
    DegenerateVariance,
    InsufficientCategories,
    InvalidArgument,
    IoError,
};

std::string_view errc_name(Errc code);

/// All library failures are reported through this exception. The code
/// discriminates; the message carries context (event names, line numbers,
/// offending categories).
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

} // namespace leakscope

#endif // LEAKSCOPE_ERRORS_HPP
