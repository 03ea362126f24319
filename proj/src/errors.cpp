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

#include "leakscope/errors.hpp"

namespace leakscope {

std::string_view errc_name(Errc code) {
    switch (code) {
    case Errc::UnknownEvent:
        return "UnknownEvent";
    case Errc::DuplicateEvent:
        return "DuplicateEvent";
    case Errc::TooManyEvents:
        return "TooManyEvents";
    case Errc::UnknownCategory:
        return "UnknownCategory";
    case Errc::InvalidProfile:
        return "InvalidProfile";
    case Errc::InvalidTarget:
        return "InvalidTarget";
    case Errc::PermissionDenied:
        return "PermissionDenied";
    case Errc::BackendUnavailable:
        return "BackendUnavailable";
    case Errc::TargetFailed:
        return "TargetFailed";
    case Errc::CounterReadError:
        return "CounterReadError";
    case Errc::ReplayExhausted:
        return "ReplayExhausted";
    case Errc::InvalidPlan:
        return "InvalidPlan";
    case Errc::MalformedTrace:
        return "MalformedTrace";
    case Errc::EventSetMismatch:
        return "EventSetMismatch";
    case Errc::EmptySample:
        return "EmptySample";
    case Errc::InsufficientSamples:
        return "InsufficientSamples";
    case Errc::DegenerateVariance:
        return "DegenerateVariance";
    case Errc::InsufficientCategories:
        return "InsufficientCategories";
    case Errc::InvalidArgument:
        return "InvalidArgument";
    case Errc::IoError:
        return "IoError";
    }
    return "Error";
}

} // namespace leakscope
