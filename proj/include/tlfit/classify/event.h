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
 */

#pragma once

#include "tlfit/classify/layout.h"
#include "tlfit/faults/manifestation.h"
#include "tlfit/isa/interpreter.h"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlfit {

enum class Phase : std::uint8_t { BeforeKernel, DuringKernel, AfterKernel };

enum class EventCategory : std::uint8_t {
    SingleBit = 1,
    DoubleBit = 2,
    RandomValue = 3,
    TwoThreadRandom = 4,
    WarpDoubleBit = 5,
    WarpRandom = 6,
    WarpZero = 7,
    TwoWarpRandom = 8,
    CrashBeforeKernel,
    CrashDuringKernel,
    HangDuringKernel,
    Ignored,
    Uncategorized,
};

inline constexpr std::array<EventCategory, 13> kAllEventCategories = {
    EventCategory::SingleBit,         EventCategory::DoubleBit,
    EventCategory::RandomValue,       EventCategory::TwoThreadRandom,
    EventCategory::WarpDoubleBit,     EventCategory::WarpRandom,
    EventCategory::WarpZero,          EventCategory::TwoWarpRandom,
    EventCategory::CrashBeforeKernel, EventCategory::CrashDuringKernel,
    EventCategory::HangDuringKernel,  EventCategory::Ignored,
    EventCategory::Uncategorized,
};

std::string_view category_name(EventCategory c);
std::optional<EventCategory> category_from_name(std::string_view name);

/// Bit-type attribution. `fault` matters only for CrashDuringKernel.
BitType attribute(EventCategory c, std::optional<isa::FaultKind> fault = std::nullopt);

// The category a manifestation should produce when it hits one series value.
std::optional<EventCategory> expected_category(ManifestationKind k);

struct TraceResult {
    int origin = -1; // node index, -1 when nothing deviates
    std::vector<int> propagated;
    bool multi_origin = false;
    std::uint32_t observed = 0;
    std::uint32_t expected = 0;
};

/// Locate the first deviating node and check every later value against a
/// forward recomputation from that single origin. `values` are the dumped
/// registers starting at `layout.record_first`.
/// Throws InputError when the dump does not cover the layout.
TraceResult trace_origin(const std::vector<std::uint32_t> &values, const Layout &layout);

struct EventInput {
    isa::RunStatus status;
    Phase phase = Phase::DuringKernel;
    std::vector<isa::RecordEntry> records;
    int threads_per_warp = 32;
};

struct EventResult {
    EventCategory category = EventCategory::Ignored;
    BitType bit_type = BitType::Unattributed;
    std::optional<isa::FaultKind> fault;
    int origin = -1;      // node index shared by all deviating threads
    int origin_step = -1; // its series step
    int threads = 0;      // deviating threads
    int warps = 0;
    bool multi_origin = false;
};

EventResult categorize_event(const EventInput &input, const Layout &layout);

/// Counts per category and per attributed bit type.
struct CategoryHistogram {
    std::map<EventCategory, std::uint64_t> by_category;
    std::map<BitType, std::uint64_t> by_bit_type;
    std::uint64_t total = 0;

    void add(const EventResult &r);
    // Events that are crashes or hangs of any attribution.
    std::uint64_t crashes_and_hangs() const;
};

} // namespace tlfit
