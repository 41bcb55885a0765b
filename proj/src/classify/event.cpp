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

#include "tlfit/classify/event.h"

#include "tlfit/error.h"

#include <algorithm>
#include <bit>
#include <set>

namespace tlfit {

namespace {
constexpr std::array<std::string_view, 13> kCategoryNames = {
    "cat1_single_bit",     "cat2_double_bit",     "cat3_random_value",
    "cat4_two_thread_random", "cat5_warp_double_bit", "cat6_warp_random",
    "cat7_warp_zero",      "cat8_two_warp_random", "crash_before_kernel",
    "crash_during_kernel", "hang_during_kernel",  "ignored",
    "uncategorized",
};

std::size_t category_slot(EventCategory c) { return static_cast<std::size_t>(c) - 1; }
} // namespace

std::string_view category_name(EventCategory c) { return kCategoryNames[category_slot(c)]; }

std::optional<EventCategory> category_from_name(std::string_view name) {
    for (auto c : kAllEventCategories)
        if (category_name(c) == name)
            return c;
    return std::nullopt;
}

BitType attribute(EventCategory c, std::optional<isa::FaultKind> fault) {
    switch (c) {
    case EventCategory::SingleBit:
    case EventCategory::DoubleBit:
    case EventCategory::RandomValue:
    case EventCategory::TwoThreadRandom:
        return BitType::F;
    case EventCategory::WarpDoubleBit:
    case EventCategory::WarpRandom:
    case EventCategory::WarpZero:
    case EventCategory::TwoWarpRandom:
        return BitType::IS;
    case EventCategory::CrashBeforeKernel:
        return BitType::IM;
    case EventCategory::CrashDuringKernel:
        if (!fault)
            return BitType::Unattributed;
        return *fault == isa::FaultKind::IllegalInstruction ? BitType::IS : BitType::F;
    case EventCategory::HangDuringKernel:
    case EventCategory::Ignored:
    case EventCategory::Uncategorized:
        return BitType::Unattributed;
    }
    return BitType::Unattributed;
}

std::optional<EventCategory> expected_category(ManifestationKind k) {
    switch (k) {
    case ManifestationKind::SingleBit:
        return EventCategory::SingleBit;
    case ManifestationKind::DoubleBit:
        return EventCategory::DoubleBit;
    case ManifestationKind::RandomValue:
        return EventCategory::RandomValue;
    case ManifestationKind::TwoThreadRandom:
        return EventCategory::TwoThreadRandom;
    case ManifestationKind::WarpDoubleBit:
        return EventCategory::WarpDoubleBit;
    case ManifestationKind::WarpRandom:
        return EventCategory::WarpRandom;
    case ManifestationKind::WarpZero:
        return EventCategory::WarpZero;
    case ManifestationKind::TwoWarpRandom:
        return EventCategory::TwoWarpRandom;
    case ManifestationKind::Crash:
    case ManifestationKind::Hang:
        return std::nullopt;
    }
    return std::nullopt;
}

TraceResult trace_origin(const std::vector<std::uint32_t> &values, const Layout &layout) {
    const auto n = layout.nodes.size();
    std::vector<std::uint32_t> observed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &node = layout.nodes[i];
        const int slot = node.reg - layout.record_first;
        if (slot < 0 || static_cast<std::size_t>(slot) >= values.size())
            throw InputError("malformed dump: register R" + std::to_string(node.reg) +
                             " of node '" + node.name + "' not recorded");
        auto v = values[static_cast<std::size_t>(slot)];
        observed[i] = node.bit >= 0 ? (v >> node.bit) & 1u : v;
    }

    TraceResult tr;
    for (std::size_t i = 0; i < n; ++i)
        if (observed[i] != layout.nodes[i].expected) {
            tr.origin = static_cast<int>(i);
            break;
        }
    if (tr.origin < 0)
        return tr;
    tr.observed = observed[static_cast<std::size_t>(tr.origin)];
    tr.expected = layout.nodes[static_cast<std::size_t>(tr.origin)].expected;

    std::vector<std::uint32_t> predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &node = layout.nodes[i];
        if (static_cast<int>(i) == tr.origin)
            predicted[i] = observed[i];
        else
            predicted[i] = evaluate_node(node, predicted);
        if (predicted[i] != observed[i])
            tr.multi_origin = true;
        if (static_cast<int>(i) > tr.origin && observed[i] != node.expected)
            tr.propagated.push_back(static_cast<int>(i));
    }
    return tr;
}

EventResult categorize_event(const EventInput &input, const Layout &layout) {
    EventResult res;
    auto finish = [&](EventCategory c) {
        res.category = c;
        res.bit_type = attribute(c, res.fault);
        return res;
    };

    using Kind = isa::RunStatus::Kind;
    if (input.status.kind == Kind::Fault || (input.phase == Phase::BeforeKernel &&
                                             !input.status.clean_exit())) {
        res.fault = input.status.kind == Kind::Fault
                        ? std::optional<isa::FaultKind>(input.status.fault)
                        : std::nullopt;
        return finish(input.phase == Phase::BeforeKernel ? EventCategory::CrashBeforeKernel
                                                         : EventCategory::CrashDuringKernel);
    }
    if (input.status.kind == Kind::Hang)
        return finish(EventCategory::HangDuringKernel);

    struct Dev {
        int warp;
        int thread;
        TraceResult trace;
    };
    std::vector<Dev> devs;
    for (const auto &e : input.records) {
        std::vector<std::uint32_t> values = e.values;
        // Align the dump with the layout's first register.
        if (e.first_reg != layout.record_first) {
            const int shift = layout.record_first - e.first_reg;
            if (shift < 0 || static_cast<std::size_t>(shift) > values.size())
                throw InputError("malformed dump: record does not cover the layout");
            values.erase(values.begin(), values.begin() + shift);
        }
        auto tr = trace_origin(values, layout);
        if (tr.origin >= 0)
            devs.push_back({e.warp, e.thread, std::move(tr)});
    }
    if (devs.empty())
        return finish(EventCategory::Ignored);

    std::set<int> warps;
    std::set<std::pair<int, int>> threads;
    bool same_origin = true;
    for (const auto &d : devs) {
        warps.insert(d.warp);
        threads.insert({d.warp, d.thread});
        res.multi_origin = res.multi_origin || d.trace.multi_origin;
        same_origin = same_origin && d.trace.origin == devs.front().trace.origin;
    }
    res.threads = static_cast<int>(threads.size());
    res.warps = static_cast<int>(warps.size());
    if (!same_origin || res.multi_origin || threads.size() != devs.size())
        return finish(EventCategory::Uncategorized);
    res.origin = devs.front().trace.origin;
    res.origin_step = layout.nodes[static_cast<std::size_t>(res.origin)].step;

    auto hd = [](const Dev &d) { return std::popcount(d.trace.observed ^ d.trace.expected); };
    const int tpw = input.threads_per_warp;

    if (res.warps == 1) {
        if (res.threads == 1) {
            const int h = hd(devs.front());
            return finish(h == 1   ? EventCategory::SingleBit
                          : h == 2 ? EventCategory::DoubleBit
                                   : EventCategory::RandomValue);
        }
        if (res.threads == tpw) {
            if (std::all_of(devs.begin(), devs.end(),
                            [](const Dev &d) { return d.trace.observed == 0; }))
                return finish(EventCategory::WarpZero);
            if (std::all_of(devs.begin(), devs.end(), [&](const Dev &d) { return hd(d) == 2; }))
                return finish(EventCategory::WarpDoubleBit);
            return finish(EventCategory::WarpRandom);
        }
        if (res.threads == 2)
            return finish(EventCategory::TwoThreadRandom);
        return finish(EventCategory::Uncategorized);
    }
    if (res.warps == 2 && res.threads == 2 * tpw)
        return finish(EventCategory::TwoWarpRandom);
    return finish(EventCategory::Uncategorized);
}

void CategoryHistogram::add(const EventResult &r) {
    ++by_category[r.category];
    ++by_bit_type[r.bit_type];
    ++total;
}

std::uint64_t CategoryHistogram::crashes_and_hangs() const {
    std::uint64_t n = 0;
    for (auto c : {EventCategory::CrashBeforeKernel, EventCategory::CrashDuringKernel,
                   EventCategory::HangDuringKernel}) {
        auto it = by_category.find(c);
        if (it != by_category.end())
            n += it->second;
    }
    return n;
}

} // namespace tlfit
