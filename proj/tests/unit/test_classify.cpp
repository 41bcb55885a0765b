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
#include "tlfit/classify/layout.h"
#include "tlfit/error.h"
#include "tlfit/faults/corruption.h"
#include "tlfit/faults/rng.h"
#include "tlfit/injector/injector.h"
#include "tlfit/microbench/microbench.h"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace tlfit;

namespace {

// a = 1 (seed), b = a + 2, c = b + 3 in R4..R6.
Layout tiny_layout() {
    Layout l;
    l.kernel = "tiny";
    l.record_first = 4;
    l.record_last = 6;
    LayoutNode a{"a", 4, -1, NodeOp::Seed, {}, 0, 0, 1, -1, 0, InstructionClass::Uncovered};
    LayoutNode b{"b", 5, -1, NodeOp::IAdd, {0}, 0, 2, 3, 1, 1, InstructionClass::IADD};
    LayoutNode c{"c", 6, -1, NodeOp::IAdd, {1}, 0, 3, 6, 2, 2, InstructionClass::IADD};
    l.nodes = {a, b, c};
    return l;
}

isa::RecordEntry rec(int warp, int thread, std::vector<std::uint32_t> v) {
    return {0, warp, thread, 9, 4, std::move(v)};
}

EventResult categorize(std::vector<isa::RecordEntry> records, int tpw = 4,
                       isa::RunStatus st = isa::RunStatus::exited(1)) {
    return categorize_event({st, Phase::DuringKernel, std::move(records), tpw}, tiny_layout());
}

} // namespace

TEST_CASE("node evaluation") {
    LayoutNode n;
    n.op = NodeOp::IMad;
    n.sources = {0};
    n.k = 3;
    n.c = 5;
    CHECK(evaluate_node(n, {0x80000000u}) == 0x80000005u);
    n.op = NodeOp::FFma;
    n.k = std::bit_cast<std::uint32_t>(2.0f);
    n.c = std::bit_cast<std::uint32_t>(0.5f);
    CHECK(evaluate_node(n, {std::bit_cast<std::uint32_t>(1.25f)}) == std::bit_cast<std::uint32_t>(3.0f));
    n.op = NodeOp::FAdd;
    n.sources = {0, 1};
    CHECK(evaluate_node(n, {std::bit_cast<std::uint32_t>(1.5f), std::bit_cast<std::uint32_t>(1.5f)}) ==
          std::bit_cast<std::uint32_t>(3.0f));
    n.op = NodeOp::Pack;
    n.sources = {0, 1, 2};
    CHECK(evaluate_node(n, {1, 0, 1}) == 0b101u);
    n.op = NodeOp::Accumulate;
    CHECK(evaluate_node(n, {0xFFFFFFFFu, 2, 0}) == 1u);
}

TEST_CASE("origin tracing") {
    const auto l = tiny_layout();
    auto t = trace_origin({1, 3, 6}, l);
    CHECK(t.origin == -1);
    t = trace_origin({1, 3 ^ 8, 6 ^ 8}, l);
    CHECK(t.origin == 1);
    CHECK(t.propagated == std::vector<int>{2});
    CHECK_FALSE(t.multi_origin);
    t = trace_origin({1, 3 ^ 8, 6 ^ 1}, l);
    CHECK(t.multi_origin);
    CHECK_THROWS_AS(trace_origin({1, 3}, l), InputError);
}

TEST_CASE("hand-built events land in their categories") {
    CHECK(categorize({rec(0, 0, {1, 3, 6})}).category == EventCategory::Ignored);
    CHECK(categorize({rec(0, 1, {1, 3, 7})}).category == EventCategory::SingleBit);
    CHECK(categorize({rec(0, 1, {1, 3, 5})}).category == EventCategory::DoubleBit);
    CHECK(categorize({rec(0, 1, {1, 3, 0x99})}).category == EventCategory::RandomValue);
    CHECK(categorize({rec(0, 1, {1, 3, 7}), rec(0, 2, {1, 3, 9})}).category ==
          EventCategory::TwoThreadRandom);
    std::vector<isa::RecordEntry> zero, two_bits, random, two_warps;
    for (int t = 0; t < 4; ++t) {
        zero.push_back(rec(0, t, {1, 3, 0}));
        two_bits.push_back(rec(0, t, {1, 3, 6 ^ 0x30}));
        random.push_back(rec(0, t, {1, 3, 100u + static_cast<std::uint32_t>(t)}));
        two_warps.push_back(rec(0, t, {1, 3, 200}));
        two_warps.push_back(rec(1, t, {1, 3, 300}));
    }
    CHECK(categorize(zero).category == EventCategory::WarpZero);
    CHECK(categorize(two_bits).category == EventCategory::WarpDoubleBit);
    CHECK(categorize(random).category == EventCategory::WarpRandom);
    CHECK(categorize(two_warps).category == EventCategory::TwoWarpRandom);
    // Different origins across threads.
    CHECK(categorize({rec(0, 1, {1, 3, 7}), rec(0, 2, {1, 4, 7})}).category ==
          EventCategory::Uncategorized);
    // Three threads of one warp fit no model.
    CHECK(categorize({rec(0, 0, {1, 3, 7}), rec(0, 1, {1, 3, 7}), rec(0, 2, {1, 3, 7})}).category ==
          EventCategory::Uncategorized);
    const auto one = categorize({rec(0, 1, {1, 3, 7})});
    CHECK(one.origin == 2);
    CHECK(one.origin_step == 2);
    CHECK(one.bit_type == BitType::F);
}

TEST_CASE("crashes, hangs and attribution") {
    using isa::FaultKind;
    auto crash = categorize({}, 4, isa::RunStatus::faulted(FaultKind::IllegalInstruction));
    CHECK(crash.category == EventCategory::CrashDuringKernel);
    CHECK(crash.bit_type == BitType::IS);
    crash = categorize({}, 4, isa::RunStatus::faulted(FaultKind::OutOfRangeAddress));
    CHECK(crash.bit_type == BitType::F);
    const auto before = categorize_event(
        {isa::RunStatus::faulted(FaultKind::OutOfRangeAddress), Phase::BeforeKernel, {}, 4},
        tiny_layout());
    CHECK(before.category == EventCategory::CrashBeforeKernel);
    CHECK(before.bit_type == BitType::IM);
    const auto hang = categorize({}, 4, isa::RunStatus::hang());
    CHECK(hang.category == EventCategory::HangDuringKernel);
    CHECK(hang.bit_type == BitType::Unattributed);

    CategoryHistogram h;
    h.add(crash);
    h.add(hang);
    h.add(categorize({rec(0, 1, {1, 3, 7})}));
    CHECK(h.total == 3);
    CHECK(h.crashes_and_hangs() == 2);
    CHECK(h.by_bit_type[BitType::F] == 2);
}

TEST_CASE("injected manifestations categorize back to their model") {
    MicrobenchSpec spec;
    spec.target = InstructionClass::IMAD;
    spec.length = 12;
    spec.iterations = 2;
    spec.warps = 2;
    spec.threads_per_warp = 4;
    const auto mb = generate(spec);
    const auto golden = golden_run(mb.program);
    const auto series = mb.layout.series_nodes(InstructionClass::IMAD);
    REQUIRE(series.size() == 12);

    for (auto kind : {ManifestationKind::SingleBit, ManifestationKind::DoubleBit,
                      ManifestationKind::RandomValue, ManifestationKind::TwoThreadRandom,
                      ManifestationKind::WarpDoubleBit, ManifestationKind::WarpRandom,
                      ManifestationKind::WarpZero, ManifestationKind::TwoWarpRandom}) {
        for (int idx : series) {
            const auto &node = mb.layout.nodes[static_cast<std::size_t>(idx)];
            RngStream rng(split_seed(static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(idx)));
            CorruptionDescriptor desc;
            PartnerWarpCorruption partner;
            bool hit = false;
            const auto run = isa::execute(mb.program, {golden.hang_budget}, [&](isa::HookContext &c) {
                if (hit) {
                    partner.maybe_apply(c, rng, desc);
                    return;
                }
                if (c.warp != 0 || c.pc != node.pc)
                    return;
                hit = true;
                desc = apply_manifestation(c.state, InjectionPoint::from(c), kind, rng);
                partner.arm(c, kind);
            });
            REQUIRE(hit);
            const auto ev = categorize_event({run.status, Phase::DuringKernel, run.records, 4}, mb.layout);
            INFO(manifestation_name(kind), " at ", node.name);
            CHECK(ev.category == *expected_category(kind));
            CHECK(ev.origin == idx);
            CHECK(ev.bit_type == attribution(kind));
        }
    }
}
