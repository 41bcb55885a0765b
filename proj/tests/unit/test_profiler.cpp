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

#include "test_helpers.h"

#include "tlfit/error.h"
#include "tlfit/isa/parser.h"
#include "tlfit/profiler/profile.h"

#include <doctest.h>

using namespace tlfit;

TEST_CASE("scheduler cycles by hand") {
    // One slot drains the total instruction count.
    CHECK(scheduler_cycles({5, 3, 2}, 1) == 10);
    // Two slots: ceil over the round-robin; the longest warp bounds it.
    CHECK(scheduler_cycles({4, 4}, 2) == 4);
    CHECK(scheduler_cycles({10, 1, 1}, 4) == 10);
    // 3 warps, 2 slots, 3 each: 9 instructions over 2 per cycle.
    CHECK(scheduler_cycles({3, 3, 3}, 2) == 5);
    CHECK(scheduler_cycles({}, 4) == 0);
    CHECK_THROWS_AS(scheduler_cycles({1}, 0), InvariantError);
}

TEST_CASE("class counts and fractions of a hand-counted program") {
    const char *src = R"(
.warps 2
.threads_per_warp 2
.shmem 4
.kernel k
    MOV R0, TID
    IADD R1, R0, 1
    IADD R1, R1, 1
    FFMA R2, R1, 2.0, 1.0
    ISETP.LT P0, R1, 10
    LDS R3, [R0]
    EXIT
)";
    const auto p = profile(isa::parse_program(src), {1});
    // Per warp: MOV, 2 IADD, FFMA, ISETP, LDS, EXIT = 7; two warps.
    CHECK(p.total == 14);
    CHECK(p.count(InstructionClass::IADD) == 4);
    CHECK(p.count(InstructionClass::FFMA) == 2);
    CHECK(p.count(InstructionClass::ISETP) == 2);
    CHECK(p.count(InstructionClass::LDS) == 2);
    CHECK(p.count(InstructionClass::Uncovered) == 4); // MOV and EXIT
    CHECK(p.fraction(InstructionClass::IADD) == doctest::Approx(4.0 / 14.0));
    CHECK(p.covered_fraction == doctest::Approx(10.0 / 14.0));
    // One slot: one instruction per cycle.
    CHECK(p.issue_rate == doctest::Approx(1.0));
    const auto p4 = profile(isa::parse_program(src), {4});
    CHECK(p4.issue_rate == doctest::Approx(2.0));
}

TEST_CASE("issue rate is weighted by launch instruction counts") {
    const char *src = R"(
.warps 4
.threads_per_warp 1
.kernel wide
    IADD R0, R0, 1
    IADD R0, R0, 1
    EXIT
.kernel narrow
    MOV R1, WARPID
    ISETP.EQ P0, R1, 0
.reconv end
    @!P0 BRA end
    IADD R0, R0, 1
    IADD R0, R0, 1
    IADD R0, R0, 1
    IADD R0, R0, 1
    IADD R0, R0, 1
end:
    EXIT
)";
    const auto p = profile(isa::parse_program(src), {4});
    REQUIRE(p.launches.size() == 2);
    // wide: 12 instructions in 3 cycles.
    CHECK(p.launches[0].issue_rate == doctest::Approx(4.0));
    // narrow: warps 1..3 issue 4 each, warp 0 issues 9.
    CHECK(p.launches[1].instructions == 21);
    CHECK(p.launches[1].issue_rate == doctest::Approx(21.0 / 9.0));
    CHECK(p.issue_rate == doctest::Approx((4.0 * 12 + 21.0 / 9.0 * 21) / 33.0));
    CHECK(p.kernel_invocations.at("wide") == 1);
}

TEST_CASE("opcode aliases map to classes") {
    CHECK(classify_opcode("SHL") == InstructionClass::IADD);
    CHECK(classify_opcode("LOP3") == InstructionClass::IADD);
    CHECK(classify_opcode("DADD") == InstructionClass::FADD);
    CHECK(classify_opcode("DFMA") == InstructionClass::FFMA);
    CHECK(classify_opcode("IMAD") == InstructionClass::IMAD);
    CHECK(classify_opcode("LDS") == InstructionClass::LDS);
    CHECK(classify_opcode("ISETP") == InstructionClass::ISETP);
    CHECK(classify_opcode("BRA") == InstructionClass::BRA);
    CHECK(classify_opcode("XYZZY") == InstructionClass::Uncovered);
    CHECK(classify_opcode(isa::Opcode::CHK) == InstructionClass::Uncovered);
    CHECK(classify_opcode(isa::Opcode::STS) == InstructionClass::Uncovered);
}

TEST_CASE("unprofilable programs are rejected") {
    CHECK_THROWS_AS(profile(isa::parse_program(".threads_per_warp 1\n.kernel k\nEXIT 1\n")),
                    InvariantError);
}

TEST_CASE("fixture profile sums to one") {
    const auto p = profile(test::load_fixture("reduce.asm"));
    double sum = 0;
    for (double f : p.fractions)
        sum += f;
    CHECK(sum == doctest::Approx(1.0));
}
