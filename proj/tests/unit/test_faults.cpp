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
#include "tlfit/faults/corruption.h"
#include "tlfit/faults/rate_table.h"
#include "tlfit/faults/rng.h"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>
#include <random>

using namespace tlfit;

namespace {

const char *kMini = "# units=absolute\nclass,manifestation,rate\n"
                    "IADD,TOTAL,3\nIADD,single_bit,1\nIADD,random_value,2\n";

isa::MachineState filled_state() {
    isa::MachineState s(2, 4, 0);
    for (int w = 0; w < 2; ++w)
        for (int t = 0; t < 4; ++t)
            s.reg(w, t, 5) = 0x12345678u + static_cast<std::uint32_t>(w * 4 + t);
    return s;
}

InjectionPoint point(int warp = 0, isa::ThreadMask active = 0xF) {
    return {warp, active, false, 5};
}

} // namespace

TEST_CASE("rate table from the data directory") {
    const auto t = parse_rate_table(read_text_file(test::data_path("manifestation_rates.csv")));
    CHECK(t.units == RateUnits::Relative);
    REQUIRE(t.normalized_to);
    CHECK(*t.normalized_to == InstructionClass::IMAD);
    CHECK(t.total(InstructionClass::IMAD) == 1.0);
    CHECK(t.rate(InstructionClass::IADD, ManifestationKind::SingleBit) == 0.54);
    CHECK(t.rate(InstructionClass::FFMA, ManifestationKind::TwoThreadRandom) == 0.09);
    CHECK(t.rate(InstructionClass::LDS, ManifestationKind::Crash) == 0.20);
    CHECK(t.rate(InstructionClass::BRA, ManifestationKind::SingleBit) == 0.0);
    CHECK(t.classes().size() == 7);
    // Round trip.
    CHECK(parse_rate_table(write_rate_table(t)) == t);
}

TEST_CASE("rate table validation") {
    CHECK_NOTHROW(parse_rate_table(kMini));
    const auto head = std::string("class,manifestation,rate\n");
    CHECK_THROWS_AS(parse_rate_table(head + "IADD,TOTAL,1\nIADD,single_bit,-1\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table(head + "IADD,TOTAL,1\nIADD,single_bit,0.5\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table(head + "IADD,single_bit,0.5\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table(head + "IADD,TOTAL,1\nIADD,single_bit,0.5\nIADD,single_bit,0.5\n"),
                    InputError);
    CHECK_THROWS_AS(parse_rate_table(head + "XADD,TOTAL,1\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table(head + "IADD,TOTAL,1\nIADD,bogus,1\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table("IADD,TOTAL,1\n"), InputError);
    CHECK_THROWS_AS(parse_rate_table("# units=furlongs\n" + head), InputError);
    // Within the declared tolerance a row-sum gap is allowed.
    CHECK_NOTHROW(parse_rate_table("# rowsum_tolerance=0.02\n" + head +
                                   "IADD,TOTAL,0.69\nIADD,single_bit,0.70\n"));
}

TEST_CASE("single-bit and double-bit masks") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto s = filled_state();
        RngStream rng(seed);
        const auto d1 = apply_manifestation(s, point(), ManifestationKind::SingleBit, rng);
        REQUIRE(d1.entries.size() == 1);
        CHECK(std::popcount(d1.entries[0].xor_mask) == 1);
        CHECK(s.reg(0, d1.entries[0].thread, 5) == d1.entries[0].after);
        const auto d2 = apply_manifestation(s, point(), ManifestationKind::DoubleBit, rng);
        REQUIRE(d2.entries.size() == 1);
        CHECK(std::popcount(d2.entries[0].xor_mask) == 2);
    }
}

TEST_CASE("warp-wide manifestations") {
    auto s = filled_state();
    RngStream rng(3);
    auto d = apply_manifestation(s, point(1, 0b1011), ManifestationKind::WarpZero, rng);
    CHECK(d.entries.size() == 3);
    CHECK(s.reg(1, 0, 5) == 0);
    CHECK(s.reg(1, 2, 5) == 0x12345678u + 6); // inactive lane untouched
    d = apply_manifestation(s, point(0), ManifestationKind::WarpDoubleBit, rng);
    REQUIRE(d.entries.size() == 4);
    for (const auto &e : d.entries)
        CHECK(e.xor_mask == d.entries[0].xor_mask);
    d = apply_manifestation(s, point(0), ManifestationKind::TwoThreadRandom, rng);
    REQUIRE(d.entries.size() == 2);
    CHECK(d.entries[0].thread != d.entries[1].thread);
}

TEST_CASE("descriptors are involutions") {
    auto s = filled_state();
    const auto before = s.reg(0, 0, 5);
    RngStream rng(11);
    const auto d = apply_manifestation(s, point(), ManifestationKind::WarpRandom, rng);
    apply_descriptor(s, d); // undo
    for (int t = 0; t < 4; ++t)
        CHECK(s.reg(0, t, 5) == 0x12345678u + static_cast<std::uint32_t>(t));
    apply_descriptor(s, d); // redo
    CHECK(s.reg(0, 0, 5) == (before ^ d.entries[0].xor_mask));
}

TEST_CASE("predicate destinations") {
    isa::MachineState s(1, 4, 0);
    InjectionPoint p{0, 0xF, true, 2};
    RngStream rng(1);
    CHECK_THROWS_AS(apply_manifestation(s, p, ManifestationKind::DoubleBit, rng), InvariantError);
    const auto d = apply_bit_flip(s, p, 1, 0);
    CHECK(s.pred(0, 1, 2));
    CHECK(d.entries[0].xor_mask == 1u);
    CHECK_THROWS_AS(apply_bit_flip(s, p, 1, 1), InvariantError);
}

TEST_CASE("single-bit positions are uniform over 32 bits") {
    std::array<int, 32> hits{};
    const int n = 32000;
    RngStream rng(42);
    for (int i = 0; i < n; ++i) {
        auto s = filled_state();
        const auto d = apply_manifestation(s, point(), ManifestationKind::SingleBit, rng);
        ++hits[std::countr_zero(d.entries[0].xor_mask)];
    }
    // Chi-square with 31 degrees of freedom; 61.1 is the 0.999 quantile.
    double chi2 = 0;
    for (int h : hits)
        chi2 += (h - 1000.0) * (h - 1000.0) / 1000.0;
    CHECK(chi2 < 61.1);
}

TEST_CASE("manifestation sampling follows the rates") {
    const auto t = parse_rate_table(kMini);
    RngStream rng(9);
    std::map<ManifestationKind, int> hits;
    const int n = 30000;
    for (int i = 0; i < n; ++i)
        ++hits[sample_manifestation(t, InstructionClass::IADD, rng)];
    // Expected 1/3; binomial sd = sqrt(n p q) ~ 81.6, allow 5 sd.
    CHECK(std::abs(hits[ManifestationKind::SingleBit] - n / 3.0) < 5 * 81.65);
    CHECK(hits.size() == 2);
    CHECK_THROWS_AS(sample_manifestation(t, InstructionClass::FADD, rng), InvariantError);
}

TEST_CASE("random stream is the standard engine") {
    // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
    RngStream rng(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i)
        v = rng.next_u64();
    CHECK(v == 9981545732273789042ull);
    std::mt19937_64 ref(77);
    RngStream mine(77);
    CHECK(mine.next_u64() == ref());
}

TEST_CASE("bounded draws are unbiased") {
    RngStream rng(5);
    std::array<int, 6> hits{};
    for (int i = 0; i < 60000; ++i)
        ++hits[rng.below(6)];
    for (int h : hits)
        CHECK(std::abs(h - 10000) < 5 * 91.3);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(split_seed(1, 2) != split_seed(2, 1));
    CHECK(split_seed(1, 2) == split_seed(1, 2));
}
