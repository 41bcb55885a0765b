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

#include "tlfit/error.h"
#include "tlfit/isa/interpreter.h"
#include "tlfit/microbench/microbench.h"
#include "tlfit/profiler/profile.h"

#include <doctest.h>

using namespace tlfit;
using IC = InstructionClass;

namespace {

MicrobenchSpec small(IC target) {
    MicrobenchSpec s;
    s.target = target;
    s.threads_per_warp = 4;
    s.iterations = 3;
    return s;
}

} // namespace

TEST_CASE("every microbenchmark runs clean and is mostly its target") {
    for (auto c : kModeledClasses) {
        INFO(class_name(c));
        const auto mb = generate(small(c));
        const auto run = isa::execute(mb.program, {10'000'000});
        CHECK(run.status.clean_exit());
        CHECK(run.records.empty());
        const auto p = profile(mb.program);
        // LDS interleaves one accumulating add per load.
        CHECK(p.fraction(c) > (c == IC::LDS ? 0.3 : 0.6));
        CHECK(check_overhead(mb) < 0.05);
    }
}

TEST_CASE("default lengths and limits") {
    CHECK(default_length(IC::IADD) == 45);
    CHECK(default_length(IC::LDS) == 24);
    CHECK(default_length(IC::ISETP) == 20);
    auto s = small(IC::IADD);
    s.length = 200;
    CHECK_THROWS_AS(generate(s), InvariantError);
    CHECK(generate(small(IC::IADD)).layout.series_nodes(IC::IADD).size() == 45);
}

TEST_CASE("fibonacci microbenchmark layout matches a wrapping reference") {
    auto s = small(IC::IADD);
    s.length = 50; // runs past 2^32
    const auto mb = generate(s);
    std::uint32_t a = 1, b = 1;
    for (int idx : mb.layout.series_nodes(IC::IADD)) {
        const std::uint32_t c = a + b;
        CHECK(mb.layout.nodes[static_cast<std::size_t>(idx)].expected == c);
        a = b;
        b = c;
    }
}

TEST_CASE("integer-add chain catches every single-bit flip") {
    const auto mb = generate(small(IC::IADD));
    const auto rep = validate_detection(mb);
    const auto &st = rep.by_kind.at(ManifestationKind::SingleBit);
    CHECK(st.cases == 45 * 4 * 32);
    CHECK(rep.detection_rate(ManifestationKind::SingleBit) == 1.0);
    CHECK(rep.category_rate(ManifestationKind::SingleBit) == 1.0);
    CHECK(rep.origin_rate(ManifestationKind::SingleBit) == 1.0);
}

TEST_CASE("other chains catch single-bit flips") {
    for (auto c : {IC::FADD, IC::IMAD, IC::FFMA, IC::LDS, IC::ISETP}) {
        INFO(class_name(c));
        auto s = small(c);
        s.length = c == IC::ISETP ? 4 : 12;
        const auto rep = validate_detection(generate(s));
        CHECK(rep.detection_rate(ManifestationKind::SingleBit) >= 0.99);
        CHECK(rep.origin_rate(ManifestationKind::SingleBit) >= 0.99);
    }
}

TEST_CASE("branch chain: filler logs, out-of-kernel is a DUE") {
    auto s = small(IC::BRA);
    s.length = 10;
    const auto rep = validate_detection(generate(s));
    CHECK(rep.filler_cases > 0);
    CHECK(rep.filler_logged == rep.filler_cases);
    CHECK(rep.outside_cases == 10);
    CHECK(rep.outside_due == rep.outside_cases);
}
