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

#include "tlfit/profiler/profile.h"

#include "tlfit/error.h"

namespace tlfit {

std::uint64_t scheduler_cycles(const std::vector<std::uint64_t> &per_warp, int slots) {
    if (slots <= 0)
        throw InvariantError("scheduler needs at least one issue slot");
    std::vector<std::uint64_t> remaining = per_warp;
    const std::size_t n = remaining.size();
    std::size_t live = 0;
    for (auto r : remaining)
        live += r > 0;
    std::uint64_t cycles = 0;
    std::size_t cursor = 0;
    while (live > 0) {
        ++cycles;
        int issued = 0;
        std::size_t scanned = 0;
        while (issued < slots && scanned < n) {
            auto &r = remaining[cursor];
            cursor = (cursor + 1) % n;
            ++scanned;
            if (r == 0)
                continue;
            --r;
            ++issued;
            if (r == 0)
                --live;
        }
    }
    return cycles;
}

void finalize_fractions(Profile &p) {
    p.total = 0;
    for (auto c : p.class_counts)
        p.total += c;
    for (std::size_t i = 0; i < kNumClasses; ++i)
        p.fractions[i] = p.total == 0 ? 0.0
                                      : static_cast<double>(p.class_counts[i]) /
                                            static_cast<double>(p.total);
    p.covered_fraction = 1.0 - p.fraction(InstructionClass::Uncovered);
    if (p.total == 0)
        p.covered_fraction = 0.0;
}

Profile profile(const isa::Program &program, const ProfileOptions &options) {
    Profile p;
    p.issue_slots = options.issue_slots;

    std::vector<ClassCounts> per_launch;
    auto hook = [&](isa::HookContext &ctx) {
        if (static_cast<int>(per_launch.size()) <= ctx.launch)
            per_launch.resize(ctx.launch + 1);
        ++per_launch[ctx.launch][static_cast<std::size_t>(classify_opcode(ctx.inst.op))];
    };
    auto run = isa::execute(program, {options.instruction_budget}, hook);
    if (!run.status.clean_exit())
        throw InvariantError("unprofilable program: fault-free run ended with " +
                             isa::describe(run.status));

    p.opcode_counts = run.opcode_counts;
    per_launch.resize(run.launches.size());
    double weighted = 0.0;
    for (std::size_t l = 0; l < run.launches.size(); ++l) {
        const auto &ls = run.launches[l];
        LaunchProfile lp;
        lp.kernel = program.kernels[ls.kernel].name;
        lp.class_counts = per_launch[l];
        for (auto c : ls.issued_per_warp)
            lp.instructions += c;
        const auto cycles = scheduler_cycles(ls.issued_per_warp, options.issue_slots);
        lp.issue_rate = cycles == 0 ? 0.0
                                    : static_cast<double>(lp.instructions) /
                                          static_cast<double>(cycles);
        weighted += lp.issue_rate * static_cast<double>(lp.instructions);
        for (std::size_t i = 0; i < kNumClasses; ++i)
            p.class_counts[i] += lp.class_counts[i];
        ++p.kernel_invocations[lp.kernel];
        p.launches.push_back(std::move(lp));
    }
    finalize_fractions(p);
    p.issue_rate = p.total == 0 ? 0.0 : weighted / static_cast<double>(p.total);
    return p;
}

} // namespace tlfit
