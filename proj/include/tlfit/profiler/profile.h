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

#include "tlfit/isa/interpreter.h"
#include "tlfit/isa/program.h"
#include "tlfit/profiler/instruction_class.h"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlfit {

using ClassCounts = std::array<std::uint64_t, kNumClasses>;

struct LaunchProfile {
    std::string kernel;
    ClassCounts class_counts{};
    std::uint64_t instructions = 0;
    double issue_rate = 0.0;

    bool operator==(const LaunchProfile &) const = default;
};

struct Profile {
    std::array<std::uint64_t, isa::kNumOpcodes> opcode_counts{};
    ClassCounts class_counts{};
    std::array<double, kNumClasses> fractions{};
    double covered_fraction = 0.0;
    // Average instructions issued per simulated scheduler cycle, weighted by
    // each launch's instruction count.
    double issue_rate = 0.0;
    int issue_slots = 4;
    std::uint64_t total = 0;
    std::map<std::string, int> kernel_invocations;
    std::vector<LaunchProfile> launches;

    std::uint64_t count(InstructionClass c) const { return class_counts[static_cast<std::size_t>(c)]; }
    double fraction(InstructionClass c) const { return fractions[static_cast<std::size_t>(c)]; }

    bool operator==(const Profile &) const = default;
};

struct ProfileOptions {
    int issue_slots = 4;
    std::uint64_t instruction_budget = 100'000'000;
};

/// Cycles needed to drain per-warp instruction counts through a round-robin
/// scheduler that issues from at most `slots` distinct warps per cycle, every
/// warp always ready.
std::uint64_t scheduler_cycles(const std::vector<std::uint64_t> &per_warp, int slots);

/// Fault-free dynamic profile. Throws InvariantError("unprofilable program")
/// when the run does not exit cleanly.
Profile profile(const isa::Program &program, const ProfileOptions &options = {});

/// Rebuild fractions and coverage from class counts (used after merging or
/// deserializing).
void finalize_fractions(Profile &p);

} // namespace tlfit
