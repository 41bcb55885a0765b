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

#include "tlfit/classify/event.h"
#include "tlfit/classify/layout.h"
#include "tlfit/faults/manifestation.h"
#include "tlfit/isa/program.h"
#include "tlfit/profiler/instruction_class.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tlfit {

struct MicrobenchSpec {
    InstructionClass target = InstructionClass::IADD;
    // Series length. For ISETP it counts 7-ISETP blocks; 0 picks the
    // target's default (45, LDS 24, ISETP 20 blocks).
    int length = 0;
    int iterations = 4;
    int warps = 1;
    int threads_per_warp = 32;
};

int default_length(InstructionClass target);

struct Microbench {
    MicrobenchSpec spec;
    std::string source;
    isa::Program program;
    Layout layout; // empty node list for BRA
    // Static pcs of the chain branches and of the filler branches (BRA only).
    std::vector<int> chain_pcs;
    std::vector<int> filler_pcs;
    int record_pc = -1;
};

/// Emit the microbenchmark. Expected check constants come from one
/// fault-free interpreter pass. Throws InvariantError for an invalid spec
/// (e.g. a series that does not fit the register file).
Microbench generate(const MicrobenchSpec &spec);

/// Dynamic fraction of CHK and RECORD instructions in a fault-free run.
double check_overhead(const Microbench &mb);

struct KindStats {
    std::uint64_t cases = 0;
    std::uint64_t detected = 0;
    std::uint64_t category_ok = 0;
    std::uint64_t origin_ok = 0;
    std::uint64_t skipped = 0; // kind cannot apply to this destination
    std::uint64_t noop = 0;    // random draw left every value unchanged
};

struct DetectionReport {
    InstructionClass target = InstructionClass::IADD;
    std::map<ManifestationKind, KindStats> by_kind;
    // BRA only.
    std::uint64_t filler_cases = 0;
    std::uint64_t filler_logged = 0;
    std::uint64_t outside_cases = 0;
    std::uint64_t outside_due = 0;
    std::uint64_t chain_cases = 0; // redirections to another chain branch
    std::uint64_t chain_detected = 0;
    std::vector<std::string> blind_spots;
    std::vector<std::string> notes;

    double detection_rate(ManifestationKind k) const;
    double category_rate(ManifestationKind k) const;
    double origin_rate(ManifestationKind k) const;
};

struct ValidationOptions {
    std::vector<ManifestationKind> kinds = {ManifestationKind::SingleBit};
    int iteration = 1;            // loop iteration to corrupt (clamped)
    int trials_per_node = 8;      // for randomized kinds
    std::uint64_t seed = 1;
    std::size_t max_blind_spots = 20;
};

/// Inject into every series destination (single-bit exhaustively over
/// threads of warp 0 and bits; other kinds with seeded trials) and check
/// detection, category and origin. For BRA, redirect every chain branch to
/// each filler, to an out-of-kernel pc and to the other chain branches.
DetectionReport validate_detection(const Microbench &mb, const ValidationOptions &options = {});

} // namespace tlfit
