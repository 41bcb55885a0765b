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

#include "tlfit/faults/manifestation.h"
#include "tlfit/faults/rate_table.h"
#include "tlfit/faults/rng.h"
#include "tlfit/isa/interpreter.h"

#include <cstdint>
#include <optional>
#include <vector>

namespace tlfit {

// Where a corruption lands: one instruction's destination in one warp.
struct InjectionPoint {
    int warp = 0;
    isa::ThreadMask active = 0;
    bool predicate = false; // destination is a predicate bit
    int index = 0;          // register or predicate number

    static InjectionPoint from(const isa::HookContext &ctx);
};

struct ThreadCorruption {
    int warp = 0;
    int thread = 0;
    std::uint32_t xor_mask = 0;
    std::uint32_t before = 0;
    std::uint32_t after = 0;

    bool operator==(const ThreadCorruption &) const = default;
};

/// Exact description of what an injection changed. Every touched value is
/// `before ^ xor_mask == after`; for predicates the value is the single bit.
struct CorruptionDescriptor {
    ManifestationKind kind = ManifestationKind::SingleBit;
    bool predicate = false;
    int index = 0;
    std::vector<ThreadCorruption> entries;

    bool operator==(const CorruptionDescriptor &) const = default;
};

/// Corrupt the destination named by `point` according to `kind`.
/// Crash/Hang leave the state untouched and return an empty descriptor.
/// Throws InvariantError for a point without destination or for a kind that
/// cannot apply to a one-bit predicate.
CorruptionDescriptor apply_manifestation(isa::MachineState &state, const InjectionPoint &point,
                                         ManifestationKind kind, RngStream &rng);

/// Second half of a two-warp corruption. The partner warp (the next warp in
/// issue order) gets random values in the same destination when it next
/// issues the same instruction of the same launch; until then it would
/// simply overwrite an early corruption.
class PartnerWarpCorruption {
  public:
    // Call right after apply_manifestation; a no-op for other kinds.
    void arm(const isa::HookContext &ctx, ManifestationKind kind);
    // Call from every later hook invocation. Appends to `desc` when it fires.
    bool maybe_apply(isa::HookContext &ctx, RngStream &rng, CorruptionDescriptor &desc);
    bool pending() const { return target_.has_value(); }

  private:
    struct Target {
        int launch;
        int warp;
        int pc;
    };
    std::optional<Target> target_;
};

/// Deterministic single-bit flip of one thread's destination.
CorruptionDescriptor apply_bit_flip(isa::MachineState &state, const InjectionPoint &point,
                                    int thread, int bit);

/// XOR the descriptor's masks into the state. Applying twice restores the
/// pre-image.
void apply_descriptor(isa::MachineState &state, const CorruptionDescriptor &desc);

/// Differences between two states' register and predicate files.
std::vector<ThreadCorruption> diff_registers(const isa::MachineState &a,
                                             const isa::MachineState &b, bool predicate,
                                             int index);

/// Draw a manifestation for `cls` with probability proportional to its rate.
/// Throws InvariantError("class has no manifestations") for an all-zero row.
ManifestationKind sample_manifestation(const RateTable &table, InstructionClass cls,
                                       RngStream &rng);

} // namespace tlfit
