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

#include "tlfit/faults/corruption.h"
#include "tlfit/faults/manifestation.h"
#include "tlfit/isa/interpreter.h"
#include "tlfit/profiler/profile.h"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tlfit {

enum class OutcomeClass : std::uint8_t { Masked, SDC, ArchDUE, PotentialArchDUE };

std::string_view outcome_name(OutcomeClass o);
std::optional<OutcomeClass> outcome_from_name(std::string_view name);

struct GoldenReference {
    std::vector<std::uint32_t> output;
    std::string stdout_text;
    std::uint64_t dynamic_count = 0;
    ClassCounts class_counts{};
    double budget_multiplier = 3.0;
    std::uint64_t hang_budget = 0;
};

/// One statistically selected injection: which dynamic instruction of which
/// class, with which error model, plus the seeds that pick the thread and
/// the corrupted bits.
struct InjectionSite {
    InstructionClass cls = InstructionClass::IADD;
    ManifestationKind kind = ManifestationKind::SingleBit;
    std::string kernel;
    int launch = 0;
    std::uint64_t class_index = 0; // among this class's dynamic instructions, whole run
    std::uint64_t dest_seed = 0;
    std::uint64_t value_seed = 0;
    std::uint64_t ordinal = 0;     // position within its (class, kind) sample

    bool operator==(const InjectionSite &) const = default;
};

struct OutcomeRecord {
    InjectionSite site;
    CorruptionDescriptor corruption;
    isa::RunStatus status;
    OutcomeClass outcome = OutcomeClass::Masked;
    int output_diff_words = 0;
    int first_diff = -1;
    bool stdout_differs = false;
    std::string stdout_text;
    std::vector<isa::RecordEntry> records;
    std::uint64_t dynamic_count = 0;
    // Set when the member could not run (e.g. site beyond the execution).
    std::optional<std::string> error;
};

struct OutcomeCounts {
    std::uint64_t masked = 0;
    std::uint64_t sdc = 0;
    std::uint64_t arch_due = 0;
    std::uint64_t potential_due = 0;
    std::uint64_t failed = 0;

    std::uint64_t samples() const { return masked + sdc + arch_due + potential_due; }
    std::uint64_t count(OutcomeClass o) const;
    void add(OutcomeClass o);
    OutcomeCounts &operator+=(const OutcomeCounts &o);
    bool operator==(const OutcomeCounts &) const = default;
};

using CampaignKey = std::pair<InstructionClass, ManifestationKind>;

/// Per (class, manifestation) outcome counts. Aggregation is a plain sum, so
/// merging shards is commutative and associative.
struct CampaignSummary {
    std::map<CampaignKey, OutcomeCounts> rows;

    void add(const OutcomeRecord &r);
    void ensure_row(CampaignKey key) { rows.try_emplace(key); }
    void merge(const CampaignSummary &other);

    bool has(CampaignKey key) const;
    const OutcomeCounts *row(CampaignKey key) const;
    // SDC proportion; nullopt when the row is missing or has no samples.
    std::optional<double> p_sdc(CampaignKey key) const;
    std::optional<double> p_due(CampaignKey key) const;

    bool operator==(const CampaignSummary &) const = default;
};

} // namespace tlfit
