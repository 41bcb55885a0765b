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

#include "tlfit/faults/rate_table.h"
#include "tlfit/injector/types.h"
#include "tlfit/isa/program.h"
#include "tlfit/profiler/profile.h"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tlfit {

struct GoldenOptions {
    double budget_multiplier = 3.0;
    std::uint64_t instruction_budget = 10'000'000;
};

/// Fault-free reference. Throws InvariantError("golden run did not exit")
/// unless the run ends with Exited(0).
GoldenReference golden_run(const isa::Program &program, const GoldenOptions &options = {});

/// Draw `n` sites for one (class, manifestation) row, uniformly with
/// replacement over the class's dynamic instructions. Site i depends only on
/// (seed, class, kind, i).
std::vector<InjectionSite> select_sites(const Profile &profile, InstructionClass cls,
                                        ManifestationKind kind, std::uint64_t n,
                                        std::uint64_t seed, bool stratified = false);

std::uint64_t row_seed(std::uint64_t master, InstructionClass cls, ManifestationKind kind);

/// Fill status, diffs and outcome of `record` from a finished run.
void finish_record(OutcomeRecord &record, const isa::RunResult &run,
                   const GoldenReference &golden,
                   const std::vector<std::string> &symptoms);

/// Execute once with a single injection at `site`. Never throws for
/// per-run problems; they land in `record.error`.
OutcomeRecord run_injection(const isa::Program &program, const InjectionSite &site,
                            const GoldenReference &golden,
                            const std::vector<std::string> &symptoms);
OutcomeRecord run_injection(const isa::Program &program, const InjectionSite &site,
                            const GoldenReference &golden);

struct CampaignOptions {
    std::uint64_t samples = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool stratified = false;
    bool multi_thread_models = false;
    std::vector<std::string> symptoms;
    // Only these sites (by position in the full plan) are executed; used to
    // shard a campaign. Empty means all.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> shard; // (index, count)
};

struct CampaignRow {
    InstructionClass cls;
    ManifestationKind kind;
};

/// Injectable rows of a rate table: positive rate, not crash/hang, class
/// present in the profile. Multi-thread kinds only when enabled.
std::vector<CampaignRow> rows_from_table(const RateTable &table, bool multi_thread_models);

struct CampaignResult {
    CampaignSummary summary;
    std::vector<OutcomeRecord> records;
};

CampaignResult run_campaign(const isa::Program &program, const GoldenReference &golden,
                            const Profile &profile, const std::vector<CampaignRow> &rows,
                            const CampaignOptions &options);

struct OracleResult {
    std::uint64_t runs = 0;
    OutcomeCounts counts; // unweighted tallies
    // Exact proportions with every dynamic instruction weighted equally and
    // its (thread, bit) pairs weighted equally within it; this is the
    // distribution the sampler draws from.
    double p_masked = 0.0;
    double p_sdc = 0.0;
    double p_arch_due = 0.0;
    double p_potential_due = 0.0;
};

/// Enumerate every (dynamic instruction of `cls`, active thread, bit) single
/// bit flip. Throws InvariantError when the run count would exceed `cap`.
OracleResult exhaustive_oracle(const isa::Program &program, InstructionClass cls,
                               const GoldenReference &golden, std::uint64_t cap = 1'000'000,
                               const std::vector<std::string> &symptoms = {});

} // namespace tlfit
