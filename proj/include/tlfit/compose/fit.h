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

#include "tlfit/compose/stats.h"
#include "tlfit/faults/rate_table.h"
#include "tlfit/injector/types.h"
#include "tlfit/profiler/profile.h"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tlfit {

enum class FitMode : std::uint8_t { TL, IpaOnly, ApaOnlyProbability };

std::string_view fit_mode_name(FitMode m);

// pSDC (and pArchDUE) of one (class, manifestation) row.
struct PsdcEntry {
    double p_sdc = 0.0;
    Interval sdc_ci;
    double p_due = 0.0;
    std::uint64_t samples = 0;
};

using PsdcTable = std::map<CampaignKey, PsdcEntry>;

/// Proportions and Wilson intervals from campaign counts. Rows without
/// samples are left out.
PsdcTable psdc_from_summary(const CampaignSummary &summary, double level = 0.95);

struct ClassContribution {
    InstructionClass cls = InstructionClass::IADD;
    double f = 0.0;
    double sdc = 0.0;
    double sdc_lo = 0.0;
    double sdc_hi = 0.0;
    double due = 0.0;
};

struct FITEstimate {
    FitMode mode = FitMode::TL;
    RateUnits units = RateUnits::Relative;
    double sdc_fit = 0.0;
    double sdc_lo = 0.0;
    double sdc_hi = 0.0;
    // Crash/hang rows scaled by s plus injected rows' ArchDUE share.
    double due_fit = 0.0;
    // Crash/hang rows without the issue-rate scaling.
    double due_unscaled = 0.0;
    double scale = 1.0;
    double covered_fraction = 0.0;
    std::vector<ClassContribution> per_class;
    std::vector<std::string> warnings;
};

struct ComposeOptions {
    bool strict = false;   // missing APA rows are errors instead of zero
    bool absolute = false; // caller wants FIT, not a relative figure
    std::optional<double> calibration; // FIT per relative unit
};

/// FIT_SDC = sum_n f_n * sum_m pIAS_nm * pSDC_nm * s, crash/hang pSDC = 0.
/// Throws InvariantError on a units mismatch (relative table, absolute
/// output, no calibration) or, when strict, on a missing APA row.
FITEstimate tl_fit(const Profile &profile, const RateTable &rates, const PsdcTable &psdc,
                   double s, const ComposeOptions &options = {});
FITEstimate tl_fit(const Profile &profile, const RateTable &rates, const CampaignSummary &apa,
                   double s, const ComposeOptions &options = {});

/// tl_fit with every injectable pSDC set to 1.
FITEstimate ipa_only_fit(const Profile &profile, const RateTable &rates, double s,
                         const ComposeOptions &options = {});

/// P(SDC | architecture-level error) from a uniform campaign: single-bit for
/// every class except FFMA (random value); BRA counts as DUE. Weighted by
/// the covered classes' f.
FITEstimate apa_only_sdc(const Profile &profile, const CampaignSummary &apa,
                         const ComposeOptions &options = {});

/// The row each class contributes in APA-only mode; nullopt for BRA.
std::optional<ManifestationKind> apa_only_kind(InstructionClass cls);

/// Divide by the largest value (all zero stays zero).
std::vector<double> normalize_to_max(const std::vector<double> &values);

struct BeamRun {
    std::uint64_t events = 0;
    double fluence = 0.0; // neutrons / cm^2
    double flux = 13.0;   // neutrons / cm^2 / hour
};

struct BeamFit {
    double cross_section = 0.0; // cm^2
    double fit = 0.0;
    Interval ci;
};

BeamFit fit_from_beam(const BeamRun &run, double level = 0.95);

/// Percentile bootstrap of sdc_fit, resampling records within each row.
Interval bootstrap_sdc_fit(const std::vector<OutcomeRecord> &records, const Profile &profile,
                           const RateTable &rates, double s, std::uint64_t replicates,
                           std::uint64_t seed, double level = 0.95,
                           const ComposeOptions &options = {});

} // namespace tlfit
