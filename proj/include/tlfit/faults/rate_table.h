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
#include "tlfit/profiler/instruction_class.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tlfit {

enum class RateUnits : std::uint8_t { Absolute, Relative };

std::string_view units_name(RateUnits u);

/// Manifestation rates per issued instruction, keyed by (class, kind).
///
/// Absolute tables are in FIT per issued instruction; relative tables are
/// normalized to some reference class and can only rank, never produce FIT.
struct RateTable {
    std::map<std::pair<InstructionClass, ManifestationKind>, double> rates;
    std::map<InstructionClass, double> totals;
    RateUnits units = RateUnits::Relative;
    std::optional<InstructionClass> normalized_to;
    // Allowed relative mismatch between a class's parts and its TOTAL row.
    double rowsum_tolerance = 1e-9;

    double rate(InstructionClass c, ManifestationKind k) const;
    double total(InstructionClass c) const;
    std::vector<InstructionClass> classes() const;
    // Manifestations of a class with a positive rate, in enum order.
    std::vector<ManifestationKind> kinds(InstructionClass c) const;

    RateTable scaled(double factor) const;

    bool operator==(const RateTable &) const = default;
};

/// Parse the rate-table CSV:
///
///     # units=relative normalized_to=IMAD rowsum_tolerance=0.02
///     class,manifestation,rate
///     IADD,TOTAL,0.70
///     IADD,single_bit,0.54
///
/// Throws InputError on negative rates, unknown names, duplicates, missing
/// TOTAL rows, or a row-sum violation.
RateTable parse_rate_table(std::string_view csv_text);

std::string write_rate_table(const RateTable &table);

} // namespace tlfit
