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

#include "tlfit/injector/types.h"

#include <string>
#include <vector>

namespace tlfit {

// Substrings in the stdout analog that count as failure symptoms.
std::vector<std::string> default_symptom_patterns();

/// Masked / SDC / ArchDUE / PotentialArchDUE, checked in that precedence
/// (highest first): Fault, Hang or a nonzero exit is ArchDUE; symptom text
/// not present in the golden stdout is PotentialArchDUE; differing output
/// words or stdout is SDC; everything else is Masked.
OutcomeClass classify_outcome(const OutcomeRecord &record, const GoldenReference &golden,
                              const std::vector<std::string> &symptoms = default_symptom_patterns());

} // namespace tlfit
