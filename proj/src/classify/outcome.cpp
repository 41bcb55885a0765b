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

#include "tlfit/classify/outcome.h"

namespace tlfit {

std::vector<std::string> default_symptom_patterns() { return {"record ", "error", "warning"}; }

namespace {
std::size_t occurrences(const std::string &text, const std::string &needle) {
    if (needle.empty())
        return 0;
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}
} // namespace

OutcomeClass classify_outcome(const OutcomeRecord &record, const GoldenReference &golden,
                              const std::vector<std::string> &symptoms) {
    if (!record.status.clean_exit())
        return OutcomeClass::ArchDUE;
    for (const auto &s : symptoms)
        if (occurrences(record.stdout_text, s) > occurrences(golden.stdout_text, s))
            return OutcomeClass::PotentialArchDUE;
    if (record.output_diff_words > 0 || record.stdout_text != golden.stdout_text)
        return OutcomeClass::SDC;
    return OutcomeClass::Masked;
}

} // namespace tlfit
