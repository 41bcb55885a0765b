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

#include "tlfit/injector/types.h"

namespace tlfit {

namespace {
constexpr std::array<std::string_view, 4> kOutcomeNames = {"Masked", "SDC", "ArchDUE",
                                                           "PotentialArchDUE"};
}

std::string_view outcome_name(OutcomeClass o) { return kOutcomeNames[static_cast<std::size_t>(o)]; }

std::optional<OutcomeClass> outcome_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kOutcomeNames.size(); ++i)
        if (kOutcomeNames[i] == name)
            return static_cast<OutcomeClass>(i);
    return std::nullopt;
}

std::uint64_t OutcomeCounts::count(OutcomeClass o) const {
    switch (o) {
    case OutcomeClass::Masked:
        return masked;
    case OutcomeClass::SDC:
        return sdc;
    case OutcomeClass::ArchDUE:
        return arch_due;
    case OutcomeClass::PotentialArchDUE:
        return potential_due;
    }
    return 0;
}

void OutcomeCounts::add(OutcomeClass o) {
    switch (o) {
    case OutcomeClass::Masked:
        ++masked;
        break;
    case OutcomeClass::SDC:
        ++sdc;
        break;
    case OutcomeClass::ArchDUE:
        ++arch_due;
        break;
    case OutcomeClass::PotentialArchDUE:
        ++potential_due;
        break;
    }
}

OutcomeCounts &OutcomeCounts::operator+=(const OutcomeCounts &o) {
    masked += o.masked;
    sdc += o.sdc;
    arch_due += o.arch_due;
    potential_due += o.potential_due;
    failed += o.failed;
    return *this;
}

void CampaignSummary::add(const OutcomeRecord &r) {
    auto &row = rows[{r.site.cls, r.site.kind}];
    if (r.error)
        ++row.failed;
    else
        row.add(r.outcome);
}

void CampaignSummary::merge(const CampaignSummary &other) {
    for (const auto &[key, counts] : other.rows)
        rows[key] += counts;
}

bool CampaignSummary::has(CampaignKey key) const { return rows.count(key) > 0; }

const OutcomeCounts *CampaignSummary::row(CampaignKey key) const {
    auto it = rows.find(key);
    return it == rows.end() ? nullptr : &it->second;
}

std::optional<double> CampaignSummary::p_sdc(CampaignKey key) const {
    const auto *r = row(key);
    if (!r || r->samples() == 0)
        return std::nullopt;
    return static_cast<double>(r->sdc) / static_cast<double>(r->samples());
}

std::optional<double> CampaignSummary::p_due(CampaignKey key) const {
    const auto *r = row(key);
    if (!r || r->samples() == 0)
        return std::nullopt;
    return static_cast<double>(r->arch_due) / static_cast<double>(r->samples());
}

} // namespace tlfit
