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

#include "tlfit/compose/fit.h"

#include "tlfit/error.h"
#include "tlfit/faults/rng.h"

#include <algorithm>
#include <cmath>

namespace tlfit {

std::string_view fit_mode_name(FitMode m) {
    switch (m) {
    case FitMode::TL:
        return "TL";
    case FitMode::IpaOnly:
        return "IPA-only";
    case FitMode::ApaOnlyProbability:
        return "APA-only-probability";
    }
    return "?";
}

PsdcTable psdc_from_summary(const CampaignSummary &summary, double level) {
    PsdcTable t;
    for (const auto &[key, c] : summary.rows) {
        const auto n = c.samples();
        if (n == 0)
            continue;
        PsdcEntry e;
        e.samples = n;
        e.p_sdc = static_cast<double>(c.sdc) / static_cast<double>(n);
        e.p_due = static_cast<double>(c.arch_due) / static_cast<double>(n);
        e.sdc_ci = proportion_ci(c.sdc, n, level);
        t[key] = e;
    }
    return t;
}

namespace {

RateUnits output_units(const RateTable &rates, const ComposeOptions &o) {
    if (o.calibration && !(*o.calibration > 0.0))
        throw InvariantError("calibration constant must be positive");
    if (rates.units == RateUnits::Relative && !o.calibration) {
        if (o.absolute)
            throw InvariantError(
                "units mismatch: relative rate table cannot produce absolute FIT without a "
                "calibration constant");
        return RateUnits::Relative;
    }
    return RateUnits::Absolute;
}

FITEstimate compose(FitMode mode, const Profile &profile, const RateTable &rates,
                    const PsdcTable *psdc, double s, const ComposeOptions &o) {
    if (!(s >= 0.0) || !std::isfinite(s))
        throw InvariantError("issue rate must be finite and non-negative");
    FITEstimate est;
    est.mode = mode;
    est.units = output_units(rates, o);
    est.scale = s;
    est.covered_fraction = profile.covered_fraction;
    const double cal = o.calibration.value_or(1.0);

    for (auto cls : kModeledClasses) {
        ClassContribution cc;
        cc.cls = cls;
        cc.f = profile.fraction(cls);
        double sdc = 0.0, lo = 0.0, hi = 0.0, due = 0.0, due_raw = 0.0;
        for (auto kind : kAllManifestations) {
            const double r = rates.rate(cls, kind);
            if (!(r > 0.0))
                continue;
            if (!is_injectable(kind)) {
                due += r;
                due_raw += r;
                continue;
            }
            if (!psdc) {
                sdc += r;
                lo += r;
                hi += r;
                continue;
            }
            auto it = psdc->find({cls, kind});
            if (it == psdc->end() || it->second.samples == 0) {
                const std::string msg = "no APA samples for " + std::string(class_name(cls)) +
                                        "/" + std::string(manifestation_name(kind));
                if (o.strict)
                    throw InvariantError(msg);
                if (cc.f > 0.0)
                    est.warnings.push_back(msg + "; contributes 0");
                continue;
            }
            const auto &e = it->second;
            sdc += r * e.p_sdc;
            lo += r * e.sdc_ci.lo;
            hi += r * e.sdc_ci.hi;
            due += r * e.p_due;
        }
        cc.sdc = cc.f * sdc * s * cal;
        cc.sdc_lo = cc.f * lo * s * cal;
        cc.sdc_hi = cc.f * hi * s * cal;
        cc.due = cc.f * due * s * cal;
        est.sdc_fit += cc.sdc;
        est.sdc_lo += cc.sdc_lo;
        est.sdc_hi += cc.sdc_hi;
        est.due_fit += cc.due;
        est.due_unscaled += cc.f * due_raw * cal;
        est.per_class.push_back(cc);
    }
    return est;
}

} // namespace

FITEstimate tl_fit(const Profile &profile, const RateTable &rates, const PsdcTable &psdc, double s,
                   const ComposeOptions &options) {
    return compose(FitMode::TL, profile, rates, &psdc, s, options);
}

FITEstimate tl_fit(const Profile &profile, const RateTable &rates, const CampaignSummary &apa,
                   double s, const ComposeOptions &options) {
    const auto t = psdc_from_summary(apa);
    return compose(FitMode::TL, profile, rates, &t, s, options);
}

FITEstimate ipa_only_fit(const Profile &profile, const RateTable &rates, double s,
                         const ComposeOptions &options) {
    return compose(FitMode::IpaOnly, profile, rates, nullptr, s, options);
}

std::optional<ManifestationKind> apa_only_kind(InstructionClass cls) {
    switch (cls) {
    case InstructionClass::BRA:
    case InstructionClass::Uncovered:
        return std::nullopt;
    case InstructionClass::FFMA:
        return ManifestationKind::RandomValue;
    default:
        return ManifestationKind::SingleBit;
    }
}

FITEstimate apa_only_sdc(const Profile &profile, const CampaignSummary &apa,
                         const ComposeOptions &options) {
    if (options.absolute || options.calibration)
        throw InvariantError("APA-only mode yields a probability and cannot be combined with "
                             "rate units or calibration");
    FITEstimate est;
    est.mode = FitMode::ApaOnlyProbability;
    est.units = RateUnits::Relative;
    est.covered_fraction = profile.covered_fraction;
    const auto t = psdc_from_summary(apa);
    double fsum = 0.0;
    for (auto cls : kModeledClasses)
        fsum += profile.fraction(cls);
    if (!(fsum > 0.0))
        throw InvariantError("profile has no covered instructions");
    for (auto cls : kModeledClasses) {
        ClassContribution cc;
        cc.cls = cls;
        cc.f = profile.fraction(cls);
        const double w = cc.f / fsum;
        if (auto kind = apa_only_kind(cls)) {
            auto it = t.find({cls, *kind});
            if (it == t.end()) {
                const std::string msg = "no APA samples for " + std::string(class_name(cls)) +
                                        "/" + std::string(manifestation_name(*kind));
                if (options.strict && cc.f > 0.0)
                    throw InvariantError(msg);
                if (cc.f > 0.0)
                    est.warnings.push_back(msg + "; contributes 0");
            } else {
                cc.sdc = w * it->second.p_sdc;
                cc.sdc_lo = w * it->second.sdc_ci.lo;
                cc.sdc_hi = w * it->second.sdc_ci.hi;
                cc.due = w * it->second.p_due;
            }
        } else {
            cc.due = w;
        }
        est.sdc_fit += cc.sdc;
        est.sdc_lo += cc.sdc_lo;
        est.sdc_hi += cc.sdc_hi;
        est.due_fit += cc.due;
        est.per_class.push_back(cc);
    }
    return est;
}

std::vector<double> normalize_to_max(const std::vector<double> &values) {
    double m = 0.0;
    for (double v : values) {
        if (v < 0.0 || !std::isfinite(v))
            throw InvariantError("normalization needs finite non-negative values");
        m = std::max(m, v);
    }
    std::vector<double> out(values.size(), 0.0);
    if (m > 0.0)
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = values[i] / m;
    return out;
}

BeamFit fit_from_beam(const BeamRun &run, double level) {
    if (!(run.fluence > 0.0) || !std::isfinite(run.fluence))
        throw InvariantError("fluence must be positive");
    if (!(run.flux > 0.0))
        throw InvariantError("flux must be positive");
    auto to_fit = [&](double events) { return events * run.flux * 1e9 / run.fluence; };
    BeamFit b;
    b.cross_section = static_cast<double>(run.events) / run.fluence;
    b.fit = to_fit(static_cast<double>(run.events));
    const auto ci = poisson_ci(run.events, level);
    b.ci = {to_fit(ci.lo), to_fit(ci.hi)};
    return b;
}

Interval bootstrap_sdc_fit(const std::vector<OutcomeRecord> &records, const Profile &profile,
                           const RateTable &rates, double s, std::uint64_t replicates,
                           std::uint64_t seed, double level, const ComposeOptions &options) {
    if (replicates == 0)
        throw InvariantError("bootstrap needs at least one replicate");
    std::map<CampaignKey, std::vector<OutcomeClass>> rows;
    for (const auto &r : records)
        if (!r.error)
            rows[{r.site.cls, r.site.kind}].push_back(r.outcome);

    RngStream rng(seed);
    std::vector<double> fits;
    fits.reserve(replicates);
    for (std::uint64_t b = 0; b < replicates; ++b) {
        CampaignSummary sum;
        for (const auto &[key, outs] : rows) {
            auto &row = sum.rows[key];
            for (std::size_t i = 0; i < outs.size(); ++i)
                row.add(outs[rng.below(outs.size())]);
        }
        fits.push_back(tl_fit(profile, rates, sum, s, options).sdc_fit);
    }
    std::sort(fits.begin(), fits.end());
    const double alpha = (1.0 - level) / 2.0;
    auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(
            std::clamp(std::floor(q * static_cast<double>(fits.size())), 0.0,
                       static_cast<double>(fits.size() - 1)));
        return fits[idx];
    };
    return {at(alpha), at(1.0 - alpha)};
}

} // namespace tlfit
