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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "tlfit/compose/fit.h"
#include "tlfit/compose/stats.h"
#include "tlfit/faults/rate_table.h"
#include "tlfit/faults/rng.h"
#include "tlfit/injector/injector.h"
#include "tlfit/io/json_io.h"
#include "tlfit/isa/parser.h"
#include "tlfit/microbench/microbench.h"
#include "tlfit/profiler/profile.h"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <string>

using namespace tlfit;
using IC = InstructionClass;
using MK = ManifestationKind;

namespace {

std::string fixture(const std::string &name) { return std::string(TLFIT_FIXTURE_DIR) + "/" + name; }
std::string data(const std::string &name) { return std::string(TLFIT_DATA_DIR) + "/" + name; }

RateTable shipped_rates() { return parse_rate_table(read_text_file(data("manifestation_rates.csv"))); }

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

struct Verdict {
    bool pass;
    std::string detail;
};

Verdict ac1() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::pair<std::string, IC>> cases = {
        {"reduce.asm", IC::IADD}, {"fp_poly.asm", IC::FFMA}, {"branchy.asm", IC::IMAD}};
    bool pass = true;
    std::string detail;
    for (const auto &[file, cls] : cases) {
        const auto prog = isa::parse_program(read_text_file(fixture(file)));
        const auto run = isa::execute(prog, {1'000'000});
        if (run.dynamic_count > 500 || prog.threads_per_warp != 4)
            return {false, file + " is not a valid fixture"};
        const auto golden = golden_run(prog);
        const auto prof = profile(prog);
        const auto oracle = exhaustive_oracle(prog, cls, golden);
        CampaignOptions o;
        o.samples = 2000;
        o.seed = 20240101;
        o.jobs = 4;
        const auto res = run_campaign(prog, golden, prof, {{cls, MK::SingleBit}}, o);
        const auto *row = res.summary.row({cls, MK::SingleBit});
        const auto ci = proportion_ci(row->sdc, row->samples());
        const bool ok = row->samples() == 2000 && ci.contains(oracle.p_sdc);
        pass = pass && ok;
        detail += fmt::format("{} {}: oracle {:.4f} ({} runs), sampled {:.4f} [{:.4f}, {:.4f}]; ",
                              file, class_name(cls), oracle.p_sdc, oracle.runs,
                              static_cast<double>(row->sdc) / 2000.0, ci.lo, ci.hi);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pass = pass && secs < 300.0;
    detail += fmt::format("{:.1f} s", secs);
    return {pass, detail};
}

Verdict ac2() {
    RngStream rng(2);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // Random absolute rate table over all classes and manifestations.
        RateTable rates;
        rates.units = RateUnits::Absolute;
        for (auto c : kModeledClasses) {
            double total = 0;
            for (auto k : kAllManifestations)
                if (rng.uniform() < 0.5) {
                    const double r = rng.uniform() * 10;
                    rates.rates[{c, k}] = r;
                    total += r;
                }
            rates.totals[c] = total;
        }
        Profile p;
        for (auto c : kModeledClasses)
            p.class_counts[static_cast<std::size_t>(c)] = rng.below(10000);
        p.class_counts[static_cast<std::size_t>(IC::Uncovered)] = rng.below(10000) + 1;
        finalize_fractions(p);
        PsdcTable psdc;
        for (auto c : kModeledClasses)
            for (auto k : kAllManifestations)
                if (is_injectable(k) && rng.uniform() < 0.9)
                    psdc[{c, k}] = {rng.uniform(), {}, 0.0, 1};
        const double s = rng.uniform() * 5;
        if (ipa_only_fit(p, rates, s).sdc_fit < tl_fit(p, rates, psdc, s).sdc_fit)
            ++violations;
    }
    return {violations == 0, fmt::format("{} violations in 1000 tuples", violations)};
}

Profile uniform_profile() {
    Profile p;
    for (auto c : kModeledClasses)
        p.class_counts[static_cast<std::size_t>(c)] = 1;
    finalize_fractions(p);
    return p;
}

Verdict ac3() {
    PsdcTable psdc;
    for (auto c : kModeledClasses) {
        psdc[{c, MK::SingleBit}] = {0.3, {}, 0.0, 1};
        psdc[{c, MK::DoubleBit}] = {0.3, {}, 0.0, 1};
        psdc[{c, MK::RandomValue}] = {0.4, {}, 0.0, 1};
    }
    const double got = tl_fit(uniform_profile(), shipped_rates(), psdc, 1.0).sdc_fit;
    // Per class: sum of rate x pSDC over the table rows.
    const double hand = (0.54 * 0.3 + 0.08 * 0.3 + 0.08 * 0.4) + (0.08 * 0.3 + 0.17 * 0.3 + 0.17 * 0.4) +
                        (0.40 * 0.3 + 0.40 * 0.3 + 0.20 * 0.4) + (0.26 * 0.3 + 0.35 * 0.4) +
                        (0.20 * 0.3) + (0.67 * 0.3) + 0.0;
    const double expected = hand / 7.0;
    return {rel_close(got, expected, 1e-12),
            fmt::format("tl_fit {:.15g}, hand {:.15g}", got, expected)};
}

Verdict ac4() {
    const auto prog = isa::parse_program(read_text_file(fixture("reduce.asm")));
    const auto golden = golden_run(prog);
    const auto prof = profile(prog);
    const auto rates = shipped_rates();
    CampaignOptions o;
    o.samples = 200;
    o.seed = 4;
    const auto summary = run_campaign(prog, golden, prof, rows_from_table(rates, false), o).summary;
    const double hot = tl_fit(prof, rates, summary, 3.49).sdc_fit;
    const double lud = tl_fit(prof, rates, summary, 0.13).sdc_fit;
    const double lava = tl_fit(prof, rates, summary, 3.85).sdc_fit;
    const bool ok = hot > 0 && rel_close(lud / hot, 0.13 / 3.49, 1e-12) &&
                    rel_close(lava / hot, 3.85 / 3.49, 1e-12);
    return {ok, fmt::format("hotspot {:.12g}, lud {:.12g}, lavaMD {:.12g}", hot, lud, lava)};
}

Verdict ac5() {
    bool pass = true;
    std::string detail;
    for (auto c : kModeledClasses) {
        MicrobenchSpec spec;
        spec.target = c;
        spec.threads_per_warp = 4;
        const auto mb = generate(spec);
        const auto rep = validate_detection(mb);
        if (c == IC::BRA) {
            const bool ok = rep.filler_cases > 0 && rep.filler_logged == rep.filler_cases &&
                            rep.outside_cases > 0 && rep.outside_due == rep.outside_cases;
            pass = pass && ok;
            detail += fmt::format("BRA filler {}/{} outside {}/{}", rep.filler_logged,
                                  rep.filler_cases, rep.outside_due, rep.outside_cases);
            continue;
        }
        const double d = rep.detection_rate(MK::SingleBit);
        const double k = rep.category_rate(MK::SingleBit);
        const double o = rep.origin_rate(MK::SingleBit);
        const double need = c == IC::IADD ? 1.0 : 0.99;
        const bool ok = rep.by_kind.at(MK::SingleBit).cases > 0 && d >= need &&
                        (c != IC::IADD || (k == 1.0 && o == 1.0));
        pass = pass && ok;
        detail += fmt::format("{} {:.4f}/{:.4f}/{:.4f}; ", class_name(c), d, k, o);
    }
    return {pass, detail};
}

Verdict ac6() {
    const auto one = fit_from_beam({1, 1e9, 13.0});
    const auto zero = fit_from_beam({0, 1e9, 13.0});
    const bool ok = one.fit == 13.0 && zero.fit == 0.0 && zero.ci.hi > 0.0;
    return {ok, fmt::format("1 event -> {} FIT; 0 events -> {} FIT, upper {:.6g}", one.fit,
                            zero.fit, zero.ci.hi)};
}

Verdict ac7() {
    RngStream rng(7);
    int covered = 0;
    for (int c = 0; c < 1000; ++c) {
        std::uint64_t k = 0;
        for (int i = 0; i < 500; ++i)
            k += rng.uniform() < 0.2;
        covered += proportion_ci(k, 500).contains(0.2);
    }
    const double cov = covered / 1000.0;
    return {cov >= 0.93, fmt::format("coverage {:.3f}", cov)};
}

Verdict ac8() {
    const auto prog = isa::parse_program(read_text_file(fixture("branchy.asm")));
    const auto golden = golden_run(prog);
    const auto prof = profile(prog);
    const auto rows = rows_from_table(shipped_rates(), true);
    CampaignOptions o;
    o.samples = 150;
    o.seed = 8;
    o.jobs = 1;
    const auto single = run_campaign(prog, golden, prof, rows, o);
    o.jobs = 8;
    const auto eight = run_campaign(prog, golden, prof, rows, o);
    const bool identical = dump(to_json(single.summary)) == dump(to_json(eight.summary));

    std::vector<CampaignSummary> shards;
    for (std::uint64_t i = 0; i < 5; ++i) {
        o.shard = {{i, 5}};
        shards.push_back(run_campaign(prog, golden, prof, rows, o).summary);
    }
    std::mt19937 gen(3);
    bool merged_ok = true;
    for (int t = 0; t < 10; ++t) {
        std::shuffle(shards.begin(), shards.end(), gen);
        CampaignSummary m;
        for (const auto &s : shards)
            m.merge(s);
        merged_ok = merged_ok && dump(to_json(m)) == dump(to_json(single.summary));
    }
    return {identical && merged_ok,
            fmt::format("jobs 1 vs 8 {}; shuffled shard merge {}", identical ? "identical" : "differ",
                        merged_ok ? "equal" : "differs")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
        {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}};
    int failures = 0;
    for (const auto &[name, fn] : criteria) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
