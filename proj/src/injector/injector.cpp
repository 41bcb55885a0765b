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

#include "tlfit/injector/injector.h"

#include "tlfit/classify/outcome.h"
#include "tlfit/error.h"
#include "tlfit/faults/rng.h"

#include <atomic>
#include <cmath>
#include <thread>

namespace tlfit {

namespace {

const std::vector<std::string> &effective_symptoms(const std::vector<std::string> &given,
                                                   std::vector<std::string> &storage) {
    if (!given.empty())
        return given;
    storage = default_symptom_patterns();
    return storage;
}

std::uint64_t class_index_of(InstructionClass c) { return static_cast<std::uint64_t>(c); }

} // namespace

GoldenReference golden_run(const isa::Program &program, const GoldenOptions &options) {
    if (!(options.budget_multiplier >= 1.0))
        throw InvariantError("hang-budget multiplier must be at least 1");
    ClassCounts counts{};
    auto run = isa::execute(program, {options.instruction_budget}, [&](isa::HookContext &ctx) {
        ++counts[static_cast<std::size_t>(classify_opcode(ctx.inst.op))];
    });
    if (!run.status.clean_exit())
        throw InvariantError("golden run did not exit: " + isa::describe(run.status));
    GoldenReference g;
    g.output = run.output;
    g.stdout_text = run.stdout_text;
    g.dynamic_count = run.dynamic_count;
    g.class_counts = counts;
    g.budget_multiplier = options.budget_multiplier;
    g.hang_budget = static_cast<std::uint64_t>(
        std::ceil(options.budget_multiplier * static_cast<double>(run.dynamic_count)));
    return g;
}

std::uint64_t row_seed(std::uint64_t master, InstructionClass cls, ManifestationKind kind) {
    return split_seed(master, class_index_of(cls) * 16 + static_cast<std::uint64_t>(kind));
}

std::vector<InjectionSite> select_sites(const Profile &profile, InstructionClass cls,
                                        ManifestationKind kind, std::uint64_t n,
                                        std::uint64_t seed, bool stratified) {
    const auto total = profile.count(cls);
    if (total == 0)
        throw InvariantError("class absent from profile: " + std::string(class_name(cls)));
    const auto ci = static_cast<std::size_t>(cls);

    // Per-kernel lists of (launch, first class index, count) for mapping and
    // for stratified draws.
    struct Span {
        int launch;
        std::uint64_t begin;
        std::uint64_t count;
    };
    std::vector<std::string> kernel_names;
    std::vector<std::vector<Span>> by_kernel;
    std::vector<Span> flat;
    std::uint64_t cursor = 0;
    for (std::size_t l = 0; l < profile.launches.size(); ++l) {
        const auto &lp = profile.launches[l];
        const auto c = lp.class_counts[ci];
        if (c == 0)
            continue;
        Span s{static_cast<int>(l), cursor, c};
        cursor += c;
        flat.push_back(s);
        std::size_t k = 0;
        while (k < kernel_names.size() && kernel_names[k] != lp.kernel)
            ++k;
        if (k == kernel_names.size()) {
            kernel_names.push_back(lp.kernel);
            by_kernel.emplace_back();
        }
        by_kernel[k].push_back(s);
    }
    if (cursor != total)
        throw InvariantError("profile launch counts disagree with class totals");

    const auto base = row_seed(seed, cls, kind);
    std::vector<InjectionSite> sites;
    sites.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        RngStream rng(split_seed(base, i));
        std::uint64_t index;
        if (stratified) {
            const auto &spans = by_kernel[rng.below(by_kernel.size())];
            std::uint64_t kcount = 0;
            for (const auto &s : spans)
                kcount += s.count;
            auto within = rng.below(kcount);
            index = 0;
            for (const auto &s : spans) {
                if (within < s.count) {
                    index = s.begin + within;
                    break;
                }
                within -= s.count;
            }
        } else {
            index = rng.below(total);
        }
        InjectionSite site;
        site.cls = cls;
        site.kind = kind;
        site.class_index = index;
        site.dest_seed = rng.next_u64();
        site.value_seed = rng.next_u64();
        site.ordinal = i;
        for (const auto &s : flat)
            if (index >= s.begin && index < s.begin + s.count) {
                site.launch = s.launch;
                site.kernel = profile.launches[static_cast<std::size_t>(s.launch)].kernel;
                break;
            }
        sites.push_back(std::move(site));
    }
    return sites;
}

void finish_record(OutcomeRecord &record, const isa::RunResult &run,
                   const GoldenReference &golden, const std::vector<std::string> &symptoms) {
    record.status = run.status;
    record.stdout_text = run.stdout_text;
    record.records = run.records;
    record.dynamic_count = run.dynamic_count;
    record.output_diff_words = 0;
    record.first_diff = -1;
    const auto n = std::min(run.output.size(), golden.output.size());
    for (std::size_t i = 0; i < n; ++i)
        if (run.output[i] != golden.output[i]) {
            if (record.first_diff < 0)
                record.first_diff = static_cast<int>(i);
            ++record.output_diff_words;
        }
    record.stdout_differs = run.stdout_text != golden.stdout_text;
    std::vector<std::string> storage;
    record.outcome = classify_outcome(record, golden, effective_symptoms(symptoms, storage));
}

OutcomeRecord run_injection(const isa::Program &program, const InjectionSite &site,
                            const GoldenReference &golden) {
    return run_injection(program, site, golden, {});
}

OutcomeRecord run_injection(const isa::Program &program, const InjectionSite &site,
                            const GoldenReference &golden,
                            const std::vector<std::string> &symptoms) {
    OutcomeRecord rec;
    rec.site = site;
    rec.corruption.kind = site.kind;
    if (!is_injectable(site.kind)) {
        rec.error = "manifestation '" + std::string(manifestation_name(site.kind)) +
                    "' is accounted analytically, not injected";
        return rec;
    }
    if (site.class_index >= golden.class_counts[static_cast<std::size_t>(site.cls)]) {
        rec.error = "site index beyond execution";
        return rec;
    }

    std::uint64_t seen = 0;
    bool injected = false;
    std::optional<std::string> failure;
    RngStream rng(split_seed(site.dest_seed, site.value_seed));
    PartnerWarpCorruption partner;
    auto hook = [&](isa::HookContext &ctx) {
        if (partner.pending() && partner.maybe_apply(ctx, rng, rec.corruption))
            return;
        if (injected || classify_opcode(ctx.inst.op) != site.cls)
            return;
        if (seen++ != site.class_index)
            return;
        injected = true;
        try {
            rec.corruption =
                apply_manifestation(ctx.state, InjectionPoint::from(ctx), site.kind, rng);
            partner.arm(ctx, site.kind);
        } catch (const InvariantError &e) {
            failure = e.what();
        }
    };
    auto run = isa::execute(program, {golden.hang_budget}, hook);
    if (failure) {
        rec.error = *failure;
        return rec;
    }
    if (!injected) {
        rec.error = "site index beyond execution";
        return rec;
    }
    finish_record(rec, run, golden, symptoms);
    return rec;
}

std::vector<CampaignRow> rows_from_table(const RateTable &table, bool multi_thread_models) {
    std::vector<CampaignRow> rows;
    for (auto cls : kModeledClasses)
        for (auto kind : kAllManifestations) {
            if (!is_injectable(kind) || !(table.rate(cls, kind) > 0.0))
                continue;
            if (is_multi_thread(kind) && !multi_thread_models)
                continue;
            rows.push_back({cls, kind});
        }
    return rows;
}

CampaignResult run_campaign(const isa::Program &program, const GoldenReference &golden,
                            const Profile &profile, const std::vector<CampaignRow> &rows,
                            const CampaignOptions &options) {
    if (options.jobs < 1)
        throw InvariantError("jobs must be at least 1");
    if (options.shard && (options.shard->second == 0 || options.shard->first >= options.shard->second))
        throw InvariantError("invalid shard specification");

    CampaignResult result;
    std::vector<InjectionSite> plan;
    for (const auto &row : rows) {
        result.summary.ensure_row({row.cls, row.kind});
        if (options.samples == 0 || profile.count(row.cls) == 0)
            continue;
        auto sites = select_sites(profile, row.cls, row.kind, options.samples, options.seed,
                                  options.stratified);
        plan.insert(plan.end(), sites.begin(), sites.end());
    }
    if (options.shard) {
        std::vector<InjectionSite> mine;
        for (std::size_t i = 0; i < plan.size(); ++i)
            if (i % options.shard->second == options.shard->first)
                mine.push_back(plan[i]);
        plan.swap(mine);
    }

    std::vector<std::string> storage;
    const auto &symptoms = effective_symptoms(options.symptoms, storage);
    result.records.resize(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++)
            result.records[i] = run_injection(program, plan[i], golden, symptoms);
    };
    const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(options.jobs),
                                            std::max<std::size_t>(plan.size(), 1));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    for (const auto &r : result.records)
        result.summary.add(r);
    return result;
}

OracleResult exhaustive_oracle(const isa::Program &program, InstructionClass cls,
                               const GoldenReference &golden, std::uint64_t cap,
                               const std::vector<std::string> &symptoms) {
    struct Slot {
        std::vector<int> threads;
        int width = 32;
    };
    std::vector<Slot> slots;
    std::optional<std::string> problem;
    isa::execute(program, {golden.hang_budget}, [&](isa::HookContext &ctx) {
        if (classify_opcode(ctx.inst.op) != cls)
            return;
        Slot s;
        if (ctx.inst.writes_predicate())
            s.width = 1;
        else if (!ctx.inst.writes_register())
            problem = "no injectable destination in " + std::string(isa::opcode_name(ctx.inst.op));
        for (int t = 0; t < ctx.state.threads_per_warp(); ++t)
            if ((ctx.active >> t) & 1u)
                s.threads.push_back(t);
        slots.push_back(std::move(s));
    });
    if (problem)
        throw InvariantError(*problem);
    if (slots.empty())
        throw InvariantError("class absent from program: " + std::string(class_name(cls)));

    std::uint64_t runs = 0;
    for (const auto &s : slots)
        runs += s.threads.size() * static_cast<std::uint64_t>(s.width);
    if (runs > cap)
        throw InvariantError("oracle needs " + std::to_string(runs) + " runs, cap is " +
                             std::to_string(cap));

    std::vector<std::string> storage;
    const auto &pats = effective_symptoms(symptoms, storage);
    OracleResult res;
    std::array<double, 4> weight{};
    for (std::uint64_t j = 0; j < slots.size(); ++j) {
        const auto &s = slots[j];
        const double w = 1.0 / static_cast<double>(s.threads.size() * s.width);
        for (int t : s.threads)
            for (int b = 0; b < s.width; ++b) {
                std::uint64_t seen = 0;
                OutcomeRecord rec;
                rec.site.cls = cls;
                rec.site.class_index = j;
                auto run = isa::execute(program, {golden.hang_budget}, [&](isa::HookContext &ctx) {
                    if (classify_opcode(ctx.inst.op) != cls || seen++ != j)
                        return;
                    rec.corruption = apply_bit_flip(ctx.state, InjectionPoint::from(ctx), t, b);
                });
                finish_record(rec, run, golden, pats);
                res.counts.add(rec.outcome);
                weight[static_cast<std::size_t>(rec.outcome)] += w;
                ++res.runs;
            }
    }
    const double n = static_cast<double>(slots.size());
    res.p_masked = weight[0] / n;
    res.p_sdc = weight[1] / n;
    res.p_arch_due = weight[2] / n;
    res.p_potential_due = weight[3] / n;
    return res;
}

} // namespace tlfit
