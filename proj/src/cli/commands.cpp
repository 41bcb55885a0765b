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

#include "tlfit/cli/cli.h"

#include "tlfit/classify/event.h"
#include "tlfit/compose/fit.h"
#include "tlfit/error.h"
#include "tlfit/faults/rate_table.h"
#include "tlfit/injector/injector.h"
#include "tlfit/io/json_io.h"
#include "tlfit/isa/interpreter.h"
#include "tlfit/isa/parser.h"
#include "tlfit/microbench/microbench.h"
#include "tlfit/profiler/profile.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace tlfit::cli {

namespace fs = std::filesystem;

namespace {

fs::path default_out_dir() {
    if (const char *env = std::getenv(kOutputDirEnv); env && *env)
        return env;
    return ".";
}

isa::Program load_program(const std::string &path) {
    return isa::parse_program(read_text_file(path));
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

InstructionClass parse_class(const std::string &s) {
    auto c = class_from_name(s);
    if (!c || *c == InstructionClass::Uncovered)
        throw InputError("unknown instruction class '" + s + "'");
    return *c;
}

ManifestationKind parse_kind(const std::string &s) {
    auto k = manifestation_from_name(s);
    if (!k)
        throw InputError("unknown manifestation '" + s + "'");
    return *k;
}

std::string digest_of(const std::vector<std::pair<std::string, std::string>> &items) {
    std::string canon;
    for (const auto &[k, v] : items)
        canon += k + "=" + v + "\n";
    return canon;
}

Json with_provenance(const std::string &command, const std::string &canon,
                     std::optional<std::uint64_t> seed, Json body) {
    Json j;
    j["provenance"] = provenance_json({command, fnv1a64(canon), seed});
    for (auto &[k, v] : body.items())
        j[k] = v;
    return j;
}

// ---------------------------------------------------------------- run
struct RunArgs {
    std::string program;
    std::uint64_t budget = 1'000'000;
};

int cmd_run(const RunArgs &a, std::ostream &out) {
    const auto prog = load_program(a.program);
    const auto r = isa::execute(prog, {a.budget});
    Json j;
    j["status"] = isa::describe(r.status);
    j["dynamic_count"] = r.dynamic_count;
    j["output"] = r.output;
    j["records"] = r.records.size();
    j["stdout"] = r.stdout_text;
    Json ops = Json::object();
    for (std::size_t i = 0; i < isa::kNumOpcodes; ++i)
        if (r.opcode_counts[i])
            ops[std::string(isa::opcode_name(static_cast<isa::Opcode>(i)))] = r.opcode_counts[i];
    j["opcode_counts"] = ops;
    out << dump(j);
    return kOk;
}

// ---------------------------------------------------------------- profile
struct ProfileArgs {
    std::string program;
    int slots = 4;
    std::string out_dir;
};

int cmd_profile(const ProfileArgs &a, std::ostream &out) {
    const auto text = read_text_file(a.program);
    const auto prog = isa::parse_program(text);
    const auto p = profile(prog, {a.slots});
    const auto canon = digest_of({{"program", hex64(fnv1a64(text))},
                                  {"slots", std::to_string(a.slots)}});
    const auto path = fs::path(a.out_dir) / "profile.json";
    write_text_file(path, dump(with_provenance("profile", canon, std::nullopt, to_json(p))));
    out << fmt::format("{:<10} {:>10} {:>10}\n", "class", "count", "f");
    for (std::size_t i = 0; i < kNumClasses; ++i)
        out << fmt::format("{:<10} {:>10} {:>10.6f}\n",
                           class_name(static_cast<InstructionClass>(i)), p.class_counts[i],
                           p.fractions[i]);
    out << fmt::format("total {}  covered {:.6f}  issue_rate {:.6f} ({} slots)\nwrote {}\n",
                       p.total, p.covered_fraction, p.issue_rate, p.issue_slots, path.string());
    return kOk;
}

// ---------------------------------------------------------------- microbench
struct MicrobenchArgs {
    std::string target = "IADD";
    int length = 0;
    int iterations = 4;
    int warps = 1;
    int tpw = 32;
    bool validate = false;
    std::string kinds = "single_bit";
    std::uint64_t seed = 1;
    std::string out_dir;
};

int cmd_microbench(const MicrobenchArgs &a, std::ostream &out) {
    MicrobenchSpec spec;
    spec.target = parse_class(a.target);
    spec.length = a.length;
    spec.iterations = a.iterations;
    spec.warps = a.warps;
    spec.threads_per_warp = a.tpw;
    const auto mb = generate(spec);
    const auto stem = fs::path(a.out_dir) / mb.layout.kernel;
    write_text_file(stem.string() + ".asm", mb.source);
    write_text_file(stem.string() + ".layout.json", dump(to_json(mb.layout)));
    const double overhead = check_overhead(mb);
    out << fmt::format("wrote {}.asm ({} series nodes, check overhead {:.4f})\n", stem.string(),
                       mb.layout.series_nodes(spec.target).size(), overhead);
    if (a.validate) {
        ValidationOptions vo;
        vo.kinds.clear();
        for (const auto &k : split(a.kinds, ','))
            vo.kinds.push_back(parse_kind(k));
        vo.seed = a.seed;
        const auto rep = validate_detection(mb, vo);
        const auto canon = digest_of({{"target", a.target},
                                      {"length", std::to_string(mb.spec.length)},
                                      {"iterations", std::to_string(a.iterations)},
                                      {"warps", std::to_string(a.warps)},
                                      {"tpw", std::to_string(a.tpw)},
                                      {"kinds", a.kinds}});
        write_text_file(stem.string() + ".detection.json",
                        dump(with_provenance("microbench", canon, a.seed, to_json(rep))));
        for (const auto &[k, s] : rep.by_kind)
            out << fmt::format("{:<16} cases {:>7}  detected {:.4f}  category {:.4f}  origin {:.4f}\n",
                               manifestation_name(k), s.cases, rep.detection_rate(k),
                               rep.category_rate(k), rep.origin_rate(k));
        if (spec.target == InstructionClass::BRA)
            out << fmt::format("filler {}/{} logged, outside {}/{} DUE, chain {}/{} detected\n",
                               rep.filler_logged, rep.filler_cases, rep.outside_due,
                               rep.outside_cases, rep.chain_detected, rep.chain_cases);
    }
    return kOk;
}

// ---------------------------------------------------------------- campaign
struct CampaignArgs {
    std::string program;
    std::string rates;
    std::string models;
    bool apa_only = false;
    std::uint64_t samples = 100;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool stratified = false;
    bool multi_thread = false;
    double hang_multiplier = 3.0;
    std::string shard;
    std::string out_dir;
};

int cmd_campaign(const CampaignArgs &a, std::ostream &out) {
    const int sources = !a.rates.empty() + !a.models.empty() + a.apa_only;
    if (sources != 1)
        throw CLI::ValidationError("campaign", "give exactly one of --rates, --models, --apa-only");
    const auto text = read_text_file(a.program);
    const auto prog = isa::parse_program(text);
    const auto prof = profile(prog);
    const auto golden = golden_run(prog, {a.hang_multiplier});

    std::vector<CampaignRow> rows;
    std::string rates_digest = "-";
    if (!a.rates.empty()) {
        const auto csv = read_text_file(a.rates);
        rates_digest = hex64(fnv1a64(csv));
        rows = rows_from_table(parse_rate_table(csv), a.multi_thread);
    } else if (!a.models.empty()) {
        for (const auto &m : split(a.models, ',')) {
            auto colon = m.find(':');
            if (colon == std::string::npos)
                throw InputError("model '" + m + "' is not CLASS:manifestation");
            rows.push_back({parse_class(m.substr(0, colon)), parse_kind(m.substr(colon + 1))});
        }
    } else {
        for (auto cls : kModeledClasses)
            if (auto k = apa_only_kind(cls); k && prof.count(cls) > 0)
                rows.push_back({cls, *k});
    }

    CampaignOptions co;
    co.samples = a.samples;
    co.seed = a.seed;
    co.jobs = a.jobs;
    co.stratified = a.stratified;
    co.multi_thread_models = a.multi_thread;
    if (!a.shard.empty()) {
        auto parts = split(a.shard, '/');
        if (parts.size() != 2)
            throw InputError("--shard expects INDEX/COUNT");
        co.shard = {std::stoull(parts[0]), std::stoull(parts[1])};
    }
    const auto res = run_campaign(prog, golden, prof, rows, co);

    std::string row_list;
    for (const auto &r : rows)
        row_list += std::string(class_name(r.cls)) + ":" +
                    std::string(manifestation_name(r.kind)) + " ";
    const auto canon = digest_of({{"program", hex64(fnv1a64(text))},
                                  {"rates", rates_digest},
                                  {"rows", row_list},
                                  {"samples", std::to_string(a.samples)},
                                  {"seed", std::to_string(a.seed)},
                                  {"stratified", a.stratified ? "1" : "0"},
                                  {"multi_thread", a.multi_thread ? "1" : "0"},
                                  {"hang_multiplier", fmt::format("{}", a.hang_multiplier)},
                                  {"shard", a.shard}});
    const fs::path dir(a.out_dir);
    write_text_file(dir / "summary.json",
                    dump(with_provenance("campaign", canon, a.seed, to_json(res.summary))));
    std::string lines = provenance_json({"campaign", fnv1a64(canon), a.seed}).dump() + "\n";
    for (const auto &r : res.records)
        lines += to_json(r).dump() + "\n";
    write_text_file(dir / "records.jsonl", lines);
    write_text_file(dir / "profile.json",
                    dump(with_provenance("campaign", canon, a.seed, to_json(prof))));

    out << fmt::format("{:<8} {:<18} {:>7} {:>7} {:>7} {:>7} {:>7}  {}\n", "class",
                       "manifestation", "n", "masked", "sdc", "due", "pdue", "sdc 95% CI");
    for (const auto &[key, c] : res.summary.rows) {
        std::string ci = "undefined";
        if (c.samples() > 0) {
            auto iv = proportion_ci(c.sdc, c.samples());
            ci = fmt::format("[{:.4f}, {:.4f}]", iv.lo, iv.hi);
        }
        out << fmt::format("{:<8} {:<18} {:>7} {:>7} {:>7} {:>7} {:>7}  {}\n",
                           class_name(key.first), manifestation_name(key.second), c.samples(),
                           c.masked, c.sdc, c.arch_due, c.potential_due, ci);
        if (c.failed)
            out << fmt::format("  {} member(s) failed; see records.jsonl\n", c.failed);
    }
    out << "wrote " << (dir / "summary.json").string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- merge
struct MergeArgs {
    std::vector<std::string> inputs;
    std::string out_dir;
};

int cmd_merge(const MergeArgs &a, std::ostream &out) {
    CampaignSummary total;
    std::string canon;
    for (const auto &p : a.inputs)
        total.merge(summary_from_json(read_json_file(p)));
    for (const auto &[key, c] : total.rows)
        canon += fmt::format("{}:{}={},{},{},{},{};", class_name(key.first),
                             manifestation_name(key.second), c.masked, c.sdc, c.arch_due,
                             c.potential_due, c.failed);
    const auto path = fs::path(a.out_dir) / "summary.json";
    write_text_file(path, dump(with_provenance("merge", canon, std::nullopt, to_json(total))));
    out << "merged " << a.inputs.size() << " summaries into " << path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- oracle
struct OracleArgs {
    std::string program;
    std::string cls = "IADD";
    std::uint64_t cap = 1'000'000;
    double hang_multiplier = 3.0;
    std::string out_dir;
};

int cmd_oracle(const OracleArgs &a, std::ostream &out) {
    const auto text = read_text_file(a.program);
    const auto prog = isa::parse_program(text);
    const auto golden = golden_run(prog, {a.hang_multiplier});
    const auto res = exhaustive_oracle(prog, parse_class(a.cls), golden, a.cap);
    const auto canon = digest_of({{"program", hex64(fnv1a64(text))},
                                  {"class", a.cls},
                                  {"hang_multiplier", fmt::format("{}", a.hang_multiplier)}});
    const auto path = fs::path(a.out_dir) / "oracle.json";
    write_text_file(path, dump(with_provenance("oracle", canon, std::nullopt, to_json(res))));
    out << fmt::format("{} runs  pSDC {:.6f}  pArchDUE {:.6f}  pPotentialDUE {:.6f}  pMasked {:.6f}\n",
                       res.runs, res.p_sdc, res.p_arch_due, res.p_potential_due, res.p_masked);
    return kOk;
}

// ---------------------------------------------------------------- attribute
struct AttributeArgs {
    std::string target = "IADD";
    int length = 0;
    int iterations = 4;
    int warps = 1;
    int tpw = 32;
    std::string kinds = "single_bit";
    std::uint64_t samples = 100;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_attribute(const AttributeArgs &a, std::ostream &out) {
    MicrobenchSpec spec;
    spec.target = parse_class(a.target);
    spec.length = a.length;
    spec.iterations = a.iterations;
    spec.warps = a.warps;
    spec.threads_per_warp = a.tpw;
    const auto mb = generate(spec);
    const auto golden = golden_run(mb.program);
    const auto prof = profile(mb.program);

    std::vector<CampaignRow> rows;
    for (const auto &k : split(a.kinds, ','))
        rows.push_back({spec.target, parse_kind(k)});
    CampaignOptions co;
    co.samples = a.samples;
    co.seed = a.seed;
    co.multi_thread_models = true;
    const auto res = run_campaign(mb.program, golden, prof, rows, co);

    CategoryHistogram hist;
    std::string lines;
    for (const auto &r : res.records) {
        if (r.error)
            continue;
        EventInput in{r.status, Phase::DuringKernel, r.records, spec.threads_per_warp};
        const auto ev = categorize_event(in, mb.layout);
        hist.add(ev);
        Json j = to_json(ev);
        j["ordinal"] = r.site.ordinal;
        j["manifestation"] = manifestation_name(r.site.kind);
        lines += j.dump() + "\n";
    }
    const auto canon = digest_of({{"target", a.target},
                                  {"length", std::to_string(mb.spec.length)},
                                  {"iterations", std::to_string(a.iterations)},
                                  {"warps", std::to_string(a.warps)},
                                  {"tpw", std::to_string(a.tpw)},
                                  {"kinds", a.kinds},
                                  {"samples", std::to_string(a.samples)}});
    const fs::path dir(a.out_dir);
    write_text_file(dir / "histogram.json",
                    dump(with_provenance("attribute", canon, a.seed, to_json(hist))));
    write_text_file(dir / "events.jsonl", lines);
    out << fmt::format("{:<24} {:>8}\n", "category", "count");
    for (const auto &[c, n] : hist.by_category)
        out << fmt::format("{:<24} {:>8}\n", category_name(c), n);
    for (const auto &[b, n] : hist.by_bit_type)
        out << fmt::format("bit type {:<15} {:>8}\n", bit_type_name(b), n);
    return kOk;
}

// ---------------------------------------------------------------- compose
struct ComposeArgs {
    std::string ipa;
    std::string apa;
    std::string profile;
    std::optional<double> scale;
    bool absolute = false;
    std::optional<double> calibration;
    bool strict = false;
    std::string records;
    std::uint64_t bootstrap = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

std::string estimate_row(const FITEstimate &e) {
    return fmt::format("{:<22} {:<9} {:>14.6g} [{:.6g}, {:.6g}]  DUE {:.6g}\n",
                       fit_mode_name(e.mode), units_name(e.units), e.sdc_fit, e.sdc_lo, e.sdc_hi,
                       e.due_fit);
}

int cmd_compose(const ComposeArgs &a, std::ostream &out, std::ostream &err) {
    const auto csv = read_text_file(a.ipa);
    const auto rates = parse_rate_table(csv);
    const auto apa = summary_from_json(read_json_file(a.apa));
    const auto prof = profile_from_json(read_json_file(a.profile));
    const double s = a.scale.value_or(prof.issue_rate);

    ComposeOptions o;
    o.strict = a.strict;
    o.absolute = a.absolute;
    o.calibration = a.calibration;
    const auto tl = tl_fit(prof, rates, apa, s, o);
    const auto ipa = ipa_only_fit(prof, rates, s, o);
    const auto apa_only = apa_only_sdc(prof, apa, ComposeOptions{a.strict, false, std::nullopt});

    Json body;
    body["scale"] = s;
    body["scale_source"] = a.scale ? "command line" : "profile issue rate";
    body["covered_fraction"] = prof.covered_fraction;
    body["tl"] = to_json(tl);
    body["ipa_only"] = to_json(ipa);
    body["apa_only"] = to_json(apa_only);
    if (a.bootstrap > 0) {
        if (a.records.empty())
            throw CLI::ValidationError("--bootstrap", "needs --records");
        std::vector<OutcomeRecord> recs;
        std::istringstream lines(read_text_file(a.records));
        for (std::string line; std::getline(lines, line);) {
            if (line.empty())
                continue;
            const auto j = Json::parse(line);
            if (!j.contains("outcome"))
                continue;
            OutcomeRecord r;
            r.site.cls = parse_class(j.at("class").get<std::string>());
            r.site.kind = parse_kind(j.at("manifestation").get<std::string>());
            auto oc = outcome_from_name(j.at("outcome").get<std::string>());
            if (!oc)
                throw InputError("bad outcome in records");
            r.outcome = *oc;
            recs.push_back(r);
        }
        const auto iv = bootstrap_sdc_fit(recs, prof, rates, s, a.bootstrap, a.seed, 0.95, o);
        body["tl"]["bootstrap_interval"] = Json::array({iv.lo, iv.hi});
    }

    const auto canon = digest_of({{"ipa", hex64(fnv1a64(csv))},
                                  {"apa", hex64(fnv1a64(read_text_file(a.apa)))},
                                  {"profile", hex64(fnv1a64(read_text_file(a.profile)))},
                                  {"scale", fmt::format("{}", s)},
                                  {"absolute", a.absolute ? "1" : "0"},
                                  {"calibration", a.calibration ? fmt::format("{}", *a.calibration) : "-"},
                                  {"strict", a.strict ? "1" : "0"},
                                  {"bootstrap", std::to_string(a.bootstrap)}});
    const fs::path dir(a.out_dir);
    write_text_file(dir / "report.json",
                    dump(with_provenance("compose", canon,
                                         a.bootstrap ? std::optional(a.seed) : std::nullopt, body)));

    std::string text = fmt::format("scale s = {} ({}), covered fraction = {:.6f}\n", s,
                                   a.scale ? "command line" : "profile issue rate",
                                   prof.covered_fraction);
    text += fmt::format("{:<22} {:<9} {:>14} {}\n", "mode", "units", "SDC", "interval");
    text += estimate_row(tl) + estimate_row(ipa) + estimate_row(apa_only);
    text += fmt::format("\n{:<8} {:>10} {:>14} {:>14} {:>14}\n", "class", "f", "TL SDC",
                        "IPA-only SDC", "APA-only P");
    std::string plot = "class,f,tl_sdc,ipa_only_sdc,apa_only_p\n";
    for (std::size_t i = 0; i < tl.per_class.size(); ++i) {
        const auto &c = tl.per_class[i];
        text += fmt::format("{:<8} {:>10.6f} {:>14.6g} {:>14.6g} {:>14.6g}\n", class_name(c.cls),
                            c.f, c.sdc, ipa.per_class[i].sdc, apa_only.per_class[i].sdc);
        plot += fmt::format("{},{},{},{},{}\n", class_name(c.cls), c.f, c.sdc,
                            ipa.per_class[i].sdc, apa_only.per_class[i].sdc);
    }
    if (tl.units == RateUnits::Relative)
        text += "values are relative to the rate table's reference class, not FIT\n";
    write_text_file(dir / "report.txt", text);
    write_text_file(dir / "report.csv", plot);
    out << text;
    for (const auto &w : tl.warnings)
        err << "warning: " << w << "\n";
    return kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Two-level SDC FIT estimation toolkit", "tlfit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));
    const std::string out_default = default_out_dir().string();

    RunArgs run_a;
    auto *run_c = app.add_subcommand("run", "execute a program fault-free");
    run_c->add_option("program", run_a.program, "assembly file")->required();
    run_c->add_option("--budget", run_a.budget, "instruction budget");

    ProfileArgs prof_a;
    prof_a.out_dir = out_default;
    auto *prof_c = app.add_subcommand("profile", "dynamic instruction profile");
    prof_c->add_option("program", prof_a.program)->required();
    prof_c->add_option("--slots", prof_a.slots, "scheduler issue slots")->check(CLI::PositiveNumber);
    prof_c->add_option("-o,--out", prof_a.out_dir, "output directory");

    MicrobenchArgs mb_a;
    mb_a.out_dir = out_default;
    auto *mb_c = app.add_subcommand("microbench", "generate (and validate) a microbenchmark");
    mb_c->add_option("--target", mb_a.target, "IADD FADD IMAD FFMA LDS ISETP BRA")->required();
    mb_c->add_option("--length", mb_a.length, "series length (0 = default)");
    mb_c->add_option("--iterations", mb_a.iterations);
    mb_c->add_option("--warps", mb_a.warps)->check(CLI::PositiveNumber);
    mb_c->add_option("--threads-per-warp", mb_a.tpw)->check(CLI::Range(1, 64));
    mb_c->add_flag("--validate", mb_a.validate, "run the detection validation");
    mb_c->add_option("--kinds", mb_a.kinds, "comma-separated manifestations to validate");
    mb_c->add_option("--seed", mb_a.seed);
    mb_c->add_option("-o,--out", mb_a.out_dir);

    CampaignArgs camp_a;
    camp_a.out_dir = out_default;
    auto *camp_c = app.add_subcommand("campaign", "architecture-level injection campaign");
    camp_c->set_config("--config", "", "TOML/INI file with campaign options");
    camp_c->add_option("program", camp_a.program)->required();
    camp_c->add_option("--rates", camp_a.rates, "rate-table CSV selecting the rows");
    camp_c->add_option("--models", camp_a.models, "explicit CLASS:manifestation list");
    camp_c->add_flag("--apa-only", camp_a.apa_only, "uniform single-bit model (FFMA random)");
    camp_c->add_option("--samples", camp_a.samples, "samples per row");
    camp_c->add_option("--seed", camp_a.seed, "master seed")->required();
    camp_c->add_option("--jobs", camp_a.jobs)->check(CLI::PositiveNumber);
    camp_c->add_flag("--stratified", camp_a.stratified, "sample kernels uniformly first");
    camp_c->add_flag("--multi-thread", camp_a.multi_thread, "enable two-thread/two-warp models");
    camp_c->add_option("--hang-multiplier", camp_a.hang_multiplier);
    camp_c->add_option("--shard", camp_a.shard, "INDEX/COUNT");
    camp_c->add_option("-o,--out", camp_a.out_dir);

    MergeArgs merge_a;
    merge_a.out_dir = out_default;
    auto *merge_c = app.add_subcommand("merge", "merge campaign summaries");
    merge_c->add_option("inputs", merge_a.inputs)->required()->check(CLI::ExistingFile);
    merge_c->add_option("-o,--out", merge_a.out_dir);

    OracleArgs or_a;
    or_a.out_dir = out_default;
    auto *or_c = app.add_subcommand("oracle", "exhaustive single-bit outcome distribution");
    or_c->add_option("program", or_a.program)->required();
    or_c->add_option("--class", or_a.cls)->required();
    or_c->add_option("--cap", or_a.cap);
    or_c->add_option("--hang-multiplier", or_a.hang_multiplier);
    or_c->add_option("-o,--out", or_a.out_dir);

    AttributeArgs at_a;
    at_a.out_dir = out_default;
    auto *at_c = app.add_subcommand("attribute", "categorize injected microbenchmark events");
    at_c->add_option("--target", at_a.target)->required();
    at_c->add_option("--length", at_a.length);
    at_c->add_option("--iterations", at_a.iterations);
    at_c->add_option("--warps", at_a.warps)->check(CLI::PositiveNumber);
    at_c->add_option("--threads-per-warp", at_a.tpw)->check(CLI::Range(1, 64));
    at_c->add_option("--kinds", at_a.kinds);
    at_c->add_option("--samples", at_a.samples);
    at_c->add_option("--seed", at_a.seed)->required();
    at_c->add_option("-o,--out", at_a.out_dir);

    ComposeArgs co_a;
    co_a.out_dir = out_default;
    auto *co_c = app.add_subcommand("compose", "TL, IPA-only and APA-only estimates");
    co_c->add_option("--ipa", co_a.ipa, "rate-table CSV")->required();
    co_c->add_option("--apa", co_a.apa, "campaign summary JSON")->required();
    co_c->add_option("--profile", co_a.profile, "profile JSON")->required();
    co_c->add_option("--scale", co_a.scale, "issue rate s (default: profile)");
    co_c->add_flag("--absolute", co_a.absolute, "require absolute FIT output");
    co_c->add_option("--calibration", co_a.calibration, "FIT per relative unit");
    co_c->add_flag("--strict", co_a.strict, "missing APA rows are errors");
    co_c->add_option("--records", co_a.records, "records.jsonl for --bootstrap");
    co_c->add_option("--bootstrap", co_a.bootstrap, "bootstrap replicates");
    co_c->add_option("--seed", co_a.seed, "bootstrap seed");
    co_c->add_option("-o,--out", co_a.out_dir);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion &) {
        out << tool_version() << "\n";
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*run_c)
            return cmd_run(run_a, out);
        if (*prof_c)
            return cmd_profile(prof_a, out);
        if (*mb_c)
            return cmd_microbench(mb_a, out);
        if (*camp_c)
            return cmd_campaign(camp_a, out);
        if (*merge_c)
            return cmd_merge(merge_a, out);
        if (*or_c)
            return cmd_oracle(or_a, out);
        if (*at_c)
            return cmd_attribute(at_a, out);
        if (*co_c)
            return cmd_compose(co_a, out, err);
    } catch (const CLI::ValidationError &e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const InputError &e) {
        err << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const nlohmann::json::exception &e) {
        err << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const InvariantError &e) {
        err << "invariant error: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::invalid_argument &e) {
        err << "input error: " << e.what() << "\n";
        return kInput;
    }
    return kUsage;
}

int main_entry(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace tlfit::cli
