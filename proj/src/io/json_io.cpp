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

#include "tlfit/io/json_io.h"

#include "tlfit/error.h"

#include <fstream>
#include <sstream>

namespace tlfit {

std::string_view tool_version() { return TLFIT_VERSION; }

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    return s;
}

Json provenance_json(const Provenance &p) {
    Json j;
    j["tool"] = "tlfit";
    j["version"] = tool_version();
    j["command"] = p.command;
    j["config_digest"] = hex64(p.config_digest);
    j["seed"] = p.seed ? Json(*p.seed) : Json(nullptr);
    return j;
}

namespace {

InstructionClass class_field(const Json &j, const char *key) {
    auto name = j.at(key).get<std::string>();
    auto c = class_from_name(name);
    if (!c)
        throw InputError("unknown instruction class '" + name + "'");
    return *c;
}

ManifestationKind kind_field(const Json &j, const char *key) {
    auto name = j.at(key).get<std::string>();
    auto k = manifestation_from_name(name);
    if (!k)
        throw InputError("unknown manifestation '" + name + "'");
    return *k;
}

template <typename F> auto schema_guard(const char *what, F &&f) {
    try {
        return f();
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("invalid ") + what + " document: " + e.what());
    }
}

Json interval(const Interval &i) { return Json::array({i.lo, i.hi}); }

} // namespace

Json to_json(const Profile &p) {
    Json j;
    j["total"] = p.total;
    j["issue_rate"] = p.issue_rate;
    j["issue_slots"] = p.issue_slots;
    j["issue_rate_averaging"] = "instruction-weighted over launches";
    j["covered_fraction"] = p.covered_fraction;
    Json ops = Json::object();
    for (std::size_t i = 0; i < isa::kNumOpcodes; ++i)
        if (p.opcode_counts[i] > 0)
            ops[std::string(isa::opcode_name(static_cast<isa::Opcode>(i)))] = p.opcode_counts[i];
    j["opcode_counts"] = ops;
    Json counts = Json::object(), fr = Json::object();
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        const auto name = std::string(class_name(static_cast<InstructionClass>(i)));
        counts[name] = p.class_counts[i];
        fr[name] = p.fractions[i];
    }
    j["class_counts"] = counts;
    j["fractions"] = fr;
    j["kernel_invocations"] = p.kernel_invocations;
    Json launches = Json::array();
    for (const auto &l : p.launches) {
        Json lc = Json::object();
        for (std::size_t i = 0; i < kNumClasses; ++i)
            lc[std::string(class_name(static_cast<InstructionClass>(i)))] = l.class_counts[i];
        launches.push_back(
            {{"kernel", l.kernel}, {"instructions", l.instructions}, {"issue_rate", l.issue_rate},
             {"class_counts", lc}});
    }
    j["launches"] = launches;
    return j;
}

Profile profile_from_json(const Json &j) {
    return schema_guard("profile", [&] {
        Profile p;
        p.issue_rate = j.at("issue_rate").get<double>();
        p.issue_slots = j.value("issue_slots", 4);
        for (const auto &[name, v] : j.at("class_counts").items()) {
            auto c = class_from_name(name);
            if (!c)
                throw InputError("unknown instruction class '" + name + "'");
            p.class_counts[static_cast<std::size_t>(*c)] = v.get<std::uint64_t>();
        }
        if (j.contains("opcode_counts"))
            for (const auto &[name, v] : j.at("opcode_counts").items())
                if (auto op = isa::opcode_from_name(name))
                    p.opcode_counts[static_cast<std::size_t>(*op)] = v.get<std::uint64_t>();
        if (j.contains("kernel_invocations"))
            p.kernel_invocations = j.at("kernel_invocations").get<std::map<std::string, int>>();
        if (j.contains("launches"))
            for (const auto &l : j.at("launches")) {
                LaunchProfile lp;
                lp.kernel = l.at("kernel").get<std::string>();
                lp.instructions = l.at("instructions").get<std::uint64_t>();
                lp.issue_rate = l.at("issue_rate").get<double>();
                for (const auto &[name, v] : l.at("class_counts").items())
                    if (auto c = class_from_name(name))
                        lp.class_counts[static_cast<std::size_t>(*c)] = v.get<std::uint64_t>();
                p.launches.push_back(lp);
            }
        finalize_fractions(p);
        return p;
    });
}

Json to_json(const CampaignSummary &s, double level) {
    Json rows = Json::array();
    for (const auto &[key, c] : s.rows) {
        Json r;
        r["class"] = class_name(key.first);
        r["manifestation"] = manifestation_name(key.second);
        r["samples"] = c.samples();
        r["masked"] = c.masked;
        r["sdc"] = c.sdc;
        r["arch_due"] = c.arch_due;
        r["potential_arch_due"] = c.potential_due;
        r["failed"] = c.failed;
        const auto n = c.samples();
        r["ci_defined"] = n > 0;
        if (n > 0) {
            const double nn = static_cast<double>(n);
            r["proportions"] = {{"masked", static_cast<double>(c.masked) / nn},
                                {"sdc", static_cast<double>(c.sdc) / nn},
                                {"arch_due", static_cast<double>(c.arch_due) / nn},
                                {"potential_arch_due", static_cast<double>(c.potential_due) / nn}};
            r["sdc_ci"] = interval(proportion_ci(c.sdc, n, level));
            r["arch_due_ci"] = interval(proportion_ci(c.arch_due, n, level));
        } else {
            r["proportions"] = nullptr;
            r["sdc_ci"] = nullptr;
            r["arch_due_ci"] = nullptr;
        }
        rows.push_back(r);
    }
    return {{"confidence_level", level}, {"ci_method", "wilson"}, {"rows", rows}};
}

CampaignSummary summary_from_json(const Json &j) {
    return schema_guard("campaign summary", [&] {
        CampaignSummary s;
        for (const auto &r : j.at("rows")) {
            OutcomeCounts c;
            c.masked = r.at("masked").get<std::uint64_t>();
            c.sdc = r.at("sdc").get<std::uint64_t>();
            c.arch_due = r.at("arch_due").get<std::uint64_t>();
            c.potential_due = r.at("potential_arch_due").get<std::uint64_t>();
            c.failed = r.value("failed", std::uint64_t{0});
            const CampaignKey key{class_field(r, "class"), kind_field(r, "manifestation")};
            if (s.rows.count(key))
                throw InputError("duplicate summary row");
            s.rows[key] = c;
        }
        return s;
    });
}

Json to_json(const OutcomeRecord &r) {
    Json j;
    j["ordinal"] = r.site.ordinal;
    j["class"] = class_name(r.site.cls);
    j["manifestation"] = manifestation_name(r.site.kind);
    j["kernel"] = r.site.kernel;
    j["launch"] = r.site.launch;
    j["class_index"] = r.site.class_index;
    j["dest_seed"] = r.site.dest_seed;
    j["value_seed"] = r.site.value_seed;
    if (r.error) {
        j["error"] = *r.error;
        return j;
    }
    j["status"] = isa::describe(r.status);
    j["outcome"] = outcome_name(r.outcome);
    j["output_diff_words"] = r.output_diff_words;
    j["first_diff"] = r.first_diff;
    j["stdout_differs"] = r.stdout_differs;
    j["dynamic_count"] = r.dynamic_count;
    Json entries = Json::array();
    for (const auto &e : r.corruption.entries)
        entries.push_back({{"warp", e.warp},
                           {"thread", e.thread},
                           {"xor", e.xor_mask},
                           {"before", e.before},
                           {"after", e.after}});
    j["corruption"] = {{"predicate", r.corruption.predicate},
                       {"index", r.corruption.index},
                       {"entries", entries}};
    Json recs = Json::array();
    for (const auto &e : r.records)
        recs.push_back({{"launch", e.launch},
                        {"warp", e.warp},
                        {"thread", e.thread},
                        {"pc", e.pc},
                        {"first_reg", e.first_reg},
                        {"values", e.values}});
    j["records"] = recs;
    return j;
}

Json to_json(const FITEstimate &e) {
    Json j;
    j["mode"] = fit_mode_name(e.mode);
    j["units"] = units_name(e.units);
    j["sdc"] = e.sdc_fit;
    j["sdc_interval"] = Json::array({e.sdc_lo, e.sdc_hi});
    j["due"] = e.due_fit;
    j["due_crash_hang_unscaled"] = e.due_unscaled;
    j["scale"] = e.scale;
    j["covered_fraction"] = e.covered_fraction;
    Json pc = Json::array();
    for (const auto &c : e.per_class)
        pc.push_back({{"class", class_name(c.cls)},
                      {"f", c.f},
                      {"sdc", c.sdc},
                      {"sdc_interval", Json::array({c.sdc_lo, c.sdc_hi})},
                      {"due", c.due}});
    j["per_class"] = pc;
    j["warnings"] = e.warnings;
    return j;
}

Json to_json(const OracleResult &o) {
    return {{"runs", o.runs},
            {"counts",
             {{"masked", o.counts.masked},
              {"sdc", o.counts.sdc},
              {"arch_due", o.counts.arch_due},
              {"potential_arch_due", o.counts.potential_due}}},
            {"weighting", "per dynamic instruction, uniform over (thread, bit)"},
            {"p_masked", o.p_masked},
            {"p_sdc", o.p_sdc},
            {"p_arch_due", o.p_arch_due},
            {"p_potential_arch_due", o.p_potential_due}};
}

Json to_json(const Layout &l) {
    Json nodes = Json::array();
    for (const auto &n : l.nodes)
        nodes.push_back({{"name", n.name},
                         {"register", n.reg},
                         {"bit", n.bit},
                         {"op", node_op_name(n.op)},
                         {"sources", n.sources},
                         {"expected", n.expected},
                         {"step", n.step},
                         {"pc", n.pc},
                         {"class", class_name(n.cls)}});
    return {{"kernel", l.kernel},
            {"record_first", l.record_first},
            {"record_last", l.record_last},
            {"nodes", nodes}};
}

Json to_json(const DetectionReport &r) {
    Json j;
    j["target"] = class_name(r.target);
    Json kinds = Json::object();
    for (const auto &[k, s] : r.by_kind)
        kinds[std::string(manifestation_name(k))] = {{"cases", s.cases},
                                                     {"detected", s.detected},
                                                     {"category_ok", s.category_ok},
                                                     {"origin_ok", s.origin_ok},
                                                     {"skipped", s.skipped},
                                                     {"noop", s.noop},
                                                     {"detection_rate", r.detection_rate(k)}};
    j["by_manifestation"] = kinds;
    if (r.target == InstructionClass::BRA)
        j["branch"] = {{"filler_cases", r.filler_cases},
                       {"filler_logged", r.filler_logged},
                       {"outside_cases", r.outside_cases},
                       {"outside_due", r.outside_due},
                       {"chain_cases", r.chain_cases},
                       {"chain_detected", r.chain_detected}};
    j["blind_spots"] = r.blind_spots;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const CategoryHistogram &h) {
    Json cats = Json::object(), bits = Json::object();
    for (const auto &[c, n] : h.by_category)
        cats[std::string(category_name(c))] = n;
    for (const auto &[b, n] : h.by_bit_type)
        bits[std::string(bit_type_name(b))] = n;
    return {{"total", h.total},
            {"by_category", cats},
            {"by_bit_type", bits},
            {"crashes_and_hangs", h.crashes_and_hangs()}};
}

Json to_json(const EventResult &e) {
    Json j = {{"category", category_name(e.category)},
              {"bit_type", bit_type_name(e.bit_type)},
              {"origin", e.origin},
              {"origin_step", e.origin_step},
              {"threads", e.threads},
              {"warps", e.warps},
              {"multi_origin", e.multi_origin}};
    j["fault"] = e.fault ? Json(isa::fault_kind_name(*e.fault)) : Json(nullptr);
    return j;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

Json read_json_file(const std::filesystem::path &path) {
    const auto text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

} // namespace tlfit
