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

#include "test_helpers.h"

#include "tlfit/cli/cli.h"
#include "tlfit/error.h"
#include "tlfit/injector/injector.h"
#include "tlfit/io/json_io.h"
#include "tlfit/profiler/profile.h"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace tlfit;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
    auto p = fs::temp_directory_path() / ("tlfit_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("profile and summary JSON round trip") {
    const auto prog = test::load_fixture("reduce.asm");
    const auto p = profile(prog);
    CHECK(profile_from_json(to_json(p)) == p);

    CampaignOptions o;
    o.samples = 20;
    o.seed = 4;
    const auto res = run_campaign(prog, golden_run(prog), p,
                                  {{InstructionClass::IADD, ManifestationKind::SingleBit},
                                   {InstructionClass::LDS, ManifestationKind::SingleBit}},
                                  o);
    CHECK(summary_from_json(to_json(res.summary)) == res.summary);
    CHECK_THROWS_AS(summary_from_json(Json::parse(R"({"rows": 3})")), InputError);
}

TEST_CASE("digests") {
    // Published FNV-1a 64 vectors.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("cli exit codes") {
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({"--help"}).code == cli::kOk);
    CHECK(invoke({"run", "/nonexistent/file.asm"}).code == cli::kInput);
    const auto dir = scratch("codes");
    // Seed is required for campaigns.
    CHECK(invoke({"campaign", test::fixture_path("reduce.asm"), "--apa-only", "-o", dir.string()})
              .code == cli::kUsage);
    CHECK(invoke({"campaign", test::fixture_path("reduce.asm"), "--seed", "1", "-o", dir.string()})
              .code == cli::kUsage);
    CHECK(invoke({"oracle", test::fixture_path("reduce.asm"), "--class", "IADD", "--cap", "5", "-o",
               dir.string()})
              .code == cli::kInvariant);
    CHECK(invoke({"oracle", test::fixture_path("reduce.asm"), "--class", "NOPE", "-o", dir.string()})
              .code == cli::kInput);
}

TEST_CASE("cli pipeline: profile, campaign, compose") {
    const auto dir = scratch("pipeline");
    const auto prog = test::fixture_path("fp_poly.asm");
    const auto rates = test::data_path("manifestation_rates.csv");

    auto r = invoke({"run", prog});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out).at("status") == "exited(0)");

    r = invoke({"profile", prog, "-o", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "profile.json"));

    const auto c1 = dir / "j1", c8 = dir / "j8";
    r = invoke({"campaign", prog, "--rates", rates, "--samples", "40", "--seed", "3", "--jobs", "1",
             "-o", c1.string()});
    REQUIRE(r.code == 0);
    r = invoke({"campaign", prog, "--rates", rates, "--samples", "40", "--seed", "3", "--jobs", "8",
             "-o", c8.string()});
    REQUIRE(r.code == 0);
    CHECK(read_text_file(c1 / "summary.json") == read_text_file(c8 / "summary.json"));
    CHECK(read_text_file(c1 / "records.jsonl") == read_text_file(c8 / "records.jsonl"));
    const auto summary = read_json_file(c1 / "summary.json");
    CHECK(summary.at("provenance").at("seed") == 3);
    CHECK(summary.at("provenance").contains("config_digest"));

    const auto out = dir / "compose";
    r = invoke({"compose", "--ipa", rates, "--apa", (c1 / "summary.json").string(), "--profile",
             (c1 / "profile.json").string(), "--bootstrap", "50", "--records",
             (c1 / "records.jsonl").string(), "-o", out.string()});
    CHECK(r.code == 0);
    const auto report = read_json_file(out / "report.json");
    CHECK(report.at("ipa_only").at("sdc").get<double>() >=
          report.at("tl").at("sdc").get<double>());
    CHECK(report.at("tl").contains("bootstrap_interval"));
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "report.txt"));

    // Relative table with --absolute and no calibration is a units mismatch.
    r = invoke({"compose", "--ipa", rates, "--apa", (c1 / "summary.json").string(), "--profile",
             (c1 / "profile.json").string(), "--absolute", "-o", out.string()});
    CHECK(r.code == cli::kInvariant);
    CHECK(r.err.find("units mismatch") != std::string::npos);
}

TEST_CASE("cli shard merge equals the single pass") {
    const auto dir = scratch("shards");
    const auto prog = test::fixture_path("reduce.asm");
    const std::vector<std::string> common = {"--models", "IADD:single_bit,IMAD:double_bit",
                                             "--samples", "30", "--seed", "8"};
    auto args = [&](std::vector<std::string> extra) {
        std::vector<std::string> a = {"campaign", prog};
        a.insert(a.end(), common.begin(), common.end());
        a.insert(a.end(), extra.begin(), extra.end());
        return a;
    };
    REQUIRE(invoke(args({"-o", (dir / "whole").string()})).code == 0);
    for (int i : {2, 0, 1})
        REQUIRE(invoke(args({"--shard", std::to_string(i) + "/3", "-o",
                          (dir / ("s" + std::to_string(i))).string()}))
                    .code == 0);
    REQUIRE(invoke({"merge", (dir / "s1/summary.json").string(), (dir / "s2/summary.json").string(),
                 (dir / "s0/summary.json").string(), "-o", (dir / "merged").string()})
                .code == 0);
    const auto whole = summary_from_json(read_json_file(dir / "whole/summary.json"));
    const auto merged = summary_from_json(read_json_file(dir / "merged/summary.json"));
    CHECK(whole == merged);
}

TEST_CASE("cli microbench and attribute") {
    const auto dir = scratch("mb");
    auto r = invoke({"microbench", "--target", "IADD", "--length", "8", "--threads-per-warp", "4",
                  "--validate", "-o", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "mb_IADD.asm"));
    const auto det = read_json_file(dir / "mb_IADD.detection.json");
    CHECK(det.contains("provenance"));
    r = invoke({"attribute", "--target", "IADD", "--length", "8", "--threads-per-warp", "4",
             "--kinds", "single_bit,warp_zero", "--samples", "20", "--seed", "2", "-o",
             dir.string()});
    CHECK(r.code == 0);
    const auto hist = read_json_file(dir / "histogram.json");
    CHECK(hist.contains("provenance"));
}

TEST_CASE("output directory from the environment") {
    const auto dir = scratch("env");
    ::setenv(cli::kOutputDirEnv, dir.string().c_str(), 1);
    const auto r = invoke({"profile", test::fixture_path("branchy.asm")});
    ::unsetenv(cli::kOutputDirEnv);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "profile.json"));
}
