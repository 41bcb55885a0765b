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

#include "tlfit/classify/event.h"
#include "tlfit/classify/layout.h"
#include "tlfit/compose/fit.h"
#include "tlfit/injector/injector.h"
#include "tlfit/injector/types.h"
#include "tlfit/microbench/microbench.h"
#include "tlfit/profiler/profile.h"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tlfit {

using Json = nlohmann::json;

std::string_view tool_version();

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

struct Provenance {
    std::string command;
    std::uint64_t config_digest = 0;
    std::optional<std::uint64_t> seed;
};

Json provenance_json(const Provenance &p);

Json to_json(const Profile &p);
Profile profile_from_json(const Json &j);

Json to_json(const CampaignSummary &s, double level = 0.95);
CampaignSummary summary_from_json(const Json &j);

Json to_json(const OutcomeRecord &r);
Json to_json(const FITEstimate &e);
Json to_json(const OracleResult &o);
Json to_json(const Layout &l);
Json to_json(const DetectionReport &r);
Json to_json(const CategoryHistogram &h);
Json to_json(const EventResult &e);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &content);
Json read_json_file(const std::filesystem::path &path);

// Stable pretty form used for every artifact.
std::string dump(const Json &j);

} // namespace tlfit
