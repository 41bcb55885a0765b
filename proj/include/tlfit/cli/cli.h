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

#include <iosfwd>
#include <string>
#include <vector>

namespace tlfit::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kInput = 3,
    kInvariant = 4,
};

// Environment variable naming the default output directory.
inline constexpr const char *kOutputDirEnv = "TLFIT_OUTPUT_DIR";

/// Run one command line (args[0] is the subcommand, no program name).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

int main_entry(int argc, char **argv);

} // namespace tlfit::cli
