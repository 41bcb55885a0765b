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

#include "tlfit/io/json_io.h"
#include "tlfit/isa/parser.h"

#include <string>

namespace tlfit::test {

inline std::string fixture_path(const std::string &name) {
    return std::string(TLFIT_FIXTURE_DIR) + "/" + name;
}

inline std::string data_path(const std::string &name) {
    return std::string(TLFIT_DATA_DIR) + "/" + name;
}

inline isa::Program load_fixture(const std::string &name) {
    return isa::parse_program(read_text_file(fixture_path(name)));
}

} // namespace tlfit::test
