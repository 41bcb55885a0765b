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

#include "tlfit/isa/program.h"

#include <string>
#include <string_view>

namespace tlfit::isa {

/// Assemble mini-ISA source text into a Program.
///
/// One instruction per line, `#` starts a comment, `name:` defines a label
/// (optionally followed by an instruction on the same line). Directives:
///
///     .kernel NAME              start a kernel
///     .warps N                  warps per launch
///     .threads_per_warp N       lanes per warp (1..64)
///     .shmem N                  shared memory size in 32-bit words
///     .output ADDR LEN          output region in shared memory
///     .launch NAME [COUNT]      append NAME to the launch sequence
///     .reconv LABEL             reconvergence point of the next BRA/CHK
///
/// Throws ParseError (with the offending line) on any syntax or resolution
/// problem.
Program parse_program(std::string_view source);

/// Render one instruction back to assembly.
std::string format_instruction(const Instruction &inst);

} // namespace tlfit::isa
