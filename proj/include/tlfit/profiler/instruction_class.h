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

#include <array>
#include <optional>
#include <string_view>

namespace tlfit {

// The seven modeled instruction groups plus a catch-all.
enum class InstructionClass : std::uint8_t { IADD, FADD, IMAD, FFMA, LDS, ISETP, BRA, Uncovered };

inline constexpr std::size_t kNumClasses = 8;
inline constexpr std::size_t kNumModeledClasses = 7;

inline constexpr std::array<InstructionClass, kNumModeledClasses> kModeledClasses = {
    InstructionClass::IADD, InstructionClass::FADD,  InstructionClass::IMAD,
    InstructionClass::FFMA, InstructionClass::LDS,   InstructionClass::ISETP,
    InstructionClass::BRA,
};

std::string_view class_name(InstructionClass c);
std::optional<InstructionClass> class_from_name(std::string_view name);

/// Group an opcode mnemonic. Accepts the mini-ISA opcodes plus common GPU
/// aliases (shifts, logic, min/max and float-to-int with IADD; double
/// precision with its single-precision counterpart; control flow with BRA).
/// Anything unknown is Uncovered.
InstructionClass classify_opcode(std::string_view mnemonic);
InstructionClass classify_opcode(isa::Opcode op);

} // namespace tlfit
