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

#include "tlfit/profiler/instruction_class.h"

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>

namespace tlfit {

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "IADD", "FADD", "IMAD", "FFMA", "LDS", "ISETP", "BRA", "UNCOVERED",
};

using C = InstructionClass;

// Aliases are matched on the mnemonic stem (text before the first '.').
constexpr std::pair<std::string_view, InstructionClass> kAliases[] = {
    {"IADD", C::IADD},   {"IADD3", C::IADD},  {"ISUB", C::IADD},    {"SHL", C::IADD},
    {"SHR", C::IADD},    {"SHF", C::IADD},    {"LOP", C::IADD},     {"LOP3", C::IADD},
    {"AND", C::IADD},    {"OR", C::IADD},     {"XOR", C::IADD},     {"NOT", C::IADD},
    {"IMNMX", C::IADD},  {"IMIN", C::IADD},   {"IMAX", C::IADD},    {"F2I", C::IADD},
    {"BFE", C::IADD},    {"BFI", C::IADD},    {"POPC", C::IADD},    {"FLO", C::IADD},
    {"IABS", C::IADD},   {"ISCADD", C::IADD}, {"LEA", C::IADD},

    {"FADD", C::FADD},   {"DADD", C::FADD},   {"FMUL", C::FADD},    {"DMUL", C::FADD},
    {"FMNMX", C::FADD},  {"DMNMX", C::FADD},  {"I2F", C::FADD},     {"F2F", C::FADD},

    {"IMAD", C::IMAD},   {"IMUL", C::IMAD},   {"IMADSP", C::IMAD},  {"XMAD", C::IMAD},
    {"IMADHI", C::IMAD},

    {"FFMA", C::FFMA},   {"DFMA", C::FFMA},

    {"LDS", C::LDS},

    {"ISETP", C::ISETP}, {"FSETP", C::ISETP}, {"DSETP", C::ISETP},  {"PSETP", C::ISETP},
    {"ICMP", C::ISETP},  {"FCMP", C::ISETP},

    {"BRA", C::BRA},     {"JMP", C::BRA},     {"JMX", C::BRA},      {"BRX", C::BRA},
    {"CAL", C::BRA},     {"JCAL", C::BRA},    {"RET", C::BRA},      {"BRK", C::BRA},
    {"CONT", C::BRA},    {"SSY", C::BRA},     {"PBK", C::BRA},      {"PCNT", C::BRA},
    {"SYNC", C::BRA},
};

} // namespace

std::string_view class_name(InstructionClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<InstructionClass> class_from_name(std::string_view name) {
    std::string up(name);
    for (auto &ch : up)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (std::size_t i = 0; i < kClassNames.size(); ++i)
        if (kClassNames[i] == up)
            return static_cast<InstructionClass>(i);
    return std::nullopt;
}

InstructionClass classify_opcode(std::string_view mnemonic) {
    std::string stem(mnemonic.substr(0, mnemonic.find('.')));
    for (auto &ch : stem)
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (const auto &[alias, cls] : kAliases)
        if (alias == stem)
            return cls;
    return InstructionClass::Uncovered;
}

InstructionClass classify_opcode(isa::Opcode op) {
    static const auto table = [] {
        std::array<InstructionClass, isa::kNumOpcodes> t{};
        for (std::size_t i = 0; i < isa::kNumOpcodes; ++i)
            t[i] = classify_opcode(isa::opcode_name(static_cast<isa::Opcode>(i)));
        return t;
    }();
    return table[static_cast<std::size_t>(op)];
}

} // namespace tlfit
