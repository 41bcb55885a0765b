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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlfit::isa {

inline constexpr int kNumRegisters = 64;
inline constexpr int kNumPredicates = 7;
inline constexpr int kMaxThreadsPerWarp = 64;

enum class Opcode : std::uint8_t {
    IADD,
    IMAD,
    FADD,
    FFMA,
    LDS,
    STS,
    ISETP,
    P2R,
    BRA,
    MOV,
    MOVI,
    CHK,
    RECORD,
    EXIT,
};
inline constexpr std::size_t kNumOpcodes = 14;

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);

enum class CmpOp : std::uint8_t { EQ, NE, LT, LE, GT, GE };

std::string_view cmp_name(CmpOp cmp);

enum class SpecialReg : std::uint8_t {
    LaneId,   // TID: lane within the warp
    WarpId,   // WARPID
    GlobalId, // GTID: warp * threads_per_warp + lane
};

struct Operand {
    enum class Kind : std::uint8_t { None, Reg, Pred, Imm, Mem, Special };

    Kind kind = Kind::None;
    std::uint8_t reg = 0;       // Reg/Pred index, or Mem base register
    bool has_base = false;      // Mem: address includes a base register
    std::uint32_t imm = 0;      // Imm bit pattern
    std::int32_t offset = 0;    // Mem: word offset
    SpecialReg special = SpecialReg::LaneId;

    static Operand make_reg(int r) { return {Kind::Reg, static_cast<std::uint8_t>(r)}; }
    static Operand make_pred(int p) { return {Kind::Pred, static_cast<std::uint8_t>(p)}; }
    static Operand make_imm(std::uint32_t v) {
        Operand o;
        o.kind = Kind::Imm;
        o.imm = v;
        return o;
    }

    bool operator==(const Operand &) const = default;
};

// Predicate guard: "@P3" or "@!P3". pred < 0 means unguarded.
struct Guard {
    int pred = -1;
    bool negate = false;

    bool operator==(const Guard &) const = default;
};

struct Instruction {
    Opcode op = Opcode::EXIT;
    CmpOp cmp = CmpOp::EQ;           // ISETP only
    Guard guard;
    Operand dst;                     // Reg for most, Pred for ISETP, Mem for STS
    std::array<Operand, 3> src{};
    int num_src = 0;
    int target = -1;                 // BRA/CHK: resolved instruction index
    std::string target_label;
    int reconv = -1;                 // BRA/CHK: declared reconvergence index
    int line = 0;

    bool writes_register() const;
    bool writes_predicate() const;
    bool operator==(const Instruction &) const = default;
};

struct Kernel {
    std::string name;
    std::vector<Instruction> code;
    std::map<std::string, int> labels;

    bool operator==(const Kernel &) const = default;
};

struct Program {
    std::vector<Kernel> kernels;
    // Host launch sequence (indices into kernels). Defaults to every kernel
    // once, in declaration order.
    std::vector<int> launches;
    int warps = 1;
    int threads_per_warp = 32;
    int shmem_words = 0;
    int output_addr = 0;
    int output_len = 0;

    int find_kernel(std::string_view name) const;
    bool operator==(const Program &) const = default;
};

} // namespace tlfit::isa
