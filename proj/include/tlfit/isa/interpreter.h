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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tlfit::isa {

using ThreadMask = std::uint64_t;

enum class FaultKind : std::uint8_t { IllegalInstruction, OutOfRangeAddress, StackError };

std::string_view fault_kind_name(FaultKind k);
std::optional<FaultKind> fault_kind_from_name(std::string_view name);

struct RunStatus {
    enum class Kind : std::uint8_t { Exited, Hang, Fault };

    Kind kind = Kind::Exited;
    int exit_code = 0;
    FaultKind fault = FaultKind::IllegalInstruction;

    static RunStatus exited(int code) { return {Kind::Exited, code}; }
    static RunStatus hang() { return {Kind::Hang}; }
    static RunStatus faulted(FaultKind k) { return {Kind::Fault, 0, k}; }

    bool clean_exit() const { return kind == Kind::Exited && exit_code == 0; }
    bool operator==(const RunStatus &) const = default;
};

std::string describe(const RunStatus &s);

// Registers dumped by one thread executing RECORD.
struct RecordEntry {
    int launch = 0;
    int warp = 0;
    int thread = 0;
    int pc = 0;
    int first_reg = 0;
    std::vector<std::uint32_t> values;

    bool operator==(const RecordEntry &) const = default;
};

struct LaunchStats {
    int kernel = 0;
    std::vector<std::uint64_t> issued_per_warp;

    bool operator==(const LaunchStats &) const = default;
};

struct RunResult {
    RunStatus status;
    std::vector<std::uint32_t> output;
    std::vector<RecordEntry> records;
    std::string stdout_text;
    std::uint64_t dynamic_count = 0;
    std::array<std::uint64_t, kNumOpcodes> opcode_counts{};
    std::vector<LaunchStats> launches;
    // Where execution stopped for Fault/Hang (launch index, kernel pc).
    int stop_launch = -1;
    int stop_pc = -1;

    bool operator==(const RunResult &) const = default;
};

// One entry of a warp's reconvergence stack.
struct SimtEntry {
    int pc = 0;
    ThreadMask mask = 0;
    int reconv = -1;
};

struct WarpState {
    std::vector<SimtEntry> stack;
    ThreadMask exited = 0;
    bool done = false;
};

/// Complete architectural state of a running program.
class MachineState {
  public:
    MachineState(int warps, int threads_per_warp, int shmem_words);

    int warps() const { return warps_; }
    int threads_per_warp() const { return tpw_; }
    ThreadMask full_mask() const;

    std::uint32_t &reg(int warp, int thread, int r) {
        return regs_[(static_cast<std::size_t>(warp) * tpw_ + thread) * kNumRegisters + r];
    }
    std::uint32_t reg(int warp, int thread, int r) const {
        return regs_[(static_cast<std::size_t>(warp) * tpw_ + thread) * kNumRegisters + r];
    }
    // Predicate bits P0..P6 of one thread, packed in bits 0..6.
    std::uint8_t &preds(int warp, int thread) {
        return preds_[static_cast<std::size_t>(warp) * tpw_ + thread];
    }
    std::uint8_t preds(int warp, int thread) const {
        return preds_[static_cast<std::size_t>(warp) * tpw_ + thread];
    }
    bool pred(int warp, int thread, int p) const { return (preds(warp, thread) >> p) & 1u; }

    std::vector<std::uint32_t> &shmem() { return shmem_; }
    const std::vector<std::uint32_t> &shmem() const { return shmem_; }

    WarpState &warp_state(int w) { return warp_states_[w]; }
    const WarpState &warp_state(int w) const { return warp_states_[w]; }

    std::uint64_t executed() const { return executed_; }
    void count_issue() { ++executed_; }

    void reset_for_launch();

  private:
    friend class Interpreter;

    int warps_;
    int tpw_;
    std::vector<std::uint32_t> regs_;
    std::vector<std::uint8_t> preds_;
    std::vector<std::uint32_t> shmem_;
    std::vector<WarpState> warp_states_;
    std::uint64_t executed_ = 0;
};

/// What an injector hook sees after an instruction has produced its result.
struct HookContext {
    const Program &program;
    int launch;
    int kernel;
    int warp;
    int pc;
    const Instruction &inst;
    std::uint64_t dynamic_index; // 0-based over the whole run
    ThreadMask active;           // threads on the current path
    ThreadMask executed;         // active threads whose guard passed
    MachineState &state;
    // Where the warp goes next (after branch resolution). Writable: the hook
    // may redirect control flow.
    int next_pc;
};

using InjectionHook = std::function<void(HookContext &)>;

struct ExecConfig {
    std::uint64_t instruction_budget = 1'000'000;
};

/// Warp-synchronous interpreter. Warps are issued round-robin, one
/// instruction per warp per turn; divergent paths are serialized on a
/// per-warp stack and rejoin at the declared `.reconv` point (or at exit).
class Interpreter {
  public:
    explicit Interpreter(const Program &program) : program_(program) {}

    RunResult run(const ExecConfig &config, const InjectionHook &hook = {}) const;

  private:
    const Program &program_;
};

inline RunResult execute(const Program &program, const ExecConfig &config,
                         const InjectionHook &hook = {}) {
    return Interpreter(program).run(config, hook);
}

} // namespace tlfit::isa
