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

#include "tlfit/isa/interpreter.h"

#include "tlfit/error.h"

#include <bit>
#include <cmath>
#include <sstream>

namespace tlfit::isa {

std::string_view fault_kind_name(FaultKind k) {
    switch (k) {
    case FaultKind::IllegalInstruction:
        return "illegal-instruction";
    case FaultKind::OutOfRangeAddress:
        return "out-of-range-address";
    case FaultKind::StackError:
        return "stack-error";
    }
    return "unknown";
}

std::optional<FaultKind> fault_kind_from_name(std::string_view name) {
    for (auto k : {FaultKind::IllegalInstruction, FaultKind::OutOfRangeAddress,
                   FaultKind::StackError})
        if (fault_kind_name(k) == name)
            return k;
    return std::nullopt;
}

std::string describe(const RunStatus &s) {
    switch (s.kind) {
    case RunStatus::Kind::Exited:
        return "exited(" + std::to_string(s.exit_code) + ")";
    case RunStatus::Kind::Hang:
        return "hang";
    case RunStatus::Kind::Fault:
        return "fault(" + std::string(fault_kind_name(s.fault)) + ")";
    }
    return "?";
}

MachineState::MachineState(int warps, int threads_per_warp, int shmem_words)
    : warps_(warps), tpw_(threads_per_warp),
      regs_(static_cast<std::size_t>(warps) * threads_per_warp * kNumRegisters, 0),
      preds_(static_cast<std::size_t>(warps) * threads_per_warp, 0),
      shmem_(static_cast<std::size_t>(shmem_words), 0), warp_states_(warps) {
    if (warps <= 0 || threads_per_warp <= 0 || threads_per_warp > kMaxThreadsPerWarp)
        throw InvariantError("invalid machine geometry");
}

ThreadMask MachineState::full_mask() const {
    return tpw_ == 64 ? ~ThreadMask{0} : ((ThreadMask{1} << tpw_) - 1);
}

void MachineState::reset_for_launch() {
    std::fill(regs_.begin(), regs_.end(), 0u);
    std::fill(preds_.begin(), preds_.end(), std::uint8_t{0});
    for (auto &ws : warp_states_) {
        ws.stack.assign(1, SimtEntry{0, full_mask(), -1});
        ws.exited = 0;
        ws.done = false;
    }
}

namespace {

inline float as_float(std::uint32_t v) { return std::bit_cast<float>(v); }
inline std::uint32_t as_bits(float f) { return std::bit_cast<std::uint32_t>(f); }

bool compare(CmpOp cmp, std::uint32_t a, std::uint32_t b) {
    auto x = static_cast<std::int32_t>(a);
    auto y = static_cast<std::int32_t>(b);
    switch (cmp) {
    case CmpOp::EQ:
        return x == y;
    case CmpOp::NE:
        return x != y;
    case CmpOp::LT:
        return x < y;
    case CmpOp::LE:
        return x <= y;
    case CmpOp::GT:
        return x > y;
    case CmpOp::GE:
        return x >= y;
    }
    return false;
}

// Pops finished paths. Returns false when the warp has nothing left to run.
bool normalize(WarpState &ws) {
    while (!ws.stack.empty()) {
        const auto &top = ws.stack.back();
        if ((top.mask & ~ws.exited) == 0 || (top.reconv >= 0 && top.pc == top.reconv)) {
            ws.stack.pop_back();
            continue;
        }
        return true;
    }
    ws.done = true;
    return false;
}

class Run {
  public:
    Run(const Program &p, const ExecConfig &cfg, const InjectionHook &hook)
        : prog_(p), cfg_(cfg), hook_(hook),
          state_(p.warps, p.threads_per_warp, p.shmem_words) {}

    RunResult go() {
        for (std::size_t l = 0; l < prog_.launches.size() && !stopped_; ++l) {
            launch_ = static_cast<int>(l);
            kernel_ = prog_.launches[l];
            run_launch();
            if (!stopped_ && first_nonzero_exit_ != 0)
                break;
        }
        if (!stopped_)
            result_.status = RunStatus::exited(first_nonzero_exit_);
        result_.dynamic_count = state_.executed();
        const auto &sh = state_.shmem();
        result_.output.assign(sh.begin() + prog_.output_addr,
                              sh.begin() + prog_.output_addr + prog_.output_len);
        return std::move(result_);
    }

  private:
    void stop(RunStatus s, int pc) {
        result_.status = s;
        result_.stop_launch = launch_;
        result_.stop_pc = pc;
        stopped_ = true;
    }

    void run_launch() {
        state_.reset_for_launch();
        result_.launches.push_back(
            LaunchStats{kernel_, std::vector<std::uint64_t>(prog_.warps, 0)});
        bool progress = true;
        while (progress && !stopped_) {
            progress = false;
            for (int w = 0; w < prog_.warps && !stopped_; ++w) {
                auto &ws = state_.warp_state(w);
                if (ws.done || !normalize(ws))
                    continue;
                step(w, ws);
                progress = true;
            }
        }
    }

    std::uint32_t value(const Operand &o, int w, int t) const {
        switch (o.kind) {
        case Operand::Kind::Reg:
            return state_.reg(w, t, o.reg);
        case Operand::Kind::Imm:
            return o.imm;
        case Operand::Kind::Special:
            switch (o.special) {
            case SpecialReg::LaneId:
                return static_cast<std::uint32_t>(t);
            case SpecialReg::WarpId:
                return static_cast<std::uint32_t>(w);
            case SpecialReg::GlobalId:
                return static_cast<std::uint32_t>(w * prog_.threads_per_warp + t);
            }
            return 0;
        default:
            return 0;
        }
    }

    // Word address of a Mem operand for one thread, or -1 when out of range.
    long long address(const Operand &m, int w, int t) const {
        long long a = m.offset;
        if (m.has_base)
            a += static_cast<std::int32_t>(state_.reg(w, t, m.reg));
        if (a < 0 || a >= prog_.shmem_words)
            return -1;
        return a;
    }

    void step(int w, WarpState &ws) {
        const auto &kernel = prog_.kernels[kernel_];
        auto &top = ws.stack.back();
        const int pc = top.pc;
        const ThreadMask active = top.mask & ~ws.exited;

        if (state_.executed() >= cfg_.instruction_budget) {
            stop(RunStatus::hang(), pc);
            return;
        }
        if (pc < 0 || pc >= static_cast<int>(kernel.code.size())) {
            stop(RunStatus::faulted(FaultKind::IllegalInstruction), pc);
            return;
        }
        const auto &inst = kernel.code[pc];
        state_.count_issue();
        ++result_.opcode_counts[static_cast<std::size_t>(inst.op)];
        ++result_.launches.back().issued_per_warp[w];

        ThreadMask exec = active;
        if (inst.guard.pred >= 0) {
            exec = 0;
            for (int t = 0; t < prog_.threads_per_warp; ++t)
                if ((active >> t) & 1u)
                    if (state_.pred(w, t, inst.guard.pred) != inst.guard.negate)
                        exec |= ThreadMask{1} << t;
        }

        ThreadMask taken = 0;
        bool branches = false;
        const int tpw = prog_.threads_per_warp;
        auto each = [&](auto &&fn) {
            for (int t = 0; t < tpw; ++t)
                if ((exec >> t) & 1u)
                    fn(t);
        };

        switch (inst.op) {
        case Opcode::IADD:
            each([&](int t) {
                state_.reg(w, t, inst.dst.reg) =
                    value(inst.src[0], w, t) + value(inst.src[1], w, t);
            });
            break;
        case Opcode::IMAD:
            each([&](int t) {
                state_.reg(w, t, inst.dst.reg) =
                    value(inst.src[0], w, t) * value(inst.src[1], w, t) +
                    value(inst.src[2], w, t);
            });
            break;
        case Opcode::FADD:
            each([&](int t) {
                state_.reg(w, t, inst.dst.reg) = as_bits(as_float(value(inst.src[0], w, t)) +
                                                         as_float(value(inst.src[1], w, t)));
            });
            break;
        case Opcode::FFMA:
            each([&](int t) {
                state_.reg(w, t, inst.dst.reg) = as_bits(std::fmaf(
                    as_float(value(inst.src[0], w, t)), as_float(value(inst.src[1], w, t)),
                    as_float(value(inst.src[2], w, t))));
            });
            break;
        case Opcode::LDS:
            for (int t = 0; t < tpw; ++t) {
                if (!((exec >> t) & 1u))
                    continue;
                auto a = address(inst.src[0], w, t);
                if (a < 0) {
                    stop(RunStatus::faulted(FaultKind::OutOfRangeAddress), pc);
                    return;
                }
                state_.reg(w, t, inst.dst.reg) = state_.shmem()[static_cast<std::size_t>(a)];
            }
            break;
        case Opcode::STS:
            for (int t = 0; t < tpw; ++t) {
                if (!((exec >> t) & 1u))
                    continue;
                auto a = address(inst.dst, w, t);
                if (a < 0) {
                    stop(RunStatus::faulted(FaultKind::OutOfRangeAddress), pc);
                    return;
                }
                state_.shmem()[static_cast<std::size_t>(a)] = value(inst.src[0], w, t);
            }
            break;
        case Opcode::ISETP:
            each([&](int t) {
                auto &p = state_.preds(w, t);
                const auto bit = std::uint8_t(1u << inst.dst.reg);
                if (compare(inst.cmp, value(inst.src[0], w, t), value(inst.src[1], w, t)))
                    p = static_cast<std::uint8_t>(p | bit);
                else
                    p = static_cast<std::uint8_t>(p & ~bit);
            });
            break;
        case Opcode::P2R:
            each([&](int t) { state_.reg(w, t, inst.dst.reg) = state_.preds(w, t) & 0x7Fu; });
            break;
        case Opcode::BRA:
            branches = true;
            taken = exec;
            break;
        case Opcode::MOV:
        case Opcode::MOVI:
            each([&](int t) { state_.reg(w, t, inst.dst.reg) = value(inst.src[0], w, t); });
            break;
        case Opcode::CHK:
            branches = true;
            each([&](int t) {
                if (value(inst.src[0], w, t) != value(inst.src[1], w, t))
                    taken |= ThreadMask{1} << t;
            });
            break;
        case Opcode::RECORD: {
            const int lo = inst.src[0].reg;
            const int hi = inst.src[1].reg;
            each([&](int t) {
                RecordEntry e{launch_, w, t, pc, lo, {}};
                std::ostringstream line;
                line << "record kernel=" << prog_.kernels[kernel_].name << " warp=" << w
                     << " thread=" << t << " pc=" << pc << ':';
                for (int r = lo; r <= hi; ++r) {
                    e.values.push_back(state_.reg(w, t, r));
                    line << ' ' << state_.reg(w, t, r);
                }
                result_.stdout_text += line.str() + '\n';
                result_.records.push_back(std::move(e));
            });
            break;
        }
        case Opcode::EXIT: {
            const int code = inst.num_src > 0 ? static_cast<int>(inst.src[0].imm) : 0;
            if (exec != 0 && code != 0 && first_nonzero_exit_ == 0)
                first_nonzero_exit_ = code;
            ws.exited |= exec;
            break;
        }
        }

        // Branch resolution. `top` may be invalidated by pushes below.
        int next_pc = pc + 1;
        if (branches && taken != 0) {
            if (taken == active) {
                next_pc = inst.target;
            } else {
                const SimtEntry fall{pc + 1, active & ~taken, inst.reconv};
                const SimtEntry jump{inst.target, taken, inst.reconv};
                ws.stack.back().pc = inst.reconv;
                ws.stack.push_back(fall);
                ws.stack.push_back(jump);
                next_pc = inst.target;
            }
        }

        if (hook_) {
            HookContext ctx{prog_, launch_, kernel_, w,   pc,  inst,
                            state_.executed() - 1, active, exec, state_, next_pc};
            hook_(ctx);
            next_pc = ctx.next_pc;
        }
        // After a divergence the top entry is the taken path.
        ws.stack.back().pc = next_pc;
    }

    const Program &prog_;
    const ExecConfig &cfg_;
    const InjectionHook &hook_;
    MachineState state_;
    RunResult result_;
    int launch_ = 0;
    int kernel_ = 0;
    int first_nonzero_exit_ = 0;
    bool stopped_ = false;
};

} // namespace

RunResult Interpreter::run(const ExecConfig &config, const InjectionHook &hook) const {
    if (config.instruction_budget == 0)
        throw InvariantError("instruction budget must be positive");
    if (program_.kernels.empty())
        throw InvariantError("program has no kernels");
    return Run(program_, config, hook).go();
}

} // namespace tlfit::isa
