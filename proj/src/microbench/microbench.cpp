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

#include "tlfit/microbench/microbench.h"

#include "tlfit/error.h"
#include "tlfit/faults/corruption.h"
#include "tlfit/faults/rng.h"
#include "tlfit/injector/injector.h"
#include "tlfit/isa/interpreter.h"
#include "tlfit/isa/parser.h"

#include <algorithm>
#include <array>
#include <bit>
#include <fmt/format.h>
#include <map>
#include <type_traits>

namespace tlfit {

namespace {

constexpr int kCounterReg = 63;
constexpr int kScratchReg = 62;
constexpr int kLastSeriesReg = 59;

using RegFile = std::array<std::uint32_t, isa::kNumRegisters>;

class Emitter {
  public:
    void line(const std::string &s) { lines_.push_back(s); }
    void label(const std::string &l) { lines_.push_back(l + ":"); }
    int op(const std::string &s) {
        lines_.push_back("    " + s);
        return pc_++;
    }
    int pc() const { return pc_; }
    std::string text() const {
        std::string out;
        for (const auto &l : lines_)
            out += l + '\n';
        return out;
    }

  private:
    std::vector<std::string> lines_;
    int pc_ = 0;
};

std::string hex(std::uint32_t v) { return fmt::format("0x{:08X}", v); }

LayoutNode node(std::string name, int reg, NodeOp op, std::vector<int> sources, int step, int pc,
                InstructionClass cls) {
    LayoutNode n;
    n.name = std::move(name);
    n.reg = reg;
    n.op = op;
    n.sources = std::move(sources);
    n.step = step;
    n.pc = pc;
    n.cls = cls;
    return n;
}

struct Draft {
    Microbench mb;
    std::vector<int> check_regs;
};

std::uint32_t lds_value(int k) { return 0x1000u + 7u * static_cast<std::uint32_t>(k) + 3u; }

// Comparisons of 5 against 9, alternating true and false.
constexpr std::array<std::string_view, 7> kIsetpCmps = {"LT", "GT", "LE", "GE", "NE", "EQ", "LT"};

Draft build(const MicrobenchSpec &spec, const RegFile *expected) {
    Draft d;
    auto &mb = d.mb;
    mb.spec = spec;
    const int L = spec.length;
    const auto target = spec.target;
    Emitter e;
    auto imm_for = [&](int reg) { return expected ? hex((*expected)[reg]) : std::string("0"); };

    e.line(fmt::format(".warps {}", spec.warps));
    e.line(fmt::format(".threads_per_warp {}", spec.threads_per_warp));
    if (target == InstructionClass::LDS)
        e.line(fmt::format(".shmem {}", L));
    e.line(fmt::format(".kernel mb_{}", class_name(target)));
    mb.layout.kernel = fmt::format("mb_{}", class_name(target));

    auto &nodes = mb.layout.nodes;
    e.op(fmt::format("MOVI R{}, 0", kCounterReg));
    int last_reg = 0;

    switch (target) {
    case InstructionClass::IADD: {
        e.label("loop");
        e.op("MOVI R0, 1");
        e.op("MOVI R1, 1");
        nodes.push_back(node("seed0", 0, NodeOp::Seed, {}, -1, -1, InstructionClass::Uncovered));
        nodes.push_back(node("seed1", 1, NodeOp::Seed, {}, -1, -1, InstructionClass::Uncovered));
        for (int k = 1; k <= L; ++k) {
            const int pc = e.op(fmt::format("IADD R{}, R{}, R{}", k + 1, k - 1, k));
            nodes.push_back(node(fmt::format("fib{}", k), k + 1, NodeOp::IAdd, {k - 1, k}, k, pc,
                                 InstructionClass::IADD));
        }
        d.check_regs = {L, L + 1};
        last_reg = L + 1;
        break;
    }
    case InstructionClass::IMAD: {
        e.label("loop");
        e.op("MOVI R0, 1");
        nodes.push_back(node("seed", 0, NodeOp::Seed, {}, -1, -1, InstructionClass::Uncovered));
        for (int k = 1; k <= L; ++k) {
            const int pc = e.op(fmt::format("IMAD R{}, R{}, 3, {}", k, k - 1, k));
            auto n = node(fmt::format("mad{}", k), k, NodeOp::IMad, {k - 1}, k, pc,
                          InstructionClass::IMAD);
            n.k = 3;
            n.c = static_cast<std::uint32_t>(k);
            nodes.push_back(n);
        }
        d.check_regs = {L};
        last_reg = L;
        break;
    }
    case InstructionClass::FADD:
    case InstructionClass::FFMA: {
        const bool fma = target == InstructionClass::FFMA;
        e.label("loop");
        e.op("MOVI R0, 1.5");
        nodes.push_back(node("seed", 0, NodeOp::Seed, {}, -1, -1, InstructionClass::Uncovered));
        for (int k = 1; k <= L; ++k) {
            const int pc = fma ? e.op(fmt::format("FFMA R{}, R{}, 2.0, 0.0", k, k - 1))
                               : e.op(fmt::format("FADD R{}, R{}, R{}", k, k - 1, k - 1));
            auto n = node(fmt::format("dbl{}", k), k, fma ? NodeOp::FFma : NodeOp::FAdd,
                          fma ? std::vector<int>{k - 1} : std::vector<int>{k - 1, k - 1}, k, pc,
                          target);
            if (fma) {
                n.k = std::bit_cast<std::uint32_t>(2.0f);
                n.c = std::bit_cast<std::uint32_t>(0.0f);
            }
            nodes.push_back(n);
        }
        d.check_regs = {L};
        last_reg = L;
        break;
    }
    case InstructionClass::LDS: {
        for (int k = 0; k < L; ++k) {
            e.op(fmt::format("MOVI R{}, {}", kScratchReg, hex(lds_value(k))));
            e.op(fmt::format("STS [{}], R{}", k, kScratchReg));
        }
        e.label("loop");
        for (int k = 0; k < L; ++k) {
            const int pc = e.op(fmt::format("LDS R{}, [{}]", k, k));
            nodes.push_back(node(fmt::format("load{}", k + 1), k, NodeOp::Load, {}, k + 1, pc,
                                 InstructionClass::LDS));
        }
        // acc_1 = load_1 + load_2, acc_k = acc_{k-1} + load_{k+1}
        for (int k = 1; k < L; ++k) {
            const int reg = L + k - 1;
            const int prev = k == 1 ? 0 : reg - 1;
            const int pc = e.op(fmt::format("IADD R{}, R{}, R{}", reg, prev, k));
            nodes.push_back(node(fmt::format("acc{}", k), reg, NodeOp::Accumulate, {prev, k},
                                 L + k, pc, InstructionClass::IADD));
        }
        d.check_regs = {2 * L - 2};
        last_reg = 2 * L - 2;
        break;
    }
    case InstructionClass::ISETP: {
        e.op("MOVI R60, 5");
        e.op("MOVI R61, 9");
        e.label("loop");
        int prev_acc = -1;
        for (int b = 0; b < L; ++b) {
            std::vector<int> bits;
            for (int i = 0; i < 7; ++i) {
                const int pc = e.op(fmt::format("ISETP.{} P{}, R60, R61", kIsetpCmps[i], i));
                auto n = node(fmt::format("pred{}_{}", b + 1, i), 2 * b, NodeOp::PredBit, {},
                              b * 7 + i + 1, pc, InstructionClass::ISETP);
                n.bit = i;
                bits.push_back(static_cast<int>(nodes.size()));
                nodes.push_back(n);
            }
            const int ppc = e.op(fmt::format("P2R R{}", 2 * b));
            const int pack = static_cast<int>(nodes.size());
            nodes.push_back(node(fmt::format("pack{}", b + 1), 2 * b, NodeOp::Pack, bits, -1, ppc,
                                 InstructionClass::Uncovered));
            int apc;
            if (prev_acc < 0)
                apc = e.op(fmt::format("IADD R{}, R{}, 0", 2 * b + 1, 2 * b));
            else
                apc = e.op(fmt::format("IADD R{}, R{}, R{}", 2 * b + 1, 2 * b - 1, 2 * b));
            std::vector<int> srcs = prev_acc < 0 ? std::vector<int>{pack}
                                                 : std::vector<int>{prev_acc, pack};
            prev_acc = static_cast<int>(nodes.size());
            nodes.push_back(node(fmt::format("acc{}", b + 1), 2 * b + 1, NodeOp::Accumulate, srcs,
                                 -1, apc, InstructionClass::IADD));
        }
        d.check_regs = {2 * L - 1};
        last_reg = 2 * L - 1;
        break;
    }
    case InstructionClass::BRA: {
        e.label("loop");
        for (int k = 1; k <= L; ++k) {
            e.label(fmt::format("c{}", k));
            mb.chain_pcs.push_back(
                e.op(k == L ? std::string("BRA tail") : fmt::format("BRA c{}", k + 1)));
            mb.filler_pcs.push_back(e.op("BRA rec"));
        }
        e.label("tail");
        break;
    }
    case InstructionClass::Uncovered:
        throw InvariantError("no microbenchmark for the uncovered class");
    }

    for (int r : d.check_regs)
        e.op(fmt::format("CHK R{}, {}, fail", r, imm_for(r)));
    e.op(fmt::format("IADD R{0}, R{0}, 1", kCounterReg));
    e.op(fmt::format("ISETP.LT P0, R{}, {}", kCounterReg, spec.iterations));
    e.op("@P0 BRA loop");
    e.op("EXIT");
    if (target == InstructionClass::BRA) {
        e.label("rec");
        mb.record_pc = e.op(fmt::format("RECORD R{0}, R{0}", kCounterReg));
        e.op("EXIT 2");
        mb.layout.record_first = mb.layout.record_last = kCounterReg;
    } else {
        e.label("fail");
        mb.record_pc = e.op(fmt::format("RECORD R0, R{}", last_reg));
        e.op("EXIT 1");
        mb.layout.record_first = 0;
        mb.layout.record_last = last_reg;
    }

    mb.source = e.text();
    mb.program = isa::parse_program(mb.source);
    if (expected)
        for (auto &n : nodes) {
            const auto v = (*expected)[n.reg];
            n.expected = n.bit >= 0 ? (v >> n.bit) & 1u : v;
        }
    return d;
}

void check_spec(MicrobenchSpec &spec) {
    if (spec.length == 0)
        spec.length = default_length(spec.target);
    if (spec.iterations < 1)
        throw InvariantError("microbenchmark needs at least one iteration");
    if (spec.length < 2)
        throw InvariantError("series length must be at least 2");
    int top = 0;
    switch (spec.target) {
    case InstructionClass::IADD:
        top = spec.length + 1;
        break;
    case InstructionClass::LDS:
        top = 2 * spec.length - 2;
        break;
    case InstructionClass::ISETP:
        top = 2 * spec.length - 1;
        break;
    case InstructionClass::BRA:
        top = 0;
        break;
    default:
        top = spec.length;
    }
    if (top > kLastSeriesReg)
        throw InvariantError(fmt::format("series length {} exceeds the register file for {}",
                                         spec.length, class_name(spec.target)));
}

} // namespace

int default_length(InstructionClass target) {
    switch (target) {
    case InstructionClass::LDS:
        return 24;
    case InstructionClass::ISETP:
        return 20;
    default:
        return 45;
    }
}

Microbench generate(const MicrobenchSpec &input) {
    auto spec = input;
    check_spec(spec);

    // Pass 1: placeholder check constants; capture the live registers of
    // warp 0, thread 0 at the first check.
    auto draft = build(spec, nullptr);
    RegFile regs{};
    bool captured = false;
    isa::execute(draft.mb.program, {50'000'000}, [&](isa::HookContext &ctx) {
        if (captured || ctx.warp != 0 || ctx.inst.op != isa::Opcode::CHK)
            return;
        for (int r = 0; r < isa::kNumRegisters; ++r)
            regs[static_cast<std::size_t>(r)] = ctx.state.reg(0, 0, r);
        captured = true;
    });
    if (!captured && spec.target != InstructionClass::BRA)
        throw InvariantError("microbenchmark never reached its check");

    auto final = build(spec, &regs);
    auto &mb = final.mb;
    const auto &nodes = mb.layout.nodes;
    std::vector<std::uint32_t> exp(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        exp[i] = nodes[i].expected;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (evaluate_node(nodes[i], exp) != nodes[i].expected)
            throw InvariantError("layout disagrees with execution at node " + nodes[i].name);

    auto run = isa::execute(mb.program, {50'000'000});
    if (!run.status.clean_exit() || !run.records.empty())
        throw InvariantError("generated microbenchmark is not fault-free: " +
                             isa::describe(run.status));
    return std::move(mb);
}

double check_overhead(const Microbench &mb) {
    auto run = isa::execute(mb.program, {50'000'000});
    const auto chk = run.opcode_counts[static_cast<std::size_t>(isa::Opcode::CHK)];
    const auto rec = run.opcode_counts[static_cast<std::size_t>(isa::Opcode::RECORD)];
    return run.dynamic_count == 0
               ? 0.0
               : static_cast<double>(chk + rec) / static_cast<double>(run.dynamic_count);
}

double DetectionReport::detection_rate(ManifestationKind k) const {
    auto it = by_kind.find(k);
    if (it == by_kind.end() || it->second.cases == 0)
        return 0.0;
    return static_cast<double>(it->second.detected) / static_cast<double>(it->second.cases);
}

double DetectionReport::category_rate(ManifestationKind k) const {
    auto it = by_kind.find(k);
    if (it == by_kind.end() || it->second.cases == 0)
        return 0.0;
    return static_cast<double>(it->second.category_ok) / static_cast<double>(it->second.cases);
}

double DetectionReport::origin_rate(ManifestationKind k) const {
    auto it = by_kind.find(k);
    if (it == by_kind.end() || it->second.cases == 0)
        return 0.0;
    return static_cast<double>(it->second.origin_ok) / static_cast<double>(it->second.cases);
}

namespace {

// Runs `mb` and calls `act` at occurrence `iteration` of (pc, warp 0).
template <typename Act>
isa::RunResult run_at(const Microbench &mb, std::uint64_t budget, int pc, int iteration,
                      Act &&act) {
    int seen = 0;
    bool done = false;
    return isa::execute(mb.program, {budget}, [&](isa::HookContext &ctx) {
        if (done) {
            if constexpr (std::is_invocable_v<Act, isa::HookContext &, bool>)
                act(ctx, false);
            return;
        }
        if (ctx.warp != 0 || ctx.pc != pc)
            return;
        if (seen++ != iteration)
            return;
        done = true;
        if constexpr (std::is_invocable_v<Act, isa::HookContext &, bool>)
            act(ctx, true);
        else
            act(ctx);
    });
}

void validate_bra(const Microbench &mb, int iteration, std::uint64_t budget,
                  const ValidationOptions &opt, DetectionReport &rep) {
    const int outside = static_cast<int>(mb.program.kernels[0].code.size()) + 7;
    for (std::size_t k = 0; k < mb.chain_pcs.size(); ++k) {
        const int pc = mb.chain_pcs[k];
        for (int f : mb.filler_pcs) {
            ++rep.filler_cases;
            auto run = run_at(mb, budget, pc, iteration, [&](isa::HookContext &c) { c.next_pc = f; });
            const bool logged =
                !run.records.empty() && run.status == isa::RunStatus::exited(2) &&
                std::all_of(run.records.begin(), run.records.end(), [&](const auto &r) {
                    return r.values.size() == 1 &&
                           r.values[0] == static_cast<std::uint32_t>(iteration);
                });
            if (logged)
                ++rep.filler_logged;
            else if (rep.blind_spots.size() < opt.max_blind_spots)
                rep.blind_spots.push_back(fmt::format(
                    "branch {} redirected to filler pc {}: no early-termination log", k + 1, f));
        }
        ++rep.outside_cases;
        auto run =
            run_at(mb, budget, pc, iteration, [&](isa::HookContext &c) { c.next_pc = outside; });
        if (run.status.kind == isa::RunStatus::Kind::Fault)
            ++rep.outside_due;
        for (std::size_t j = 0; j < mb.chain_pcs.size(); ++j) {
            if (j == k)
                continue;
            ++rep.chain_cases;
            const int target = mb.chain_pcs[j];
            auto r = run_at(mb, budget, pc, iteration,
                            [&](isa::HookContext &c) { c.next_pc = target; });
            if (!r.records.empty() || !r.status.clean_exit())
                ++rep.chain_detected;
        }
    }
    if (rep.chain_cases > rep.chain_detected)
        rep.blind_spots.push_back(fmt::format(
            "{} of {} redirections to another chain branch complete without any log",
            rep.chain_cases - rep.chain_detected, rep.chain_cases));
}

} // namespace

DetectionReport validate_detection(const Microbench &mb, const ValidationOptions &opt) {
    DetectionReport rep;
    rep.target = mb.spec.target;
    const auto golden = golden_run(mb.program);
    const int iteration = std::clamp(opt.iteration, 0, mb.spec.iterations - 1);
    const int tpw = mb.spec.threads_per_warp;

    if (mb.spec.target == InstructionClass::BRA) {
        validate_bra(mb, iteration, golden.hang_budget, opt, rep);
        return rep;
    }
    if (mb.spec.target == InstructionClass::ISETP)
    {
        rep.notes.push_back("a corrupted P2R bit aliases to the ISETP that produced it");
        rep.notes.push_back("random values on a one-bit predicate change only some threads, so "
                            "the observed category follows the threads that actually flipped");
    }

    const auto &layout = mb.layout;
    for (int idx : layout.series_nodes(mb.spec.target)) {
        const auto &n = layout.nodes[static_cast<std::size_t>(idx)];
        for (auto kind : opt.kinds) {
            auto &st = rep.by_kind[kind];
            auto judge = [&](const isa::RunResult &run, const std::string &what) {
                ++st.cases;
                const bool detected = !run.records.empty() || !run.status.clean_exit();
                EventInput in{run.status, Phase::DuringKernel, run.records, tpw};
                auto ev = categorize_event(in, layout);
                const bool cat_ok = ev.category == expected_category(kind);
                const bool origin_ok = ev.origin == idx;
                st.detected += detected;
                st.category_ok += cat_ok;
                st.origin_ok += origin_ok;
                if ((!detected || !cat_ok || !origin_ok) &&
                    rep.blind_spots.size() < opt.max_blind_spots)
                    rep.blind_spots.push_back(fmt::format(
                        "{} {}: {}, category {}, origin {}", n.name, what,
                        detected ? "detected" : "undetected", category_name(ev.category),
                        ev.origin < 0 ? std::string("none")
                                      : layout.nodes[static_cast<std::size_t>(ev.origin)].name));
            };

            if (kind == ManifestationKind::SingleBit) {
                const int width = n.bit >= 0 ? 1 : 32;
                for (int t = 0; t < tpw; ++t)
                    for (int b = 0; b < width; ++b) {
                        auto run = run_at(mb, golden.hang_budget, n.pc, iteration,
                                          [&](isa::HookContext &c) {
                                              apply_bit_flip(c.state, InjectionPoint::from(c), t, b);
                                          });
                        judge(run, fmt::format("thread {} bit {} single_bit", t, b));
                    }
                continue;
            }
            for (int trial = 0; trial < opt.trials_per_node; ++trial) {
                RngStream rng(split_seed(opt.seed, static_cast<std::uint64_t>(idx) * 1024 +
                                                       static_cast<std::uint64_t>(kind) * 64 +
                                                       static_cast<std::uint64_t>(trial)));
                bool skipped = false;
                CorruptionDescriptor desc;
                PartnerWarpCorruption partner;
                auto run = run_at(mb, golden.hang_budget, n.pc, iteration,
                                  [&](isa::HookContext &c, bool site) {
                                      if (!site) {
                                          partner.maybe_apply(c, rng, desc);
                                          return;
                                      }
                                      try {
                                          desc = apply_manifestation(
                                              c.state, InjectionPoint::from(c), kind, rng);
                                          partner.arm(c, kind);
                                      } catch (const InvariantError &) {
                                          skipped = true;
                                      }
                                  });
                if (skipped) {
                    ++st.skipped;
                    break;
                }
                // A random draw equal to the old value changes nothing.
                if (std::all_of(desc.entries.begin(), desc.entries.end(),
                                        [](const ThreadCorruption &e) { return e.xor_mask == 0; })) {
                    ++st.noop;
                    continue;
                }
                judge(run, fmt::format("trial {} {}", trial, manifestation_name(kind)));
            }
        }
    }
    return rep;
}

} // namespace tlfit
