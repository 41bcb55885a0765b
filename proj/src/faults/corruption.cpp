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

#include "tlfit/faults/corruption.h"

#include "tlfit/error.h"

namespace tlfit {

InjectionPoint InjectionPoint::from(const isa::HookContext &ctx) {
    InjectionPoint p;
    p.warp = ctx.warp;
    p.active = ctx.active;
    if (ctx.inst.writes_register()) {
        p.index = ctx.inst.dst.reg;
    } else if (ctx.inst.writes_predicate()) {
        p.predicate = true;
        p.index = ctx.inst.dst.reg;
    } else {
        throw InvariantError("no injectable destination in " +
                             std::string(isa::opcode_name(ctx.inst.op)));
    }
    return p;
}

namespace {

std::uint32_t read(const isa::MachineState &s, bool predicate, int index, int w, int t) {
    return predicate ? static_cast<std::uint32_t>(s.pred(w, t, index)) : s.reg(w, t, index);
}

void write(isa::MachineState &s, bool predicate, int index, int w, int t, std::uint32_t v) {
    if (predicate) {
        auto &p = s.preds(w, t);
        const auto bit = static_cast<std::uint8_t>(1u << index);
        p = static_cast<std::uint8_t>((v & 1u) ? (p | bit) : (p & ~bit));
    } else {
        s.reg(w, t, index) = v;
    }
}

std::vector<int> lanes(isa::ThreadMask mask, int tpw) {
    std::vector<int> out;
    for (int t = 0; t < tpw; ++t)
        if ((mask >> t) & 1u)
            out.push_back(t);
    return out;
}

class Corruptor {
  public:
    Corruptor(isa::MachineState &s, const InjectionPoint &p, ManifestationKind k)
        : state_(s), point_(p) {
        desc_.kind = k;
        desc_.predicate = p.predicate;
        desc_.index = p.index;
    }

    void set(int w, int t, std::uint32_t after) {
        if (point_.predicate)
            after &= 1u;
        const auto before = read(state_, point_.predicate, point_.index, w, t);
        write(state_, point_.predicate, point_.index, w, t, after);
        desc_.entries.push_back({w, t, before ^ after, before, after});
    }

    void flip(int w, int t, std::uint32_t mask) {
        set(w, t, read(state_, point_.predicate, point_.index, w, t) ^ mask);
    }

    CorruptionDescriptor take() { return std::move(desc_); }

  private:
    isa::MachineState &state_;
    const InjectionPoint &point_;
    CorruptionDescriptor desc_;
};

std::uint32_t two_bit_mask(RngStream &rng) {
    const auto a = static_cast<int>(rng.below(32));
    auto b = static_cast<int>(rng.below(31));
    if (b >= a)
        ++b;
    return (1u << a) | (1u << b);
}

} // namespace

CorruptionDescriptor apply_manifestation(isa::MachineState &state, const InjectionPoint &point,
                                         ManifestationKind kind, RngStream &rng) {
    Corruptor c(state, point, kind);
    if (!is_injectable(kind))
        return c.take();

    const int tpw = state.threads_per_warp();
    auto active = lanes(point.active, tpw);
    if (active.empty())
        active = lanes(state.full_mask(), tpw);
    const int w = point.warp;
    const int width = point.predicate ? 1 : 32;

    if (point.predicate &&
        (kind == ManifestationKind::DoubleBit || kind == ManifestationKind::WarpDoubleBit))
        throw InvariantError(std::string(manifestation_name(kind)) +
                             " does not apply to a one-bit predicate destination");

    auto pick_thread = [&] { return active[rng.below(active.size())]; };
    auto random_value = [&] { return point.predicate ? rng.next_u32() & 1u : rng.next_u32(); };

    switch (kind) {
    case ManifestationKind::SingleBit: {
        const int t = pick_thread();
        c.flip(w, t, 1u << rng.below(width));
        break;
    }
    case ManifestationKind::DoubleBit: {
        const int t = pick_thread();
        c.flip(w, t, two_bit_mask(rng));
        break;
    }
    case ManifestationKind::RandomValue: {
        const int t = pick_thread();
        c.set(w, t, random_value());
        break;
    }
    case ManifestationKind::TwoThreadRandom: {
        const auto first = rng.below(active.size());
        c.set(w, active[first], random_value());
        if (active.size() > 1) {
            auto second = rng.below(active.size() - 1);
            if (second >= first)
                ++second;
            c.set(w, active[second], random_value());
        }
        break;
    }
    case ManifestationKind::WarpDoubleBit: {
        const auto mask = two_bit_mask(rng);
        for (int t : active)
            c.flip(w, t, mask);
        break;
    }
    case ManifestationKind::WarpRandom:
        for (int t : active)
            c.set(w, t, random_value());
        break;
    case ManifestationKind::WarpZero:
        for (int t : active)
            c.set(w, t, 0);
        break;
    case ManifestationKind::TwoWarpRandom:
        // The partner warp is handled by PartnerWarpCorruption.
        for (int t : active)
            c.set(w, t, random_value());
        break;
    case ManifestationKind::Crash:
    case ManifestationKind::Hang:
        break;
    }
    return c.take();
}

void PartnerWarpCorruption::arm(const isa::HookContext &ctx, ManifestationKind kind) {
    if (kind != ManifestationKind::TwoWarpRandom || ctx.state.warps() < 2)
        return;
    target_ = Target{ctx.launch, (ctx.warp + 1) % ctx.state.warps(), ctx.pc};
}

bool PartnerWarpCorruption::maybe_apply(isa::HookContext &ctx, RngStream &rng,
                                        CorruptionDescriptor &desc) {
    if (!target_ || ctx.launch != target_->launch || ctx.warp != target_->warp ||
        ctx.pc != target_->pc)
        return false;
    target_.reset();
    const auto point = InjectionPoint::from(ctx);
    Corruptor c(ctx.state, point, desc.kind);
    for (int t : lanes(point.active, ctx.state.threads_per_warp()))
        c.set(point.warp, t, point.predicate ? rng.next_u32() & 1u : rng.next_u32());
    auto extra = c.take();
    desc.entries.insert(desc.entries.end(), extra.entries.begin(), extra.entries.end());
    return true;
}

CorruptionDescriptor apply_bit_flip(isa::MachineState &state, const InjectionPoint &point,
                                    int thread, int bit) {
    if (bit < 0 || bit >= (point.predicate ? 1 : 32))
        throw InvariantError("bit index out of range for destination");
    Corruptor c(state, point, ManifestationKind::SingleBit);
    c.flip(point.warp, thread, 1u << bit);
    return c.take();
}

void apply_descriptor(isa::MachineState &state, const CorruptionDescriptor &desc) {
    for (const auto &e : desc.entries) {
        const auto v = read(state, desc.predicate, desc.index, e.warp, e.thread);
        write(state, desc.predicate, desc.index, e.warp, e.thread, v ^ e.xor_mask);
    }
}

std::vector<ThreadCorruption> diff_registers(const isa::MachineState &a,
                                             const isa::MachineState &b, bool predicate,
                                             int index) {
    std::vector<ThreadCorruption> out;
    for (int w = 0; w < a.warps(); ++w)
        for (int t = 0; t < a.threads_per_warp(); ++t) {
            const auto x = read(a, predicate, index, w, t);
            const auto y = read(b, predicate, index, w, t);
            if (x != y)
                out.push_back({w, t, x ^ y, x, y});
        }
    return out;
}

ManifestationKind sample_manifestation(const RateTable &table, InstructionClass cls,
                                       RngStream &rng) {
    double sum = 0.0;
    for (auto k : kAllManifestations)
        sum += table.rate(cls, k);
    if (!(sum > 0.0))
        throw InvariantError("class has no manifestations: " + std::string(class_name(cls)));
    const double u = rng.uniform() * sum;
    double acc = 0.0;
    ManifestationKind last = ManifestationKind::SingleBit;
    for (auto k : kAllManifestations) {
        const double r = table.rate(cls, k);
        if (r <= 0.0)
            continue;
        acc += r;
        last = k;
        if (u < acc)
            return k;
    }
    return last;
}

} // namespace tlfit
