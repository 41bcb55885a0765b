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

#include "tlfit/classify/layout.h"

#include <bit>
#include <cmath>

namespace tlfit {

std::string_view node_op_name(NodeOp op) {
    switch (op) {
    case NodeOp::Seed:
        return "seed";
    case NodeOp::Load:
        return "load";
    case NodeOp::PredBit:
        return "pred_bit";
    case NodeOp::IAdd:
        return "iadd";
    case NodeOp::IMad:
        return "imad";
    case NodeOp::FAdd:
        return "fadd";
    case NodeOp::FFma:
        return "ffma";
    case NodeOp::Pack:
        return "pack";
    case NodeOp::Accumulate:
        return "accumulate";
    }
    return "?";
}

std::vector<int> Layout::series_nodes(InstructionClass cls) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].cls == cls && nodes[i].step >= 0 && nodes[i].pc >= 0)
            out.push_back(static_cast<int>(i));
    return out;
}

int Layout::find_step(int step) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].step == step)
            return static_cast<int>(i);
    return -1;
}

std::uint32_t evaluate_node(const LayoutNode &node, const std::vector<std::uint32_t> &values) {
    auto f = [](std::uint32_t v) { return std::bit_cast<float>(v); };
    auto bits = [](float v) { return std::bit_cast<std::uint32_t>(v); };
    switch (node.op) {
    case NodeOp::Seed:
    case NodeOp::Load:
    case NodeOp::PredBit:
        return node.expected;
    case NodeOp::IAdd: {
        std::uint32_t s = node.c;
        for (int src : node.sources)
            s += values[static_cast<std::size_t>(src)];
        return s;
    }
    case NodeOp::Accumulate: {
        std::uint32_t s = 0;
        for (int src : node.sources)
            s += values[static_cast<std::size_t>(src)];
        return s;
    }
    case NodeOp::IMad:
        return values[static_cast<std::size_t>(node.sources.at(0))] * node.k + node.c;
    case NodeOp::FAdd:
        return bits(f(values[static_cast<std::size_t>(node.sources.at(0))]) +
                    f(values[static_cast<std::size_t>(node.sources.at(1))]));
    case NodeOp::FFma:
        return bits(std::fmaf(f(values[static_cast<std::size_t>(node.sources.at(0))]), f(node.k),
                              f(node.c)));
    case NodeOp::Pack: {
        std::uint32_t p = 0;
        for (std::size_t i = 0; i < node.sources.size(); ++i)
            p |= (values[static_cast<std::size_t>(node.sources[i])] & 1u) << i;
        return p;
    }
    }
    return 0;
}

} // namespace tlfit
