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

#include "tlfit/profiler/instruction_class.h"

#include <cstdint>
#include <string>
#include <vector>

namespace tlfit {

// How a layout node's value is produced from its sources.
enum class NodeOp : std::uint8_t {
    Seed,       // constant, not checked for origin consistency
    Load,       // constant read from shared memory
    PredBit,    // one predicate bit, observed through a packed register
    IAdd,       // wrapping sum of sources plus `c`
    IMad,       // sources[0] * k + c, wrapping
    FAdd,       // float sources[0] + sources[1]
    FFma,       // fmaf(sources[0], bits(k), bits(c))
    Pack,       // sum of (source bit << position)
    Accumulate, // wrapping sum of sources
};

std::string_view node_op_name(NodeOp op);

struct LayoutNode {
    std::string name;
    int reg = 0;  // register holding the value in the record dump
    int bit = -1; // >= 0 when the value is a single bit of `reg`
    NodeOp op = NodeOp::Seed;
    std::vector<int> sources; // earlier node indices
    std::uint32_t k = 0;
    std::uint32_t c = 0;
    std::uint32_t expected = 0;
    int step = -1;             // series step, 1-based; -1 for bookkeeping nodes
    int pc = -1;               // static pc of the producing instruction
    InstructionClass cls = InstructionClass::Uncovered;
};

/// Register map of a microbenchmark. Nodes are in dataflow order.
struct Layout {
    std::string kernel;
    int record_first = 0; // first register dumped by RECORD
    int record_last = 0;
    std::vector<LayoutNode> nodes;

    std::vector<int> series_nodes(InstructionClass cls) const;
    int find_step(int step) const;
};

/// Recompute a node from (possibly corrupted) source values.
std::uint32_t evaluate_node(const LayoutNode &node, const std::vector<std::uint32_t> &values);

} // namespace tlfit
