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

#include "tlfit/faults/manifestation.h"

namespace tlfit {

namespace {
constexpr std::array<std::string_view, kNumManifestations> kNames = {
    "crash",           "hang",       "single_bit",  "double_bit", "random_value",
    "two_thread_random", "warp_double_bit", "warp_random", "warp_zero", "two_warp_random",
};
} // namespace

std::string_view manifestation_name(ManifestationKind k) {
    return kNames[static_cast<std::size_t>(k)];
}

std::optional<ManifestationKind> manifestation_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name)
            return static_cast<ManifestationKind>(i);
    return std::nullopt;
}

std::string_view bit_type_name(BitType b) {
    switch (b) {
    case BitType::F:
        return "F";
    case BitType::IS:
        return "IS";
    case BitType::IM:
        return "IM";
    case BitType::Unattributed:
        return "Unattributed";
    }
    return "?";
}

BitType attribution(ManifestationKind k) {
    switch (k) {
    case ManifestationKind::SingleBit:
    case ManifestationKind::DoubleBit:
    case ManifestationKind::RandomValue:
    case ManifestationKind::TwoThreadRandom:
        return BitType::F;
    case ManifestationKind::WarpDoubleBit:
    case ManifestationKind::WarpRandom:
    case ManifestationKind::WarpZero:
    case ManifestationKind::TwoWarpRandom:
        return BitType::IS;
    case ManifestationKind::Crash:
    case ManifestationKind::Hang:
        return BitType::Unattributed;
    }
    return BitType::Unattributed;
}

} // namespace tlfit
