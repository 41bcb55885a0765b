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
#include <optional>
#include <string_view>

namespace tlfit {

// Architecture-level shape of a low-level error.
enum class ManifestationKind : std::uint8_t {
    Crash,
    Hang,
    SingleBit,       // one bit, one register, one thread
    DoubleBit,       // two bits, one register, one thread
    RandomValue,     // 3+ bits: uniform 32-bit replacement, one thread
    TwoThreadRandom, // random value, same register, two threads
    WarpDoubleBit,   // same two bits flipped in every thread of the warp
    WarpRandom,      // independent random value in every thread of the warp
    WarpZero,        // zero in every thread of the warp
    TwoWarpRandom,   // random values in every thread of two warps
};

inline constexpr std::size_t kNumManifestations = 10;

inline constexpr std::array<ManifestationKind, kNumManifestations> kAllManifestations = {
    ManifestationKind::Crash,           ManifestationKind::Hang,
    ManifestationKind::SingleBit,       ManifestationKind::DoubleBit,
    ManifestationKind::RandomValue,     ManifestationKind::TwoThreadRandom,
    ManifestationKind::WarpDoubleBit,   ManifestationKind::WarpRandom,
    ManifestationKind::WarpZero,        ManifestationKind::TwoWarpRandom,
};

// Low-level bit type an event is attributed to.
enum class BitType : std::uint8_t { F, IS, IM, Unattributed };

std::string_view manifestation_name(ManifestationKind k);
std::optional<ManifestationKind> manifestation_from_name(std::string_view name);
std::string_view bit_type_name(BitType b);

BitType attribution(ManifestationKind k);

// Crash and hang rows are accounted analytically and never injected.
inline bool is_injectable(ManifestationKind k) {
    return k != ManifestationKind::Crash && k != ManifestationKind::Hang;
}

// Kinds that corrupt more than one thread's copy across threads or warps in a
// non-SIMT-uniform way; excluded from default campaigns.
inline bool is_multi_thread(ManifestationKind k) {
    return k == ManifestationKind::TwoThreadRandom || k == ManifestationKind::TwoWarpRandom;
}

inline bool is_warp_wide(ManifestationKind k) {
    return k == ManifestationKind::WarpDoubleBit || k == ManifestationKind::WarpRandom ||
           k == ManifestationKind::WarpZero || k == ManifestationKind::TwoWarpRandom;
}

} // namespace tlfit
