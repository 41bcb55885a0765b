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

#include <cstdint>
#include <utility>

namespace tlfit {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double half_width() const { return (hi - lo) / 2.0; }
    bool operator==(const Interval &) const = default;
};

/// Wilson score interval for k successes in n trials. Requires 0 <= k <= n,
/// n >= 1, 0 < level < 1; throws InvariantError otherwise.
Interval proportion_ci(std::uint64_t k, std::uint64_t n, double level = 0.95);

/// Exact (Garwood, chi-square based) interval for a Poisson count.
/// The lower bound is 0 for k = 0.
Interval poisson_ci(std::uint64_t k, double level = 0.95);

} // namespace tlfit
