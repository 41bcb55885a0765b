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

#include "tlfit/compose/stats.h"

#include "tlfit/error.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace tlfit {

namespace {
void check_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw InvariantError("confidence level must be in (0, 1)");
}
} // namespace

Interval proportion_ci(std::uint64_t k, std::uint64_t n, double level) {
    check_level(level);
    if (n == 0)
        throw InvariantError("proportion interval needs at least one trial");
    if (k > n)
        throw InvariantError("successes exceed trials");

    const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;

    Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    // Pin the closed-form boundaries so rounding cannot exclude k/n.
    if (k == 0)
        ci.lo = 0.0;
    if (k == n)
        ci.hi = 1.0;
    ci.lo = std::min(ci.lo, p);
    ci.hi = std::max(ci.hi, p);
    return ci;
}

Interval poisson_ci(std::uint64_t k, double level) {
    check_level(level);
    const double alpha = 1.0 - level;
    const double kk = static_cast<double>(k);
    Interval ci;
    ci.lo = k == 0 ? 0.0
                   : boost::math::quantile(boost::math::chi_squared(2.0 * kk), alpha / 2.0) / 2.0;
    ci.hi = boost::math::quantile(boost::math::chi_squared(2.0 * kk + 2.0), 1.0 - alpha / 2.0) /
            2.0;
    return ci;
}

} // namespace tlfit
