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

#include "tlfit/compose/fit.h"
#include "tlfit/compose/stats.h"
#include "tlfit/error.h"
#include "tlfit/faults/rng.h"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace tlfit;

namespace {

constexpr double kZ95 = 1.959963984540054;

double bisect(const std::function<bool(double)> &below_root, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (below_root(mid) ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

// Score-test inversion: the set of p with |k - n p| <= z sqrt(n p (1 - p)).
Interval wilson_by_inversion(double k, double n, double z) {
    auto inside = [&](double p) { return std::abs(k - n * p) <= z * std::sqrt(n * p * (1 - p)); };
    const double phat = k / n;
    const double lo = phat == 0 ? 0 : bisect([&](double p) { return !inside(p); }, 0, phat);
    const double hi = phat == 1 ? 1 : bisect([&](double p) { return inside(p); }, phat, 1);
    return {lo, hi};
}

double poisson_cdf(int k, double mu) {
    double term = std::exp(-mu), sum = term;
    for (int i = 1; i <= k; ++i) {
        term *= mu / i;
        sum += term;
    }
    return sum;
}

} // namespace

TEST_CASE("Wilson interval matches score-test inversion") {
    for (auto [k, n] : {std::pair{5, 10}, {0, 20}, {20, 20}, {1, 1000}, {400, 500}, {37, 91}}) {
        const auto ci = proportion_ci(k, n);
        const auto ref = wilson_by_inversion(k, n, kZ95);
        CHECK(ci.lo == doctest::Approx(ref.lo).epsilon(1e-9));
        CHECK(ci.hi == doctest::Approx(ref.hi).epsilon(1e-9));
    }
    // k = 5, n = 10 in closed form.
    const double z2 = kZ95 * kZ95;
    const double c = (0.5 + z2 / 20) / (1 + z2 / 10);
    const double h = kZ95 * std::sqrt(0.025 + z2 / 400) / (1 + z2 / 10);
    CHECK(proportion_ci(5, 10).lo == doctest::Approx(c - h));
    CHECK_THROWS_AS(proportion_ci(1, 0), InvariantError);
    CHECK_THROWS_AS(proportion_ci(3, 2), InvariantError);
    CHECK_THROWS_AS(proportion_ci(1, 2, 1.5), InvariantError);
}

TEST_CASE("Wilson coverage by simulation") {
    RngStream rng(2024);
    int covered = 0;
    const int campaigns = 2000, n = 300;
    const double p = 0.1;
    for (int c = 0; c < campaigns; ++c) {
        int k = 0;
        for (int i = 0; i < n; ++i)
            k += rng.uniform() < p;
        covered += proportion_ci(k, n).contains(p);
    }
    CHECK(static_cast<double>(covered) / campaigns >= 0.93);
}

TEST_CASE("Poisson interval solves the tail equations") {
    for (int k : {1, 3, 13, 40}) {
        const auto ci = poisson_ci(k);
        // P(X >= k | lo) = 0.025 and P(X <= k | hi) = 0.025.
        CHECK(1 - poisson_cdf(k - 1, ci.lo) == doctest::Approx(0.025).epsilon(1e-6));
        CHECK(poisson_cdf(k, ci.hi) == doctest::Approx(0.025).epsilon(1e-6));
    }
    const auto zero = poisson_ci(0);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == doctest::Approx(-std::log(0.025)));
}

TEST_CASE("beam FIT") {
    const auto b = fit_from_beam({1, 1e9, 13});
    CHECK(b.fit == 13.0);
    CHECK(b.cross_section == 1e-9);
    CHECK(b.ci.contains(13.0));
    const auto z = fit_from_beam({0, 1e10, 13});
    CHECK(z.fit == 0.0);
    CHECK(z.ci.hi > 0.0);
    CHECK(z.ci.hi == doctest::Approx(-std::log(0.025) * 13 * 1e9 / 1e10));
    CHECK_THROWS_AS(fit_from_beam({1, 0, 13}), InvariantError);
}
