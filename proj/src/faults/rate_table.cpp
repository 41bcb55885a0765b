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

#include "tlfit/faults/rate_table.h"

#include "tlfit/error.h"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <set>
#include <sstream>

namespace tlfit {

std::string_view units_name(RateUnits u) {
    return u == RateUnits::Absolute ? "absolute" : "relative";
}

double RateTable::rate(InstructionClass c, ManifestationKind k) const {
    auto it = rates.find({c, k});
    return it == rates.end() ? 0.0 : it->second;
}

double RateTable::total(InstructionClass c) const {
    auto it = totals.find(c);
    return it == totals.end() ? 0.0 : it->second;
}

std::vector<InstructionClass> RateTable::classes() const {
    std::vector<InstructionClass> out;
    for (const auto &[c, _] : totals)
        out.push_back(c);
    return out;
}

std::vector<ManifestationKind> RateTable::kinds(InstructionClass c) const {
    std::vector<ManifestationKind> out;
    for (auto k : kAllManifestations)
        if (rate(c, k) > 0.0)
            out.push_back(k);
    return out;
}

RateTable RateTable::scaled(double factor) const {
    RateTable t = *this;
    for (auto &[_, r] : t.rates)
        r *= factor;
    for (auto &[_, r] : t.totals)
        r *= factor;
    return t;
}

namespace {

std::string trim(std::string s) {
    const char *ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_number(const std::string &s, int line) {
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw InputError("rate table line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

RateTable parse_rate_table(std::string_view csv_text) {
    RateTable t;
    std::istringstream in{std::string(csv_text)};
    bool header_seen = false;
    int line_no = 0;
    std::set<std::pair<InstructionClass, ManifestationKind>> seen;
    auto fail = [&](const std::string &msg) {
        throw InputError("rate table line " + std::to_string(line_no) + ": " + msg);
    };

    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream kv(line.substr(1));
            for (std::string tok; kv >> tok;) {
                auto eq = tok.find('=');
                if (eq == std::string::npos)
                    continue;
                auto key = tok.substr(0, eq);
                auto val = tok.substr(eq + 1);
                if (key == "units") {
                    if (val == "absolute")
                        t.units = RateUnits::Absolute;
                    else if (val == "relative")
                        t.units = RateUnits::Relative;
                    else
                        fail("units must be absolute or relative, got '" + val + "'");
                } else if (key == "normalized_to") {
                    auto c = class_from_name(val);
                    if (!c || *c == InstructionClass::Uncovered)
                        fail("unknown normalization class '" + val + "'");
                    t.normalized_to = c;
                } else if (key == "rowsum_tolerance") {
                    t.rowsum_tolerance = parse_number(val, line_no);
                    if (t.rowsum_tolerance < 0)
                        fail("negative rowsum_tolerance");
                }
            }
            continue;
        }
        auto cells = split_csv(line);
        if (!header_seen) {
            if (cells != std::vector<std::string>{"class", "manifestation", "rate"})
                fail("expected header 'class,manifestation,rate'");
            header_seen = true;
            continue;
        }
        if (cells.size() != 3)
            fail("expected 3 columns");
        auto cls = class_from_name(cells[0]);
        if (!cls || *cls == InstructionClass::Uncovered)
            fail("unknown class '" + cells[0] + "'");
        double value = parse_number(cells[2], line_no);
        if (value < 0)
            fail("negative rate " + cells[2]);
        if (cells[1] == "TOTAL") {
            if (!t.totals.emplace(*cls, value).second)
                fail("duplicate TOTAL row for " + cells[0]);
            continue;
        }
        auto kind = manifestation_from_name(cells[1]);
        if (!kind)
            fail("unknown manifestation '" + cells[1] + "'");
        if (!seen.insert({*cls, *kind}).second)
            fail("duplicate row " + cells[0] + "," + cells[1]);
        t.rates[{*cls, *kind}] = value;
    }
    if (!header_seen)
        throw InputError("rate table: missing header");

    for (const auto &[key, _] : t.rates)
        if (!t.totals.count(key.first))
            throw InputError("rate table: class " + std::string(class_name(key.first)) +
                             " has no TOTAL row");
    for (const auto &[cls, total] : t.totals) {
        double sum = 0.0;
        for (auto k : kAllManifestations)
            sum += t.rate(cls, k);
        const double scale = std::max(std::abs(total), 1e-300);
        if (std::abs(sum - total) > t.rowsum_tolerance * scale &&
            !(total == 0.0 && sum == 0.0))
            throw InputError("rate table: row-sum violation for " +
                             std::string(class_name(cls)) + " (parts " + std::to_string(sum) +
                             ", TOTAL " + std::to_string(total) + ")");
    }
    return t;
}

std::string write_rate_table(const RateTable &table) {
    std::ostringstream os;
    os << "# units=" << units_name(table.units);
    if (table.normalized_to)
        os << " normalized_to=" << class_name(*table.normalized_to);
    os << " rowsum_tolerance=" << std::setprecision(17) << table.rowsum_tolerance << '\n';
    os << "class,manifestation,rate\n";
    for (const auto &[cls, total] : table.totals) {
        os << class_name(cls) << ",TOTAL," << std::setprecision(17) << total << '\n';
        for (auto k : kAllManifestations) {
            auto it = table.rates.find({cls, k});
            if (it != table.rates.end())
                os << class_name(cls) << ',' << manifestation_name(k) << ','
                   << std::setprecision(17) << it->second << '\n';
        }
    }
    return os.str();
}

} // namespace tlfit
