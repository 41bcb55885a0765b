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

#include <stdexcept>
#include <string>

namespace tlfit {

// Malformed or unreadable input: assembly syntax, CSV/JSON schema, missing files.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Assembly error carrying the 1-based source line.
class ParseError : public InputError {
  public:
    ParseError(int line, const std::string &msg)
        : InputError("line " + std::to_string(line) + ": " + msg), line_(line) {}

    int line() const { return line_; }

  private:
    int line_;
};

// Inputs are well-formed but violate a semantic contract (units mismatch,
// unprofilable program, cap exceeded, ...).
class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace tlfit
