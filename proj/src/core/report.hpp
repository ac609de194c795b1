/*
 * Copyright 2026 The adaopt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAOPT_CORE_REPORT_HPP
#define ADAOPT_CORE_REPORT_HPP

#include <string>
#include <vector>

namespace adaopt {

/// One named pass/fail entry of a validation-style report.
struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// A list of checks; failures are entries, never exceptions.
struct ValidationReport {
    std::vector<Check> checks;

    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }

    /// Convenience lookup; returns nullptr when no check has that name.
    const Check* find(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

}  // namespace adaopt

#endif  // ADAOPT_CORE_REPORT_HPP
