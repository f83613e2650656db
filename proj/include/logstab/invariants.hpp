#pragma once

// Self-checks run by the `verify` command. Each check uses only the library
// itself (identities, finite differences, cross-module agreement).

#include <string>
#include <vector>

namespace logstab::invariants {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteOptions {
    bool quick = false; ///< smaller ensembles
    int threads = 0;
};

[[nodiscard]] std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options = {});

} // namespace logstab::invariants
