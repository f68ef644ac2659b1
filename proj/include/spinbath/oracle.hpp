#pragma once

// Small-instance cross-checks of the fast propagation path against
// independent references (dense exponentials, explicit loops, closed forms).

#include <cstdint>
#include <string>
#include <vector>

namespace spinbath {

struct OracleCheck {
    std::string name;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct OracleReport {
    std::vector<OracleCheck> checks;
    double seconds = 0.0;

    bool passed() const;
};

struct OracleOptions {
    std::uint64_t seed = 1;
    // Mutation test: negate the CS-environment couplings seen by the fast
    // path only. The comparisons against dense and branch references then fail.
    bool flip_interaction_sign = false;
};

OracleReport run_oracle_suite(const OracleOptions& options = {});

}  // namespace spinbath
