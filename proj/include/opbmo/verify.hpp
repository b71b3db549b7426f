#pragma once

#include <string>
#include <vector>

#include "opbmo/averaging.hpp"

namespace opbmo {

/// Ensemble configuration for the identity suite. The exact operator
/// identities run over the full dims x depths x seeds grid; norm comparisons
/// and sign-average checks cost more per symbol and run on the reduced seed
/// counts below (sign averages additionally cap the depth at 3 to keep the
/// enumeration small).
struct VerifyOptions {
    std::vector<int> dims{1, 2, 4};
    std::vector<int> depths{2, 3};
    int seeds = 25;
    int norm_seeds = 10;
    int average_seeds = 5;
    double tolerance_scale = 1.0;  // multiplies every default tolerance
    bool with_norm_checks = true;
    bool with_average_checks = true;
};

/// Worst scaled residual of one named identity over the whole ensemble.
struct IdentityResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;  // after scaling
    bool pass = false;
};

struct VerifyReport {
    std::vector<IdentityResult> identities;
    int symbols_checked = 0;
    bool all_pass = false;
};

VerifyReport run_verify(const VerifyOptions& opt);

/// JSON object with one entry per identity plus the overall verdict.
std::string verify_report_json(const VerifyReport& rep);

}  // namespace opbmo
