#pragma once

#include <string>
#include <vector>

namespace tourney {

enum class CheckStatus { Pass, Fail, Skipped };

struct VerifyCheck {
    std::string name;
    CheckStatus status{CheckStatus::Fail};
    double max_violation{0.0};  // signed; <= tolerance means pass
    long long grid_points{0};
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
};

// The oracle-vs-engine suite: marginal pmfs, pairwise covariances, exceedance
// count laws, orthant-dependence properties and the negative-association spot
// check, at every n the enumeration budget allows. Checks the budget rules out
// are reported as skipped, never as failed.
VerifyReport run_verify_suite(unsigned long long budget = 100'000'000ULL);

std::string verify_report_to_json(const VerifyReport& report);

}  // namespace tourney
