#include "tourney/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tourney/errors.hpp"
#include "tourney/exact_engine.hpp"
#include "tourney/oracle.hpp"
#include "tourney/outcome_model.hpp"

namespace tourney {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kMatchTol = 1e-12;

std::string status_str(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "PASS";
        case CheckStatus::Fail: return "FAIL";
        default: return "SKIPPED";
    }
}

// 20 raw thresholds spanning the upper half of the score range
std::vector<double> threshold_grid(long long n) {
    std::vector<double> grid;
    const double lo = static_cast<double>(n - 1) * 0.5;
    const double hi = static_cast<double>(n - 1) + 0.5;
    for (int i = 0; i < 20; ++i)
        grid.push_back(lo + (hi - lo) * (static_cast<double>(i) + 0.5) / 20.0);
    return grid;
}

VerifyCheck skipped(const std::string& name, const std::string& why) {
    VerifyCheck c;
    c.name = name;
    c.status = CheckStatus::Skipped;
    c.detail = why;
    return c;
}

}  // namespace

bool VerifyReport::all_passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const VerifyCheck& c) { return c.status == CheckStatus::Fail; });
}

VerifyReport run_verify_suite(unsigned long long budget) {
    VerifyReport report;
    const std::vector<OutcomeModel> models = {classical_model(), chess_model()};

    for (const auto& model : models) {
        for (long long n = 2; n <= 6; ++n) {
            const std::string base = model.id + "_n" + std::to_string(n);
            oracle::JointLaw joint;
            try {
                joint = oracle::enumerate_joint(model, n, budget);
            } catch (const BudgetExceeded& e) {
                report.checks.push_back(skipped("marginal_" + base, e.what()));
                if (n >= 4)
                    report.checks.push_back(skipped("pair_cov_" + base, e.what()));
                continue;
            }

            // marginal pmf: oracle enumeration vs engine convolution, atomwise
            {
                VerifyCheck c;
                c.name = "marginal_" + base;
                const LatticePmf om = oracle::marginal_from_joint(joint, 0);
                const LatticePmf em = score_pmf(model, n);
                double worst = 0.0;
                const long long span = static_cast<long long>(om.size());
                for (long long i = 0; i < span; ++i) {
                    const long long lat = om.offset + i;
                    const long long ei = lat - em.offset;
                    const double ev = (ei >= 0 && ei < static_cast<long long>(em.size()))
                                          ? em.probs[static_cast<std::size_t>(ei)]
                                          : 0.0;
                    worst = std::max(worst,
                                     std::abs(om.probs[static_cast<std::size_t>(i)] - ev));
                }
                c.grid_points = span;
                c.max_violation = worst;
                c.status = worst <= kMatchTol ? CheckStatus::Pass : CheckStatus::Fail;
                report.checks.push_back(c);
            }

            if (n < 4) continue;

            // pairwise indicator covariance and the W law moments on a grid
            {
                VerifyCheck cov_check, w_check;
                cov_check.name = "pair_cov_" + base;
                w_check.name = "w_law_" + base;
                double worst_cov = 0.0, worst_w = 0.0;
                const ScoreLaws laws = score_laws(model, n);
                for (double u : threshold_grid(n)) {
                    const double oc = oracle::exact_pair_covariance(joint, u);
                    const auto [ec, dec] = pair_covariance(model, n, u, &laws.rest);
                    (void)dec;
                    worst_cov = std::max(worst_cov, std::abs(oc - ec));

                    const oracle::WLaw wlaw = oracle::exact_W_distribution(joint, u);
                    const double p = tail_prob(laws.score, u);
                    const double nn = static_cast<double>(n);
                    const double mean_expected = nn * p;
                    const double var_expected = nn * p * (1.0 - p) + nn * (nn - 1.0) * ec;
                    worst_w = std::max(worst_w, std::abs(wlaw.mean() - mean_expected));
                    worst_w = std::max(worst_w, std::abs(wlaw.variance() - var_expected));
                }
                cov_check.grid_points = 20;
                cov_check.max_violation = worst_cov;
                cov_check.status = worst_cov <= kMatchTol ? CheckStatus::Pass : CheckStatus::Fail;
                w_check.grid_points = 20;
                w_check.max_violation = worst_w;
                w_check.status = worst_w <= kMatchTol ? CheckStatus::Pass : CheckStatus::Fail;
                report.checks.push_back(cov_check);
                report.checks.push_back(w_check);
            }
        }

        // orthant dependence and the NA spot check on the small-n joints
        for (long long n = 3; n <= 5; ++n) {
            const std::string base = model.id + "_n" + std::to_string(n);
            oracle::JointLaw joint;
            try {
                joint = oracle::enumerate_joint(model, n, budget);
            } catch (const BudgetExceeded& e) {
                report.checks.push_back(skipped("nlod_nuod_" + base, e.what()));
                continue;
            }
            const oracle::OrthantReport orep = oracle::check_nlod_nuod(joint);
            VerifyCheck c;
            c.name = "nlod_nuod_" + base;
            c.grid_points = orep.grid_points;
            c.max_violation =
                std::max(orep.max_lower_violation_value, orep.max_upper_violation_value);
            c.status = orep.nlod_ok && orep.nuod_ok ? CheckStatus::Pass : CheckStatus::Fail;
            c.detail = "max lower " + orep.max_lower_violation + ", max upper " +
                       orep.max_upper_violation;
            report.checks.push_back(c);

            if (n <= 4) {
                const oracle::NaSpotReport na = oracle::check_na_step_functions(joint);
                VerifyCheck nc;
                nc.name = "na_spot_" + base;
                nc.grid_points = na.pairs_checked;
                nc.max_violation = na.worst_covariance_value;
                nc.status = na.violations == 0 ? CheckStatus::Pass : CheckStatus::Fail;
                nc.detail = "worst covariance " + na.worst_covariance + " over " +
                            std::to_string(na.splits) + " splits";
                report.checks.push_back(nc);
            }
        }
    }
    return report;
}

std::string verify_report_to_json(const VerifyReport& report) {
    ordered_json j;
    j["checks"] = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["status"] = status_str(c.status);
        jc["grid_points"] = c.grid_points;
        jc["max_violation"] = c.max_violation;
        if (!c.detail.empty()) jc["detail"] = c.detail;
        j["checks"].push_back(std::move(jc));
    }
    j["all_passed"] = report.all_passed();
    return j.dump(2);
}

}  // namespace tourney
