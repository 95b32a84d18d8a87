#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tourney/lattice_pmf.hpp"
#include "tourney/outcome_model.hpp"

namespace tourney {

// Everything the Stein-Chen / mean-mismatch machinery needs for one (model, n, t).
struct ExceedanceReport {
    std::string model_id;
    long long n{0};
    double t{0.0};
    double x_n{0.0};           // standardized threshold b_n + a_n t
    double raw_threshold{0.0}; // same cutoff on the raw score scale
    double p_n{0.0};           // P(score > raw_threshold), strict
    double p_n_inclusive{0.0}; // tail including a colliding atom, when flagged
    double lambda_n{0.0};      // n * p_n
    double pair_cov{0.0};      // Cov(I_1, I_2)
    double var_w{0.0};         // n p (1-p) + n (n-1) Cov
    double stein_bound{0.0};          // (1 - e^{-lambda}) (1 - Var/lambda)
    double mean_mismatch_bound{0.0};  // |lambda_n - e^{-t}|
    double combined_bound{0.0};       // stein + mean mismatch
    bool threshold_near_atom{false};
    bool degenerate{false};    // p_n == 0: threshold beyond the support
    double cleanup_mass{0.0};
};

// The conditional-tail decomposition of the pairwise indicator covariance:
// conditioning two players' scores on their head-to-head outcome leaves
// independent rest-of-field sums, so only one shared tail function is needed.
struct PairDecomposition {
    double alpha_n{0.0};               // sqrt((n-1)/(n-2))
    std::vector<double> y_support;     // (a - 1/2)/sigma per outcome value a
    std::vector<double> y_weights;
    std::vector<double> a_values;      // A_n(y): tail with the shared match won by 1
    std::vector<double> b_values;      // B_n(y): tail with it won by 2
    std::vector<double> m_values;      // (A+B)/2
    std::vector<double> delta_values;  // (A-B)/2
    double e_a{0.0};        // E[A] = p_n
    double e_ab{0.0};       // E[A B] = joint exceedance probability
    double e_delta{0.0};    // E[Delta], zero by symmetry
    double e_delta_sq{0.0};
    double var_m{0.0};
    double cov_direct{0.0}; // E[AB] - E[A]^2, the textbook route
};

// Precomputed per-(model, n) laws reusable across a t grid.
struct ScoreLaws {
    LatticePmf score;  // (n-1)-fold sum
    LatticePmf rest;   // (n-2)-fold sum, tail function of the rest-of-field score
};

ScoreLaws score_laws(const OutcomeModel& model, long long n,
                     std::size_t atom_budget = kDefaultAtomBudget);

// Law of one player's score: the (n-1)-fold iid convolution of the outcome law.
LatticePmf score_pmf(const OutcomeModel& model, long long n,
                     std::size_t atom_budget = kDefaultAtomBudget);

// Raw-score cutoff equivalent to the standardized event {s* > x_n(t)}.
double raw_threshold(const OutcomeModel& model, long long n, double t);

// Exact Cov(I_1, I_2) for indicators of both scores exceeding threshold_raw,
// evaluated through the shared rest-of-field tail (never the joint law).
// Requires n >= 4. Pass rest to reuse a precomputed (n-2)-fold pmf.
std::pair<double, PairDecomposition> pair_covariance(const OutcomeModel& model, long long n,
                                                     double threshold_raw,
                                                     const LatticePmf* rest = nullptr);

// Full report; requires n >= 4. Pass laws to reuse precomputed pmfs.
ExceedanceReport exceedance_report(const OutcomeModel& model, long long n, double t,
                                   const ScoreLaws* laws = nullptr);

// Total variation between a pmf on {0..K} and Poisson(lambda), Poisson tail
// beyond K included in full.
double tv_to_poisson(std::span<const double> pmf, double lambda);

}  // namespace tourney
