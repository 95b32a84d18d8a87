#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tourney/lattice_pmf.hpp"
#include "tourney/outcome_model.hpp"

namespace tourney::oracle {

using BigInt = boost::multiprecision::cpp_int;

// Exact joint law of the n scores, from full enumeration of every weighted
// tournament. Probabilities are integer numerators over the single common
// denominator weight_denom^matches; floats never enter the enumeration.
struct JointLaw {
    long long n{0};
    int k{1};                // lattice denominator of one match outcome
    long long matches{0};    // n(n-1)/2
    BigInt denom;            // weight_denom^matches
    long long weight_denom{1};
    // key packs the score vector, 8 bits per player (player 0 in the low byte);
    // requires k*(n-1) <= 255, which bounds n at oracle scale anyway
    std::unordered_map<std::uint64_t, BigInt> table;

    static std::uint64_t pack(const std::vector<int>& scores);
    int score_of(std::uint64_t key, int player) const {
        return static_cast<int>((key >> (8 * player)) & 0xFF);
    }
};

// Full enumeration over |D|^matches weighted tournaments; requires exact
// rational weights on the model. Throws BudgetExceeded when the term count
// passes `budget`.
JointLaw enumerate_joint(const OutcomeModel& model, long long n,
                         unsigned long long budget = 100'000'000ULL);

// Exact marginal of one player's score, converted to double at the boundary.
LatticePmf marginal_from_joint(const JointLaw& joint, int player);

// Law of the exceedance count at a raw-score threshold (strict ">", same
// lattice-epsilon semantics as the engine). Numerators over joint.denom.
struct WLaw {
    std::vector<BigInt> numerators;  // index = count, 0..n
    BigInt denom;
    std::vector<double> pmf() const;
    double mean() const;
    double variance() const;
};
WLaw exact_W_distribution(const JointLaw& joint, double raw_threshold);

// Exact Cov(I_1, I_2) of two players' exceedance indicators, as a double of an
// exact rational.
double exact_pair_covariance(const JointLaw& joint, double raw_threshold);

// Exhaustive NLOD/NUOD check over the full lattice grid, in exact integer
// arithmetic: joint orthant probabilities versus products of marginals.
// Violations are content, not errors; max_* report the largest signed excess
// (<= 0 everywhere means the property holds).
struct OrthantReport {
    long long grid_points{0};
    bool nlod_ok{false};
    bool nuod_ok{false};
    std::string max_lower_violation;  // exact rational, as a string
    std::string max_upper_violation;
    double max_lower_violation_value{0.0};
    double max_upper_violation_value{0.0};
};
OrthantReport check_nlod_nuod(const JointLaw& joint);

// Spot check of negative association: for every disjoint split (A, B) of the
// players, draws `functions` random pairs of coordinatewise nondecreasing
// integer step functions and verifies Cov(f(S_A), g(S_B)) <= 0 exactly.
// A partial certificate by nature — NA quantifies over all monotone functions.
struct NaSpotReport {
    long long splits{0};
    long long pairs_checked{0};
    long long violations{0};
    std::string worst_covariance;  // exact rational string of the max covariance
    double worst_covariance_value{0.0};
};
NaSpotReport check_na_step_functions(const JointLaw& joint, int functions = 50,
                                     std::uint64_t seed = 12345);

}  // namespace tourney::oracle
