#pragma once

#include <cstddef>
#include <vector>

#include "tourney/outcome_model.hpp"

namespace tourney {

inline constexpr double kLatticeEps = 1e-9;            // in lattice steps
inline constexpr std::size_t kDirectConvThreshold = 4096;  // atoms; above this, FFT
inline constexpr std::size_t kDefaultAtomBudget = 100'000'000;

// Probability mass function on the lattice {(offset+i)/k : i = 0..size-1}.
// Immutable after construction in practice; safe to share across threads.
struct LatticePmf {
    int step_denominator{1};
    long long offset{0};
    std::vector<double> probs;
    double cleanup_mass{0.0};  // cumulative |mass| clamped after transform passes

    std::size_t size() const { return probs.size(); }
    double value_at(std::size_t i) const {
        return static_cast<double>(offset + static_cast<long long>(i)) / step_denominator;
    }
    double mean() const;
    double variance() const;
};

struct TailResult {
    double exclusive;  // P(X > u), atom at u excluded
    double inclusive;  // P(X >= u) when the threshold sits on an atom
    bool near_atom;    // threshold within kLatticeEps lattice steps of an atom
};

LatticePmf pmf_from_model(const OutcomeModel& model);

// Exact convolution; direct O(s^2) below kDirectConvThreshold output atoms,
// FFT-backed above, with small negative residues clamped and renormalized.
LatticePmf convolve(const LatticePmf& a, const LatticePmf& b);

// Law of the m-fold iid sum, by binary exponentiation over convolution.
// Throws CapacityError if the result support would exceed atom_budget.
LatticePmf convolve_power(const LatticePmf& base, long long m,
                          std::size_t atom_budget = kDefaultAtomBudget);

// Strict-inequality upper tail with the near-atom flag. Atoms are compared to
// the real threshold on the lattice-index scale with an epsilon of kLatticeEps
// steps; a threshold landing on an atom excludes it (strict ">") but is flagged.
TailResult tail_prob_detail(const LatticePmf& pmf, double u);
double tail_prob(const LatticePmf& pmf, double u);

// P(lo < X <= hi), summed directly over the window's atoms (no tail
// cancellation); identical threshold semantics at both ends.
double window_prob(const LatticePmf& pmf, double lo, double hi);

}  // namespace tourney
