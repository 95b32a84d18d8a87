#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tourney/exact_engine.hpp"
#include "tourney/outcome_model.hpp"

namespace tourney {

// Deterministic per-replicate stream: splitmix64 seeded from (seed, replicate).
// Replicates are independent substreams, so worker scheduling cannot change
// any draw.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 for_replicate(std::uint64_t seed, std::uint64_t replicate);

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double next_unit() { return (next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

struct SimConfig {
    OutcomeModel model;
    long long n{3};
    std::vector<double> t_grid;
    int j_max{0};
    long long replicates{1};
    std::uint64_t seed{0};
    int workers{1};
};

struct WResult {
    double t{0.0};
    double raw_threshold{0.0};
    std::vector<std::uint64_t> hist;  // counts of W = 0..64
    std::uint64_t overflow{0};
    double mean{0.0};
    double var{0.0};
    double tv_vs_limit{0.0};   // vs Poisson(e^{-t})
    bool has_exact{false};
    double lambda_exact{0.0};
    double tv_vs_exact{0.0};   // vs Poisson(lambda_n from the exact engine)
};

struct OrderStatResult {
    int j{0};
    std::vector<std::uint64_t> hist;  // bins of width 0.01 over [-10, 10)
    std::uint64_t underflow{0};
    std::uint64_t overflow{0};
    double mean{0.0};
    double var{0.0};
};

struct SimReport {
    std::string model_id;
    long long n{0};
    int j_max{0};
    long long replicates{0};
    std::uint64_t seed{0};
    std::vector<WResult> w_results;           // one per t
    std::vector<OrderStatResult> order_stats; // one per j in 0..j_max
    double huber_mean{0.0};  // of s*_(n) - sqrt(2 log(n-1))
    double huber_var{0.0};
    double wall_seconds{0.0};  // informational; never serialized
};

inline constexpr int kWHistMax = 64;
inline constexpr double kMHistLo = -10.0;
inline constexpr double kMHistWidth = 0.01;
inline constexpr int kMHistBins = 2000;

// One tournament: draws every unordered pair's outcome from the model and
// returns the scores on the integer lattice (units 1/k).
std::vector<std::int32_t> simulate_tournament(const OutcomeModel& model, long long n,
                                              SplitMix64& stream);

// Players with raw score strictly above the threshold; lattice-epsilon
// semantics identical to the exact engine's tail.
long long exceedance_count(std::span<const std::int32_t> lattice_scores, int step_denominator,
                           double raw_threshold);

// 1/2 sum_k |hist_k/total - Poisson(lambda)_k|, overflow bucket and the
// Poisson tail beyond the histogram range both added in full.
double empirical_tv(std::span<const std::uint64_t> hist, std::uint64_t overflow,
                    double lambda);

// Full Monte Carlo experiment; deterministic for a fixed config regardless of
// worker count. exact_refs, when given, supplies lambda_n per t for the second
// TV column.
SimReport run_experiment(const SimConfig& cfg,
                         const std::vector<ExceedanceReport>* exact_refs = nullptr);

// Deterministic JSON serialization of a report (fixed key order, no
// timestamps); the byte-identity contract of repeated runs applies to this.
std::string report_to_json(const SimReport& report);

}  // namespace tourney
