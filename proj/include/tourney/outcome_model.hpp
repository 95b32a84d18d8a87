#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tourney {

struct Rational64 {
    std::int64_t num{0};
    std::int64_t den{1};
};

struct SupportPoint {
    int numerator{0};  // outcome value is numerator / OutcomeModel::denominator
    double weight{0.0};
    std::optional<Rational64> weight_exact;
};

// Match-outcome distribution on the lattice {0, 1/k, ..., 1}, symmetric about 1/2.
// Both players' rewards in a match sum to one, so the mirrored value 1 - a must
// carry the same weight as a.
struct OutcomeModel {
    std::string id{"model"};
    int denominator{1};
    std::vector<SupportPoint> support;  // numerators strictly increasing

    bool has_exact_weights() const;
};

struct ModelMoments {
    double mu;     // always 1/2 for a valid model
    double sigma;  // per-match score standard deviation
};

struct ValidationOutcome {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

// Gate for all other operations: checks normalization, positivity, symmetry
// about 1/2, and |D| > 1. Reports every violated invariant by name.
ValidationOutcome validate(const OutcomeModel& model);

// Throws DomainError if the model does not validate.
ModelMoments moments(const OutcomeModel& model);

// Win/lose with a fair coin: {0, 1} each with weight 1/2.
OutcomeModel classical_model();
// Win/draw/lose: {0, 1/2, 1} with weights 1/4, 1/2, 1/4.
OutcomeModel chess_model();

}  // namespace tourney
