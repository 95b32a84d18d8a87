#include "tourney/outcome_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tourney/errors.hpp"

namespace tourney {

namespace {
constexpr double kWeightTol = 1e-12;
}

bool OutcomeModel::has_exact_weights() const {
    return !support.empty() &&
           std::all_of(support.begin(), support.end(),
                       [](const SupportPoint& p) { return p.weight_exact.has_value(); });
}

std::string ValidationOutcome::summary() const {
    if (violations.empty()) return "valid";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << ", ";
        os << violations[i];
    }
    return os.str();
}

ValidationOutcome validate(const OutcomeModel& model) {
    ValidationOutcome out;
    auto flag = [&](const std::string& name) {
        if (std::find(out.violations.begin(), out.violations.end(), name) == out.violations.end())
            out.violations.push_back(name);
    };

    if (model.denominator < 1) flag("InvalidDenominator");
    if (model.support.size() < 2) flag("DegenerateSupport");

    const int k = model.denominator;
    for (std::size_t i = 0; i < model.support.size(); ++i) {
        const auto& p = model.support[i];
        if (p.numerator < 0 || p.numerator > k) flag("NumeratorOutOfRange");
        if (i > 0 && model.support[i - 1].numerator >= p.numerator) flag("UnsortedSupport");
        if (!(p.weight > 0.0)) flag("NonpositiveWeight");
        if (p.weight_exact && p.weight_exact->num <= 0) flag("NonpositiveWeight");
    }

    double total = 0.0;
    for (const auto& p : model.support) total += p.weight;
    if (std::abs(total - 1.0) > kWeightTol) flag("WeightsNotNormalized");
    if (model.has_exact_weights()) {
        // exact weights must sum to exactly one
        long double s = 0.0L;
        bool exact_ok = true;
        // cross-multiply pairwise against running sum num/den
        std::int64_t rn = 0, rd = 1;
        for (const auto& p : model.support) {
            const auto& w = *p.weight_exact;
            if (w.den <= 0) { exact_ok = false; break; }
            // rn/rd += w.num/w.den
            rn = rn * w.den + w.num * rd;
            rd = rd * w.den;
            std::int64_t g = std::gcd(rn < 0 ? -rn : rn, rd);
            if (g > 1) { rn /= g; rd /= g; }
            s += static_cast<long double>(w.num) / w.den;
        }
        (void)s;
        if (!exact_ok || rn != rd) flag("WeightsNotNormalized");
    }

    // symmetry: m in support  <=>  k - m in support, with equal weight
    for (const auto& p : model.support) {
        const int mirror = k - p.numerator;
        auto it = std::find_if(model.support.begin(), model.support.end(),
                               [&](const SupportPoint& q) { return q.numerator == mirror; });
        if (it == model.support.end()) {
            flag("AsymmetricSupport");
            continue;
        }
        if (std::abs(it->weight - p.weight) > kWeightTol) flag("AsymmetricSupport");
        if (p.weight_exact && it->weight_exact) {
            const auto& a = *p.weight_exact;
            const auto& b = *it->weight_exact;
            if (a.num * b.den != b.num * a.den) flag("AsymmetricSupport");
        }
    }

    return out;
}

ModelMoments moments(const OutcomeModel& model) {
    auto v = validate(model);
    if (!v.ok()) throw DomainError("moments: invalid model: " + v.summary());

    const double k = static_cast<double>(model.denominator);
    double second = 0.0;
    for (const auto& p : model.support) {
        const double x = p.numerator / k;
        second += p.weight * x * x;
    }
    const double var = second - 0.25;  // mu is exactly 1/2 by symmetry
    if (!(var > 0.0)) throw DomainError("moments: degenerate variance");
    return ModelMoments{0.5, std::sqrt(var)};
}

OutcomeModel classical_model() {
    OutcomeModel m;
    m.id = "classical";
    m.denominator = 1;
    m.support = {{0, 0.5, Rational64{1, 2}}, {1, 0.5, Rational64{1, 2}}};
    return m;
}

OutcomeModel chess_model() {
    OutcomeModel m;
    m.id = "chess";
    m.denominator = 2;
    m.support = {{0, 0.25, Rational64{1, 4}},
                 {1, 0.50, Rational64{1, 2}},
                 {2, 0.25, Rational64{1, 4}}};
    return m;
}

}  // namespace tourney
