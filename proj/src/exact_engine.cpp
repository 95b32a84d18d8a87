#include "tourney/exact_engine.hpp"

#include <algorithm>
#include <cmath>

#include "tourney/asymptotics.hpp"
#include "tourney/errors.hpp"

namespace tourney {

namespace asy = asymptotics;

ScoreLaws score_laws(const OutcomeModel& model, long long n, std::size_t atom_budget) {
    if (n < 4) throw DomainError("score_laws: n must be >= 4");
    const LatticePmf base = pmf_from_model(model);
    ScoreLaws laws;
    laws.rest = convolve_power(base, n - 2, atom_budget);
    laws.score = convolve(laws.rest, base);
    return laws;
}

LatticePmf score_pmf(const OutcomeModel& model, long long n, std::size_t atom_budget) {
    if (n < 2) throw DomainError("score_pmf: n must be >= 2");
    return convolve_power(pmf_from_model(model), n - 1, atom_budget);
}

double raw_threshold(const OutcomeModel& model, long long n, double t) {
    if (n < 3) throw DomainError("raw_threshold: n must be >= 3");
    const ModelMoments mm = moments(model);
    const double x = asy::x_n(n, t);
    return (n - 1) * mm.mu + std::sqrt(static_cast<double>(n - 1)) * mm.sigma * x;
}

std::pair<double, PairDecomposition> pair_covariance(const OutcomeModel& model, long long n,
                                                     double threshold_raw,
                                                     const LatticePmf* rest) {
    if (n < 4) throw DomainError("pair_covariance: n must be >= 4");
    auto v = validate(model);
    if (!v.ok()) throw DomainError("pair_covariance: invalid model: " + v.summary());

    LatticePmf local;
    if (!rest) {
        local = convolve_power(pmf_from_model(model), n - 2);
        rest = &local;
    }

    const ModelMoments mm = moments(model);
    const int k = model.denominator;
    const std::size_t s = model.support.size();

    // Conditioning on the head-to-head outcome a: player 1 exceeds iff the
    // rest-of-field sum exceeds T - a, player 2 iff it exceeds T - (1 - a).
    // The mirror index realizes B(a) = A(1-a) exactly, so E[Delta] cancels in
    // floating point as well as on paper.
    std::vector<double> values(s), weights(s);
    std::vector<std::size_t> mirror(s);
    for (std::size_t i = 0; i < s; ++i) {
        values[i] = static_cast<double>(model.support[i].numerator) / k;
        weights[i] = model.support[i].weight;
        const int mir = k - model.support[i].numerator;
        const auto it = std::find_if(model.support.begin(), model.support.end(),
                                     [&](const SupportPoint& p) { return p.numerator == mir; });
        mirror[i] = static_cast<std::size_t>(it - model.support.begin());
    }

    // reference point: outcome value closest to 1/2
    std::size_t ref = 0;
    for (std::size_t i = 1; i < s; ++i)
        if (std::abs(values[i] - 0.5) < std::abs(values[ref] - 0.5)) ref = i;

    const double a_ref = tail_prob(*rest, threshold_raw - values[ref]);

    // A(a_i) - A(a_ref) as a signed window sum over the rest-of-field pmf;
    // tails this close would cancel catastrophically if subtracted directly.
    std::vector<double> da(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        if (i == ref) continue;
        const double ui = threshold_raw - values[i];
        const double ur = threshold_raw - values[ref];
        da[i] = values[i] > values[ref] ? window_prob(*rest, ui, ur)
                                        : -window_prob(*rest, ur, ui);
    }

    PairDecomposition dec;
    dec.alpha_n = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n - 2));
    dec.y_support.resize(s);
    dec.y_weights = weights;
    dec.a_values.resize(s);
    dec.b_values.resize(s);
    dec.m_values.resize(s);
    dec.delta_values.resize(s);

    double e_da = 0.0, e_m_dev = 0.0;
    std::vector<double> m_dev(s);
    for (std::size_t i = 0; i < s; ++i) {
        dec.y_support[i] = (values[i] - 0.5) / mm.sigma;
        dec.a_values[i] = a_ref + da[i];
        dec.b_values[i] = a_ref + da[mirror[i]];
        dec.delta_values[i] = 0.5 * (da[i] - da[mirror[i]]);
        m_dev[i] = 0.5 * (da[i] + da[mirror[i]]);
        dec.m_values[i] = a_ref + m_dev[i];
        e_da += weights[i] * da[i];
        e_m_dev += weights[i] * m_dev[i];
    }

    dec.e_a = a_ref + e_da;
    double e_ab = 0.0, e_delta = 0.0, e_delta_sq = 0.0, var_m = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        e_ab += weights[i] * dec.a_values[i] * dec.b_values[i];
        e_delta += weights[i] * dec.delta_values[i];
        e_delta_sq += weights[i] * dec.delta_values[i] * dec.delta_values[i];
        const double d = m_dev[i] - e_m_dev;
        var_m += weights[i] * d * d;
    }
    dec.e_ab = e_ab;
    dec.e_delta = e_delta;
    dec.e_delta_sq = e_delta_sq;
    dec.var_m = var_m;
    dec.cov_direct = e_ab - dec.e_a * dec.e_a;

    // Cov = Var(M) - E[Delta^2]; equal to cov_direct algebraically but free of
    // the p^2-scale cancellation that dominates at large n.
    const double cov = var_m - e_delta_sq;
    return {cov, dec};
}

ExceedanceReport exceedance_report(const OutcomeModel& model, long long n, double t,
                                   const ScoreLaws* laws) {
    if (n < 4) throw DomainError("exceedance_report: n must be >= 4");

    ScoreLaws local;
    if (!laws) {
        local = score_laws(model, n);
        laws = &local;
    }

    ExceedanceReport r;
    r.model_id = model.id;
    r.n = n;
    r.t = t;
    r.x_n = asy::x_n(n, t);
    r.raw_threshold = raw_threshold(model, n, t);
    r.cleanup_mass = laws->score.cleanup_mass;

    const TailResult tail = tail_prob_detail(laws->score, r.raw_threshold);
    r.p_n = tail.exclusive;
    r.p_n_inclusive = tail.inclusive;
    r.threshold_near_atom = tail.near_atom;
    r.lambda_n = static_cast<double>(n) * r.p_n;
    r.mean_mismatch_bound = std::abs(r.lambda_n - std::exp(-t));

    if (r.p_n == 0.0) {
        r.degenerate = true;
        r.combined_bound = r.mean_mismatch_bound;
        return r;
    }

    auto [cov, dec] = pair_covariance(model, n, r.raw_threshold, &laws->rest);
    r.pair_cov = cov;
    const double nn = static_cast<double>(n);
    r.var_w = nn * r.p_n * (1.0 - r.p_n) + nn * (nn - 1.0) * cov;
    r.stein_bound = (1.0 - std::exp(-r.lambda_n)) * (1.0 - r.var_w / r.lambda_n);
    if (r.stein_bound < 0.0) r.stein_bound = 0.0;
    r.combined_bound = r.stein_bound + r.mean_mismatch_bound;
    return r;
}

double tv_to_poisson(std::span<const double> pmf, double lambda) {
    if (lambda < 0.0) throw DomainError("tv_to_poisson: lambda must be >= 0");
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k)
        acc += std::abs(pmf[k] - asy::poisson_pmf(lambda, static_cast<long long>(k)));
    acc += asy::poisson_tail(lambda, static_cast<long long>(pmf.size()) - 1);
    return 0.5 * acc;
}

}  // namespace tourney
