#include <doctest.h>

#include <cmath>

#include "tourney/asymptotics.hpp"
#include "tourney/errors.hpp"
#include "tourney/exact_engine.hpp"
#include "tourney/outcome_model.hpp"

using namespace tourney;
namespace asy = asymptotics;

namespace {

// independent binomial oracle: P(Bin(n, 1/2) > cutoff), summed in log space
// from the small end of the tail
double binom_tail_above(long long n, long long cutoff) {
    if (cutoff >= n) return 0.0;
    if (cutoff < 0) return 1.0;
    double tail = 0.0;
    const double log_half = -std::log(2.0) * static_cast<double>(n);
    for (long long k = n; k > cutoff; --k) {
        tail += std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                         std::lgamma(static_cast<double>(k) + 1.0) -
                         std::lgamma(static_cast<double>(n - k) + 1.0) + log_half);
    }
    return tail;
}

}  // namespace

TEST_CASE("score pmf matches the binomial law for the classical model") {
    const LatticePmf p3 = score_pmf(classical_model(), 3);
    REQUIRE(p3.size() == 3);
    CHECK(p3.probs[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p3.probs[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p3.probs[2] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(score_pmf(classical_model(), 10).mean() == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("raw thresholds at reference points") {
    CHECK(raw_threshold(classical_model(), 100, 0.0) ==
          doctest::Approx(61.2719689596759).epsilon(1e-13));
    CHECK(raw_threshold(chess_model(), 100, 0.0) ==
          doctest::Approx(57.8240390793044).epsilon(1e-13));
    // monotone increasing in t
    double prev = raw_threshold(chess_model(), 100, -2.0);
    for (double t = -1.5; t <= 2.0; t += 0.5) {
        const double v = raw_threshold(chess_model(), 100, t);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(raw_threshold(classical_model(), 2, 0.0), DomainError);
}

TEST_CASE("classical tails agree with the independent binomial oracle") {
    // classical score law is Bin(n-1, 1/2); never computed that way internally
    for (long long n : {50LL, 1000LL, 10000LL}) {
        const LatticePmf law = score_pmf(classical_model(), n);
        for (double t : {-1.0, 0.0, 1.0}) {
            const double u = raw_threshold(classical_model(), n, t);
            const long long cutoff = static_cast<long long>(std::floor(u + kLatticeEps));
            const double expected = binom_tail_above(n - 1, cutoff);
            const double got = tail_prob(law, u);
            CHECK(got == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("chess tails agree with the halved-binomial oracle") {
    // chess score equals Bin(2(n-1), 1/2)/2 in distribution
    for (long long n : {50LL, 1000LL}) {
        const LatticePmf law = score_pmf(chess_model(), n);
        for (double t : {-1.0, 0.0, 1.0}) {
            const double u = raw_threshold(chess_model(), n, t);
            const long long cutoff = static_cast<long long>(std::floor(2.0 * u + kLatticeEps));
            const double expected = binom_tail_above(2 * (n - 1), cutoff);
            CHECK(tail_prob(law, u) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("pair covariance hand value at classical n=4") {
    // threshold 2.5: only a player winning all 3 matches exceeds; two players
    // cannot both do so, hence Cov = 0 - (1/8)^2 = -1/64
    const auto [cov, dec] = pair_covariance(classical_model(), 4, 2.5);
    CHECK(cov == doctest::Approx(-1.0 / 64.0).epsilon(1e-14));
    CHECK(dec.e_a == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(dec.e_ab == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(pair_covariance(classical_model(), 3, 1.5), DomainError);
}

TEST_CASE("pair decomposition identities") {
    for (long long n : {64LL, 512LL}) {
        for (double t : {-1.0, 0.0, 1.0}) {
            const double u = raw_threshold(chess_model(), n, t);
            const auto [cov, dec] = pair_covariance(chess_model(), n, u);
            // E[Delta] vanishes by symmetry, exactly as computed
            CHECK(std::abs(dec.e_delta) <= 1e-14);
            // both covariance routes agree: E[AB]-E[A]^2 vs Var(M)-E[Delta^2]
            CHECK(std::abs(dec.cov_direct - (dec.var_m - dec.e_delta_sq)) <= 1e-13);
            CHECK(cov == dec.var_m - dec.e_delta_sq);
            // A, B are tails: in [0,1], and A(y) >= B(y) for y >= 0
            for (std::size_t i = 0; i < dec.a_values.size(); ++i) {
                CHECK(dec.a_values[i] >= 0.0);
                CHECK(dec.a_values[i] <= 1.0);
                CHECK(dec.b_values[i] >= 0.0);
                CHECK(dec.b_values[i] <= 1.0);
                if (dec.y_support[i] >= 0.0)
                    CHECK(dec.a_values[i] >= dec.b_values[i] - 1e-15);
            }
            CHECK(cov <= 1e-15);
        }
    }
}

TEST_CASE("exceedance report invariants") {
    const ScoreLaws laws = score_laws(chess_model(), 400);
    double prev_p = 1.0;
    for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const ExceedanceReport r = exceedance_report(chess_model(), 400, t, &laws);
        CHECK(r.lambda_n == doctest::Approx(400.0 * r.p_n).epsilon(1e-12));
        CHECK(r.var_w ==
              doctest::Approx(400.0 * r.p_n * (1.0 - r.p_n) + 400.0 * 399.0 * r.pair_cov)
                  .epsilon(1e-12));
        CHECK(r.var_w >= 0.0);
        CHECK(r.var_w < r.lambda_n);  // under-dispersion
        CHECK(r.stein_bound >= 0.0);
        CHECK(r.mean_mismatch_bound == doctest::Approx(std::abs(r.lambda_n - std::exp(-t))));
        CHECK(r.combined_bound ==
              doctest::Approx(r.stein_bound + r.mean_mismatch_bound).epsilon(1e-15));
        CHECK(r.p_n <= prev_p);  // p_n nonincreasing in t
        prev_p = r.p_n;
    }
}

TEST_CASE("degenerate threshold beyond the support") {
    // t large enough that the threshold exceeds the maximal score n-1
    const ExceedanceReport r = exceedance_report(classical_model(), 6, 20.0);
    CHECK(r.degenerate);
    CHECK(r.p_n == 0.0);
    CHECK(r.lambda_n == 0.0);
}

TEST_CASE("pair covariance tracks the predicted order of magnitude") {
    const double u = raw_threshold(chess_model(), 4096, 0.0);
    const auto [cov, dec] = pair_covariance(chess_model(), 4096, u);
    (void)dec;
    const double ratio = cov / asy::predicted_pair_cov(4096, 0.0);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("tv_to_poisson") {
    // a truncated Poisson pmf is at TV distance of just its own tail
    std::vector<double> pmf(30);
    for (std::size_t k = 0; k < pmf.size(); ++k)
        pmf[k] = asy::poisson_pmf(1.0, static_cast<long long>(k));
    CHECK(tv_to_poisson(pmf, 1.0) < 1e-9);
    // all mass at zero vs Poisson(1): closed form 1 - e^{-1}
    std::vector<double> degenerate = {1.0};
    CHECK(tv_to_poisson(degenerate, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(tv_to_poisson(degenerate, -1.0), DomainError);
}
