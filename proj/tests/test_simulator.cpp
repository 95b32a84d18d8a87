#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "tourney/errors.hpp"
#include "tourney/exact_engine.hpp"
#include "tourney/outcome_model.hpp"
#include "tourney/simulator.hpp"

using namespace tourney;

TEST_CASE("score conservation per replicate") {
    for (const auto& model : {classical_model(), chess_model()}) {
        for (long long n : {2LL, 5LL, 37LL}) {
            for (std::uint64_t rep = 0; rep < 20; ++rep) {
                SplitMix64 rng = SplitMix64::for_replicate(7, rep);
                const auto scores = simulate_tournament(model, n, rng);
                const long long total = std::accumulate(scores.begin(), scores.end(), 0LL);
                CHECK(total == model.denominator * n * (n - 1) / 2);
            }
        }
    }
}

TEST_CASE("two players split a single match") {
    SplitMix64 rng = SplitMix64::for_replicate(1, 0);
    const auto scores = simulate_tournament(chess_model(), 2, rng);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] + scores[1] == 2);  // lattice units of 1/2
}

TEST_CASE("classical n=3 maximum hits 2 with probability 3/4") {
    long long hits = 0;
    const long long reps = 40000;
    for (long long rep = 0; rep < reps; ++rep) {
        SplitMix64 rng = SplitMix64::for_replicate(42, static_cast<std::uint64_t>(rep));
        const auto scores = simulate_tournament(classical_model(), 3, rng);
        const int maxi = std::max({scores[0], scores[1], scores[2]});
        if (maxi == 2) ++hits;
    }
    const double phat = static_cast<double>(hits) / static_cast<double>(reps);
    CHECK(phat == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("exceedance_count semantics") {
    const std::int32_t scores[] = {2, 1, 0};
    CHECK(exceedance_count(scores, 1, 1.5) == 1);
    CHECK(exceedance_count(scores, 1, -0.5) == 3);
    CHECK(exceedance_count(scores, 1, 5.0) == 0);
    CHECK(exceedance_count(scores, 1, 1.0) == 1);  // strict: the atom at 1 excluded
    const std::int32_t chess_scores[] = {5, 4, 3};  // lattice units of 1/2
    CHECK(exceedance_count(chess_scores, 2, 2.0) == 1);
}

TEST_CASE("empirical_tv closed forms") {
    std::vector<std::uint64_t> at_zero(65, 0);
    at_zero[0] = 1000;
    CHECK(empirical_tv(at_zero, 0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(empirical_tv(at_zero, 0, 0.0) == doctest::Approx(0.0));

    // histogram proportional to Poisson(2) is at negligible distance
    std::vector<std::uint64_t> prop(65, 0);
    const double scale = 1e15;
    double total = 0.0;
    for (std::size_t k = 0; k < prop.size(); ++k) {
        const double p = std::exp(-2.0) * std::pow(2.0, static_cast<double>(k)) /
                         std::tgamma(static_cast<double>(k) + 1.0);
        prop[k] = static_cast<std::uint64_t>(p * scale);
        total += p;
    }
    (void)total;
    CHECK(empirical_tv(prop, 0, 2.0) < 1e-9);
    CHECK_THROWS_AS(empirical_tv(at_zero, 0, -0.5), DomainError);
}

TEST_CASE("run_experiment rejects bad configs") {
    SimConfig cfg;
    cfg.model = chess_model();
    cfg.n = 10;
    cfg.t_grid = {0.0};
    cfg.replicates = 4;

    SimConfig bad = cfg;
    bad.t_grid.clear();
    CHECK_THROWS_AS(run_experiment(bad), ConfigError);
    bad = cfg;
    bad.replicates = 0;
    CHECK_THROWS_AS(run_experiment(bad), ConfigError);
    bad = cfg;
    bad.j_max = 10;
    CHECK_THROWS_AS(run_experiment(bad), ConfigError);
    bad = cfg;
    bad.workers = 0;
    CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("histograms account for every replicate") {
    SimConfig cfg;
    cfg.model = chess_model();
    cfg.n = 50;
    cfg.t_grid = {-1.0, 0.0};
    cfg.j_max = 2;
    cfg.replicates = 3000;
    cfg.seed = 9;
    const SimReport rep = run_experiment(cfg);
    REQUIRE(rep.w_results.size() == 2);
    for (const auto& w : rep.w_results) {
        std::uint64_t total = w.overflow;
        for (std::uint64_t c : w.hist) total += c;
        CHECK(total == 3000);
        CHECK(w.tv_vs_limit >= 0.0);
        CHECK(w.tv_vs_limit <= 1.0);
    }
    REQUIRE(rep.order_stats.size() == 3);
    for (const auto& o : rep.order_stats) {
        std::uint64_t total = o.underflow + o.overflow;
        for (std::uint64_t c : o.hist) total += c;
        CHECK(total == 3000);
    }
    // deeper order statistics are stochastically smaller
    CHECK(rep.order_stats[0].mean >= rep.order_stats[1].mean);
    CHECK(rep.order_stats[1].mean >= rep.order_stats[2].mean);
}

TEST_CASE("worker count never changes the output") {
    SimConfig cfg;
    cfg.model = chess_model();
    cfg.n = 300;
    cfg.t_grid = {-1.0, 0.0, 1.0};
    cfg.j_max = 1;
    cfg.replicates = 2000;
    cfg.seed = 123456789;

    cfg.workers = 1;
    const std::string one = report_to_json(run_experiment(cfg));
    cfg.workers = 3;
    const std::string three = report_to_json(run_experiment(cfg));
    cfg.workers = 8;
    const std::string eight = report_to_json(run_experiment(cfg));
    CHECK(one == three);
    CHECK(one == eight);
}

TEST_CASE("repeated runs are byte-identical") {
    SimConfig cfg;
    cfg.model = classical_model();
    cfg.n = 64;
    cfg.t_grid = {0.0};
    cfg.replicates = 500;
    cfg.seed = 31337;
    const std::string a = report_to_json(run_experiment(cfg));
    const std::string b = report_to_json(run_experiment(cfg));
    CHECK(a == b);
}

namespace {

double marginal_chisq_pvalue(const OutcomeModel& model, long long n, long long reps,
                             std::uint64_t seed) {
    const LatticePmf exact = score_pmf(model, n);
    std::vector<std::uint64_t> counts(
        static_cast<std::size_t>(model.denominator) * static_cast<std::size_t>(n - 1) + 1, 0);
    for (long long rep = 0; rep < reps; ++rep) {
        SplitMix64 rng = SplitMix64::for_replicate(seed, static_cast<std::uint64_t>(rep));
        const auto scores = simulate_tournament(model, n, rng);
        ++counts[static_cast<std::size_t>(scores[0])];
    }
    // merge cells until every expected count is >= 10, then chi-square
    double chi2 = 0.0;
    int dof = -1;
    double acc_obs = 0.0, acc_exp = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const long long lat = static_cast<long long>(i) - exact.offset;
        const double p = (lat >= 0 && lat < static_cast<long long>(exact.size()))
                             ? exact.probs[static_cast<std::size_t>(lat)]
                             : 0.0;
        acc_obs += static_cast<double>(counts[i]);
        acc_exp += p * static_cast<double>(reps);
        if (acc_exp >= 10.0 || i + 1 == counts.size()) {
            const double d = acc_obs - acc_exp;
            chi2 += d * d / std::max(acc_exp, 1e-9);
            ++dof;
            acc_obs = acc_exp = 0.0;
        }
    }
    REQUIRE(dof >= 1);
    return boost::math::gamma_q(static_cast<double>(dof) / 2.0, chi2 / 2.0);
}

}  // namespace

TEST_CASE("simulated marginals match the exact score law (chi-square)") {
    // classical and chess use the packed-block bit sampler; n = 10 and n = 70
    // cover the partial-block masks on both sides of one 64-wide block
    CHECK(marginal_chisq_pvalue(classical_model(), 10, 200'000, 5150) > 0.001);
    CHECK(marginal_chisq_pvalue(chess_model(), 10, 200'000, 5151) > 0.001);
    CHECK(marginal_chisq_pvalue(classical_model(), 70, 50'000, 5152) > 0.001);
    CHECK(marginal_chisq_pvalue(chess_model(), 70, 50'000, 5153) > 0.001);

    // a non-binomial outcome law forces the generic alias-table sampler
    OutcomeModel skew;
    skew.id = "skew";
    skew.denominator = 2;
    skew.support = {{0, 0.3, {}}, {1, 0.4, {}}, {2, 0.3, {}}};
    REQUIRE(validate(skew).ok());
    CHECK(marginal_chisq_pvalue(skew, 10, 200'000, 5154) > 0.001);
}

TEST_CASE("under-dispersion of the exceedance count") {
    SimConfig cfg;
    cfg.model = classical_model();
    cfg.n = 128;
    cfg.t_grid = {-1.0, 0.0, 1.0};
    cfg.replicates = 100'000;
    cfg.seed = 2024;
    const SimReport rep = run_experiment(cfg);
    for (const auto& w : rep.w_results) {
        CHECK(w.var < w.mean);
    }
}

TEST_CASE("per-replicate streams are independent of history") {
    SplitMix64 a = SplitMix64::for_replicate(99, 1000);
    SplitMix64 b = SplitMix64::for_replicate(99, 1000);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    SplitMix64 c = SplitMix64::for_replicate(99, 1001);
    CHECK(c.next() != SplitMix64::for_replicate(99, 1000).next());
    const double u = SplitMix64::for_replicate(1, 2).next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}
