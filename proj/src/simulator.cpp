#include "tourney/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tourney/asymptotics.hpp"
#include "tourney/errors.hpp"

namespace tourney {

namespace asy = asymptotics;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// outcome sampling

struct AliasTable {
    std::vector<std::uint32_t> alias;
    std::vector<std::uint32_t> prob32;  // acceptance threshold, 32-bit fixed point
    std::vector<std::int32_t> value;    // lattice numerator per slot

    static AliasTable build(const OutcomeModel& model) {
        const std::size_t m = model.support.size();
        AliasTable t;
        t.alias.resize(m);
        t.prob32.resize(m);
        t.value.resize(m);
        std::vector<double> scaled(m);
        for (std::size_t i = 0; i < m; ++i) {
            t.value[i] = model.support[i].numerator;
            scaled[i] = model.support[i].weight * static_cast<double>(m);
        }
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < m; ++i)
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            large.pop_back();
            t.prob32[s] = static_cast<std::uint32_t>(
                std::min(4294967295.0, scaled[s] * 4294967296.0));
            t.alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (std::uint32_t i : large) { t.prob32[i] = 0xFFFFFFFFu; t.alias[i] = i; }
        for (std::uint32_t i : small) { t.prob32[i] = 0xFFFFFFFFu; t.alias[i] = i; }
        return t;
    }

    std::int32_t sample(SplitMix64& rng) const {
        const std::uint64_t u = rng.next();
        const std::uint32_t hi = static_cast<std::uint32_t>(u >> 32);
        const std::uint32_t lo = static_cast<std::uint32_t>(u);
        const std::uint32_t slot = static_cast<std::uint32_t>(
            (static_cast<std::uint64_t>(hi) * alias.size()) >> 32);
        return lo < prob32[slot] ? value[slot] : value[alias[slot]];
    }
};

// Fast path applies when the outcome equals a mean of R fair bits: weights
// C(R,m)/2^R on numerators 0..R with denominator R. Classical is R=1, chess
// is R=2. Returns 0 when inapplicable.
int binomial_planes(const OutcomeModel& model) {
    const int R = model.denominator;
    if (R < 1 || R > 8) return 0;
    if (model.support.size() != static_cast<std::size_t>(R) + 1) return 0;
    double c = std::pow(0.5, R);  // C(R,0)/2^R
    for (int m = 0; m <= R; ++m) {
        if (model.support[static_cast<std::size_t>(m)].numerator != m) return 0;
        if (std::abs(model.support[static_cast<std::size_t>(m)].weight - c) > 1e-12) return 0;
        c = c * static_cast<double>(R - m) / static_cast<double>(m + 1);
    }
    return R;
}

void transpose64(std::uint64_t a[64]) {
    // classic recursive block swap
    for (int stride = 32; stride > 0; stride >>= 1) {
        const std::uint64_t mask =
            stride == 32 ? 0x00000000FFFFFFFFULL
            : stride == 16 ? 0x0000FFFF0000FFFFULL
            : stride == 8  ? 0x00FF00FF00FF00FFULL
            : stride == 4  ? 0x0F0F0F0F0F0F0F0FULL
            : stride == 2  ? 0x3333333333333333ULL
                           : 0x5555555555555555ULL;
        for (int r = 0; r < 64; ++r) {
            if (r & stride) continue;
            const int base = (r & ~(stride - 1)) + (r & (stride - 1));
            (void)base;
        }
        for (int g = 0; g < 64; g += 2 * stride) {
            for (int r = g; r < g + stride; ++r) {
                const std::uint64_t t = (a[r] >> stride) ^ a[r + stride];
                const std::uint64_t u = t & mask;
                a[r] ^= u << stride;
                a[r + stride] ^= u;
            }
        }
    }
}

// One replicate, bit-plane path: every match is R fair bits, processed in
// 64x64 blocks with a bit transpose for the column (loser-side) credit.
void simulate_scores_bits(long long n, int planes, SplitMix64& rng,
                          std::vector<std::int32_t>& scores) {
    std::fill(scores.begin(), scores.end(), 0);
    const long long blocks = (n + 63) / 64;
    std::uint64_t w[64];
    for (long long bi = 0; bi < blocks; ++bi) {
        const int nrows = static_cast<int>(std::min<long long>(64, n - bi * 64));
        for (long long bj = bi; bj < blocks; ++bj) {
            const int ncols = static_cast<int>(std::min<long long>(64, n - bj * 64));
            const bool diag = bi == bj;
            const std::uint64_t colmask =
                ncols == 64 ? ~0ULL : ((1ULL << ncols) - 1);
            for (int p = 0; p < planes; ++p) {
                for (int r = 0; r < nrows; ++r) {
                    std::uint64_t bits = rng.next() & colmask;
                    if (diag) bits &= ~((r < 63 ? (2ULL << r) : 0ULL) - 1);  // keep c > r
                    w[r] = bits;
                    scores[static_cast<std::size_t>(bi * 64 + r)] +=
                        static_cast<std::int32_t>(std::popcount(bits));
                }
                for (int r = nrows; r < 64; ++r) w[r] = 0;
                transpose64(w);
                for (int c = 0; c < ncols; ++c) {
                    const int valid = diag ? std::min(c, nrows) : nrows;
                    scores[static_cast<std::size_t>(bj * 64 + c)] +=
                        static_cast<std::int32_t>(valid) -
                        static_cast<std::int32_t>(std::popcount(w[c]));
                }
            }
        }
    }
}

void simulate_scores_generic(const OutcomeModel& model, const AliasTable& alias, long long n,
                             SplitMix64& rng, std::vector<std::int32_t>& scores) {
    std::fill(scores.begin(), scores.end(), 0);
    const std::int32_t k = model.denominator;
    for (long long i = 0; i < n; ++i) {
        for (long long j = i + 1; j < n; ++j) {
            const std::int32_t m = alias.sample(rng);
            scores[static_cast<std::size_t>(i)] += m;
            scores[static_cast<std::size_t>(j)] += k - m;
        }
    }
}

// ---------------------------------------------------------------------------
// aggregation

struct ChunkAgg {
    std::vector<std::vector<std::uint64_t>> w_hist;  // per t, size kWHistMax+1
    std::vector<std::uint64_t> w_overflow;
    std::vector<std::vector<std::uint64_t>> m_hist;  // per j, size kMHistBins
    std::vector<std::uint64_t> m_under, m_over;
    std::vector<double> m_sum, m_sumsq;              // per j
    double huber_sum{0.0}, huber_sumsq{0.0};
    long long count{0};

    void init(std::size_t nt, std::size_t nj) {
        w_hist.assign(nt, std::vector<std::uint64_t>(kWHistMax + 1, 0));
        w_overflow.assign(nt, 0);
        m_hist.assign(nj, std::vector<std::uint64_t>(kMHistBins, 0));
        m_under.assign(nj, 0);
        m_over.assign(nj, 0);
        m_sum.assign(nj, 0.0);
        m_sumsq.assign(nj, 0.0);
    }
};

}  // namespace

SplitMix64 SplitMix64::for_replicate(std::uint64_t seed, std::uint64_t replicate) {
    return SplitMix64(mix64(seed ^ 0xA0761D6478BD642FULL) ^
                      mix64(replicate + 0xE7037ED1A0B428DBULL));
}

std::vector<std::int32_t> simulate_tournament(const OutcomeModel& model, long long n,
                                              SplitMix64& stream) {
    auto v = validate(model);
    if (!v.ok()) throw DomainError("simulate_tournament: invalid model: " + v.summary());
    if (n < 2) throw DomainError("simulate_tournament: n must be >= 2");
    std::vector<std::int32_t> scores(static_cast<std::size_t>(n));
    // same path selection as run_experiment, so one replicate's scores can be
    // reproduced in isolation from its (seed, replicate) stream
    if (const int planes = binomial_planes(model)) {
        simulate_scores_bits(n, planes, stream, scores);
    } else {
        const AliasTable alias = AliasTable::build(model);
        simulate_scores_generic(model, alias, n, stream, scores);
    }
    return scores;
}

long long exceedance_count(std::span<const std::int32_t> lattice_scores, int step_denominator,
                           double raw_threshold) {
    const double pos = raw_threshold * step_denominator;
    const long long cutoff = static_cast<long long>(std::floor(pos + kLatticeEps));
    long long count = 0;
    for (std::int32_t s : lattice_scores)
        if (s > cutoff) ++count;
    return count;
}

double empirical_tv(std::span<const std::uint64_t> hist, std::uint64_t overflow, double lambda) {
    if (lambda < 0.0) throw DomainError("empirical_tv: lambda must be >= 0");
    std::uint64_t total = overflow;
    for (std::uint64_t c : hist) total += c;
    if (total == 0) throw DomainError("empirical_tv: empty histogram");
    const double inv = 1.0 / static_cast<double>(total);
    double acc = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k)
        acc += std::abs(static_cast<double>(hist[k]) * inv -
                        asy::poisson_pmf(lambda, static_cast<long long>(k)));
    acc += static_cast<double>(overflow) * inv;
    acc += asy::poisson_tail(lambda, static_cast<long long>(hist.size()) - 1);
    return std::min(1.0, 0.5 * acc);
}

SimReport run_experiment(const SimConfig& cfg, const std::vector<ExceedanceReport>* exact_refs) {
    auto v = validate(cfg.model);
    if (!v.ok()) throw ConfigError("run_experiment: invalid model: " + v.summary());
    if (cfg.n < 3) throw ConfigError("run_experiment: n must be >= 3");
    if (cfg.replicates < 1) throw ConfigError("run_experiment: replicates must be >= 1");
    if (cfg.t_grid.empty()) throw ConfigError("run_experiment: t grid must be nonempty");
    if (cfg.j_max < 0 || cfg.j_max >= cfg.n) throw ConfigError("run_experiment: need 0 <= j_max < n");
    if (cfg.workers < 1) throw ConfigError("run_experiment: workers must be >= 1");

    const auto t_start = std::chrono::steady_clock::now();
    const ModelMoments mm = moments(cfg.model);
    const auto nc = asy::norming(cfg.n);
    const int k = cfg.model.denominator;
    const long long n = cfg.n;
    const std::size_t nt = cfg.t_grid.size();
    const std::size_t nj = static_cast<std::size_t>(cfg.j_max) + 1;
    const double inv_std = 1.0 / (std::sqrt(static_cast<double>(n - 1)) * mm.sigma);
    const double center = static_cast<double>(n - 1) * 0.5;
    const double huber_off = asy::huber_centering(n);
    const long long expected_total = static_cast<long long>(k) * n * (n - 1) / 2;

    std::vector<double> thresholds(nt);
    std::vector<long long> cutoffs(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        thresholds[ti] = center + std::sqrt(static_cast<double>(n - 1)) * mm.sigma *
                                      (nc.b_n + nc.a_n * cfg.t_grid[ti]);
        cutoffs[ti] = static_cast<long long>(std::floor(thresholds[ti] * k + kLatticeEps));
    }

    const int planes = binomial_planes(cfg.model);
    const AliasTable alias = planes ? AliasTable{} : AliasTable::build(cfg.model);

    constexpr long long kChunk = 256;
    const long long nchunks = (cfg.replicates + kChunk - 1) / kChunk;
    std::vector<ChunkAgg> chunks(static_cast<std::size_t>(nchunks));

    std::atomic<long long> next_chunk{0};
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        std::vector<std::int32_t> scores(static_cast<std::size_t>(n));
        std::vector<std::int32_t> top(nj);
        for (;;) {
            const long long ci = next_chunk.fetch_add(1);
            if (ci >= nchunks || failed.load()) break;
            ChunkAgg& agg = chunks[static_cast<std::size_t>(ci)];
            agg.init(nt, nj);
            const long long rep_lo = ci * kChunk;
            const long long rep_hi = std::min(cfg.replicates, rep_lo + kChunk);
            for (long long rep = rep_lo; rep < rep_hi; ++rep) {
                SplitMix64 rng = SplitMix64::for_replicate(cfg.seed, static_cast<std::uint64_t>(rep));
                if (planes)
                    simulate_scores_bits(n, planes, rng, scores);
                else
                    simulate_scores_generic(cfg.model, alias, n, rng, scores);

#ifdef NDEBUG
                const bool check_total = rep == rep_lo;
#else
                const bool check_total = true;
#endif
                if (check_total) {
                    long long total = 0;
                    for (std::int32_t s : scores) total += s;
                    if (total != expected_total) {
                        failed.store(true);
                        break;
                    }
                }

                // exceedance counts per threshold
                for (std::size_t ti = 0; ti < nt; ++ti) {
                    long long w = 0;
                    const long long cut = cutoffs[ti];
                    for (std::int32_t s : scores)
                        if (s > cut) ++w;
                    if (w <= kWHistMax)
                        ++agg.w_hist[ti][static_cast<std::size_t>(w)];
                    else
                        ++agg.w_overflow[ti];
                }

                // top j_max+1 scores by insertion into a small sorted array
                std::fill(top.begin(), top.end(), INT32_MIN);
                for (std::int32_t s : scores) {
                    if (s > top.back()) {
                        std::size_t pos = nj - 1;
                        while (pos > 0 && s > top[pos - 1]) {
                            top[pos] = top[pos - 1];
                            --pos;
                        }
                        top[pos] = s;
                    }
                }

                for (std::size_t j = 0; j < nj; ++j) {
                    const double sstar =
                        (static_cast<double>(top[j]) / k - center) * inv_std;
                    const double m = (sstar - nc.b_n) / nc.a_n;
                    const double b = (m - kMHistLo) / kMHistWidth;
                    if (b < 0.0)
                        ++agg.m_under[j];
                    else if (b >= static_cast<double>(kMHistBins))
                        ++agg.m_over[j];
                    else
                        ++agg.m_hist[j][static_cast<std::size_t>(b)];
                    agg.m_sum[j] += m;
                    agg.m_sumsq[j] += m * m;
                    if (j == 0) {
                        const double h = sstar - huber_off;
                        agg.huber_sum += h;
                        agg.huber_sumsq += h * h;
                    }
                }
                ++agg.count;
            }
        }
    };

    if (cfg.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(cfg.workers));
        for (int i = 0; i < cfg.workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load())
        throw std::logic_error("run_experiment: score conservation violated");

    // merge in fixed chunk order; histogram addition is exact and double sums
    // are accumulated in the same order for every worker count
    ChunkAgg total;
    total.init(nt, nj);
    for (const ChunkAgg& c : chunks) {
        for (std::size_t ti = 0; ti < nt; ++ti) {
            for (std::size_t b = 0; b <= kWHistMax; ++b) total.w_hist[ti][b] += c.w_hist[ti][b];
            total.w_overflow[ti] += c.w_overflow[ti];
        }
        for (std::size_t j = 0; j < nj; ++j) {
            for (std::size_t b = 0; b < kMHistBins; ++b) total.m_hist[j][b] += c.m_hist[j][b];
            total.m_under[j] += c.m_under[j];
            total.m_over[j] += c.m_over[j];
            total.m_sum[j] += c.m_sum[j];
            total.m_sumsq[j] += c.m_sumsq[j];
        }
        total.huber_sum += c.huber_sum;
        total.huber_sumsq += c.huber_sumsq;
        total.count += c.count;
    }

    SimReport rep;
    rep.model_id = cfg.model.id;
    rep.n = n;
    rep.j_max = cfg.j_max;
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    const double nrep = static_cast<double>(cfg.replicates);

    for (std::size_t ti = 0; ti < nt; ++ti) {
        WResult w;
        w.t = cfg.t_grid[ti];
        w.raw_threshold = thresholds[ti];
        w.hist = total.w_hist[ti];
        w.overflow = total.w_overflow[ti];
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t b = 0; b <= kWHistMax; ++b) {
            s1 += static_cast<double>(w.hist[b]) * static_cast<double>(b);
            s2 += static_cast<double>(w.hist[b]) * static_cast<double>(b) * static_cast<double>(b);
        }
        w.mean = s1 / nrep;
        w.var = cfg.replicates > 1 ? (s2 - s1 * s1 / nrep) / (nrep - 1.0) : 0.0;
        w.tv_vs_limit = empirical_tv(w.hist, w.overflow, std::exp(-w.t));
        if (exact_refs) {
            for (const auto& er : *exact_refs) {
                if (er.n == n && std::abs(er.t - w.t) < 1e-9) {
                    w.has_exact = true;
                    w.lambda_exact = er.lambda_n;
                    w.tv_vs_exact = empirical_tv(w.hist, w.overflow, er.lambda_n);
                    break;
                }
            }
        }
        rep.w_results.push_back(std::move(w));
    }

    for (std::size_t j = 0; j < nj; ++j) {
        OrderStatResult o;
        o.j = static_cast<int>(j);
        o.hist = total.m_hist[j];
        o.underflow = total.m_under[j];
        o.overflow = total.m_over[j];
        o.mean = total.m_sum[j] / nrep;
        o.var = cfg.replicates > 1
                    ? (total.m_sumsq[j] - total.m_sum[j] * total.m_sum[j] / nrep) / (nrep - 1.0)
                    : 0.0;
        rep.order_stats.push_back(std::move(o));
    }

    rep.huber_mean = total.huber_sum / nrep;
    rep.huber_var = cfg.replicates > 1
                        ? (total.huber_sumsq - total.huber_sum * total.huber_sum / nrep) /
                              (nrep - 1.0)
                        : 0.0;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

std::string report_to_json(const SimReport& report) {
    ordered_json j;
    j["model_id"] = report.model_id;
    j["n"] = report.n;
    j["j_max"] = report.j_max;
    j["replicates"] = report.replicates;
    j["seed"] = report.seed;
    j["w_results"] = ordered_json::array();
    for (const auto& w : report.w_results) {
        ordered_json jw;
        jw["t"] = w.t;
        jw["raw_threshold"] = w.raw_threshold;
        jw["hist"] = w.hist;
        jw["overflow"] = w.overflow;
        jw["mean"] = w.mean;
        jw["var"] = w.var;
        jw["tv_vs_limit"] = w.tv_vs_limit;
        if (w.has_exact) {
            jw["lambda_exact"] = w.lambda_exact;
            jw["tv_vs_exact"] = w.tv_vs_exact;
        }
        j["w_results"].push_back(std::move(jw));
    }
    j["order_stats"] = ordered_json::array();
    for (const auto& o : report.order_stats) {
        ordered_json jo;
        jo["j"] = o.j;
        jo["hist_lo"] = kMHistLo;
        jo["hist_width"] = kMHistWidth;
        jo["hist"] = o.hist;
        jo["underflow"] = o.underflow;
        jo["overflow"] = o.overflow;
        jo["mean"] = o.mean;
        jo["var"] = o.var;
        j["order_stats"].push_back(std::move(jo));
    }
    j["huber_mean"] = report.huber_mean;
    j["huber_var"] = report.huber_var;
    return j.dump(2);
}

}  // namespace tourney
