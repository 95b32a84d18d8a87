#include "tourney/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "tourney/errors.hpp"

namespace tourney::oracle {

using boost::multiprecision::cpp_rational;

namespace {

std::string rational_str(const BigInt& num, const BigInt& den) {
    std::ostringstream os;
    os << cpp_rational(num, den);
    return os.str();
}

double rational_double(const BigInt& num, const BigInt& den) {
    return cpp_rational(num, den).template convert_to<double>();
}

long long lattice_cutoff(double raw_threshold, int k) {
    // identical strict-">" semantics to the engine's tail: an atom within
    // kLatticeEps lattice steps of the threshold counts as being at it
    return static_cast<long long>(std::floor(raw_threshold * k + kLatticeEps));
}

BigInt pow_bigint(const BigInt& base, long long e) {
    BigInt r = 1, b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

}  // namespace

std::uint64_t JointLaw::pack(const std::vector<int>& scores) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        key |= static_cast<std::uint64_t>(scores[i] & 0xFF) << (8 * i);
    return key;
}

JointLaw enumerate_joint(const OutcomeModel& model, long long n, unsigned long long budget) {
    auto v = validate(model);
    if (!v.ok()) throw DomainError("enumerate_joint: invalid model: " + v.summary());
    if (!model.has_exact_weights())
        throw DomainError("enumerate_joint: model needs exact rational weights");
    if (n < 2 || n > 8) throw DomainError("enumerate_joint: need 2 <= n <= 8");
    const int k = model.denominator;
    if (static_cast<long long>(k) * (n - 1) > 255)
        throw DomainError("enumerate_joint: score range too wide for packed keys");

    const long long M = n * (n - 1) / 2;
    const std::size_t s = model.support.size();

    // term budget: s^M weighted tournaments
    unsigned long long terms = 1;
    for (long long i = 0; i < M; ++i) {
        if (terms > budget / s + 1)
            throw BudgetExceeded("enumerate_joint: |D|^matches exceeds budget", 0);
        terms *= s;
    }
    if (terms > budget)
        throw BudgetExceeded("enumerate_joint: " + std::to_string(terms) +
                                 " terms exceed budget of " + std::to_string(budget),
                             terms);

    // common weight denominator and integer numerators
    long long d = 1;
    for (const auto& p : model.support) d = std::lcm(d, p.weight_exact->den);
    std::vector<long long> wnum(s);
    std::vector<int> mnum(s);
    for (std::size_t i = 0; i < s; ++i) {
        wnum[i] = model.support[i].weight_exact->num * (d / model.support[i].weight_exact->den);
        mnum[i] = model.support[i].numerator;
    }

    // match order: (0,1), (0,2), ..., (n-2, n-1)
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(M));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    JointLaw joint;
    joint.n = n;
    joint.k = k;
    joint.matches = M;
    joint.weight_denom = d;
    joint.denom = pow_bigint(BigInt(d), M);

    // iterative odometer over the match outcomes with per-level prefix state,
    // so a leaf costs one weight multiply and one map update
    const std::size_t Msz = static_cast<std::size_t>(M);
    std::vector<int> digit(Msz, -1);
    std::vector<std::vector<int>> scores(Msz + 1, std::vector<int>(static_cast<std::size_t>(n), 0));
    std::vector<BigInt> pref(Msz + 1);
    pref[0] = 1;

    long long lvl = 0;
    while (lvl >= 0) {
        if (lvl == M) {
            joint.table[JointLaw::pack(scores[Msz])] += pref[Msz];
            --lvl;
            continue;
        }
        const std::size_t L = static_cast<std::size_t>(lvl);
        if (++digit[L] == static_cast<int>(s)) {
            digit[L] = -1;
            --lvl;
            continue;
        }
        const int m = digit[L];
        scores[L + 1] = scores[L];
        scores[L + 1][static_cast<std::size_t>(pairs[L].first)] += mnum[static_cast<std::size_t>(m)];
        scores[L + 1][static_cast<std::size_t>(pairs[L].second)] +=
            k - mnum[static_cast<std::size_t>(m)];
        pref[L + 1] = pref[L] * wnum[static_cast<std::size_t>(m)];
        ++lvl;
    }
    return joint;
}

LatticePmf marginal_from_joint(const JointLaw& joint, int player) {
    if (player < 0 || player >= joint.n)
        throw DomainError("marginal_from_joint: player index out of range");
    const std::size_t side = static_cast<std::size_t>(joint.k) * (joint.n - 1) + 1;
    std::vector<BigInt> num(side, 0);
    for (const auto& [key, w] : joint.table)
        num[static_cast<std::size_t>(joint.score_of(key, player))] += w;

    LatticePmf pmf;
    pmf.step_denominator = joint.k;
    pmf.offset = 0;
    pmf.probs.resize(side);
    for (std::size_t i = 0; i < side; ++i) pmf.probs[i] = rational_double(num[i], joint.denom);
    return pmf;
}

std::vector<double> WLaw::pmf() const {
    std::vector<double> p(numerators.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rational_double(numerators[i], denom);
    return p;
}

double WLaw::mean() const {
    const auto p = pmf();
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * static_cast<double>(i);
    return m;
}

double WLaw::variance() const {
    const auto p = pmf();
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = static_cast<double>(i) - m;
        v += p[i] * d * d;
    }
    return v;
}

WLaw exact_W_distribution(const JointLaw& joint, double raw_threshold) {
    const long long cut = lattice_cutoff(raw_threshold, joint.k);
    WLaw law;
    law.denom = joint.denom;
    law.numerators.assign(static_cast<std::size_t>(joint.n) + 1, BigInt(0));
    for (const auto& [key, w] : joint.table) {
        int count = 0;
        for (int i = 0; i < joint.n; ++i)
            if (joint.score_of(key, i) > cut) ++count;
        law.numerators[static_cast<std::size_t>(count)] += w;
    }
    return law;
}

double exact_pair_covariance(const JointLaw& joint, double raw_threshold) {
    if (joint.n < 2) throw DomainError("exact_pair_covariance: need n >= 2");
    const long long cut = lattice_cutoff(raw_threshold, joint.k);
    BigInt num_a = 0, num_ab = 0;
    for (const auto& [key, w] : joint.table) {
        const bool e0 = joint.score_of(key, 0) > cut;
        const bool e1 = joint.score_of(key, 1) > cut;
        if (e0) num_a += w;
        if (e0 && e1) num_ab += w;
    }
    // Cov = E[I1 I2] - E[I1]^2 = (num_ab * denom - num_a^2) / denom^2
    return rational_double(num_ab * joint.denom - num_a * num_a, joint.denom * joint.denom);
}

OrthantReport check_nlod_nuod(const JointLaw& joint) {
    const int n = static_cast<int>(joint.n);
    const std::size_t side = static_cast<std::size_t>(joint.k) * (joint.n - 1) + 1;
    std::size_t cells = 1;
    for (int i = 0; i < n; ++i) cells *= side;

    // strides for the dense n-dimensional layout
    std::vector<std::size_t> stride(static_cast<std::size_t>(n));
    stride[0] = 1;
    for (int i = 1; i < n; ++i)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * side;

    std::vector<BigInt> lower(cells, BigInt(0));
    for (const auto& [key, w] : joint.table) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            idx += static_cast<std::size_t>(joint.score_of(key, i)) * stride[static_cast<std::size_t>(i)];
        lower[idx] += w;
    }
    std::vector<BigInt> upper = lower;

    // prefix sums per axis turn the pmf into the joint CDF; suffix sums give
    // the joint survival function
    for (int axis = 0; axis < n; ++axis) {
        const std::size_t st = stride[static_cast<std::size_t>(axis)];
        for (std::size_t base = 0; base < cells; ++base) {
            const std::size_t coord = (base / st) % side;
            if (coord == 0) continue;
            lower[base] += lower[base - st];
        }
        for (std::size_t base = cells; base-- > 0;) {
            const std::size_t coord = (base / st) % side;
            if (coord + 1 == side) continue;
            upper[base] += upper[base + st];
        }
    }
    // survival at threshold x is P(all S_i > x_i): shift the suffix sum by one
    // atom — index x holds P(all S_i >= x_i) right now, so read at x+1 below.

    // marginal CDF / survival numerators per player
    std::vector<std::vector<BigInt>> mcdf(static_cast<std::size_t>(n),
                                          std::vector<BigInt>(side, BigInt(0)));
    std::vector<std::vector<BigInt>> msurv = mcdf;
    for (const auto& [key, w] : joint.table) {
        for (int i = 0; i < n; ++i)
            mcdf[static_cast<std::size_t>(i)][static_cast<std::size_t>(joint.score_of(key, i))] += w;
    }
    for (int i = 0; i < n; ++i) {
        auto& c = mcdf[static_cast<std::size_t>(i)];
        auto& sv = msurv[static_cast<std::size_t>(i)];
        BigInt total = 0;
        for (const BigInt& x : c) total += x;
        BigInt run = 0;
        for (std::size_t x = 0; x < side; ++x) {
            run += c[x];
            sv[x] = total - run;  // P(S_i > x)
            c[x] = run;           // P(S_i <= x)
        }
    }

    const BigInt denom_pow = pow_bigint(joint.denom, n - 1);
    OrthantReport rep;
    rep.grid_points = static_cast<long long>(cells);

    BigInt max_l, max_u;
    bool first = true;
    std::vector<std::size_t> coord(static_cast<std::size_t>(n), 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
        BigInt prod_l = 1, prod_u = 1;
        std::size_t rem = idx;
        bool surv_zero = false;
        std::size_t upper_idx = 0;
        for (int i = 0; i < n; ++i) {
            const std::size_t x = rem % side;
            rem /= side;
            prod_l *= mcdf[static_cast<std::size_t>(i)][x];
            prod_u *= msurv[static_cast<std::size_t>(i)][x];
            if (x + 1 == side)
                surv_zero = true;  // P(S_i > max) = 0, joint survival 0 too
            else
                upper_idx += (x + 1) * stride[static_cast<std::size_t>(i)];
        }
        const BigInt viol_l = lower[idx] * denom_pow - prod_l;
        const BigInt viol_u = (surv_zero ? BigInt(0) : upper[upper_idx] * denom_pow) - prod_u;
        if (first || viol_l > max_l) max_l = viol_l;
        if (first || viol_u > max_u) max_u = viol_u;
        first = false;
    }

    const BigInt denom_n = denom_pow * joint.denom;
    rep.nlod_ok = max_l <= 0;
    rep.nuod_ok = max_u <= 0;
    rep.max_lower_violation = rational_str(max_l, denom_n);
    rep.max_upper_violation = rational_str(max_u, denom_n);
    rep.max_lower_violation_value = rational_double(max_l, denom_n);
    rep.max_upper_violation_value = rational_double(max_u, denom_n);
    return rep;
}

NaSpotReport check_na_step_functions(const JointLaw& joint, int functions, std::uint64_t seed) {
    const int n = static_cast<int>(joint.n);
    const int side = joint.k * static_cast<int>(joint.n - 1) + 1;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> thr_dist(1, side - 1);
    std::uniform_int_distribution<int> jump_dist(1, 3);
    std::uniform_int_distribution<int> kind_dist(0, 1);

    // a coordinatewise nondecreasing integer function of a subset of scores:
    // either a sum of per-coordinate step functions or a product of indicators
    struct StepFn {
        std::vector<int> players;
        std::vector<int> thresholds;
        std::vector<int> jumps;
        bool product{false};
        long long eval(const JointLaw& j, std::uint64_t key) const {
            if (product) {
                for (std::size_t i = 0; i < players.size(); ++i)
                    if (j.score_of(key, players[i]) < thresholds[i]) return 0;
                return 1;
            }
            long long v = 0;
            for (std::size_t i = 0; i < players.size(); ++i)
                if (j.score_of(key, players[i]) >= thresholds[i]) v += jumps[i];
            return v;
        }
    };

    auto random_fn = [&](const std::vector<int>& players) {
        StepFn f;
        f.players = players;
        f.product = kind_dist(rng) == 1;
        for (std::size_t i = 0; i < players.size(); ++i) {
            f.thresholds.push_back(thr_dist(rng));
            f.jumps.push_back(jump_dist(rng));
        }
        return f;
    };

    NaSpotReport rep;
    BigInt worst_num = 0;
    bool worst_set = false;
    const BigInt denom_sq = joint.denom * joint.denom;

    // every disjoint pair of nonempty subsets (A, B), deduplicated by
    // requiring A to contain the lowest assigned player
    std::vector<int> label(static_cast<std::size_t>(n));  // 0 = neither, 1 = A, 2 = B
    const long long total_labelings = static_cast<long long>(std::pow(3.0, n));
    for (long long code = 0; code < total_labelings; ++code) {
        long long c = code;
        std::vector<int> A, B;
        for (int i = 0; i < n; ++i) {
            label[static_cast<std::size_t>(i)] = static_cast<int>(c % 3);
            c /= 3;
            if (label[static_cast<std::size_t>(i)] == 1) A.push_back(i);
            if (label[static_cast<std::size_t>(i)] == 2) B.push_back(i);
        }
        if (A.empty() || B.empty()) continue;
        if (std::min(*std::min_element(A.begin(), A.end()),
                     *std::min_element(B.begin(), B.end())) != A.front())
            continue;  // keep one of each unordered (A, B) pair
        ++rep.splits;

        for (int rep_i = 0; rep_i < functions; ++rep_i) {
            const StepFn f = random_fn(A);
            const StepFn g = random_fn(B);
            BigInt ef = 0, eg = 0, efg = 0;
            for (const auto& [key, w] : joint.table) {
                const long long fv = f.eval(joint, key);
                const long long gv = g.eval(joint, key);
                if (fv) ef += w * fv;
                if (gv) eg += w * gv;
                if (fv && gv) efg += w * (fv * gv);
            }
            const BigInt cov_num = efg * joint.denom - ef * eg;
            ++rep.pairs_checked;
            if (cov_num > 0) ++rep.violations;
            if (!worst_set || cov_num > worst_num) {
                worst_num = cov_num;
                worst_set = true;
            }
        }
    }

    rep.worst_covariance = rational_str(worst_num, denom_sq);
    rep.worst_covariance_value = rational_double(worst_num, denom_sq);
    return rep;
}

}  // namespace tourney::oracle
