#include "tourney/lattice_pmf.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "tourney/errors.hpp"

namespace tourney {

namespace {

std::mutex fftw_mutex;  // FFTW planning is not thread-safe

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Real convolution c = a * b via r2c/c2r transforms of length next_pow2(na+nb-1).
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    const std::size_t nc = n / 2 + 1;

    double* ra = fftw_alloc_real(n);
    double* rb = fftw_alloc_real(n);
    fftw_complex* ca = fftw_alloc_complex(nc);
    fftw_complex* cb = fftw_alloc_complex(nc);

    std::fill(ra, ra + n, 0.0);
    std::fill(rb, rb + n, 0.0);
    std::copy(a.begin(), a.end(), ra);
    std::copy(b.begin(), b.end(), rb);

    fftw_plan pf_a, pf_b, pb;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        pf_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
        pf_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
        pb = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
    }
    fftw_execute(pf_a);
    fftw_execute(pf_b);
    for (std::size_t i = 0; i < nc; ++i) {
        const double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
        const double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
        ca[i][0] = re;
        ca[i][1] = im;
    }
    fftw_execute(pb);

    std::vector<double> out(out_len);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = ra[i] * scale;

    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(pf_a);
        fftw_destroy_plan(pf_b);
        fftw_destroy_plan(pb);
    }
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(ca);
    fftw_free(cb);
    return out;
}

std::vector<double> direct_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    // iterate the shorter operand in the outer loop
    const auto& s = a.size() <= b.size() ? a : b;
    const auto& l = a.size() <= b.size() ? b : a;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double si = s[i];
        if (si == 0.0) continue;
        for (std::size_t j = 0; j < l.size(); ++j) out[i + j] += si * l[j];
    }
    return out;
}

void trim(LatticePmf& p) {
    std::size_t lo = 0, hi = p.probs.size();
    while (lo < hi && p.probs[lo] == 0.0) ++lo;
    while (hi > lo && p.probs[hi - 1] == 0.0) --hi;
    if (lo > 0 || hi < p.probs.size()) {
        p.probs = std::vector<double>(p.probs.begin() + static_cast<long>(lo),
                                      p.probs.begin() + static_cast<long>(hi));
        p.offset += static_cast<long long>(lo);
    }
}

// First index strictly above the real position `pos` on the index scale,
// treating indices within kLatticeEps of pos as equal (excluded).
std::size_t tail_start_index(double pos, std::size_t size) {
    if (pos < -kLatticeEps) return 0;
    const double shifted = std::floor(pos + kLatticeEps) + 1.0;
    if (shifted >= static_cast<double>(size)) return size;
    return static_cast<std::size_t>(shifted);
}

}  // namespace

double LatticePmf::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * value_at(i);
    return s;
}

double LatticePmf::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double d = value_at(i) - m;
        s += probs[i] * d * d;
    }
    return s;
}

LatticePmf pmf_from_model(const OutcomeModel& model) {
    auto v = validate(model);
    if (!v.ok()) throw DomainError("pmf_from_model: invalid model: " + v.summary());
    LatticePmf p;
    p.step_denominator = model.denominator;
    p.offset = model.support.front().numerator;
    const int span = model.support.back().numerator - model.support.front().numerator;
    p.probs.assign(static_cast<std::size_t>(span) + 1, 0.0);
    for (const auto& s : model.support)
        p.probs[static_cast<std::size_t>(s.numerator - model.support.front().numerator)] = s.weight;
    return p;
}

LatticePmf convolve(const LatticePmf& a, const LatticePmf& b) {
    if (a.step_denominator != b.step_denominator)
        throw DomainError("convolve: mismatched lattice steps");
    LatticePmf out;
    out.step_denominator = a.step_denominator;
    out.offset = a.offset + b.offset;
    out.cleanup_mass = a.cleanup_mass + b.cleanup_mass;

    const std::size_t out_len = a.size() + b.size() - 1;
    if (out_len <= kDirectConvThreshold) {
        out.probs = direct_convolve(a.probs, b.probs);
    } else {
        out.probs = fft_convolve(a.probs, b.probs);
        // clamp transform residue and renormalize
        double clipped = 0.0;
        for (double& x : out.probs) {
            if (x < 0.0) {
                clipped += -x;
                x = 0.0;
            }
        }
        out.cleanup_mass += clipped;
        const double total = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
        if (total > 0.0) {
            const double inv = 1.0 / total;
            for (double& x : out.probs) x *= inv;
        }
    }
    trim(out);
    return out;
}

LatticePmf convolve_power(const LatticePmf& base, long long m, std::size_t atom_budget) {
    if (m < 1) throw DomainError("convolve_power: m must be >= 1");
    if (base.probs.empty()) throw DomainError("convolve_power: empty base");

    const unsigned long long result_atoms =
        static_cast<unsigned long long>(base.size() - 1) * static_cast<unsigned long long>(m) + 1;
    if (result_atoms > atom_budget)
        throw CapacityError("convolve_power: result support of " + std::to_string(result_atoms) +
                            " atoms exceeds budget of " + std::to_string(atom_budget));

    LatticePmf result;   // starts as the identity (point mass at 0)
    result.step_denominator = base.step_denominator;
    result.offset = 0;
    result.probs = {1.0};

    LatticePmf acc = base;
    long long e = m;
    while (e > 0) {
        if (e & 1) result = convolve(result, acc);
        e >>= 1;
        if (e > 0) acc = convolve(acc, acc);
    }
    return result;
}

TailResult tail_prob_detail(const LatticePmf& pmf, double u) {
    const double pos = u * pmf.step_denominator - static_cast<double>(pmf.offset);
    const double rounded = std::round(pos);
    const bool near = std::abs(pos - rounded) < kLatticeEps && rounded >= 0.0 &&
                      rounded < static_cast<double>(pmf.size());

    const std::size_t start = tail_start_index(pos, pmf.size());
    // sum from the far end inward: smallest atoms first
    double tail = 0.0;
    for (std::size_t i = pmf.size(); i > start; --i) tail += pmf.probs[i - 1];

    double inclusive = tail;
    if (near) inclusive += pmf.probs[static_cast<std::size_t>(rounded)];
    return TailResult{tail, inclusive, near};
}

double tail_prob(const LatticePmf& pmf, double u) { return tail_prob_detail(pmf, u).exclusive; }

double window_prob(const LatticePmf& pmf, double lo, double hi) {
    if (hi < lo) throw DomainError("window_prob: hi < lo");
    const double pos_lo = lo * pmf.step_denominator - static_cast<double>(pmf.offset);
    const double pos_hi = hi * pmf.step_denominator - static_cast<double>(pmf.offset);
    const std::size_t a = tail_start_index(pos_lo, pmf.size());
    const std::size_t b = tail_start_index(pos_hi, pmf.size());
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += pmf.probs[i];
    return s;
}

}  // namespace tourney
