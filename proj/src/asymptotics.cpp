#include "tourney/asymptotics.hpp"

#include <cmath>

#include "tourney/errors.hpp"

namespace tourney::asymptotics {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLog4Pi = 2.5310242469692907;  // log(4 pi)
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

NormingConstants norming(long long n) {
    if (n < 3) throw DomainError("norming: n must be >= 3");
    const double L = std::log(static_cast<double>(n));
    const double u = std::sqrt(2.0 * L);
    const double a = 1.0 / u;
    const double b = u - (std::log(L) + kLog4Pi) / (2.0 * u);
    return NormingConstants{n, a, b};
}

double x_n(long long n, double t) {
    const auto c = norming(n);
    return c.b_n + c.a_n * t;
}

double poisson_pmf(double lambda, long long k) {
    if (lambda < 0.0) throw DomainError("poisson_pmf: lambda must be >= 0");
    if (k < 0) throw DomainError("poisson_pmf: k must be >= 0");
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(lambda) - lambda - std::lgamma(kk + 1.0));
}

double poisson_tail(double lambda, long long k_max) {
    if (lambda < 0.0) throw DomainError("poisson_tail: lambda must be >= 0");
    if (lambda == 0.0) return 0.0;
    // forward sum of the head, complemented; head has at most ~k_max+1 terms
    double head = 0.0;
    double term = std::exp(-lambda);
    for (long long k = 0; k <= k_max; ++k) {
        head += term;
        term *= lambda / static_cast<double>(k + 1);
    }
    return head >= 1.0 ? 0.0 : 1.0 - head;
}

double order_stat_limit_cdf(const LimitSpec& spec) {
    if (spec.j < 0) throw DomainError("order_stat_limit_cdf: j must be >= 0");
    const double lambda = std::exp(-spec.t);
    double sum = 0.0;
    for (int k = 0; k <= spec.j; ++k) sum += poisson_pmf(lambda, k);
    return sum;
}

double mills_tail(double x) {
    if (!(x > 0.0)) throw DomainError("mills_tail: x must be > 0");
    return normal_pdf(x) / x * (1.0 - 1.0 / (x * x));
}

double predicted_lambda(double t) { return std::exp(-t); }

double predicted_pair_cov(long long n, double t) {
    if (n < 3) throw DomainError("predicted_pair_cov: n must be >= 3");
    const double nn = static_cast<double>(n);
    return -2.0 * std::exp(-2.0 * t) * std::log(nn) / (nn * nn * nn);
}

double rate_envelope(long long n) {
    if (n < 16) throw DomainError("rate_envelope: n must be >= 16");
    const double L = std::log(static_cast<double>(n));
    const double ll = std::log(L);
    return ll * ll / L;
}

double huber_centering(long long n) {
    if (n < 3) throw DomainError("huber_centering: n must be >= 3");
    return std::sqrt(2.0 * std::log(static_cast<double>(n - 1)));
}

double phi_xn_asymptotic(long long n, double t) {
    if (n < 3) throw DomainError("phi_xn_asymptotic: n must be >= 3");
    const double nn = static_cast<double>(n);
    return std::exp(-t) * std::sqrt(2.0 * std::log(nn)) / nn;
}

}  // namespace tourney::asymptotics
