#pragma once

#include <cstdint>

namespace tourney::asymptotics {

// Gumbel-type norming constants for the standardized score maximum.
struct NormingConstants {
    long long n;
    double a_n;  // (2 log n)^{-1/2}
    double b_n;  // (2 log n)^{1/2} - (log log n + log 4pi) / (2 (2 log n)^{1/2})
};

struct LimitSpec {
    double t;   // Gumbel coordinate
    int j{0};   // order-statistic depth, j = 0 is the maximum
};

double normal_pdf(double x);
double normal_cdf(double x);
double normal_tail(double x);  // 1 - Phi(x), via erfc

NormingConstants norming(long long n);        // n >= 3
double x_n(long long n, double t);            // b_n + a_n t

// Limiting CDF of the (j+1)-th largest normalized score:
// exp(-e^{-t}) * sum_{k<=j} e^{-tk}/k!
double order_stat_limit_cdf(const LimitSpec& spec);

double poisson_pmf(double lambda, long long k);       // stable in log space
double poisson_tail(double lambda, long long k_max);  // P(Poisson > k_max)

// Two-term Mills approximation phi(x)/x * (1 - 1/x^2) to the normal tail. An
// approximation, not the exact tail; x > 0 required.
double mills_tail(double x);

double predicted_lambda(double t);                    // e^{-t}
double predicted_pair_cov(long long n, double t);     // -2 e^{-2t} log n / n^3
double rate_envelope(long long n);                    // (log log n)^2 / log n, n >= 16
double huber_centering(long long n);                  // sqrt(2 log(n-1))
double phi_xn_asymptotic(long long n, double t);      // e^{-t} sqrt(2 log n) / n

}  // namespace tourney::asymptotics
