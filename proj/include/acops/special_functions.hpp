#ifndef ACOPS_SPECIAL_FUNCTIONS_HPP
#define ACOPS_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "acops/errors.hpp"

namespace acops {

namespace detail {

inline constexpr int kMaxSeriesTerms = 500;
inline constexpr double kSeriesEps = 1e-17;

// E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), x in (0, 1)
inline double e1_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < kSeriesEps * std::abs(sum))
            return -std::numbers::egamma - std::log(x) - sum;
    }
    throw numeric_error("E1 series did not converge");
}

// Modified Lentz evaluation of E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))), x >= 1
inline double e1_continued_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesTerms; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < kSeriesEps)
            return h * std::exp(-x);
    }
    throw numeric_error("E1 continued fraction did not converge");
}

// Ei(x) = gamma + ln x + sum x^k / (k k!), x > 0
inline double ei_positive_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
        term *= x / k;
        const double add = term / k;
        sum += add;
        if (add < kSeriesEps * sum)
            return std::numbers::egamma + std::log(x) + sum;
    }
    throw numeric_error("Ei series did not converge");
}

// Ei(x) ~ e^x / x * sum k! / x^k, x large
inline double ei_positive_asymptotic(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = term * k / x;
        if (next > term)
            break;
        term = next;
        sum += term;
        if (term < kSeriesEps * sum)
            break;
    }
    return std::exp(x) / x * sum;
}

} // namespace detail

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
inline double expint_e1(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("E1 requires x > 0");
    if (x > 745.0)
        return 0.0;
    return x < 1.0 ? detail::e1_series(x) : detail::e1_continued_fraction(x);
}

/// Exponential integral Ei(x) = -PV int_{-x}^inf e^{-t}/t dt for real x != 0.
inline double expint_ei(double x)
{
    if (x == 0.0 || std::isnan(x))
        throw numeric_error("Ei is singular at 0");
    if (x < 0.0)
        return -expint_e1(-x);
    if (x > 709.0)
        throw numeric_error("Ei overflows for x > 709");
    return x < 40.0 ? detail::ei_positive_series(x) : detail::ei_positive_asymptotic(x);
}

} // namespace acops

#endif
