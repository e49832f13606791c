#ifndef ACOPS_VALUATION_HPP
#define ACOPS_VALUATION_HPP

#include <cmath>
#include <random>

#include "acops/errors.hpp"

namespace acops {

/// Private value of cooperation for one weak user: X = gamma_PH / alpha - gamma_BS,
/// with gamma_PH ~ Exp(mean Gamma_PH) and gamma_BS ~ Exp(mean Gamma_BS).
///
/// The density is a two-sided exponential. For alpha = 1 it is
///   f(x) = e^{-x/Gamma_PH} / lambda  (x > 0),   e^{x/Gamma_BS} / lambda  (x < 0)
/// with lambda = Gamma_PH + Gamma_BS. For general alpha the positive branch has
/// scale Gamma_PH / alpha (the law of the scaled variable) and the normalizer is
/// Gamma_PH / alpha + Gamma_BS.
struct PrivateValueModel {
    double gamma_bar_ph = 1.0;
    double gamma_bar_bs = 1.0;
    double alpha = 1.0;

    void validate() const
    {
        detail::require_positive(gamma_bar_ph, "gamma_bar_ph");
        detail::require_positive(gamma_bar_bs, "gamma_bar_bs");
        detail::require_positive(alpha, "alpha");
    }

    double lambda() const { return gamma_bar_ph + gamma_bar_bs; }
    /// Mean of gamma_PH / alpha.
    double positive_scale() const { return gamma_bar_ph / alpha; }
    double normalizer() const { return positive_scale() + gamma_bar_bs; }
};

/// Erlang(c_k) law of a bundle of c_k one-sided private values.
struct BundleValueModel {
    double gamma_bar_ph = 1.0;
    unsigned cardinality = 1;

    void validate() const
    {
        detail::require_positive(gamma_bar_ph, "gamma_bar_ph");
        detail::require(cardinality >= 1, "bundle cardinality must be >= 1");
    }
};

inline double private_value(double gamma_ph, double gamma_bs, double alpha)
{
    detail::require_positive(alpha, "alpha");
    detail::require_non_negative(gamma_ph, "gamma_ph");
    detail::require_non_negative(gamma_bs, "gamma_bs");
    return gamma_ph / alpha - gamma_bs;
}

inline double pv_pdf(double x, const PrivateValueModel& m)
{
    const double peak = 1.0 / m.normalizer();
    return x >= 0.0 ? peak * std::exp(-x / m.positive_scale()) : peak * std::exp(x / m.gamma_bar_bs);
}

inline double pv_cdf(double x, const PrivateValueModel& m)
{
    const double s = m.positive_scale();
    if (x < 0.0)
        return m.gamma_bar_bs * std::exp(x / m.gamma_bar_bs) / m.normalizer();
    return 1.0 - s * std::exp(-x / s) / m.normalizer();
}

/// Pr(X > 0) = 1 - F(0).
inline double positive_value_prob(const PrivateValueModel& m)
{
    return m.positive_scale() / m.normalizer();
}

template <class Rng>
double sample_private_value(const PrivateValueModel& m, Rng& rng)
{
    std::exponential_distribution<double> ph(1.0 / m.gamma_bar_ph);
    std::exponential_distribution<double> bs(1.0 / m.gamma_bar_bs);
    const double g_ph = ph(rng);
    const double g_bs = bs(rng);
    return g_ph / m.alpha - g_bs;
}

/// Erlang density (1/G)^n y^{n-1} / (n-1)! e^{-y/G}; zero for y < 0.
inline double bundle_pdf(double y, const BundleValueModel& m)
{
    if (y < 0.0)
        return 0.0;
    const double n = m.cardinality;
    const double u = y / m.gamma_bar_ph;
    if (y == 0.0)
        return m.cardinality == 1 ? 1.0 / m.gamma_bar_ph : 0.0;
    return std::exp((n - 1.0) * std::log(u) - u - std::lgamma(n)) / m.gamma_bar_ph;
}

/// G(y) = 1 - e^{-y/G} sum_{m<n} (y/G)^m / m!, the Erlang cdf.
inline double bundle_cdf(double y, const BundleValueModel& m)
{
    if (y <= 0.0)
        return 0.0;
    const double u = y / m.gamma_bar_ph;
    double term = 1.0;
    double sum = 1.0;
    for (unsigned k = 1; k < m.cardinality; ++k) {
        term *= u / k;
        sum += term;
    }
    // Near the origin the complement loses every digit; use the series of the cdf itself.
    if (u < 0.5) {
        const double n = m.cardinality;
        double t = std::exp(n * std::log(u) - std::lgamma(n + 1.0));
        double s = t;
        for (int k = 1; k < 200; ++k) {
            t *= u / (n + k);
            s += t;
            if (t < 1e-17 * s)
                break;
        }
        return s * std::exp(-u);
    }
    const double tail = std::exp(-u) * sum;
    return tail >= 1.0 ? 0.0 : 1.0 - tail;
}

template <class Rng>
double sample_bundle_value(const BundleValueModel& m, Rng& rng)
{
    return std::gamma_distribution<double>(static_cast<double>(m.cardinality), m.gamma_bar_ph)(rng);
}

} // namespace acops

#endif
