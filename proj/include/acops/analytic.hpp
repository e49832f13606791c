#ifndef ACOPS_ANALYTIC_HPP
#define ACOPS_ANALYTIC_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "acops/channel_model.hpp"
#include "acops/errors.hpp"
#include "acops/valuation.hpp"

namespace acops {

/// Symmetric i.i.d. weak-user group.
struct SymmetricGroupParams {
    double gamma_bar_ph = 1.0;
    double gamma_bar_bs = 1.0;
    double alpha = 1.0;
    std::size_t num_users = 1;

    void validate() const
    {
        detail::require_positive(gamma_bar_ph, "gamma_bar_ph");
        detail::require_positive(gamma_bar_bs, "gamma_bar_bs");
        detail::require_positive(alpha, "alpha");
        detail::require(num_users >= 1, "N must be >= 1");
    }

    /// A = Gamma_PH / (Gamma_PH + Gamma_BS).
    double a() const { return gamma_bar_ph / (gamma_bar_ph + gamma_bar_bs); }
    double lambda() const { return gamma_bar_ph + gamma_bar_bs; }
};

/// Weight A^n given to n actual bidders (not normalized over n).
inline double prob_na(std::size_t n, const SymmetricGroupParams& p)
{
    p.validate();
    detail::require(n >= 1 && n <= p.num_users, "n must lie in [1, N]");
    return std::pow(p.a(), static_cast<double>(n));
}

/// Psi_1 = sum_{n=1}^N A^{2n} / n.
inline double win_prob_single(const SymmetricGroupParams& p)
{
    p.validate();
    const double a2 = p.a() * p.a();
    double term = 1.0;
    double sum = 0.0;
    for (std::size_t n = 1; n <= p.num_users; ++n) {
        term *= a2;
        sum += term / static_cast<double>(n);
    }
    return sum;
}

/// Closed-form single-object revenue:
///   sum_n (-1)^{n-2} A^{2n} Gamma_PH^n / lambda^{n-1} sum_{k=0}^{n-2} C(n-2,k) / (n-k-1)^2.
/// The n = 1 term is an empty sum.
inline double revenue_single_closed_form(const SymmetricGroupParams& p)
{
    p.validate();
    const double a = p.a();
    const double g = p.gamma_bar_ph;
    const double lam = p.lambda();
    double total = 0.0;
    for (std::size_t n = 2; n <= p.num_users; ++n) {
        const double nn = static_cast<double>(n);
        double inner = 0.0;
        double binom = 1.0;
        for (std::size_t k = 0; k + 2 <= n; ++k) {
            if (k > 0)
                binom *= static_cast<double>(n - 2 - k + 1) / static_cast<double>(k);
            const double d = nn - static_cast<double>(k) - 1.0;
            inner += binom / (d * d);
        }
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const double term =
            sign * std::pow(a, 2.0 * nn) * std::exp(nn * std::log(g) - (nn - 1.0) * std::log(lam)) * inner;
        if (!std::isfinite(term))
            throw numeric_error("closed-form revenue overflowed at n = " + std::to_string(n));
        total += term;
    }
    return total;
}

/// Lower bound on single-partner outage:
///   [1 - e^{-(2^D - 1)/Gamma_BS}] (1 - Psi_1) + [1 - e^{-(2^{D/2} - 1)/Gamma_PH}] Psi_1.
inline double outage_single_bound(double rate, const SymmetricGroupParams& p)
{
    detail::require_non_negative(rate, "rate");
    const double psi = win_prob_single(p);
    return outage_prob_direct(rate, p.gamma_bar_bs) * (1.0 - psi) + outage_prob_direct(rate / 2.0, p.gamma_bar_ph) * psi;
}

namespace detail {

inline constexpr double kQuadTolerance = 1e-12;
inline constexpr unsigned kQuadDepth = 18;

template <class F>
double integrate(F f, double lo, double hi)
{
    double error = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, kQuadDepth, kQuadTolerance,
                                                                                   &error);
    if (!std::isfinite(v))
        throw numeric_error("quadrature produced a non-finite value");
    if (error > 1e-7 * std::max(1.0, std::abs(v)))
        throw numeric_error("quadrature did not converge: estimated error " + std::to_string(error));
    return v;
}

/// Integration range [0, G (c + 10 sqrt c)] for an Erlang(c) law.
inline double erlang_upper(const BundleValueModel& m)
{
    const double c = m.cardinality;
    return m.gamma_bar_ph * (c + 10.0 * std::sqrt(c));
}

/// Integrate over [0, upper] splitting at the bulk of the distribution.
template <class F>
double integrate_erlang_range(F f, const BundleValueModel& m, double upper)
{
    const double c = m.cardinality;
    const double mid = std::min(upper, m.gamma_bar_ph * c);
    return integrate(f, 0.0, mid) + (upper > mid ? integrate(f, mid, upper) : 0.0);
}

} // namespace detail

/// E[G^k(Y)] for Y with law `m`.
inline double expect_cdf_power(const BundleValueModel& m, unsigned k)
{
    m.validate();
    if (k == 0)
        return 1.0;
    const double upper = detail::erlang_upper(m);
    const double kk = k;
    const double body =
        detail::integrate_erlang_range([&](double y) { return std::pow(bundle_cdf(y, m), kk) * bundle_pdf(y, m); }, m, upper);
    const double g_up = bundle_cdf(upper, m);
    // Tail: integrand lies between G(U)^k f and f beyond U.
    const double tail = (1.0 - g_up) * 0.5 * (1.0 + std::pow(g_up, kk));
    return body + tail;
}

/// E[Y G^k(Y)] for Y with law `m`.
inline double expect_value_cdf_power(const BundleValueModel& m, unsigned k)
{
    m.validate();
    const double upper = detail::erlang_upper(m);
    const double kk = k;
    const double body = detail::integrate_erlang_range(
        [&](double y) { return y * std::pow(bundle_cdf(y, m), kk) * bundle_pdf(y, m); }, m, upper);
    const double g_up = bundle_cdf(upper, m);
    // y f_c(y) = c G f_{c+1}(y), so the tail mass of Y is c G (1 - G_{c+1}(U)).
    const BundleValueModel next{m.gamma_bar_ph, m.cardinality + 1};
    const double tail_mean = m.cardinality * m.gamma_bar_ph * (1.0 - bundle_cdf(upper, next));
    return body + tail_mean * 0.5 * (1.0 + std::pow(g_up, kk));
}

/// Mixed-bundle revenue with Pr(N_a = n) = 1/N:
///   sum_k sum_{n=2}^N (1/N) E[G^{n-1}(Y_1^k)] E[Y_2^k G^{n-2}(Y_2^k)].
inline double revenue_bundle(std::span<const BundleValueModel> bundles, std::size_t num_users)
{
    detail::require(num_users >= 1, "N must be >= 1");
    const double inv_n = 1.0 / static_cast<double>(num_users);
    double total = 0.0;
    for (const auto& m : bundles)
        for (std::size_t n = 2; n <= num_users; ++n)
            total += inv_n * expect_cdf_power(m, static_cast<unsigned>(n - 1)) *
                     expect_value_cdf_power(m, static_cast<unsigned>(n - 2));
    return total;
}

/// Theta(1) = (1/N) sum_{n=1}^N E[G^{n-1}(Y)].
inline double theta_win(const BundleValueModel& m, std::size_t num_users)
{
    detail::require(num_users >= 1, "N must be >= 1");
    double sum = 0.0;
    for (std::size_t n = 1; n <= num_users; ++n)
        sum += expect_cdf_power(m, static_cast<unsigned>(n - 1));
    return sum / static_cast<double>(num_users);
}

inline double normal_cdf(double x, double mean, double sd)
{
    return 0.5 * (1.0 + std::erf((x - mean) / (std::numbers::sqrt2 * sd)));
}

/// Gaussian-capacity outage approximation for the bundled auction:
///   Phi(D; direct) (1 - Theta) + Phi(D; direct + first bundle) Theta.
inline double outage_bundle_approx(double rate, const BundleValueModel& m, std::size_t num_users,
                                   const CapacityMoments& direct, const CapacityMoments& with_bundle)
{
    const double theta = theta_win(m, num_users);
    return normal_cdf(rate, direct.mean, direct.stddev()) * (1.0 - theta) +
           normal_cdf(rate, with_bundle.mean, with_bundle.stddev()) * theta;
}

/// Capacity moments for the direct link over all K~ subcarriers and for the
/// direct link plus a won bundle of c_1 helper subcarriers (independent links).
struct BundleOutageMoments {
    CapacityMoments direct;
    CapacityMoments with_bundle;
};

template <class Rng>
BundleOutageMoments bundle_outage_moments(std::size_t num_subcarriers, std::size_t bundle_size, double gamma0_direct,
                                          double gamma0_helper, std::size_t num_taps, std::size_t samples, Rng& rng)
{
    const auto d = gaussian_capacity_approx(num_subcarriers, gamma0_direct, num_subcarriers, num_taps, samples, rng);
    const auto h = gaussian_capacity_approx(bundle_size, gamma0_helper, num_subcarriers, num_taps, samples, rng);
    return {d, {d.mean + h.mean, d.variance + h.variance}};
}

/// E[second-highest of n i.i.d. draws of `m`] = int_0^inf [1 - G^n - n G^{n-1}(1 - G)] dy.
inline double expected_second_highest(const BundleValueModel& m, std::size_t n)
{
    m.validate();
    detail::require(n >= 2, "second-highest needs n >= 2");
    const double nn = static_cast<double>(n);
    auto survival = [&](double y) {
        const double g = bundle_cdf(y, m);
        const double gn1 = std::pow(g, nn - 1.0);
        return 1.0 - gn1 * g - nn * gn1 * (1.0 - g);
    };
    const double upper = detail::erlang_upper(m);
    const double body = detail::integrate_erlang_range(survival, m, upper);
    // Beyond U the survival is at most C(n,2) (1 - G)^2; bound its integral and take the midpoint.
    const double g_up = bundle_cdf(upper, m);
    const BundleValueModel next{m.gamma_bar_ph, m.cardinality + 1};
    const double excess =
        m.cardinality * m.gamma_bar_ph * (1.0 - bundle_cdf(upper, next)) - upper * (1.0 - g_up);
    const double bound = 0.5 * nn * (nn - 1.0) * (1.0 - g_up) * std::max(excess, 0.0);
    return body + 0.5 * bound;
}

struct ThresholdRow {
    std::size_t bidders;
    double bundle_side;    ///< E[second-highest bundle value]
    double separate_side;  ///< c * E[second-highest single-object value]
    bool bundle_dominates;
};

struct ThresholdResult {
    /// Largest bidder count at which the pure bundle dominates; empty if none.
    std::optional<std::size_t> threshold;
    std::vector<ThresholdRow> rows;
};

/// Compares the second-price revenue of one bundle of c objects with c separate
/// second-price auctions, for each bidder count in [min_bidders, max_bidders].
inline ThresholdResult bundle_superiority_threshold(const BundleValueModel& bundle, std::size_t min_bidders,
                                                    std::size_t max_bidders)
{
    bundle.validate();
    detail::require(min_bidders >= 2 && max_bidders >= min_bidders, "bidder range must start at 2 or above");
    const BundleValueModel single{bundle.gamma_bar_ph, 1};
    ThresholdResult r;
    for (std::size_t n = min_bidders; n <= max_bidders; ++n) {
        const double lhs = expected_second_highest(bundle, n);
        const double rhs = bundle.cardinality * expected_second_highest(single, n);
        const bool dominates = lhs > rhs;
        r.rows.push_back({n, lhs, rhs, dominates});
        if (dominates)
            r.threshold = n;
    }
    return r;
}

/// eta = expected stage revenue / expected payment per later stage.
inline double helper_advantage_eta(double expected_revenue, double expected_payment_per_stage)
{
    detail::require_positive(expected_payment_per_stage, "expected payment per stage");
    return expected_revenue / expected_payment_per_stage;
}

inline double helper_advantage_eta(const SymmetricGroupParams& p, double expected_payment_per_stage)
{
    return helper_advantage_eta(revenue_single_closed_form(p), expected_payment_per_stage);
}

} // namespace acops

#endif
