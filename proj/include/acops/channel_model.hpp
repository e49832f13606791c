#ifndef ACOPS_CHANNEL_MODEL_HPP
#define ACOPS_CHANNEL_MODEL_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "acops/errors.hpp"
#include "acops/special_functions.hpp"
#include "acops/stats.hpp"

namespace acops {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Large-scale link budget of one link.
struct LinkParams {
    double transmit_power_w = 1.0;
    double noise_density_w_per_hz = 1.0;
    double bandwidth_hz = 1.0;
    double gain_tx = 1.0;
    double gain_rx = 1.0;
    double distance_m = 1.0;
    double path_loss_exponent = 3.0;
    double shadowing_sigma_db = 8.0;
    double half_duplex_factor = 1.0;

    void validate() const
    {
        detail::require_positive(transmit_power_w, "transmit_power");
        detail::require_positive(noise_density_w_per_hz, "noise_density");
        detail::require_positive(bandwidth_hz, "bandwidth");
        detail::require_positive(gain_tx, "gain_tx");
        detail::require_positive(gain_rx, "gain_rx");
        detail::require_positive(distance_m, "distance");
        detail::require(path_loss_exponent >= 2.0 && path_loss_exponent <= 4.0,
                        "path_loss_exponent must lie in [2, 4]");
        detail::require_non_negative(shadowing_sigma_db, "shadowing_sigma_db");
        detail::require(half_duplex_factor == 0.5 || half_duplex_factor == 1.0,
                        "half_duplex_factor must be 0.5 or 1.0");
    }
};

/// A drawn small-scale fading realization on top of an average SNR.
struct LinkState {
    double gamma_bar;
    double gamma;
    double fading_coeff_sq;
};

struct OfdmLinkState {
    std::vector<double> subcarrier_snrs;
    std::size_t num_taps = 1;
    double gamma_bar = 1.0;

    std::size_t num_subcarriers() const { return subcarrier_snrs.size(); }
};

/// Average SNR (P_T / (N_0 W)) G_T G_R s d^-a for a given shadowing factor s.
inline double average_snr(const LinkParams& p, double shadow_factor)
{
    p.validate();
    detail::require_positive(shadow_factor, "shadow_factor");
    return p.transmit_power_w / (p.noise_density_w_per_hz * p.bandwidth_hz) * p.gain_tx * p.gain_rx * shadow_factor *
           std::pow(p.distance_m, -p.path_loss_exponent);
}

/// Log-normal shadowing factor with zero-dB median.
template <class Rng>
double draw_shadowing(double sigma_db, Rng& rng)
{
    detail::require_non_negative(sigma_db, "shadowing_sigma_db");
    std::normal_distribution<double> z(0.0, sigma_db);
    return db_to_linear(z(rng));
}

template <class Rng>
double average_snr(const LinkParams& p, Rng& rng)
{
    return average_snr(p, draw_shadowing(p.shadowing_sigma_db, rng));
}

/// Instantaneous Rayleigh-faded SNR: exponential with mean `gamma_bar`.
template <class Rng>
double draw_fading(double gamma_bar, Rng& rng)
{
    detail::require_positive(gamma_bar, "gamma_bar");
    return std::exponential_distribution<double>(1.0 / gamma_bar)(rng);
}

template <class Rng>
LinkState draw_link(double gamma_bar, Rng& rng)
{
    detail::require_positive(gamma_bar, "gamma_bar");
    const double h2 = std::exponential_distribution<double>(1.0)(rng);
    return {gamma_bar, gamma_bar * h2, h2};
}

/// log2(1 + gamma), scaled by the half-duplex factor.
inline double capacity(double gamma, double half_duplex_factor = 1.0)
{
    detail::require_non_negative(gamma, "gamma");
    return half_duplex_factor * std::log2(1.0 + gamma);
}

/// Pr(C(gamma) < rate) under Rayleigh fading with mean SNR `gamma_bar`.
inline double outage_prob_direct(double rate, double gamma_bar)
{
    detail::require_non_negative(rate, "rate");
    detail::require_positive(gamma_bar, "gamma_bar");
    return -std::expm1(-std::expm1(rate * std::numbers::ln2) / gamma_bar);
}

/// Normalized tap powers p_m proportional to exp(-m / L), m = 0..L-1.
inline std::vector<double> exponential_power_delay_profile(std::size_t num_taps)
{
    detail::require(num_taps >= 1, "num_taps must be >= 1");
    std::vector<double> p(num_taps);
    double total = 0.0;
    for (std::size_t m = 0; m < num_taps; ++m) {
        p[m] = std::exp(-static_cast<double>(m) / static_cast<double>(num_taps));
        total += p[m];
    }
    for (double& v : p)
        v /= total;
    return p;
}

/// Frequency-selective block-fading draw: L Rayleigh taps with an exponential
/// power-delay profile, one tap per sample, transformed onto K subcarriers.
template <class Rng>
OfdmLinkState ofdm_draw(double gamma0, std::size_t num_subcarriers, std::size_t num_taps, Rng& rng)
{
    detail::require_positive(gamma0, "gamma0");
    detail::require(num_subcarriers >= 1, "num_subcarriers must be >= 1");
    const auto profile = exponential_power_delay_profile(num_taps);

    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<std::complex<double>> taps(num_taps);
    for (std::size_t m = 0; m < num_taps; ++m) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        taps[m] = std::sqrt(profile[m]) * std::complex<double>(re, im);
    }

    OfdmLinkState state;
    state.num_taps = num_taps;
    state.gamma_bar = gamma0;
    state.subcarrier_snrs.resize(num_subcarriers);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(num_subcarriers);
    for (std::size_t k = 0; k < num_subcarriers; ++k) {
        std::complex<double> h{0.0, 0.0};
        for (std::size_t m = 0; m < num_taps; ++m)
            h += taps[m] * std::polar(1.0, step * static_cast<double>(k * m % num_subcarriers));
        state.subcarrier_snrs[k] = gamma0 * std::norm(h);
    }
    return state;
}

/// Sum of log2(1 + gamma_k) over `subset`.
inline double ofdm_capacity(const OfdmLinkState& state, std::span<const std::size_t> subset, double half_duplex_factor = 1.0)
{
    double total = 0.0;
    for (std::size_t k : subset) {
        detail::require(k < state.subcarrier_snrs.size(), "subcarrier index out of range");
        total += std::log2(1.0 + state.subcarrier_snrs[k]);
    }
    return half_duplex_factor * total;
}

inline double ofdm_capacity(const OfdmLinkState& state, double half_duplex_factor = 1.0)
{
    double total = 0.0;
    for (double g : state.subcarrier_snrs)
        total += std::log2(1.0 + g);
    return half_duplex_factor * total;
}

/// Exact mean of the sum capacity of J Rayleigh subchannels with mean SNR gamma0:
/// -(J / ln 2) e^{1/gamma0} Ei(-1/gamma0).
inline double mean_sum_capacity(std::size_t num_subchannels, double gamma0)
{
    detail::require(num_subchannels >= 1, "J must be >= 1");
    detail::require_positive(gamma0, "gamma0");
    const double inv = 1.0 / gamma0;
    if (inv > 700.0)
        throw numeric_error("gamma0 too small for e^{1/gamma0} Ei(-1/gamma0)");
    return -static_cast<double>(num_subchannels) / std::numbers::ln2 * std::exp(inv) * expint_ei(-inv);
}

struct CapacityMoments {
    double mean;
    double variance;

    double stddev() const { return std::sqrt(variance); }
};

/// Gaussian approximation of the sum capacity over J contiguous subcarriers.
/// The mean is exact; the variance (which carries the subcarrier covariances)
/// is the sample variance over `samples` channel draws.
template <class Rng>
CapacityMoments gaussian_capacity_approx(std::size_t num_subchannels, double gamma0, std::size_t num_subcarriers,
                                         std::size_t num_taps, std::size_t samples, Rng& rng)
{
    detail::require(num_subchannels >= 1 && num_subchannels <= num_subcarriers, "J must lie in [1, K]");
    detail::require(samples >= 2, "need at least two samples");
    const double mu = mean_sum_capacity(num_subchannels, gamma0);
    RunningStats stats;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto state = ofdm_draw(gamma0, num_subcarriers, num_taps, rng);
        double c = 0.0;
        for (std::size_t k = 0; k < num_subchannels; ++k)
            c += std::log2(1.0 + state.subcarrier_snrs[k]);
        stats.push(c);
    }
    return {mu, stats.variance()};
}

} // namespace acops

#endif
