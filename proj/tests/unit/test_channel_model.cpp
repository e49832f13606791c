#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "acops/channel_model.hpp"
#include "acops/random.hpp"
#include "acops/stats.hpp"

using namespace acops;

TEST(AverageSnr, IdentityAndPathLoss)
{
    LinkParams p;
    EXPECT_DOUBLE_EQ(average_snr(p, 1.0), 1.0);
    p.distance_m = 2.0;
    EXPECT_DOUBLE_EQ(average_snr(p, 1.0), 0.125);
}

TEST(AverageSnr, RejectsInvalidParameters)
{
    LinkParams p;
    p.transmit_power_w = 0.0;
    EXPECT_THROW(average_snr(p, 1.0), std::domain_error);
    p = {};
    p.path_loss_exponent = 4.5;
    EXPECT_THROW(average_snr(p, 1.0), std::domain_error);
    p = {};
    p.half_duplex_factor = 0.7;
    EXPECT_THROW(average_snr(p, 1.0), std::domain_error);
}

TEST(AverageSnr, ShadowingMedianIsZeroDb)
{
    LinkParams p;
    Engine rng = substream(1, 0);
    std::vector<double> ratio(1000000);
    for (auto& r : ratio)
        r = average_snr(p, rng) / average_snr(p, 1.0);
    std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
    EXPECT_NEAR(ratio[ratio.size() / 2], 1.0, 0.02);
}

TEST(DrawFading, MeanAndMedian)
{
    Engine rng = substream(2, 0);
    RunningStats s;
    std::size_t below = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double g = draw_fading(1.0, rng);
        s.push(g);
        below += g < std::log(2.0);
    }
    EXPECT_GE(s.mean(), 0.997);
    EXPECT_LE(s.mean(), 1.003);
    EXPECT_NEAR(static_cast<double>(below) / n, 0.5, 0.002);
}

TEST(DrawFading, DeterministicAndValidated)
{
    Engine a = substream(3, 7), b = substream(3, 7);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(draw_fading(2.5, a), draw_fading(2.5, b));
    EXPECT_THROW(draw_fading(0.0, a), std::domain_error);
}

TEST(DrawLink, StateIsConsistent)
{
    Engine rng = substream(4, 0);
    const auto s = draw_link(3.0, rng);
    EXPECT_DOUBLE_EQ(s.gamma_bar, 3.0);
    EXPECT_DOUBLE_EQ(s.gamma, s.gamma_bar * s.fading_coeff_sq);
}

TEST(Capacity, Values)
{
    EXPECT_DOUBLE_EQ(capacity(0.0), 0.0);
    EXPECT_DOUBLE_EQ(capacity(1.0), 1.0);
    EXPECT_DOUBLE_EQ(capacity(15.0), 4.0);
    EXPECT_DOUBLE_EQ(capacity(15.0, 0.5), 2.0);
    EXPECT_THROW(capacity(-1.0), std::domain_error);
}

TEST(Capacity, MonotoneAndConcave)
{
    const double h = 0.01;
    for (double g = 0.0; g < 50.0; g += 0.25) {
        EXPECT_GT(capacity(g + h), capacity(g));
        EXPECT_LT(capacity(g + 2 * h) - 2 * capacity(g + h) + capacity(g), 0.0);
    }
}

TEST(OutageDirect, Values)
{
    EXPECT_EQ(outage_prob_direct(0.0, 1.0), 0.0);
    EXPECT_NEAR(outage_prob_direct(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_LT(outage_prob_direct(10.0, 1e12), 1e-8);
}

TEST(OutageDirect, MonotoneInRateAndSnr)
{
    for (double d = 0.0; d < 8.0; d += 0.5)
        for (double g : {0.1, 1.0, 10.0, 100.0}) {
            EXPECT_LE(outage_prob_direct(d, g), outage_prob_direct(d + 0.5, g));
            EXPECT_GE(outage_prob_direct(d + 0.5, g), outage_prob_direct(d + 0.5, g * 2.0));
            // Strict away from saturation at 1.
            if (outage_prob_direct(d + 0.5, g) < 1.0 - 1e-9) {
                EXPECT_LT(outage_prob_direct(d, g), outage_prob_direct(d + 0.5, g));
                EXPECT_GT(outage_prob_direct(d + 0.5, g), outage_prob_direct(d + 0.5, g * 2.0));
            }
        }
}

TEST(OutageDirect, MatchesMonteCarlo)
{
    Engine rng = substream(5, 0);
    Proportion p;
    for (int i = 0; i < 1000000; ++i) {
        p.successes += capacity(draw_fading(1.0, rng)) < 1.0;
        ++p.trials;
    }
    EXPECT_NEAR(p.value(), 0.632121, 0.002);
}

TEST(Ofdm, PowerDelayProfileNormalized)
{
    for (std::size_t l : {1, 4, 8, 16}) {
        const auto p = exponential_power_delay_profile(l);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-14);
        for (std::size_t m = 1; m < l; ++m)
            EXPECT_NEAR(p[m] / p[m - 1], std::exp(-1.0 / static_cast<double>(l)), 1e-12);
    }
}

TEST(Ofdm, SingleTapIsFlat)
{
    Engine rng = substream(6, 0);
    const auto s = ofdm_draw(2.0, 64, 1, rng);
    ASSERT_EQ(s.num_subcarriers(), 64u);
    for (double g : s.subcarrier_snrs)
        EXPECT_NEAR(g, s.subcarrier_snrs[0], 1e-12 * s.subcarrier_snrs[0]);
}

TEST(Ofdm, MarginalMeanPerSubcarrier)
{
    Engine rng = substream(7, 0);
    std::vector<RunningStats> per(128);
    for (int t = 0; t < 100000; ++t) {
        const auto s = ofdm_draw(1.0, 128, 8, rng);
        for (std::size_t k = 0; k < 128; ++k)
            per[k].push(s.subcarrier_snrs[k]);
    }
    for (const auto& s : per)
        EXPECT_NEAR(s.mean(), 1.0, 0.01);
}

TEST(Ofdm, AdjacentCorrelationFallsWithTaps)
{
    double previous = 1.0;
    for (std::size_t l : {2, 4, 8, 16}) {
        Engine rng = substream(8, l);
        RunningStats a, b, ab;
        for (int t = 0; t < 40000; ++t) {
            const auto s = ofdm_draw(1.0, 64, l, rng);
            a.push(s.subcarrier_snrs[10]);
            b.push(s.subcarrier_snrs[11]);
            ab.push(s.subcarrier_snrs[10] * s.subcarrier_snrs[11]);
        }
        const double corr = (ab.mean() - a.mean() * b.mean()) / (a.stddev() * b.stddev());
        EXPECT_LT(corr, previous) << "L = " << l;
        previous = corr;
    }
}

TEST(Ofdm, Validation)
{
    Engine rng = substream(9, 0);
    EXPECT_THROW(ofdm_draw(1.0, 0, 4, rng), std::domain_error);
    EXPECT_THROW(ofdm_draw(1.0, 16, 0, rng), std::domain_error);
    EXPECT_THROW(ofdm_draw(0.0, 16, 4, rng), std::domain_error);
}

TEST(OfdmCapacity, SubsetsAndAdditivity)
{
    OfdmLinkState zero{std::vector<double>(8, 0.0), 1, 1.0};
    EXPECT_EQ(ofdm_capacity(zero), 0.0);
    OfdmLinkState one{{1.0, 3.0, 7.0}, 1, 1.0};
    const std::size_t first[] = {0};
    EXPECT_DOUBLE_EQ(ofdm_capacity(one, first), 1.0);
    EXPECT_DOUBLE_EQ(ofdm_capacity(one), capacity(1.0) + capacity(3.0) + capacity(7.0));
    const std::size_t bad[] = {3};
    EXPECT_THROW(ofdm_capacity(one, bad), std::domain_error);
}

TEST(MeanSumCapacity, ReferenceValues)
{
    EXPECT_NEAR(mean_sum_capacity(1, 1.0), 0.860347382270886, 1e-12);
    EXPECT_NEAR(mean_sum_capacity(1, 0.01), 0.0142854830322384, 1e-13);
    EXPECT_NEAR(mean_sum_capacity(1, 0.1), 0.132097967802192, 1e-12);
    EXPECT_NEAR(mean_sum_capacity(1, 10.0), 2.9065148084148, 1e-11);
    EXPECT_NEAR(mean_sum_capacity(1, 100.0), 5.88404823368347, 1e-11);
    EXPECT_THROW(mean_sum_capacity(1, 1e-3), numeric_error);
}

TEST(MeanSumCapacity, LinearInJ)
{
    for (std::size_t j : {2, 16, 128})
        EXPECT_DOUBLE_EQ(mean_sum_capacity(j, 3.0), static_cast<double>(j) * mean_sum_capacity(1, 3.0));
}

TEST(GaussianCapacityApprox, MonteCarloMeanWithinHalfPercent)
{
    for (std::size_t j : {16, 64, 128}) {
        Engine rng = substream(10, j);
        const auto m = gaussian_capacity_approx(j, 1.0, 128, 8, 100000, rng);
        EXPECT_NEAR(m.mean, mean_sum_capacity(j, 1.0), 1e-12);
        Engine check = substream(11, j);
        RunningStats s;
        for (int t = 0; t < 100000; ++t) {
            const auto st = ofdm_draw(1.0, 128, 8, check);
            double c = 0.0;
            for (std::size_t k = 0; k < j; ++k)
                c += capacity(st.subcarrier_snrs[k]);
            s.push(c);
        }
        EXPECT_NEAR(s.mean() / m.mean, 1.0, 0.005) << "J = " << j;
        EXPECT_NEAR(m.variance / s.variance(), 1.0, 0.05);
    }
}
