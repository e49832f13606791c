#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "acops/random.hpp"
#include "acops/stats.hpp"
#include "acops/valuation.hpp"

using namespace acops;

namespace {

double integrate(auto f, double lo, double hi)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

/// Sup-norm gap between a histogram density estimate and `pdf` over [lo, hi).
template <class Sampler, class Pdf>
double histogram_gap(Sampler draw, Pdf pdf, double lo, double hi, int bins, int samples)
{
    std::vector<int> counts(bins, 0);
    const double width = (hi - lo) / bins;
    for (int i = 0; i < samples; ++i) {
        const double x = draw();
        if (x >= lo && x < hi)
            ++counts[static_cast<int>((x - lo) / width)];
    }
    double worst = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double a = lo + b * width;
        const double expected = integrate(pdf, a, a + width) / width;
        worst = std::max(worst, std::abs(counts[b] / (samples * width) - expected));
    }
    return worst;
}

} // namespace

TEST(PrivateValue, Examples)
{
    EXPECT_DOUBLE_EQ(private_value(3.0, 3.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(private_value(10.0, 1.0, 1.0), 9.0);
    EXPECT_DOUBLE_EQ(private_value(10.0, 1.0, 2.0), 4.0);
    EXPECT_THROW(private_value(1.0, 1.0, 0.0), std::domain_error);
}

TEST(PvPdf, PeakAndContinuity)
{
    const PrivateValueModel m{1.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(pv_pdf(0.0, m), 0.5);
    const PrivateValueModel k{4.0, 2.0, 3.0};
    EXPECT_NEAR(pv_pdf(1e-12, k), pv_pdf(-1e-12, k), 1e-12);
}

TEST(PvPdf, IntegratesToOne)
{
    for (const PrivateValueModel m : {PrivateValueModel{1, 1, 1}, {10, 1, 1}, {3, 2, 0.5}, {1, 5, 4}}) {
        const double total = integrate([&](double x) { return pv_pdf(x, m); }, -200.0, 0.0) +
                             integrate([&](double x) { return pv_pdf(x, m); }, 0.0, 200.0);
        EXPECT_NEAR(total, 1.0, 1e-6);
    }
}

TEST(PvPdf, MatchesSampledHistogram)
{
    // Convolution sampling: X = gamma_PH / alpha - gamma_BS from exponential draws.
    for (const PrivateValueModel m : {PrivateValueModel{1, 1, 1}, {3, 1, 2}}) {
        Engine rng = substream(21, static_cast<std::uint64_t>(m.alpha));
        std::exponential_distribution<double> ph(1.0 / m.gamma_bar_ph), bs(1.0 / m.gamma_bar_bs);
        const double gap = histogram_gap([&] { return private_value(ph(rng), bs(rng), m.alpha); },
                                         [&](double x) { return pv_pdf(x, m); }, -5.0, 5.0, 50, 1000000);
        EXPECT_LT(gap, 0.01);
    }
}

TEST(PvCdf, LimitsAndSymmetricSplit)
{
    const PrivateValueModel m{2.0, 2.0, 1.0};
    EXPECT_DOUBLE_EQ(pv_cdf(0.0, m), 0.5);
    EXPECT_NEAR(pv_cdf(1e3, m), 1.0, 1e-15);
    EXPECT_NEAR(pv_cdf(-1e3, m), 0.0, 1e-15);
}

TEST(PvCdf, DerivativeMatchesPdf)
{
    const PrivateValueModel m{5.0, 1.0, 2.0};
    for (double x = -6.0; x <= 6.0; x += 0.25) {
        if (std::abs(x) < 1e-9)
            continue;
        const double h = 1e-5;
        EXPECT_NEAR((pv_cdf(x + h, m) - pv_cdf(x - h, m)) / (2 * h), pv_pdf(x, m), 1e-6) << x;
    }
}

TEST(PvCdf, Monotone)
{
    const PrivateValueModel m{2.0, 0.5, 1.5};
    double prev = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.1) {
        EXPECT_GE(pv_cdf(x, m), prev);
        EXPECT_GE(pv_pdf(x, m), 0.0);
        prev = pv_cdf(x, m);
    }
}

TEST(PositiveValueProb, ExamplesAndMonteCarlo)
{
    EXPECT_DOUBLE_EQ(positive_value_prob({1, 1, 1}), 0.5);
    EXPECT_NEAR(positive_value_prob({10, 1, 1}), 10.0 / 11.0, 1e-15);
    const PrivateValueModel m{10, 1, 1};
    Engine rng = substream(22, 0);
    Proportion p;
    for (int i = 0; i < 1000000; ++i) {
        p.successes += sample_private_value(m, rng) > 0.0;
        ++p.trials;
    }
    const double exact = positive_value_prob(m);
    EXPECT_LE(std::abs(p.value() - exact), 3.0 * p.sigma_at(exact));
}

TEST(BundlePdf, ReducesToExponentialAndNormalizes)
{
    const BundleValueModel one{2.0, 1};
    for (double y : {0.0, 0.5, 3.0})
        EXPECT_NEAR(bundle_pdf(y, one), 0.5 * std::exp(-y / 2.0), 1e-15);
    EXPECT_EQ(bundle_pdf(-1.0, one), 0.0);
    for (unsigned c : {1u, 2u, 5u, 32u}) {
        const BundleValueModel m{1.5, c};
        const double total = integrate([&](double y) { return bundle_pdf(y, m); }, 0.0, 1.5 * (c + 40.0 * std::sqrt(c)));
        EXPECT_NEAR(total, 1.0, 1e-6) << c;
    }
}

TEST(BundlePdf, ModeOfErlangTwo)
{
    const BundleValueModel m{1.0, 2};
    EXPECT_GT(bundle_pdf(1.0, m), bundle_pdf(0.999, m));
    EXPECT_GT(bundle_pdf(1.0, m), bundle_pdf(1.001, m));
}

TEST(BundleCdf, MatchesRegularizedGammaAndIntegral)
{
    for (unsigned c : {1u, 2u, 7u, 40u}) {
        const BundleValueModel m{2.0, c};
        EXPECT_EQ(bundle_cdf(0.0, m), 0.0);
        EXPECT_NEAR(bundle_cdf(1e4, m), 1.0, 1e-15);
        for (double y : {0.01, 0.5, 2.0, 10.0, 50.0, 120.0}) {
            EXPECT_NEAR(bundle_cdf(y, m), boost::math::gamma_p(static_cast<double>(c), y / 2.0), 1e-13) << c << " " << y;
            EXPECT_NEAR(bundle_cdf(y, m), integrate([&](double t) { return bundle_pdf(t, m); }, 0.0, y), 1e-6);
        }
    }
    EXPECT_NEAR(bundle_cdf(3.0, {1.5, 1}), 1.0 - std::exp(-2.0), 1e-15);
}

TEST(BundleValue, OneSidedApproximationAtTenDb)
{
    // Total variation between the positive part of the exact private value
    // and the one-sided exponential, at a 10 dB gap.
    const PrivateValueModel m{10.0, 1.0, 1.0};
    const BundleValueModel e{10.0, 1};
    const double atom = pv_cdf(0.0, m);
    const double cont = integrate([&](double x) { return std::abs(pv_pdf(x, m) - bundle_pdf(x, e)); }, 0.0, 500.0);
    EXPECT_LT(0.5 * (atom + cont), 0.1);
}

TEST(BundleValue, SumOfPositivePartsMatchesErlang)
{
    const PrivateValueModel m{100.0, 1.0, 1.0};
    const unsigned c = 4;
    const BundleValueModel b{100.0, c};
    Engine rng = substream(23, 0);
    const double gap = histogram_gap(
        [&] {
            double y = 0.0;
            for (unsigned k = 0; k < c; ++k)
                y += std::max(sample_private_value(m, rng), 0.0);
            return y / 100.0;
        },
        [&](double u) { return 100.0 * bundle_pdf(100.0 * u, b); }, 0.0, 12.0, 48, 1000000);
    EXPECT_LT(gap, 0.01);
}

TEST(BundleValue, SamplerMatchesMoments)
{
    const BundleValueModel m{3.0, 5};
    Engine rng = substream(24, 0);
    RunningStats s;
    for (int i = 0; i < 200000; ++i)
        s.push(sample_bundle_value(m, rng));
    EXPECT_NEAR(s.mean(), 15.0, 4.0 * std::sqrt(45.0 / 200000.0));
}
