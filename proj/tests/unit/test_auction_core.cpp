#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "acops/auction_core.hpp"
#include "acops/random.hpp"
#include "acops/stats.hpp"

using namespace acops;

namespace {

AuctionOutcome auction(std::vector<double> bids, PricingRule rule, std::vector<double> values, Engine& rng)
{
    return run_auction(std::span<const double>(bids), AuctionConfig{rule}, std::span<const double>(values), rng);
}

} // namespace

TEST(EstimateRivals, DegenerateAndMoments)
{
    Engine rng = substream(31, 0);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(estimate_rivals(0.0, rng), 0u);
    RunningStats s;
    for (int i = 0; i < 1000000; ++i)
        s.push(estimate_rivals(3.0, rng));
    EXPECT_NEAR(s.mean(), 3.0, 0.01);
    EXPECT_NEAR(s.variance(), 3.0, 0.02);
    Proportion zero;
    for (int i = 0; i < 1000000; ++i) {
        zero.successes += estimate_rivals(1.0, rng) == 0;
        ++zero.trials;
    }
    EXPECT_NEAR(zero.value(), std::exp(-1.0), 0.002);
    EXPECT_THROW(estimate_rivals(-1.0, rng), std::domain_error);
}

TEST(BestResponse, TruthfulAndClamped)
{
    EXPECT_DOUBLE_EQ(best_response(3.2, 5), 3.2);
    EXPECT_EQ(best_response(-1.0, 0), 0.0);
    EXPECT_EQ(best_response(-1.0, 9), 0.0);
    EXPECT_EQ(best_response(0.0), 0.0);
    EXPECT_DOUBLE_EQ(budgeted_bid(5.0, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(budgeted_bid(-5.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(budgeted_bid(1.0, 0.0), 0.0);
}

TEST(RunAuction, SecondAndFirstPrice)
{
    Engine rng = substream(32, 0);
    const auto sp = auction({3, 2, 1}, PricingRule::second_price, {4, 2, 1}, rng);
    ASSERT_TRUE(sp.sold());
    EXPECT_EQ(*sp.winner, 0u);
    EXPECT_DOUBLE_EQ(sp.payment, 2.0);
    EXPECT_DOUBLE_EQ(sp.payoffs[0], 2.0);
    EXPECT_EQ(sp.payoffs[1], 0.0);
    const auto fp = auction({3, 2, 1}, PricingRule::first_price, {4, 2, 1}, rng);
    EXPECT_EQ(*fp.winner, 0u);
    EXPECT_DOUBLE_EQ(fp.payment, 3.0);
    EXPECT_DOUBLE_EQ(fp.payoffs[0], 1.0);
}

TEST(RunAuction, NoSaleAndErrors)
{
    Engine rng = substream(33, 0);
    const auto none = auction({0, 0}, PricingRule::second_price, {-1, -2}, rng);
    EXPECT_FALSE(none.sold());
    EXPECT_EQ(none.payment, 0.0);
    const auto lone = auction({2.5}, PricingRule::second_price, {2.5}, rng);
    EXPECT_TRUE(lone.sold());
    EXPECT_EQ(lone.payment, 0.0);
    EXPECT_THROW(auction({}, PricingRule::second_price, {}, rng), std::domain_error);
    EXPECT_THROW(auction({1, -1}, PricingRule::second_price, {1, -1}, rng), std::domain_error);
}

TEST(RunAuction, TiesSplitEvenly)
{
    Engine rng = substream(34, 0);
    std::size_t first = 0;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        const auto o = auction({5, 5}, PricingRule::second_price, {5, 5}, rng);
        first += *o.winner == 0;
        EXPECT_EQ(o.payment, 5.0);
    }
    EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.01);
}

TEST(RunAuction, EfficiencyAndNonNegativePayoff)
{
    Engine rng = substream(35, 0);
    const PrivateValueModel m{2.0, 1.0, 1.0};
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> v(5), b(5);
        for (std::size_t i = 0; i < 5; ++i) {
            v[i] = sample_private_value(m, rng);
            b[i] = best_response(v[i]);
        }
        const auto o = auction(b, PricingRule::second_price, v, rng);
        const auto best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
        if (v[best] > 0.0) {
            ASSERT_TRUE(o.sold());
            EXPECT_EQ(*o.winner, best);
            EXPECT_GE(o.payoffs[best], 0.0);
        } else {
            EXPECT_FALSE(o.sold());
        }
    }
}

TEST(RunAuction, TruthfulBiddingIsDominantInExpectation)
{
    // For a fixed own value, no deviation on a grid beats truthful bidding
    // averaged over redrawn rivals.
    Engine rng = substream(36, 0);
    const PrivateValueModel m{1.0, 1.0, 1.0};
    std::uniform_real_distribution<double> own(-1.0, 4.0);
    for (int inst = 0; inst < 200; ++inst) {
        const double x = own(rng);
        const std::vector<double> grid{0.0, 0.25 * std::max(x, 0.0), 0.5 * std::max(x, 0.0) + 0.1, x + 0.5, x + 2.0};
        std::vector<RunningStats> gain(grid.size());
        for (int r = 0; r < 50; ++r) {
            std::vector<double> v(4), b(4);
            v[0] = x;
            for (std::size_t i = 1; i < 4; ++i) {
                v[i] = sample_private_value(m, rng);
                b[i] = best_response(v[i]);
            }
            b[0] = best_response(x);
            const double truthful = auction(b, PricingRule::second_price, v, rng).payoffs[0];
            for (std::size_t g = 0; g < grid.size(); ++g) {
                auto d = b;
                d[0] = std::max(grid[g], 0.0);
                gain[g].push(auction(d, PricingRule::second_price, v, rng).payoffs[0] - truthful);
            }
        }
        for (const auto& g : gain)
            EXPECT_LE(g.mean(), 1e-12);
    }
}

TEST(FirstPriceBid, ShadesBelowValueAndIncreases)
{
    const PrivateValueModel m{2.0, 1.0, 1.0};
    EXPECT_EQ(first_price_bid(-1.0, m, 5), 0.0);
    EXPECT_EQ(first_price_bid(3.0, m, 1), 0.0);
    double prev = 0.0;
    for (double x = 0.05; x < 20.0; x *= 1.5) {
        const double b = first_price_bid(x, m, 5);
        EXPECT_GT(b, prev);
        EXPECT_LT(b, x);
        prev = b;
    }
}

TEST(SimulateRevenue, LoneBidderPaysNothing)
{
    const auto r = simulate_revenue({1, 1, 1}, 1, AuctionConfig{}, 1000, 7);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.trials, 1000u);
}

TEST(SimulateRevenue, TwoSymmetricBiddersMatchIndependentOracle)
{
    // Both values positive with probability 1/4; the minimum of two unit
    // exponentials has mean 1/2, so the expected payment is 1/8.
    const auto r = simulate_revenue({1, 1, 1}, 2, AuctionConfig{}, 1000000, 8);
    EXPECT_LE(std::abs(r.mean - 0.125), 3.0 * r.std_error);

    Engine rng = substream(37, 0);
    std::exponential_distribution<double> e(1.0);
    RunningStats oracle;
    for (int t = 0; t < 10000000; ++t) {
        const double a = std::max(e(rng) - e(rng), 0.0);
        const double b = std::max(e(rng) - e(rng), 0.0);
        oracle.push(std::min(a, b));
    }
    EXPECT_LE(std::abs(r.mean - oracle.mean()), 3.0 * std::hypot(r.std_error, oracle.stderr_of_mean()));
}

TEST(SimulateRevenue, FirstAndSecondPriceAgreeAtFive)
{
    const PrivateValueModel m{1.0, 1.0, 1.0};
    const auto sp = simulate_revenue(m, 5, AuctionConfig{PricingRule::second_price}, 200000, 9);
    const auto fp = simulate_revenue(m, 5, AuctionConfig{PricingRule::first_price}, 200000, 10);
    EXPECT_LE(std::abs(sp.mean - fp.mean), 3.0 * std::hypot(sp.std_error, fp.std_error));
}

TEST(SimulateRevenue, IndependentOfThreadCount)
{
    const PrivateValueModel m{3.0, 1.0, 1.0};
    const auto a = simulate_revenue(m, 4, AuctionConfig{}, 3 * kBlockSize + 5, 11, 1);
    const auto b = simulate_revenue(m, 4, AuctionConfig{}, 3 * kBlockSize + 5, 11, 3);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}
