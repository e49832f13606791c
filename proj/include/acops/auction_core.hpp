#ifndef ACOPS_AUCTION_CORE_HPP
#define ACOPS_AUCTION_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "acops/errors.hpp"
#include "acops/random.hpp"
#include "acops/stats.hpp"
#include "acops/valuation.hpp"

namespace acops {

enum class PricingRule { first_price, second_price };

/// (private value, rival estimate) type of a bidder, plus its budget in
/// sequential play.
struct BidderType {
    double private_value = 0.0;
    unsigned rival_estimate = 0;
    double budget = std::numeric_limits<double>::infinity();
};

struct AuctionConfig {
    PricingRule pricing_rule = PricingRule::second_price;
    /// The helper places no value on its surplus rate.
    static constexpr double reserve_price = 0.0;
};

struct AuctionOutcome {
    std::optional<std::size_t> winner;
    double payment = 0.0;
    std::vector<double> payoffs;
    std::vector<double> bids;

    bool sold() const { return winner.has_value(); }
};

/// Poisson estimate of the number of rival bidders.
template <class Rng>
unsigned estimate_rivals(double mean, Rng& rng)
{
    detail::require_non_negative(mean, "rival estimate mean");
    if (mean == 0.0)
        return 0;
    return std::poisson_distribution<unsigned>(mean)(rng);
}

/// Dominant second-price strategy: bid the value, abstain when it is not positive.
/// The rival estimate does not change the bid.
inline double best_response(double value, unsigned /*rival_estimate*/ = 0)
{
    return std::max(value, 0.0);
}

/// Sequential-game bid: truthful bid clamped to the remaining budget.
inline double budgeted_bid(double value, double budget)
{
    return std::min(best_response(value), std::max(budget, 0.0));
}

namespace detail {

struct Award {
    std::optional<std::size_t> winner;
    double top = 0.0;
    double second = 0.0;
};

/// Highest positive bid wins, ties broken uniformly at random. `eligible`, when
/// non-empty, masks out bidders. The rng is consumed only on ties.
template <class Rng>
Award award(std::span<const double> bids, Rng& rng, std::span<const char> eligible = {})
{
    Award a;
    std::size_t ties = 0;
    std::size_t leader = 0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (!eligible.empty() && !eligible[i])
            continue;
        const double b = bids[i];
        if (b > a.top) {
            a.second = a.top;
            a.top = b;
            leader = i;
            ties = 1;
        } else if (b == a.top && b > 0.0) {
            a.second = b;
            ++ties;
        } else if (b > a.second) {
            a.second = b;
        }
    }
    if (a.top <= 0.0)
        return a;
    if (ties == 1) {
        a.winner = leader;
        return a;
    }
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, ties - 1)(rng);
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (!eligible.empty() && !eligible[i])
            continue;
        if (bids[i] == a.top && pick-- == 0) {
            a.winner = i;
            break;
        }
    }
    return a;
}

} // namespace detail

/// Sealed-bid single-object auction. All-zero bids mean no sale.
template <class Rng>
AuctionOutcome run_auction(std::span<const double> bids, const AuctionConfig& config, std::span<const double> values,
                           Rng& rng)
{
    detail::require(!bids.empty(), "run_auction needs at least one bid");
    detail::require(values.size() == bids.size(), "bids and values differ in length");
    for (double b : bids)
        detail::require_non_negative(b, "bid");

    AuctionOutcome out;
    out.bids.assign(bids.begin(), bids.end());
    out.payoffs.assign(bids.size(), 0.0);
    const auto a = detail::award(bids, rng);
    if (!a.winner)
        return out;

    out.winner = a.winner;
    const std::size_t w = *a.winner;
    out.payment = config.pricing_rule == PricingRule::second_price ? std::max(a.second, AuctionConfig::reserve_price)
                                                                   : bids[w];
    out.payoffs[w] = values[w] - out.payment;
    return out;
}

/// Symmetric first-price equilibrium bid with zero reserve for `num_bidders`
/// potential bidders whose values follow `model`:
///   b(x) = x - int_0^x F(t)^{N-1} dt / F(x)^{N-1},  x > 0.
/// Values at or below zero abstain.
inline double first_price_bid(double value, const PrivateValueModel& model, std::size_t num_bidders)
{
    if (value <= 0.0)
        return 0.0;
    if (num_bidders <= 1)
        return 0.0;
    const double k = static_cast<double>(num_bidders - 1);
    auto integrand = [&](double t) { return std::pow(pv_cdf(t, model), k); };
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    // The integrand bends on the scale of the positive branch and is flat beyond.
    const double knee = std::min(value, 8.0 * model.positive_scale());
    double area = Gauss::integrate(integrand, 0.0, knee);
    if (value > knee)
        area += Gauss::integrate(integrand, knee, value);
    return value - area / std::pow(pv_cdf(value, model), k);
}

struct RevenueEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Monte Carlo seller revenue with `num_users` i.i.d. weak users. Users bid only
/// with positive values; first-price bidders shade with first_price_bid.
inline RevenueEstimate simulate_revenue(const PrivateValueModel& model, std::size_t num_users, const AuctionConfig& config,
                                        std::size_t trials, std::uint64_t seed, unsigned threads = 0)
{
    model.validate();
    detail::require(num_users >= 1, "need at least one user");
    detail::require(trials >= 1, "need at least one trial");

    auto parts = run_blocks<RunningStats>(seed, trials, threads, [&](Engine& rng, std::size_t first, std::size_t last) {
        RunningStats acc;
        std::vector<double> values(num_users), bids(num_users);
        for (std::size_t t = first; t < last; ++t) {
            for (std::size_t i = 0; i < num_users; ++i) {
                values[i] = sample_private_value(model, rng);
                bids[i] = config.pricing_rule == PricingRule::second_price
                              ? best_response(values[i])
                              : first_price_bid(values[i], model, num_users);
            }
            const auto out = run_auction(std::span<const double>(bids), config, std::span<const double>(values), rng);
            acc.push(out.payment);
        }
        return acc;
    });
    const auto total = merge_all(parts);
    return {total.mean(), total.stderr_of_mean(), total.count()};
}

} // namespace acops

#endif
