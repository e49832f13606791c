#ifndef ACOPS_VALIDATION_HPP
#define ACOPS_VALIDATION_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "acops/analytic.hpp"
#include "acops/auction_core.hpp"
#include "acops/bundle_auction.hpp"
#include "acops/channel_model.hpp"
#include "acops/config.hpp"
#include "acops/experiments.hpp"
#include "acops/netsim.hpp"
#include "acops/special_functions.hpp"
#include "acops/valuation.hpp"

namespace acops {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(double v) { return format_number(v); }

inline double quad(const std::function<double(double)>& f, double lo, double hi)
{
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-12);
}

} // namespace detail

/// Fast invariant and oracle checks, a few seconds in total. Every check uses
/// its own substream of `seed`.
inline std::vector<CheckResult> run_validation(std::uint64_t seed, unsigned threads = 0)
{
    using detail::fmt;
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool ok, std::string d) { out.push_back({std::move(name), ok, std::move(d)}); };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, false, std::string("threw: ") + e.what());
        }
    };

    guarded("exponential_integral", [&] {
        const std::pair<double, double> table[] = {{-0.1, -1.8229239584193906159}, {-1.0, -0.21938393439552027368},
                                                   {-5.0, -0.0011482955912753257973}, {0.5, 0.45421990486317357992},
                                                   {10.0, 2492.2289762418777591}};
        double worst = 0.0;
        for (auto [x, ref] : table)
            worst = std::max(worst, std::abs(expint_ei(x) - ref) / std::abs(ref));
        add("exponential_integral", worst < 1e-10, "max relative error " + fmt(worst));
    });

    guarded("mean_sum_capacity", [&] {
        const double v = mean_sum_capacity(1, 1.0);
        add("mean_sum_capacity", std::abs(v - 0.860347382270886) < 1e-9, "mu_c(1, 1) = " + fmt(v));
    });

    guarded("direct_outage_oracle", [&] {
        bool ok = true;
        std::string d;
        std::uint64_t stream = 1;
        for (auto [rate, g] : {std::pair{1.0, 1.0}, {2.0, 10.0}, {0.5, 0.3}}) {
            Engine rng = substream(seed, stream++);
            Proportion p;
            for (int t = 0; t < 200000; ++t) {
                p.successes += capacity(draw_fading(g, rng)) < rate;
                ++p.trials;
            }
            const double exact = outage_prob_direct(rate, g);
            ok = ok && std::abs(p.value() - exact) <= 3.0 * p.sigma_at(exact);
            d += fmt(p.value()) + " vs " + fmt(exact) + "; ";
        }
        add("direct_outage_oracle", ok, d);
    });

    guarded("pdf_normalization", [&] {
        const PrivateValueModel pv{3.0, 1.0, 1.5};
        const double a = detail::quad([&](double x) { return pv_pdf(x, pv); }, -200.0, 0.0) +
                         detail::quad([&](double x) { return pv_pdf(x, pv); }, 0.0, 200.0);
        const BundleValueModel bm{2.0, 5};
        const double b = detail::quad([&](double y) { return bundle_pdf(y, bm); }, 0.0, 200.0);
        add("pdf_normalization", std::abs(a - 1.0) < 1e-6 && std::abs(b - 1.0) < 1e-6,
            "private value " + fmt(a) + ", bundle " + fmt(b));
    });

    guarded("cdf_derivative", [&] {
        const PrivateValueModel pv{2.0, 1.0, 1.0};
        double worst = 0.0;
        for (double x = -5.0; x <= 5.0; x += 0.37) {
            const double h = 1e-5;
            worst = std::max(worst, std::abs((pv_cdf(x + h, pv) - pv_cdf(x - h, pv)) / (2 * h) - pv_pdf(x, pv)));
        }
        add("cdf_derivative", worst < 1e-6, "max deviation " + fmt(worst));
    });

    guarded("second_price_truthfulness", [&] {
        Engine rng = substream(seed, 10);
        std::uniform_real_distribution<double> u(-2.0, 10.0);
        std::size_t violations = 0;
        for (int t = 0; t < 2000; ++t) {
            std::vector<double> values(4), bids(4);
            for (std::size_t i = 0; i < 4; ++i) {
                values[i] = u(rng);
                bids[i] = best_response(values[i]);
            }
            const auto base = run_auction(std::span<const double>(bids), AuctionConfig{}, std::span<const double>(values), rng);
            for (double dev : {0.0, 0.5 * values[0], values[0] + 1.0, 20.0}) {
                auto b2 = bids;
                b2[0] = std::max(dev, 0.0);
                const auto o = run_auction(std::span<const double>(b2), AuctionConfig{}, std::span<const double>(values), rng);
                // Ties are measure zero for continuous values.
                if (o.payoffs[0] > base.payoffs[0] + 1e-12)
                    ++violations;
            }
        }
        add("second_price_truthfulness", violations == 0, std::to_string(violations) + " profitable deviations");
    });

    guarded("bundle_argmax_efficiency", [&] {
        Engine rng = substream(seed, 11);
        std::normal_distribution<double> g(0.0, 3.0);
        bool ok = true;
        for (int t = 0; t < 500 && ok; ++t) {
            ValueMatrix v(5, 4);
            for (std::size_t i = 0; i < 5; ++i)
                for (double& x : v.row(i))
                    x = g(rng);
            const auto o = run_bundle_auction(truthful_bids(v), v, rng);
            for (std::size_t k = 0; k < 4; ++k) {
                std::size_t best = 0;
                for (std::size_t i = 1; i < 5; ++i)
                    if (v(i, k) > v(best, k))
                        best = i;
                const bool any = v(best, k) > 0.0;
                ok = ok && (any ? o.awards[k].winner == best : !o.awards[k].winner);
            }
        }
        add("bundle_argmax_efficiency", ok, ok ? "exact" : "winner differs from argmax");
    });

    guarded("closed_forms", [&] {
        const SymmetricGroupParams p{1.0, 1.0, 1.0, 5};
        const double psi = win_prob_single(p);
        const double bound = outage_single_bound(1.0, p);
        add("closed_forms", std::abs(psi - 0.2876302083333333) < 1e-12 && std::abs(bound - 0.547850556776478667) < 1e-12,
            "Psi = " + fmt(psi) + ", bound = " + fmt(bound));
    });

    guarded("no_cooperation_oracle", [&] {
        auto c = NetworkConfig::symmetric(5, 2.0, 3.0, 10.0);
        c.trials = 40000;
        c.seed = seed;
        const auto p = estimate_outage(c, SelectionPolicy::no_cooperation, threads);
        const double exact = outage_prob_direct(2.0, 3.0);
        add("no_cooperation_oracle", std::abs(p.mean_outage() - exact) <= 3.0 * p.outage.sigma_at(exact),
            fmt(p.mean_outage()) + " vs " + fmt(exact));
    });

    guarded("thread_invariance", [&] {
        auto c = NetworkConfig::symmetric(5, 2.0, 1.0, 10.0);
        c.trials = 3 * kBlockSize + 17;
        c.seed = seed;
        const auto a = estimate_outage(c, SelectionPolicy::acops_single, 1);
        const auto b = estimate_outage(c, SelectionPolicy::acops_single, 4);
        add("thread_invariance",
            a.outage.successes == b.outage.successes && a.revenue.mean() == b.revenue.mean(),
            std::to_string(a.outage.successes) + " / " + std::to_string(b.outage.successes));
    });

    guarded("money_conservation", [&] {
        SequentialConfig s;
        s.replications = 8;
        s.seed = seed;
        const auto r = run_sequential(s, threads);
        add("money_conservation", r.conservation_violations == 0 && r.negative_budgets == 0 && r.overbids == 0,
            std::to_string(r.auctions) + " auctions, " + std::to_string(r.conservation_violations) + " violations");
    });

    guarded("feedback_table", [&] {
        FeedbackAccount a;
        const double acops = feedback_overhead(a);
        a.policy = FeedbackPolicy::central_single;
        const double central = feedback_overhead(a);
        add("feedback_table", acops == 100.0 && central == 1250.0, fmt(acops) + " vs " + fmt(central) + " bits");
    });

    guarded("partition_invariant", [&] {
        bool ok = true;
        for (std::size_t k : {1, 5, 16, 128})
            for (std::size_t n = 1; n <= std::min<std::size_t>(k, 12); ++n) {
                const auto p = partition_uniform(k, n);
                p.validate();
                ok = ok && p.num_bundles() == n;
            }
        add("partition_invariant", ok, "uniform partitions disjoint and complete");
    });

    guarded("config_round_trip", [&] {
        const auto c = parse_config("{\"num_users\": 3, \"direct_snr_db\": [1.5, -2, 7.25], \"sweep\": "
                                    "{\"parameter\": \"desired_rate\", \"values\": [1, 2]}}");
        const auto again = parse_config(effective_config(c).dump());
        add("config_round_trip", c == again, "effective document re-parses identically");
    });

    return out;
}

} // namespace acops

#endif
