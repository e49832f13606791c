#ifndef ACOPS_NETSIM_HPP
#define ACOPS_NETSIM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acops/auction_core.hpp"
#include "acops/bundle_auction.hpp"
#include "acops/channel_model.hpp"
#include "acops/errors.hpp"
#include "acops/random.hpp"
#include "acops/stats.hpp"
#include "acops/valuation.hpp"

namespace acops {

enum class SelectionPolicy {
    no_cooperation,
    random_selection,
    max_snr,
    acops_single,
    acops_bundle,
    central_max_min,
    central_opportunistic,
};

inline std::string_view to_string(SelectionPolicy p)
{
    switch (p) {
    case SelectionPolicy::no_cooperation: return "no_cooperation";
    case SelectionPolicy::random_selection: return "random_selection";
    case SelectionPolicy::max_snr: return "max_snr";
    case SelectionPolicy::acops_single: return "acops_single";
    case SelectionPolicy::acops_bundle: return "acops_bundle";
    case SelectionPolicy::central_max_min: return "central_max_min";
    case SelectionPolicy::central_opportunistic: return "central_opportunistic";
    }
    return "unknown";
}

inline std::optional<SelectionPolicy> policy_from_string(std::string_view s)
{
    for (auto p : {SelectionPolicy::no_cooperation, SelectionPolicy::random_selection, SelectionPolicy::max_snr,
                   SelectionPolicy::acops_single, SelectionPolicy::acops_bundle, SelectionPolicy::central_max_min,
                   SelectionPolicy::central_opportunistic})
        if (to_string(p) == s)
            return p;
    return std::nullopt;
}

struct OfdmConfig {
    std::size_t num_subcarriers = 128;
    std::size_t num_taps = 8;

    bool operator==(const OfdmConfig&) const = default;
};

/// One group: N weak users and a single potential helper. SNRs are linear.
struct NetworkConfig {
    std::size_t num_users = 5;
    std::vector<double> desired_rates;
    /// Cap on the helper's offered rate R_c; the per-trial surplus is
    /// min(cap, C(gamma_PH,BS)).
    double helper_surplus = std::numeric_limits<double>::infinity();
    double helper_bs_snr = 100.0;
    std::vector<double> direct_snrs;
    std::vector<double> helper_link_snrs;
    /// Simultaneous partners; in OFDM mode the number of bundles.
    std::size_t num_partners = 1;
    /// OFDM only: each requester takes at most one bundle, so r bundles go to
    /// r distinct partners. Applies to the auction and the centralized policies.
    bool distinct_partners = false;
    std::optional<OfdmConfig> ofdm;
    double half_duplex_factor = 1.0;
    /// Mean of the Poisson rival estimate; derived from the SNRs when empty.
    std::optional<double> rival_estimate_mean;
    std::size_t trials = 10000;
    std::uint64_t seed = kDefaultSeed;

    static NetworkConfig symmetric(std::size_t n, double desired_rate, double direct_snr, double helper_link_snr)
    {
        NetworkConfig c;
        c.num_users = n;
        c.desired_rates.assign(n, desired_rate);
        c.direct_snrs.assign(n, direct_snr);
        c.helper_link_snrs.assign(n, helper_link_snr);
        return c;
    }

    void validate() const
    {
        detail::require(num_users >= 1, "num_users must be >= 1");
        detail::require(desired_rates.size() == num_users, "desired_rates must have num_users entries");
        detail::require(direct_snrs.size() == num_users, "direct_snrs must have num_users entries");
        detail::require(helper_link_snrs.size() == num_users, "helper_link_snrs must have num_users entries");
        for (double d : desired_rates)
            detail::require_non_negative(d, "desired_rate");
        for (double g : direct_snrs)
            detail::require_positive(g, "direct_snr");
        for (double g : helper_link_snrs)
            detail::require_positive(g, "helper_link_snr");
        detail::require_positive(helper_bs_snr, "helper_bs_snr");
        detail::require(!(helper_surplus < 0.0), "helper_surplus must be non-negative");
        detail::require(num_partners >= 1 && num_partners <= num_users, "num_partners must lie in [1, N]");
        detail::require(half_duplex_factor == 0.5 || half_duplex_factor == 1.0, "half_duplex_factor must be 0.5 or 1.0");
        detail::require(trials >= 1, "trials must be >= 1");
        if (rival_estimate_mean)
            detail::require_non_negative(*rival_estimate_mean, "rival_estimate_mean");
        if (ofdm) {
            detail::require(ofdm->num_taps >= 1, "ofdm.num_taps must be >= 1");
            detail::require(num_partners <= ofdm->num_subcarriers, "num_partners must not exceed ofdm.num_subcarriers");
        }
    }

    double rival_mean() const
    {
        if (rival_estimate_mean)
            return *rival_estimate_mean;
        double s = 0.0;
        for (std::size_t i = 0; i < num_users; ++i)
            s += helper_link_snrs[i] / (helper_link_snrs[i] + direct_snrs[i]);
        return s;
    }
};

struct UserOutcome {
    double direct_rate = 0.0;
    double achieved_rate = 0.0;
    double private_value = 0.0;
    double payment = 0.0;
    unsigned rival_estimate = 0;
    bool requested = false;
    bool bid = false;
    bool won = false;
    bool outage = false;
};

struct TrialResult {
    std::vector<UserOutcome> users;
    double helper_surplus = 0.0;
    double revenue = 0.0;
    std::size_t requests = 0;
    bool auction_held = false;

    std::size_t outages() const
    {
        return static_cast<std::size_t>(std::count_if(users.begin(), users.end(), [](const auto& u) { return u.outage; }));
    }
};

namespace detail {

/// True when `a` is lexicographically better than `b` after sorting both ascending.
inline bool leximin_better(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

template <class Rng>
std::optional<std::size_t> uniform_pick(const std::vector<std::size_t>& candidates, Rng& rng)
{
    if (candidates.empty())
        return std::nullopt;
    return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
}

/// Index among `candidates` maximizing `score`, ties broken uniformly.
template <class Rng, class Score>
std::optional<std::size_t> argmax_pick(const std::vector<std::size_t>& candidates, Score score, Rng& rng)
{
    std::vector<std::size_t> best;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i : candidates) {
        const double s = score(i);
        if (s > top) {
            top = s;
            best.assign(1, i);
        } else if (s == top) {
            best.push_back(i);
        }
    }
    return uniform_pick(best, rng);
}

inline void finalize_rates(TrialResult& r, std::span<const double> desired)
{
    for (std::size_t i = 0; i < r.users.size(); ++i)
        r.users[i].outage = r.users[i].achieved_rate < desired[i];
}

template <class Rng>
TrialResult run_single_carrier_trial(const NetworkConfig& c, SelectionPolicy policy, Rng& rng)
{
    const std::size_t n = c.num_users;
    TrialResult r;
    r.users.resize(n);
    std::vector<double> g_bs(n), g_ph(n), coop(n);
    for (std::size_t i = 0; i < n; ++i) {
        g_bs[i] = draw_fading(c.direct_snrs[i], rng);
        g_ph[i] = draw_fading(c.helper_link_snrs[i], rng);
    }
    const double g_hb = draw_fading(c.helper_bs_snr, rng);
    r.helper_surplus = std::min(c.helper_surplus, capacity(g_hb));

    std::vector<std::size_t> requesters;
    for (std::size_t i = 0; i < n; ++i) {
        auto& u = r.users[i];
        u.direct_rate = capacity(g_bs[i]);
        u.achieved_rate = u.direct_rate;
        coop[i] = c.half_duplex_factor * std::min(capacity(g_ph[i]), r.helper_surplus);
        if (u.direct_rate < c.desired_rates[i]) {
            u.requested = true;
            requesters.push_back(i);
        }
    }
    r.requests = requesters.size();

    std::optional<std::size_t> chosen;
    if (r.helper_surplus > 0.0 && !requesters.empty()) {
        switch (policy) {
        case SelectionPolicy::no_cooperation: break;
        case SelectionPolicy::random_selection: chosen = uniform_pick(requesters, rng); break;
        case SelectionPolicy::max_snr:
            chosen = argmax_pick(requesters, [&](std::size_t i) { return g_ph[i]; }, rng);
            break;
        case SelectionPolicy::central_opportunistic:
            chosen = argmax_pick(requesters, [&](std::size_t i) { return coop[i]; }, rng);
            break;
        case SelectionPolicy::central_max_min: {
            std::vector<double> best_rates(n);
            for (std::size_t i = 0; i < n; ++i)
                best_rates[i] = r.users[i].direct_rate;
            std::vector<std::size_t> ties;
            for (std::size_t j : requesters) {
                auto rates = best_rates;
                std::vector<double> current(n);
                for (std::size_t i = 0; i < n; ++i)
                    current[i] = r.users[i].direct_rate;
                current[j] += coop[j];
                if (ties.empty()) {
                    best_rates = current;
                    ties.assign(1, j);
                } else if (leximin_better(current, best_rates)) {
                    best_rates = current;
                    ties.assign(1, j);
                } else if (!leximin_better(best_rates, current)) {
                    ties.push_back(j);
                }
            }
            chosen = uniform_pick(ties, rng);
            break;
        }
        case SelectionPolicy::acops_single: {
            const double zeta = c.rival_mean();
            std::vector<double> bids(requesters.size()), values(requesters.size());
            for (std::size_t k = 0; k < requesters.size(); ++k) {
                const std::size_t i = requesters[k];
                auto& u = r.users[i];
                const double shortfall = c.desired_rates[i] - u.direct_rate;
                u.private_value = private_value(g_ph[i], g_bs[i], shortfall / r.helper_surplus);
                u.rival_estimate = estimate_rivals(zeta, rng);
                values[k] = u.private_value;
                bids[k] = best_response(u.private_value, u.rival_estimate);
                u.bid = bids[k] > 0.0;
            }
            if (requesters.size() >= 2) {
                r.auction_held = true;
                const auto out = run_auction(std::span<const double>(bids), AuctionConfig{},
                                             std::span<const double>(values), rng);
                if (out.winner) {
                    chosen = requesters[*out.winner];
                    r.users[*chosen].payment = out.payment;
                    r.revenue = out.payment;
                }
            } else if (bids[0] > 0.0) {
                // A lone request is served without contention at the zero reserve.
                chosen = requesters[0];
            }
            break;
        }
        case SelectionPolicy::acops_bundle:
            throw std::domain_error("acops_bundle requires an OFDM configuration");
        }
    }
    if (chosen) {
        r.users[*chosen].won = true;
        r.users[*chosen].achieved_rate += coop[*chosen];
    }
    finalize_rates(r, c.desired_rates);
    return r;
}

template <class Rng>
TrialResult run_ofdm_trial(const NetworkConfig& c, SelectionPolicy policy, Rng& rng)
{
    const std::size_t n = c.num_users;
    const std::size_t k_total = c.ofdm->num_subcarriers;
    const std::size_t taps = c.ofdm->num_taps;
    TrialResult r;
    r.users.resize(n);
    r.helper_surplus = std::numeric_limits<double>::infinity();

    std::vector<OfdmLinkState> bs, ph;
    bs.reserve(n);
    ph.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        bs.push_back(ofdm_draw(c.direct_snrs[i], k_total, taps, rng));
        ph.push_back(ofdm_draw(c.helper_link_snrs[i], k_total, taps, rng));
    }

    const auto partition = partition_uniform(k_total, c.num_partners);
    const std::size_t k_bundles = partition.num_bundles();
    ValueMatrix gain(n, k_bundles);
    std::vector<std::size_t> requesters;
    for (std::size_t i = 0; i < n; ++i) {
        auto& u = r.users[i];
        u.direct_rate = ofdm_capacity(bs[i]);
        u.achieved_rate = u.direct_rate;
        for (std::size_t k = 0; k < k_bundles; ++k)
            gain(i, k) = ofdm_capacity(ph[i], partition.bundles[k], c.half_duplex_factor);
        if (u.direct_rate < c.desired_rates[i]) {
            u.requested = true;
            requesters.push_back(i);
        }
    }
    r.requests = requesters.size();

    std::vector<std::optional<std::size_t>> owner(k_bundles);
    if (!requesters.empty()) {
        switch (policy) {
        case SelectionPolicy::no_cooperation: break;
        case SelectionPolicy::acops_bundle: {
            ValueMatrix x(requesters.size(), k_total);
            for (std::size_t a = 0; a < requesters.size(); ++a) {
                const std::size_t i = requesters[a];
                for (std::size_t j = 0; j < k_total; ++j)
                    x(a, j) = ph[i].subcarrier_snrs[j] - bs[i].subcarrier_snrs[j];
            }
            const auto y = bundle_values(x, partition);
            const auto bids = truthful_bids(y);
            for (std::size_t a = 0; a < requesters.size(); ++a) {
                auto& u = r.users[requesters[a]];
                u.private_value = *std::max_element(y.row(a).begin(), y.row(a).end());
                u.bid = u.private_value > 0.0;
            }
            if (requesters.size() >= 2) {
                r.auction_held = true;
                const auto out = run_bundle_auction(bids, y, rng, BundleAuctionOptions{c.distinct_partners});
                for (std::size_t k = 0; k < k_bundles; ++k)
                    if (out.awards[k].winner) {
                        const std::size_t i = requesters[*out.awards[k].winner];
                        owner[k] = i;
                        r.users[i].payment += out.awards[k].payment;
                        r.revenue += out.awards[k].payment;
                    }
            } else {
                for (std::size_t k = 0; k < k_bundles; ++k)
                    if (bids(0, k) > 0.0 && !(c.distinct_partners && k > 0 && owner[0]))
                        owner[k] = requesters[0];
            }
            break;
        }
        case SelectionPolicy::central_max_min: {
            // Greedy leximin: each bundle in turn goes to the requester whose
            // assignment gives the best sorted rate vector.
            std::vector<double> rates(n);
            for (std::size_t i = 0; i < n; ++i)
                rates[i] = r.users[i].direct_rate;
            std::vector<char> taken(n, 0);
            for (std::size_t k = 0; k < k_bundles; ++k) {
                std::vector<double> best;
                std::vector<std::size_t> ties;
                for (std::size_t j : requesters) {
                    if (c.distinct_partners && taken[j])
                        continue;
                    auto trial = rates;
                    trial[j] += gain(j, k);
                    if (ties.empty() || leximin_better(trial, best)) {
                        best = trial;
                        ties.assign(1, j);
                    } else if (!leximin_better(best, trial)) {
                        ties.push_back(j);
                    }
                }
                owner[k] = uniform_pick(ties, rng);
                if (!owner[k])
                    break;
                rates[*owner[k]] += gain(*owner[k], k);
                taken[*owner[k]] = 1;
            }
            break;
        }
        case SelectionPolicy::central_opportunistic: {
            std::vector<std::size_t> pool = requesters;
            for (std::size_t k = 0; k < k_bundles && !pool.empty(); ++k) {
                owner[k] = argmax_pick(pool, [&](std::size_t i) { return gain(i, k); }, rng);
                if (c.distinct_partners)
                    std::erase(pool, *owner[k]);
            }
            break;
        }
        default:
            throw std::domain_error(std::string("policy ") + std::string(to_string(policy)) +
                                    " is not defined for multiple partners");
        }
    }
    for (std::size_t k = 0; k < k_bundles; ++k)
        if (owner[k]) {
            r.users[*owner[k]].won = true;
            r.users[*owner[k]].achieved_rate += gain(*owner[k], k);
        }
    finalize_rates(r, c.desired_rates);
    return r;
}

} // namespace detail

/// One network realization under `policy`. OFDM configurations run the
/// multiple-partner bundle model; otherwise a single flat-fading partner.
template <class Rng>
TrialResult run_trial(const NetworkConfig& config, SelectionPolicy policy, Rng& rng)
{
    config.validate();
    if (config.ofdm)
        return detail::run_ofdm_trial(config, policy, rng);
    return detail::run_single_carrier_trial(config, policy, rng);
}

struct CurvePoint {
    double grid = 0.0;
    SelectionPolicy policy = SelectionPolicy::no_cooperation;
    Proportion outage;
    Interval ci{0.0, 1.0};
    RunningStats revenue;

    double mean_outage() const { return outage.value(); }
};

/// Mean weak-user outage over `config.trials` realizations.
inline CurvePoint estimate_outage(const NetworkConfig& config, SelectionPolicy policy, unsigned threads = 0)
{
    config.validate();
    struct Acc {
        Proportion outage;
        RunningStats revenue;
    };
    auto parts = run_blocks<Acc>(config.seed, config.trials, threads, [&](Engine& rng, std::size_t first, std::size_t last) {
        Acc acc;
        for (std::size_t t = first; t < last; ++t) {
            const auto r = run_trial(config, policy, rng);
            acc.outage.successes += r.outages();
            acc.outage.trials += r.users.size();
            acc.revenue.push(r.revenue);
        }
        return acc;
    });
    CurvePoint p;
    p.policy = policy;
    for (const auto& a : parts) {
        p.outage.successes += a.outage.successes;
        p.outage.trials += a.outage.trials;
        p.revenue.merge(a.revenue);
    }
    p.ci = wilson_interval(p.outage);
    return p;
}

enum class SweepParameter { direct_snr_db, helper_link_snr_db, desired_rate };

inline std::string_view to_string(SweepParameter p)
{
    switch (p) {
    case SweepParameter::direct_snr_db: return "direct_snr_db";
    case SweepParameter::helper_link_snr_db: return "helper_link_snr_db";
    case SweepParameter::desired_rate: return "desired_rate";
    }
    return "unknown";
}

struct Sweep {
    SweepParameter parameter = SweepParameter::direct_snr_db;
    std::vector<double> values;
};

inline NetworkConfig apply_sweep(NetworkConfig c, SweepParameter p, double v)
{
    switch (p) {
    case SweepParameter::direct_snr_db: c.direct_snrs.assign(c.num_users, db_to_linear(v)); break;
    case SweepParameter::helper_link_snr_db: c.helper_link_snrs.assign(c.num_users, db_to_linear(v)); break;
    case SweepParameter::desired_rate: c.desired_rates.assign(c.num_users, v); break;
    }
    return c;
}

/// Outage curve over a parameter grid; every grid point reuses config.seed so
/// policies are compared on common random numbers.
inline std::vector<CurvePoint> run_montecarlo(const NetworkConfig& config, SelectionPolicy policy, const Sweep& sweep,
                                              unsigned threads = 0)
{
    std::vector<CurvePoint> curve;
    curve.reserve(sweep.values.size());
    for (double v : sweep.values) {
        auto p = estimate_outage(apply_sweep(config, sweep.parameter, v), policy, threads);
        p.grid = v;
        curve.push_back(p);
    }
    return curve;
}

/// Multiple-partner OFDM comparison over a desired-rate grid with `partners` bundles.
inline std::vector<CurvePoint> run_bundle_experiment(NetworkConfig config, std::size_t partners,
                                                     std::span<const double> desired_rates,
                                                     std::span<const SelectionPolicy> policies, unsigned threads = 0)
{
    detail::require(config.ofdm.has_value(), "bundle experiment needs an OFDM configuration");
    config.num_partners = partners;
    std::vector<CurvePoint> rows;
    for (double d : desired_rates)
        for (auto policy : policies) {
            auto p = estimate_outage(apply_sweep(config, SweepParameter::desired_rate, d), policy, threads);
            p.grid = d;
            rows.push_back(p);
        }
    return rows;
}

// ---------------------------------------------------------------------------
// Signaling overhead

enum class FeedbackPolicy { acops_single, central_single, acops_naive, acops_bundle, central_multiple };

inline std::string_view to_string(FeedbackPolicy p)
{
    switch (p) {
    case FeedbackPolicy::acops_single: return "acops_single";
    case FeedbackPolicy::central_single: return "central_single";
    case FeedbackPolicy::acops_naive: return "acops_naive";
    case FeedbackPolicy::acops_bundle: return "acops_bundle";
    case FeedbackPolicy::central_multiple: return "central_multiple";
    }
    return "unknown";
}

/// Inputs to the global signaling-overhead count. Each bitwidth is log2 of the
/// range of the reported quantity.
struct FeedbackAccount {
    FeedbackPolicy policy = FeedbackPolicy::acops_single;
    std::size_t num_users = 5;
    std::size_t num_bidders = 5;
    std::size_t num_subcarriers = 128;
    std::size_t num_bundles = 5;
    double bitwidth_q = 10.0;
    double bitwidth_b = 10.0;
    double bitwidth_gamma = 10.0;
};

/// Total bits:
///   ACOPS single        N bq + N_a bb
///   centralized single  N bg + N! bg
///   ACOPS naive         N bq + N_a K~ bb
///   ACOPS bundled       N bq + N_a K bb
///   centralized multi   K~ (N bg + N! bg)
inline double feedback_overhead(const FeedbackAccount& a)
{
    detail::require(a.num_users >= 1, "N must be >= 1");
    detail::require(a.num_bidders <= a.num_users, "N_a must not exceed N");
    detail::require(a.num_subcarriers >= 1 && a.num_bundles >= 1, "subcarrier and bundle counts must be >= 1");
    detail::require(a.bitwidth_q >= 0.0 && a.bitwidth_b >= 0.0 && a.bitwidth_gamma >= 0.0, "bitwidths must be >= 0");
    const double n = static_cast<double>(a.num_users);
    const double na = static_cast<double>(a.num_bidders);
    const double n_factorial = std::exp(std::lgamma(n + 1.0));
    if (!std::isfinite(n_factorial))
        throw numeric_error("N! overflows a double");
    const double central = n * a.bitwidth_gamma + n_factorial * a.bitwidth_gamma;
    switch (a.policy) {
    case FeedbackPolicy::acops_single: return n * a.bitwidth_q + na * a.bitwidth_b;
    case FeedbackPolicy::central_single: return std::round(central);
    case FeedbackPolicy::acops_naive:
        return n * a.bitwidth_q + na * static_cast<double>(a.num_subcarriers) * a.bitwidth_b;
    case FeedbackPolicy::acops_bundle:
        return n * a.bitwidth_q + na * static_cast<double>(a.num_bundles) * a.bitwidth_b;
    case FeedbackPolicy::central_multiple: return std::round(static_cast<double>(a.num_subcarriers) * central);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Multi-stage game with budgets

enum class Strategy { conservative, aggressive, no_help };

inline std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::conservative: return "conservative";
    case Strategy::aggressive: return "aggressive";
    case Strategy::no_help: return "no_help";
    }
    return "unknown";
}

inline std::optional<Strategy> strategy_from_string(std::string_view s)
{
    for (auto v : {Strategy::conservative, Strategy::aggressive, Strategy::no_help})
        if (to_string(v) == s)
            return v;
    return std::nullopt;
}

enum class Role { weak, strong, exhausted_bidder };

/// Per-user state carried across stages.
struct SequentialState {
    std::size_t stage = 0;
    double budget = 0.0;
    Role role = Role::weak;
    Strategy strategy = Strategy::conservative;
    std::size_t cumulative_outage_count = 0;
};

/// Direct-link mean SNR at which the non-cooperative outage at `rate` equals `target`.
inline double calibrated_direct_snr(double rate, double target_outage)
{
    detail::require(target_outage > 0.0 && target_outage < 1.0, "target outage must lie in (0, 1)");
    return std::expm1(rate * std::numbers::ln2) / -std::log1p(-target_outage);
}

struct SequentialConfig {
    std::size_t num_users = 6;
    double desired_rate = 6.0;
    double direct_snr = calibrated_direct_snr(6.0, 0.7);
    double helper_link_snr = 10000.0;
    std::size_t stages = 100;
    double initial_budget = 5000.0;
    std::size_t replications = 100;
    /// One entry per user.
    std::vector<Strategy> strategies{Strategy::conservative, Strategy::conservative, Strategy::aggressive,
                                     Strategy::aggressive, Strategy::no_help, Strategy::no_help};
    double half_duplex_factor = 1.0;
    std::uint64_t seed = kDefaultSeed;

    void validate() const
    {
        detail::require(num_users >= 1, "num_users must be >= 1");
        detail::require(strategies.size() == num_users, "strategies must have num_users entries");
        detail::require(stages >= 1, "stages must be >= 1");
        detail::require(replications >= 1, "replications must be >= 1");
        detail::require_non_negative(initial_budget, "initial_budget");
        detail::require_non_negative(desired_rate, "desired_rate");
        detail::require_positive(direct_snr, "direct_snr");
        detail::require_positive(helper_link_snr, "helper_link_snr");
    }
};

struct StrategyCurve {
    Strategy strategy = Strategy::conservative;
    /// Cumulative fraction of stages in outage after each stage, over users and replications.
    std::vector<RunningStats> cumulative_outage;
    std::vector<RunningStats> budget;
};

struct SequentialResult {
    std::vector<StrategyCurve> curves;
    /// Fraction of user-stages in which the direct link alone misses the target.
    Proportion baseline_outage;
    std::size_t auctions = 0;
    std::size_t conservation_violations = 0;
    std::size_t negative_budgets = 0;
    std::size_t overbids = 0;

    const StrategyCurve* curve(Strategy s) const
    {
        for (const auto& c : curves)
            if (c.strategy == s)
                return &c;
        return nullptr;
    }
};

namespace detail {

struct ReplicationTrace {
    std::vector<std::vector<double>> cumulative;  // [user][stage]
    std::vector<std::vector<double>> budget;      // [user][stage]
    Proportion baseline;
    std::size_t auctions = 0;
    std::size_t conservation_violations = 0;
    std::size_t negative_budgets = 0;
    std::size_t overbids = 0;
};

template <class Rng>
ReplicationTrace run_replication(const SequentialConfig& c, Rng& rng)
{
    const std::size_t n = c.num_users;
    ReplicationTrace tr;
    tr.cumulative.assign(n, std::vector<double>(c.stages));
    tr.budget.assign(n, std::vector<double>(c.stages));
    std::vector<SequentialState> users(n);
    for (std::size_t i = 0; i < n; ++i) {
        users[i].budget = c.initial_budget;
        users[i].strategy = c.strategies[i];
    }
    const double money = c.initial_budget * static_cast<double>(n);

    std::vector<double> g_bs(n), g_ph(n), bids(n), values(n);
    for (std::size_t k = 0; k < c.stages; ++k) {
        std::vector<std::size_t> helpers, requesters;
        for (std::size_t i = 0; i < n; ++i) {
            auto& u = users[i];
            u.stage = k + 1;
            g_bs[i] = draw_fading(c.direct_snr, rng);
            g_ph[i] = draw_fading(c.helper_link_snr, rng);
            const bool strong = capacity(g_bs[i]) >= c.desired_rate;
            u.role = strong ? Role::strong : (u.budget > 0.0 ? Role::weak : Role::exhausted_bidder);
            tr.baseline.trials += 1;
            if (strong) {
                if (u.strategy != Strategy::no_help)
                    helpers.push_back(i);
            } else {
                tr.baseline.successes += 1;
                requesters.push_back(i);
            }
        }

        std::optional<std::size_t> winner;
        double surplus = 0.0;
        double paid = 0.0;
        double received = 0.0;
        const auto helper = uniform_pick(helpers, rng);
        if (helper) {
            surplus = std::max(0.0, capacity(g_bs[*helper]) - c.desired_rate);
        }
        if (helper && surplus > 0.0 && !requesters.empty()) {
            std::vector<double> rb(requesters.size()), rv(requesters.size());
            for (std::size_t a = 0; a < requesters.size(); ++a) {
                const std::size_t i = requesters[a];
                const double shortfall = c.desired_rate - capacity(g_bs[i]);
                rv[a] = private_value(g_ph[i], g_bs[i], shortfall / surplus);
                rb[a] = users[i].strategy == Strategy::aggressive ? std::max(users[i].budget, 0.0)
                                                                  : budgeted_bid(rv[a], users[i].budget);
                if (rb[a] > users[i].budget)
                    ++tr.overbids;
            }
            if (requesters.size() >= 2) {
                ++tr.auctions;
                const auto out = run_auction(std::span<const double>(rb), AuctionConfig{}, std::span<const double>(rv), rng);
                if (out.winner) {
                    winner = requesters[*out.winner];
                    paid = out.payment;
                }
            } else if (rb[0] > 0.0) {
                winner = requesters[0];
            }
        }
        if (winner) {
            users[*winner].budget -= paid;
            users[*helper].budget += paid;
            received = paid;
        }
        if (paid != received)
            ++tr.conservation_violations;
        double total = 0.0;
        for (const auto& u : users)
            total += u.budget;
        if (std::abs(total - money) > 1e-9 * std::max(1.0, money))
            ++tr.conservation_violations;

        for (std::size_t i = 0; i < n; ++i) {
            auto& u = users[i];
            if (u.budget < 0.0)
                ++tr.negative_budgets;
            bool outage = false;
            if (u.role != Role::strong) {
                double rate = capacity(g_bs[i]);
                if (winner && *winner == i)
                    rate += c.half_duplex_factor * std::min(capacity(g_ph[i]), surplus);
                outage = rate < c.desired_rate;
            }
            u.cumulative_outage_count += outage ? 1 : 0;
            tr.cumulative[i][k] = static_cast<double>(u.cumulative_outage_count) / static_cast<double>(k + 1);
            tr.budget[i][k] = u.budget;
        }
    }
    return tr;
}

} // namespace detail

/// Repeated single-partner auctions with carried-over budgets. In each stage a
/// user whose direct link meets the target is strong; one strong user willing
/// to help is the helper, the rest of the weak users bid for its surplus.
inline SequentialResult run_sequential(const SequentialConfig& config, unsigned threads = 0)
{
    config.validate();
    auto traces = run_blocks<detail::ReplicationTrace>(
        config.seed, config.replications, threads,
        [&](Engine& rng, std::size_t, std::size_t) { return detail::run_replication(config, rng); }, 1);

    SequentialResult res;
    std::vector<Strategy> present;
    for (auto s : config.strategies)
        if (std::find(present.begin(), present.end(), s) == present.end())
            present.push_back(s);
    for (auto s : present) {
        StrategyCurve c;
        c.strategy = s;
        c.cumulative_outage.resize(config.stages);
        c.budget.resize(config.stages);
        res.curves.push_back(std::move(c));
    }
    for (const auto& tr : traces) {
        res.baseline_outage.successes += tr.baseline.successes;
        res.baseline_outage.trials += tr.baseline.trials;
        res.auctions += tr.auctions;
        res.conservation_violations += tr.conservation_violations;
        res.negative_budgets += tr.negative_budgets;
        res.overbids += tr.overbids;
        for (std::size_t i = 0; i < config.num_users; ++i) {
            auto& curve = *std::find_if(res.curves.begin(), res.curves.end(),
                                        [&](const auto& c) { return c.strategy == config.strategies[i]; });
            for (std::size_t k = 0; k < config.stages; ++k) {
                curve.cumulative_outage[k].push(tr.cumulative[i][k]);
                curve.budget[k].push(tr.budget[i][k]);
            }
        }
    }
    return res;
}

} // namespace acops

#endif
