#ifndef ACOPS_EXPERIMENTS_HPP
#define ACOPS_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acops/analytic.hpp"
#include "acops/auction_core.hpp"
#include "acops/bundle_auction.hpp"
#include "acops/config.hpp"
#include "acops/netsim.hpp"

namespace acops {

/// Output file could not be written. Maps to exit code 3.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader = "grid,policy,mean_outage,ci_low,ci_high,revenue,bits";

struct CsvRow {
    double grid = 0.0;
    std::string policy;
    std::optional<double> mean_outage;
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::optional<double> revenue;
    std::optional<double> bits;
};

struct ExperimentResult {
    std::vector<CsvRow> rows;
    /// Lines for stdout.
    std::vector<std::string> messages;
    /// Command-specific summary stored in the sidecar.
    detail::Json summary = detail::Json::object();
};

namespace detail {

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string format_field(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string label(std::string_view policy, std::size_t partners)
{
    return std::string(policy) + "/r=" + std::to_string(partners);
}

inline bool is_symmetric(const ExperimentConfig& c)
{
    auto flat = [](const std::vector<double>& v) { return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end(); };
    return flat(c.desired_rates) && flat(c.direct_snr_db) && flat(c.helper_link_snr_db);
}

inline std::optional<double> signaling_bits(SelectionPolicy p, const ExperimentConfig& c)
{
    FeedbackAccount a;
    a.num_users = c.num_users;
    a.num_bidders = c.num_users;
    a.bitwidth_q = c.feedback.bitwidth_q;
    a.bitwidth_b = c.feedback.bitwidth_b;
    a.bitwidth_gamma = c.feedback.bitwidth_gamma;
    switch (p) {
    case SelectionPolicy::acops_single: a.policy = FeedbackPolicy::acops_single; break;
    case SelectionPolicy::central_max_min:
    case SelectionPolicy::central_opportunistic: a.policy = FeedbackPolicy::central_single; break;
    default: return std::nullopt;
    }
    return feedback_overhead(a);
}

inline CsvRow outage_row(const CurvePoint& p, std::string policy, std::optional<double> bits)
{
    return {p.grid, std::move(policy), p.mean_outage(), p.ci.low, p.ci.high, p.revenue.mean(), bits};
}

inline ExperimentResult run_outage_single(const ExperimentConfig& c, std::uint64_t seed, unsigned threads)
{
    auto policies = c.policies;
    if (policies.empty())
        policies = {SelectionPolicy::no_cooperation, SelectionPolicy::random_selection, SelectionPolicy::max_snr,
                    SelectionPolicy::acops_single, SelectionPolicy::central_max_min};
    const SweepSection sweep = c.sweep.value_or(SweepSection{SweepParameter::direct_snr_db, {7, 4, 1, -2, -5, -8, -11, -14, -17, -20}});
    const auto net = c.network(seed);
    ExperimentResult r;
    for (double v : sweep.values) {
        const auto point = apply_sweep(net, sweep.parameter, v);
        for (auto policy : policies) {
            auto p = estimate_outage(point, policy, threads);
            p.grid = v;
            r.rows.push_back(outage_row(p, std::string(to_string(policy)), signaling_bits(policy, c)));
        }
        if (is_symmetric(c)) {
            const SymmetricGroupParams params{point.helper_link_snrs[0], point.direct_snrs[0], 1.0, c.num_users};
            const double bound = outage_single_bound(point.desired_rates[0], params);
            r.rows.push_back({v, "analytic_bound", bound, bound, bound, revenue_single_closed_form(params), std::nullopt});
        }
    }
    r.summary["sweep_parameter"] = std::string(to_string(sweep.parameter));
    return r;
}

inline ExperimentResult run_outage_bundle(const ExperimentConfig& c, std::uint64_t seed, unsigned threads)
{
    auto policies = c.policies;
    if (policies.empty())
        policies = {SelectionPolicy::no_cooperation, SelectionPolicy::acops_bundle, SelectionPolicy::central_opportunistic,
                    SelectionPolicy::central_max_min};
    const SweepSection sweep =
        c.sweep.value_or(SweepSection{SweepParameter::desired_rate, {150, 140, 130, 120, 110, 100, 90, 60, 30}});
    auto net = c.network(seed);
    net.ofdm = OfdmConfig{c.ofdm.num_subcarriers, c.ofdm.num_taps};
    const std::size_t k_total = c.ofdm.num_subcarriers;
    ExperimentResult r;
    for (std::size_t partners : c.ofdm.partners) {
        auto cfg = net;
        cfg.num_partners = partners;
        std::optional<BundleOutageMoments> moments;
        if (is_symmetric(c)) {
            Engine rng = substream(seed, 0xb0d1e000ULL + partners);
            moments = bundle_outage_moments(k_total, k_total / partners, cfg.direct_snrs[0], cfg.helper_link_snrs[0],
                                            c.ofdm.num_taps, 20000, rng);
        }
        for (double v : sweep.values) {
            const auto point = apply_sweep(cfg, sweep.parameter, v);
            for (auto policy : policies) {
                auto p = estimate_outage(point, policy, threads);
                p.grid = v;
                std::optional<double> bits;
                FeedbackAccount a{FeedbackPolicy::acops_bundle, c.num_users, c.num_users, k_total, partners,
                                  c.feedback.bitwidth_q, c.feedback.bitwidth_b, c.feedback.bitwidth_gamma};
                if (policy == SelectionPolicy::acops_bundle)
                    bits = feedback_overhead(a);
                if (policy == SelectionPolicy::central_max_min || policy == SelectionPolicy::central_opportunistic) {
                    a.policy = FeedbackPolicy::central_multiple;
                    bits = feedback_overhead(a);
                }
                r.rows.push_back(outage_row(p, label(to_string(policy), partners), bits));
            }
            if (moments) {
                const BundleValueModel m{point.helper_link_snrs[0], static_cast<unsigned>(k_total / partners)};
                const double approx = outage_bundle_approx(point.desired_rates[0], m, c.num_users, moments->direct,
                                                           moments->with_bundle);
                r.rows.push_back({v, label("analytic_bundle", partners), approx, approx, approx, std::nullopt, std::nullopt});
            }
        }
    }
    r.summary["sweep_parameter"] = std::string(to_string(sweep.parameter));
    return r;
}

inline ExperimentResult run_revenue(const ExperimentConfig& c, std::uint64_t seed, unsigned threads)
{
    const PrivateValueModel model{c.helper_link_snr_linear[0], c.direct_snr_linear[0], c.revenue.alpha};
    ExperimentResult r;
    auto row = [&](std::size_t n, const char* name, double mean, std::optional<double> se) {
        CsvRow out{static_cast<double>(n), name, std::nullopt, std::nullopt, std::nullopt, mean, std::nullopt};
        if (se) {
            out.ci_low = mean - 1.96 * *se;
            out.ci_high = mean + 1.96 * *se;
        }
        r.rows.push_back(out);
    };
    for (std::size_t n = c.revenue.min_bidders; n <= c.revenue.max_bidders; ++n) {
        // Each bidder count gets its own substream family.
        const std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * n;
        const auto second = simulate_revenue(model, n, AuctionConfig{PricingRule::second_price}, c.trials, s, threads);
        const auto first = simulate_revenue(model, n, AuctionConfig{PricingRule::first_price}, c.trials, s, threads);
        row(n, "second_price", second.mean, second.std_error);
        row(n, "first_price", first.mean, first.std_error);
        row(n, "second_price_closed_form",
            revenue_single_closed_form({model.gamma_bar_ph, model.gamma_bar_bs, model.alpha, n}), std::nullopt);
        const auto formats = compare_formats(model, c.revenue.num_subcarriers, n, c.trials, s + 1, threads);
        row(n, "bundle_mixed", formats.mixed_bundle.mean, formats.mixed_bundle.std_error);
        row(n, "bundle_pure", formats.pure_bundle.mean, formats.pure_bundle.std_error);
        row(n, "bundle_naive", formats.naive.mean, formats.naive.std_error);
        std::vector<BundleValueModel> bundles;
        for (auto card : partition_uniform(c.revenue.num_subcarriers, n).cardinalities())
            bundles.push_back({model.positive_scale(), static_cast<unsigned>(card)});
        row(n, "bundle_mixed_closed_form", revenue_bundle(bundles, n), std::nullopt);
    }
    return r;
}

inline ExperimentResult run_threshold(const ExperimentConfig& c)
{
    const BundleValueModel m{c.threshold.value_scale, static_cast<unsigned>(c.threshold.bundle_size)};
    const auto t = bundle_superiority_threshold(m, c.threshold.min_bidders, c.threshold.max_bidders);
    ExperimentResult r;
    for (const auto& row : t.rows) {
        r.rows.push_back({static_cast<double>(row.bidders), "bundle", std::nullopt, std::nullopt, std::nullopt,
                          row.bundle_side, std::nullopt});
        r.rows.push_back({static_cast<double>(row.bidders), "separate", std::nullopt, std::nullopt, std::nullopt,
                          row.separate_side, std::nullopt});
    }
    r.messages.push_back("N_a* = " + (t.threshold ? std::to_string(*t.threshold) : std::string("none")));
    r.summary["threshold"] = t.threshold ? Json(*t.threshold) : Json(nullptr);
    return r;
}

inline ExperimentResult run_feedback(const ExperimentConfig& c)
{
    ExperimentResult r;
    const auto& f = c.feedback;
    for (std::size_t n = f.min_users; n <= f.max_users; ++n)
        for (auto p : {FeedbackPolicy::acops_single, FeedbackPolicy::central_single, FeedbackPolicy::acops_naive,
                       FeedbackPolicy::acops_bundle, FeedbackPolicy::central_multiple}) {
            // Bundles equal to bidders, every weak user bidding.
            const FeedbackAccount a{p, n, n, f.num_subcarriers, n, f.bitwidth_q, f.bitwidth_b, f.bitwidth_gamma};
            r.rows.push_back({static_cast<double>(n), std::string(to_string(p)), std::nullopt, std::nullopt,
                              std::nullopt, std::nullopt, feedback_overhead(a)});
        }
    return r;
}

inline ExperimentResult run_sequential_experiment(const ExperimentConfig& c, std::uint64_t seed, unsigned threads)
{
    const auto cfg = c.sequential_config(seed);
    const auto res = run_sequential(cfg, threads);
    ExperimentResult r;
    for (const auto& curve : res.curves)
        for (std::size_t k = 0; k < cfg.stages; ++k) {
            const auto& s = curve.cumulative_outage[k];
            const double half = 1.96 * s.stderr_of_mean();
            r.rows.push_back({static_cast<double>(k + 1), std::string(to_string(curve.strategy)), s.mean(),
                              std::max(0.0, s.mean() - half), std::min(1.0, s.mean() + half), std::nullopt,
                              std::nullopt});
        }
    r.summary["direct_snr_linear"] = cfg.direct_snr;
    r.summary["baseline_outage"] = res.baseline_outage.value();
    r.summary["auctions"] = res.auctions;
    r.summary["conservation_violations"] = res.conservation_violations;
    r.summary["negative_budgets"] = res.negative_budgets;
    r.summary["overbids"] = res.overbids;
    return r;
}

} // namespace detail

/// Runs one named experiment. `validate` is handled by the validation suite.
inline ExperimentResult run_experiment(Command cmd, const ExperimentConfig& config, std::uint64_t seed, unsigned threads)
{
    switch (cmd) {
    case Command::outage_single: return detail::run_outage_single(config, seed, threads);
    case Command::outage_bundle: return detail::run_outage_bundle(config, seed, threads);
    case Command::revenue: return detail::run_revenue(config, seed, threads);
    case Command::threshold: return detail::run_threshold(config);
    case Command::feedback: return detail::run_feedback(config);
    case Command::sequential: return detail::run_sequential_experiment(config, seed, threads);
    case Command::validate: break;
    }
    throw std::logic_error("validate is not an experiment");
}

inline std::string render_csv(const std::vector<CsvRow>& rows)
{
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += detail::format_number(r.grid);
        out += ',';
        out += r.policy;
        for (const auto* v : {&r.mean_outage, &r.ci_low, &r.ci_high, &r.revenue, &r.bits}) {
            out += ',';
            out += detail::format_field(*v);
        }
        out += '\n';
    }
    return out;
}

inline detail::Json sidecar(Command cmd, const ExperimentConfig& config, std::uint64_t seed, const detail::Json& summary)
{
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    detail::Json j;
    j["command"] = std::string(to_string(cmd));
    j["seed"] = seed;
    j["trials"] = config.trials;
    j["config_hash"] = std::string(hash);
    j["tool_version"] = std::string(kToolVersion);
    j["effective_config"] = effective_config(config);
    j["summary"] = summary;
    return j;
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw io_error("write to " + path + " failed");
}

/// Writes `path` (CSV) and `path`.meta.json. The sidecar goes first so no CSV
/// ever exists without one.
inline void write_outputs(const std::string& path, Command cmd, const ExperimentConfig& config, std::uint64_t seed,
                          const ExperimentResult& result)
{
    write_text(path + ".meta.json", sidecar(cmd, config, seed, result.summary).dump(2) + "\n");
    write_text(path, render_csv(result.rows));
}

} // namespace acops

#endif
