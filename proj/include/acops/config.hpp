#ifndef ACOPS_CONFIG_HPP
#define ACOPS_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "acops/channel_model.hpp"
#include "acops/netsim.hpp"
#include "acops/random.hpp"

namespace acops {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Malformed document, unknown key or violated invariant. Maps to exit code 2.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { outage_single, outage_bundle, revenue, threshold, feedback, sequential, validate };

inline std::string_view to_string(Command c)
{
    switch (c) {
    case Command::outage_single: return "outage-single";
    case Command::outage_bundle: return "outage-bundle";
    case Command::revenue: return "revenue";
    case Command::threshold: return "threshold";
    case Command::feedback: return "feedback";
    case Command::sequential: return "sequential";
    case Command::validate: return "validate";
    }
    return "unknown";
}

inline std::optional<Command> command_from_string(std::string_view s)
{
    for (auto c : {Command::outage_single, Command::outage_bundle, Command::revenue, Command::threshold,
                   Command::feedback, Command::sequential, Command::validate})
        if (to_string(c) == s)
            return c;
    return std::nullopt;
}

struct OfdmSection {
    std::size_t num_subcarriers = 128;
    std::size_t num_taps = 8;
    std::vector<std::size_t> partners{2, 4};

    bool operator==(const OfdmSection&) const = default;
};

struct SweepSection {
    SweepParameter parameter = SweepParameter::direct_snr_db;
    std::vector<double> values;

    bool operator==(const SweepSection&) const = default;
};

struct RevenueSection {
    std::size_t min_bidders = 1;
    std::size_t max_bidders = 10;
    /// Subcarriers in the bundled comparison.
    std::size_t num_subcarriers = 16;
    double alpha = 1.0;

    bool operator==(const RevenueSection&) const = default;
};

struct ThresholdSection {
    std::size_t bundle_size = 2;
    double value_scale = 1.0;
    std::size_t min_bidders = 2;
    std::size_t max_bidders = 10;

    bool operator==(const ThresholdSection&) const = default;
};

struct FeedbackSection {
    std::size_t min_users = 2;
    std::size_t max_users = 8;
    std::size_t num_subcarriers = 512;
    double bitwidth_q = 10.0;
    double bitwidth_b = 10.0;
    double bitwidth_gamma = 10.0;

    bool operator==(const FeedbackSection&) const = default;
};

struct SequentialSection {
    std::size_t num_users = 6;
    double desired_rate = 6.0;
    /// Target no-cooperation outage; sets the direct-link SNR.
    double baseline_outage = 0.7;
    double helper_link_snr_db = 40.0;
    std::size_t stages = 100;
    double initial_budget = 5000.0;
    std::vector<Strategy> strategies{Strategy::conservative, Strategy::conservative, Strategy::aggressive,
                                     Strategy::aggressive, Strategy::no_help, Strategy::no_help};

    bool operator==(const SequentialSection&) const = default;
};

/// Everything a run needs. SNRs are held in dB exactly as written so the
/// effective document re-parses to an identical value; the linear forms are
/// computed once, in parse_config, into the `*_linear` fields.
struct ExperimentConfig {
    std::size_t num_users = 5;
    std::vector<double> desired_rates;
    std::vector<double> direct_snr_db;
    std::vector<double> helper_link_snr_db;
    double helper_bs_snr_db = 20.0;
    std::optional<double> helper_surplus;
    std::size_t num_partners = 1;
    bool distinct_partners = true;
    double half_duplex_factor = 1.0;
    std::optional<double> rival_estimate_mean;
    std::vector<SelectionPolicy> policies;
    std::optional<SweepSection> sweep;
    OfdmSection ofdm;
    RevenueSection revenue;
    ThresholdSection threshold;
    FeedbackSection feedback;
    SequentialSection sequential;
    std::size_t trials = 10000;
    /// Recorded only; no model uses it.
    double mobile_velocity_kmh = 3.0;

    std::vector<double> direct_snr_linear;
    std::vector<double> helper_link_snr_linear;
    double helper_bs_snr_linear = 100.0;

    bool operator==(const ExperimentConfig&) const = default;

    NetworkConfig network(std::uint64_t seed) const
    {
        NetworkConfig c;
        c.num_users = num_users;
        c.desired_rates = desired_rates;
        c.direct_snrs = direct_snr_linear;
        c.helper_link_snrs = helper_link_snr_linear;
        c.helper_bs_snr = helper_bs_snr_linear;
        if (helper_surplus)
            c.helper_surplus = *helper_surplus;
        c.num_partners = num_partners;
        c.distinct_partners = distinct_partners;
        c.half_duplex_factor = half_duplex_factor;
        c.rival_estimate_mean = rival_estimate_mean;
        c.trials = trials;
        c.seed = seed;
        return c;
    }

    SequentialConfig sequential_config(std::uint64_t seed) const
    {
        SequentialConfig s;
        s.num_users = sequential.num_users;
        s.desired_rate = sequential.desired_rate;
        s.direct_snr = calibrated_direct_snr(sequential.desired_rate, sequential.baseline_outage);
        s.helper_link_snr = db_to_linear(sequential.helper_link_snr_db);
        s.stages = sequential.stages;
        s.initial_budget = sequential.initial_budget;
        s.replications = trials;
        s.strategies = sequential.strategies;
        s.half_duplex_factor = half_duplex_factor;
        s.seed = seed;
        return s;
    }
};

namespace detail {

using Json = nlohmann::ordered_json;

inline void reject_unknown(const Json& obj, std::initializer_list<std::string_view> known, std::string_view where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known)
            ok = ok || it.key() == k;
        if (!ok)
            throw config_error(std::string(where) + it.key() + ": unknown key");
    }
}

template <class T>
T get_field(const Json& obj, std::string_view key, T fallback, std::string_view where)
{
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return fallback;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean())
                throw config_error("expected a boolean");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned())
                throw config_error("expected a non-negative integer");
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (!it->is_number())
                throw config_error("expected a number");
        }
        return it->template get<T>();
    } catch (const std::exception& e) {
        throw config_error(std::string(where) + std::string(key) + ": " + e.what());
    }
}

/// A number (broadcast to `n` entries) or an array of exactly `n` numbers.
inline std::vector<double> get_per_user(const Json& obj, std::string_view key, double fallback, std::size_t n)
{
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return std::vector<double>(n, fallback);
    if (it->is_number())
        return std::vector<double>(n, it->get<double>());
    if (!it->is_array())
        throw config_error(std::string(key) + ": expected a number or an array of numbers");
    if (it->size() != n)
        throw config_error(std::string(key) + ": expected " + std::to_string(n) + " entries (num_users), got " +
                           std::to_string(it->size()));
    std::vector<double> v;
    for (const auto& e : *it) {
        if (!e.is_number())
            throw config_error(std::string(key) + ": entries must be numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

inline void check(bool ok, const std::string& msg)
{
    if (!ok)
        throw config_error(msg);
}

inline SweepParameter sweep_parameter_from_string(const std::string& s)
{
    for (auto p : {SweepParameter::direct_snr_db, SweepParameter::helper_link_snr_db, SweepParameter::desired_rate})
        if (to_string(p) == s)
            return p;
    throw config_error("sweep.parameter: unknown value '" + s + "'");
}

} // namespace detail

inline void validate_config(const ExperimentConfig& c)
{
    using detail::check;
    check(c.num_users >= 1, "num_users: must be >= 1");
    for (double d : c.desired_rates)
        check(d >= 0.0, "desired_rate: must be >= 0");
    check(!c.helper_surplus || *c.helper_surplus >= 0.0, "helper_surplus: must be >= 0");
    check(c.num_partners >= 1 && c.num_partners <= c.num_users, "num_partners: must lie in [1, num_users]");
    check(c.half_duplex_factor == 0.5 || c.half_duplex_factor == 1.0, "half_duplex_factor: must be 0.5 or 1.0");
    check(!c.rival_estimate_mean || *c.rival_estimate_mean >= 0.0, "rival_estimate_mean: must be >= 0");
    check(c.trials >= 1, "trials: must be >= 1");
    check(c.ofdm.num_subcarriers >= 1, "ofdm.num_subcarriers: must be >= 1");
    check(c.ofdm.num_taps >= 1, "ofdm.num_taps: must be >= 1");
    for (auto r : c.ofdm.partners)
        check(r >= 1 && r <= c.ofdm.num_subcarriers, "ofdm.partners: each entry must lie in [1, num_subcarriers]");
    check(c.revenue.min_bidders >= 1 && c.revenue.max_bidders >= c.revenue.min_bidders,
          "revenue: need 1 <= min_bidders <= max_bidders");
    check(c.revenue.max_bidders <= c.revenue.num_subcarriers, "revenue.num_subcarriers: must be >= max_bidders");
    check(c.revenue.alpha > 0.0, "revenue.alpha: must be > 0");
    check(c.threshold.bundle_size >= 1, "threshold.bundle_size: must be >= 1");
    check(c.threshold.value_scale > 0.0, "threshold.value_scale: must be > 0");
    check(c.threshold.min_bidders >= 2 && c.threshold.max_bidders >= c.threshold.min_bidders,
          "threshold: need 2 <= min_bidders <= max_bidders");
    check(c.feedback.min_users >= 1 && c.feedback.max_users >= c.feedback.min_users && c.feedback.max_users <= 170,
          "feedback: need 1 <= min_users <= max_users <= 170");
    check(c.feedback.num_subcarriers >= c.feedback.max_users, "feedback.num_subcarriers: must be >= max_users");
    check(c.feedback.bitwidth_q >= 0.0 && c.feedback.bitwidth_b >= 0.0 && c.feedback.bitwidth_gamma >= 0.0,
          "feedback: bitwidths must be >= 0");
    check(c.sequential.num_users >= 1, "sequential.num_users: must be >= 1");
    check(c.sequential.strategies.size() == c.sequential.num_users,
          "sequential.strategies: must have sequential.num_users entries");
    check(c.sequential.baseline_outage > 0.0 && c.sequential.baseline_outage < 1.0,
          "sequential.baseline_outage: must lie in (0, 1)");
    check(c.sequential.desired_rate > 0.0, "sequential.desired_rate: must be > 0");
    check(c.sequential.stages >= 1, "sequential.stages: must be >= 1");
    check(c.sequential.initial_budget >= 0.0, "sequential.initial_budget: must be >= 0");
    if (c.sweep)
        check(!c.sweep->values.empty(), "sweep.values: must not be empty");
}

/// Parses a JSON document; an empty document gives every default.
inline ExperimentConfig parse_config(std::string_view text)
{
    using detail::get_field;
    using detail::Json;
    Json doc;
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        doc = Json::object();
    } else {
        try {
            doc = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw config_error(std::string("malformed document: ") + e.what());
        }
    }
    detail::check(doc.is_object(), "top level must be an object");
    detail::reject_unknown(doc,
                           {"num_users", "desired_rate", "direct_snr_db", "helper_link_snr_db", "helper_bs_snr_db",
                            "helper_surplus", "num_partners", "distinct_partners", "half_duplex_factor",
                            "rival_estimate_mean", "policies", "sweep", "ofdm", "revenue", "threshold", "feedback",
                            "sequential", "trials", "mobile_velocity_kmh"},
                           "");

    ExperimentConfig c;
    c.num_users = get_field<std::size_t>(doc, "num_users", c.num_users, "");
    detail::check(c.num_users >= 1, "num_users: must be >= 1");
    c.desired_rates = detail::get_per_user(doc, "desired_rate", 10.0, c.num_users);
    c.direct_snr_db = detail::get_per_user(doc, "direct_snr_db", 0.0, c.num_users);
    c.helper_link_snr_db = detail::get_per_user(doc, "helper_link_snr_db", 10.0, c.num_users);
    c.helper_bs_snr_db = get_field<double>(doc, "helper_bs_snr_db", c.helper_bs_snr_db, "");
    if (doc.contains("helper_surplus") && !doc["helper_surplus"].is_null())
        c.helper_surplus = get_field<double>(doc, "helper_surplus", 0.0, "");
    c.num_partners = get_field<std::size_t>(doc, "num_partners", c.num_partners, "");
    c.distinct_partners = get_field<bool>(doc, "distinct_partners", c.distinct_partners, "");
    c.half_duplex_factor = get_field<double>(doc, "half_duplex_factor", c.half_duplex_factor, "");
    if (doc.contains("rival_estimate_mean") && !doc["rival_estimate_mean"].is_null())
        c.rival_estimate_mean = get_field<double>(doc, "rival_estimate_mean", 0.0, "");
    c.trials = get_field<std::size_t>(doc, "trials", c.trials, "");
    c.mobile_velocity_kmh = get_field<double>(doc, "mobile_velocity_kmh", c.mobile_velocity_kmh, "");

    if (const auto it = doc.find("policies"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_array(), "policies: expected an array of names");
        for (const auto& p : *it) {
            detail::check(p.is_string(), "policies: entries must be strings");
            const auto policy = policy_from_string(p.get<std::string>());
            detail::check(policy.has_value(), "policies: unknown policy '" + p.get<std::string>() + "'");
            c.policies.push_back(*policy);
        }
    }
    if (const auto it = doc.find("sweep"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "sweep: expected an object");
        detail::reject_unknown(*it, {"parameter", "values"}, "sweep.");
        SweepSection s;
        s.parameter = detail::sweep_parameter_from_string(get_field<std::string>(*it, "parameter", "direct_snr_db", "sweep."));
        s.values = get_field<std::vector<double>>(*it, "values", {}, "sweep.");
        c.sweep = s;
    }
    if (const auto it = doc.find("ofdm"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "ofdm: expected an object");
        detail::reject_unknown(*it, {"num_subcarriers", "num_taps", "partners"}, "ofdm.");
        c.ofdm.num_subcarriers = get_field<std::size_t>(*it, "num_subcarriers", c.ofdm.num_subcarriers, "ofdm.");
        c.ofdm.num_taps = get_field<std::size_t>(*it, "num_taps", c.ofdm.num_taps, "ofdm.");
        c.ofdm.partners = get_field<std::vector<std::size_t>>(*it, "partners", c.ofdm.partners, "ofdm.");
    }
    if (const auto it = doc.find("revenue"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "revenue: expected an object");
        detail::reject_unknown(*it, {"min_bidders", "max_bidders", "num_subcarriers", "alpha"}, "revenue.");
        auto& r = c.revenue;
        r.min_bidders = get_field<std::size_t>(*it, "min_bidders", r.min_bidders, "revenue.");
        r.max_bidders = get_field<std::size_t>(*it, "max_bidders", r.max_bidders, "revenue.");
        r.num_subcarriers = get_field<std::size_t>(*it, "num_subcarriers", r.num_subcarriers, "revenue.");
        r.alpha = get_field<double>(*it, "alpha", r.alpha, "revenue.");
    }
    if (const auto it = doc.find("threshold"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "threshold: expected an object");
        detail::reject_unknown(*it, {"bundle_size", "value_scale", "min_bidders", "max_bidders"}, "threshold.");
        auto& t = c.threshold;
        t.bundle_size = get_field<std::size_t>(*it, "bundle_size", t.bundle_size, "threshold.");
        t.value_scale = get_field<double>(*it, "value_scale", t.value_scale, "threshold.");
        t.min_bidders = get_field<std::size_t>(*it, "min_bidders", t.min_bidders, "threshold.");
        t.max_bidders = get_field<std::size_t>(*it, "max_bidders", t.max_bidders, "threshold.");
    }
    if (const auto it = doc.find("feedback"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "feedback: expected an object");
        detail::reject_unknown(*it,
                               {"min_users", "max_users", "num_subcarriers", "bitwidth_q", "bitwidth_b", "bitwidth_gamma"},
                               "feedback.");
        auto& f = c.feedback;
        f.min_users = get_field<std::size_t>(*it, "min_users", f.min_users, "feedback.");
        f.max_users = get_field<std::size_t>(*it, "max_users", f.max_users, "feedback.");
        f.num_subcarriers = get_field<std::size_t>(*it, "num_subcarriers", f.num_subcarriers, "feedback.");
        f.bitwidth_q = get_field<double>(*it, "bitwidth_q", f.bitwidth_q, "feedback.");
        f.bitwidth_b = get_field<double>(*it, "bitwidth_b", f.bitwidth_b, "feedback.");
        f.bitwidth_gamma = get_field<double>(*it, "bitwidth_gamma", f.bitwidth_gamma, "feedback.");
    }
    if (const auto it = doc.find("sequential"); it != doc.end() && !it->is_null()) {
        detail::check(it->is_object(), "sequential: expected an object");
        detail::reject_unknown(*it,
                               {"num_users", "desired_rate", "baseline_outage", "helper_link_snr_db", "stages",
                                "initial_budget", "strategies"},
                               "sequential.");
        auto& s = c.sequential;
        s.num_users = get_field<std::size_t>(*it, "num_users", s.num_users, "sequential.");
        s.desired_rate = get_field<double>(*it, "desired_rate", s.desired_rate, "sequential.");
        s.baseline_outage = get_field<double>(*it, "baseline_outage", s.baseline_outage, "sequential.");
        s.helper_link_snr_db = get_field<double>(*it, "helper_link_snr_db", s.helper_link_snr_db, "sequential.");
        s.stages = get_field<std::size_t>(*it, "stages", s.stages, "sequential.");
        s.initial_budget = get_field<double>(*it, "initial_budget", s.initial_budget, "sequential.");
        if (const auto st = it->find("strategies"); st != it->end() && !st->is_null()) {
            detail::check(st->is_array(), "sequential.strategies: expected an array of names");
            s.strategies.clear();
            for (const auto& e : *st) {
                detail::check(e.is_string(), "sequential.strategies: entries must be strings");
                const auto v = strategy_from_string(e.get<std::string>());
                detail::check(v.has_value(), "sequential.strategies: unknown strategy '" + e.get<std::string>() + "'");
                s.strategies.push_back(*v);
            }
        }
    }

    validate_config(c);
    for (double db : c.direct_snr_db)
        c.direct_snr_linear.push_back(db_to_linear(db));
    for (double db : c.helper_link_snr_db)
        c.helper_link_snr_linear.push_back(db_to_linear(db));
    c.helper_bs_snr_linear = db_to_linear(c.helper_bs_snr_db);
    return c;
}

/// Every field, defaults included, in the form parse_config reads.
inline detail::Json effective_config(const ExperimentConfig& c)
{
    using detail::Json;
    Json j;
    j["num_users"] = c.num_users;
    j["desired_rate"] = c.desired_rates;
    j["direct_snr_db"] = c.direct_snr_db;
    j["helper_link_snr_db"] = c.helper_link_snr_db;
    j["helper_bs_snr_db"] = c.helper_bs_snr_db;
    j["helper_surplus"] = c.helper_surplus ? Json(*c.helper_surplus) : Json(nullptr);
    j["num_partners"] = c.num_partners;
    j["distinct_partners"] = c.distinct_partners;
    j["half_duplex_factor"] = c.half_duplex_factor;
    j["rival_estimate_mean"] = c.rival_estimate_mean ? Json(*c.rival_estimate_mean) : Json(nullptr);
    Json policies = Json::array();
    for (auto p : c.policies)
        policies.push_back(std::string(to_string(p)));
    j["policies"] = policies;
    if (c.sweep)
        j["sweep"] = Json{{"parameter", std::string(to_string(c.sweep->parameter))}, {"values", c.sweep->values}};
    else
        j["sweep"] = nullptr;
    j["ofdm"] = Json{{"num_subcarriers", c.ofdm.num_subcarriers}, {"num_taps", c.ofdm.num_taps}, {"partners", c.ofdm.partners}};
    j["revenue"] = Json{{"min_bidders", c.revenue.min_bidders},
                        {"max_bidders", c.revenue.max_bidders},
                        {"num_subcarriers", c.revenue.num_subcarriers},
                        {"alpha", c.revenue.alpha}};
    j["threshold"] = Json{{"bundle_size", c.threshold.bundle_size},
                          {"value_scale", c.threshold.value_scale},
                          {"min_bidders", c.threshold.min_bidders},
                          {"max_bidders", c.threshold.max_bidders}};
    j["feedback"] = Json{{"min_users", c.feedback.min_users},          {"max_users", c.feedback.max_users},
                         {"num_subcarriers", c.feedback.num_subcarriers}, {"bitwidth_q", c.feedback.bitwidth_q},
                         {"bitwidth_b", c.feedback.bitwidth_b},        {"bitwidth_gamma", c.feedback.bitwidth_gamma}};
    Json strategies = Json::array();
    for (auto s : c.sequential.strategies)
        strategies.push_back(std::string(to_string(s)));
    j["sequential"] = Json{{"num_users", c.sequential.num_users},
                           {"desired_rate", c.sequential.desired_rate},
                           {"baseline_outage", c.sequential.baseline_outage},
                           {"helper_link_snr_db", c.sequential.helper_link_snr_db},
                           {"stages", c.sequential.stages},
                           {"initial_budget", c.sequential.initial_budget},
                           {"strategies", strategies}};
    j["trials"] = c.trials;
    j["mobile_velocity_kmh"] = c.mobile_velocity_kmh;
    return j;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a64(effective_config(c).dump()); }

} // namespace acops

#endif
