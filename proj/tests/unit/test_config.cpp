#include <string>

#include <gtest/gtest.h>

#include "acops/config.hpp"
#include "acops/experiments.hpp"

using namespace acops;

TEST(ParseConfig, EmptyDocumentGivesDefaults)
{
    const auto c = parse_config("{}");
    EXPECT_EQ(c.num_users, 5u);
    ASSERT_EQ(c.desired_rates.size(), 5u);
    EXPECT_EQ(c.desired_rates[0], 10.0);
    EXPECT_EQ(c.direct_snr_db, std::vector<double>(5, 0.0));
    EXPECT_EQ(c.helper_link_snr_linear, std::vector<double>(5, 10.0));
    EXPECT_DOUBLE_EQ(c.helper_bs_snr_linear, 100.0);
    EXPECT_EQ(parse_config(""), c);
}

TEST(ParseConfig, Rejections)
{
    EXPECT_THROW(parse_config("{\"num_users\": 0}"), config_error);
    EXPECT_THROW(parse_config("{\"num_user\": 4}"), config_error);
    EXPECT_THROW(parse_config("{\"ofdm\": {\"taps\": 4}}"), config_error);
    EXPECT_THROW(parse_config("{\"num_users\": 3, \"direct_snr_db\": [1, 2]}"), config_error);
    EXPECT_THROW(parse_config("{\"policies\": [\"oracle\"]}"), config_error);
    EXPECT_THROW(parse_config("{\"trials\": -5}"), config_error);
    EXPECT_THROW(parse_config("[1, 2"), config_error);
}

TEST(ParseConfig, DecibelsConvertedOnce)
{
    const auto c = parse_config("{\"num_users\": 2, \"direct_snr_db\": [10, -10], \"helper_bs_snr_db\": 30}");
    EXPECT_EQ(c.direct_snr_db, (std::vector<double>{10.0, -10.0}));
    EXPECT_DOUBLE_EQ(c.direct_snr_linear[0], 10.0);
    EXPECT_DOUBLE_EQ(c.direct_snr_linear[1], 0.1);
    const auto n = c.network(1);
    EXPECT_EQ(n.direct_snrs, c.direct_snr_linear);
    EXPECT_DOUBLE_EQ(n.helper_bs_snr, 1000.0);
    // Re-parsing the effective document must not convert a second time.
    const auto again = parse_config(effective_config(c).dump());
    EXPECT_EQ(again.direct_snr_linear, c.direct_snr_linear);
}

TEST(ParseConfig, RoundTrip)
{
    const auto c = parse_config(R"({"num_users": 3, "direct_snr_db": [1.5, -2, 7.25], "distinct_partners": false,
                                    "sweep": {"parameter": "desired_rate", "values": [1, 2]},
                                    "sequential": {"stages": 12}, "trials": 77})");
    EXPECT_EQ(parse_config(effective_config(c).dump()), c);
    EXPECT_EQ(config_hash(c), config_hash(parse_config(effective_config(c).dump(2))));
    EXPECT_NE(config_hash(c), config_hash(parse_config("{}")));
}

TEST(Commands, NamesRoundTrip)
{
    for (auto cmd : {Command::outage_single, Command::outage_bundle, Command::revenue, Command::threshold,
                     Command::feedback, Command::sequential, Command::validate})
        EXPECT_EQ(command_from_string(to_string(cmd)), cmd);
    EXPECT_FALSE(command_from_string("outage").has_value());
}

TEST(Csv, HeaderAndLineEndings)
{
    const auto c = parse_config("{\"feedback\": {\"min_users\": 2, \"max_users\": 3}}");
    const auto csv = render_csv(run_experiment(Command::feedback, c, 1, 1).rows);
    EXPECT_EQ(csv.rfind(std::string(kCsvHeader) + "\n", 0), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.back(), '\n');
}

TEST(Csv, ByteIdenticalAcrossThreadCounts)
{
    const auto c = parse_config(R"({"num_users": 4, "desired_rate": 2, "trials": 5000,
                                    "sweep": {"parameter": "direct_snr_db", "values": [0, 5]}})");
    const auto a = render_csv(run_experiment(Command::outage_single, c, 99, 1).rows);
    const auto b = render_csv(run_experiment(Command::outage_single, c, 99, 3).rows);
    EXPECT_EQ(a, b);
    const auto other = render_csv(run_experiment(Command::outage_single, c, 100, 1).rows);
    EXPECT_NE(a, other);
}

TEST(Sidecar, Fields)
{
    const auto c = parse_config("{}");
    const auto j = sidecar(Command::threshold, c, 42, detail::Json::object());
    EXPECT_EQ(j["command"], "threshold");
    EXPECT_EQ(j["seed"], 42u);
    EXPECT_EQ(j["tool_version"], std::string(kToolVersion));
    EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
    EXPECT_TRUE(j.contains("effective_config"));
}
