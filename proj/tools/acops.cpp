// acops: command-line front end for the partner-selection experiments.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "acops/config.hpp"
#include "acops/errors.hpp"
#include "acops/experiments.hpp"
#include "acops/validation.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::uint64_t parse_seed(const std::string& text, const char* what)
{
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-')
        throw acops::config_error(std::string(what) + ": not an unsigned 64-bit integer: '" + text + "'");
    return v;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw acops::io_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Auction-based cooperative partner selection: simulator and analytic engine"};
    app.set_version_flag("--version", std::string(acops::kToolVersion));
    std::string command, config_path, seed_text, out_path;
    std::size_t trials = 0;
    unsigned threads = 0;
    app.add_option("command", command,
                   "outage-single | outage-bundle | revenue | threshold | feedback | sequential | validate")
        ->required();
    app.add_option("--config", config_path, "JSON configuration; omitted keys take defaults");
    app.add_option("--seed", seed_text, "master seed (default: $ACOPS_SEED, else 20091102)");
    app.add_option("--trials", trials, "trials per grid point (replications for sequential)");
    app.add_option("--out", out_path, "CSV output path; a .meta.json sidecar is written next to it");
    app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency; results do not depend on it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const auto cmd = acops::command_from_string(command);
        if (!cmd)
            throw acops::config_error("unknown command '" + command + "'");

        std::uint64_t seed = acops::kDefaultSeed;
        if (const char* env = std::getenv("ACOPS_SEED"); env && *env)
            seed = parse_seed(env, "ACOPS_SEED");
        if (!seed_text.empty())
            seed = parse_seed(seed_text, "--seed");

        auto config = acops::parse_config(config_path.empty() ? std::string() : read_file(config_path));
        if (trials != 0)
            config.trials = trials;
        acops::validate_config(config);

        if (*cmd == acops::Command::validate) {
            const auto checks = acops::run_validation(seed, threads);
            bool all = true;
            std::vector<acops::CsvRow> rows;
            for (std::size_t i = 0; i < checks.size(); ++i) {
                const auto& c = checks[i];
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                all = all && c.passed;
                rows.push_back({static_cast<double>(i), c.name, std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                std::nullopt});
            }
            if (!out_path.empty()) {
                acops::ExperimentResult r;
                for (const auto& c : checks)
                    r.summary[c.name] = c.passed;
                r.rows = std::move(rows);
                acops::write_outputs(out_path, *cmd, config, seed, r);
            }
            return all ? 0 : kExitFailure;
        }

        if (out_path.empty() && *cmd != acops::Command::threshold)
            throw acops::config_error("--out is required for " + command);
        const auto result = acops::run_experiment(*cmd, config, seed, threads);
        for (const auto& line : result.messages)
            std::cout << line << '\n';
        if (!out_path.empty())
            acops::write_outputs(out_path, *cmd, config, seed, result);
        return 0;
    } catch (const acops::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const acops::io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const acops::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
