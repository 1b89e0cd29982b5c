// onebit-sim: Monte-Carlo driver.
//
//   onebit-sim run <config> [--out DIR] [--seed U64] [--threads INT]
//   onebit-sim list-scenarios
//   onebit-sim selftest
//
// Failures print a single JSON object on stderr and exit nonzero.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "onebit/config.hpp"
#include "onebit/harness.hpp"
#include "onebit/metrics.hpp"
#include "onebit/testing/oracles.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
    nlohmann::json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    return code;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw onebit::ConfigError("cannot write '" + path.string() + "'");
    }
}

int run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
        int threads) {
    onebit::ExperimentConfig config = onebit::load_config(config_path);
    if (seed) {
        config.master_seed = *seed;
    }
    if (threads < 0) {
        throw onebit::ConfigError("--threads must be non-negative");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw onebit::ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    }
    const std::filesystem::path dir(out_dir);
    write_text(dir / "config.echo", onebit::emit_config(config));

    onebit::RunOptions options;
    options.threads = threads;
    const onebit::MetricTable table = onebit::run_experiment(config, options);
    onebit::emit_csv(table, (dir / "metrics.csv").string());
    std::cout << table.to_csv();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-bit massive MIMO SVM estimation and detection simulator"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run a Monte-Carlo experiment");
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    run_cmd->add_option("config", config_path, "experiment config file")->required();
    run_cmd->add_option("--out", out_dir, "directory for metrics.csv and config.echo");
    run_cmd->add_option("--seed", seed, "override master_seed");
    run_cmd->add_option("--threads", threads, "worker threads, 0 = all cores");

    auto* list_cmd = app.add_subcommand("list-scenarios", "list the supported scenarios");
    auto* self_cmd = app.add_subcommand("selftest", "run the oracle and property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*run_cmd) {
            return run(config_path, out_dir, seed, threads);
        }
        if (*list_cmd) {
            for (const auto& s : onebit::list_scenarios()) {
                std::cout << s.name << '\t' << s.description << '\n';
            }
            return 0;
        }
        if (*self_cmd) {
            const int failures = onebit::testing::run_selftest(std::cout);
            if (failures > 0) {
                return fail("selftest", std::to_string(failures) + " check(s) failed", 1);
            }
            return 0;
        }
    } catch (const onebit::ConfigError& e) {
        return fail("config", e.what(), 3);
    } catch (const onebit::InvalidInput& e) {
        return fail("invalid_input", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 4);
    }
    return 0;
}
