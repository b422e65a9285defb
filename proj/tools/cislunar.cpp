// Command-line front end: run, sweep, compare-models, report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "cislunar/errors.hpp"
#include "cislunar/runner.hpp"
#include "cislunar/scenario_io.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

int fail(int code, const std::string& kind, const std::string& message, const std::string& key = {}, int line = 0) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    if (!key.empty()) j["key"] = key;
    if (line > 0) j["line"] = line;
    std::cerr << j.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cislunar;

    CLI::App app{"Cislunar clock-network simulator"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    std::string conv_a = "ModelA";
    std::string conv_b = "ModelB";
    unsigned threads = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config, "Scenario file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out, "Output directory (default: $CISLUNAR_OUT_DIR or ./out)");
        cmd->add_option("--seed", seed, "Override the scenario seed");
        cmd->add_flag("--quiet", quiet, "Print nothing on success");
    };
    auto* run = app.add_subcommand("run", "Simulate a scenario and write its artifacts");
    add_common(run, true);
    auto* sweep = app.add_subcommand("sweep", "Latin-hypercube sweep of the correction scales");
    add_common(sweep, true);
    sweep->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");
    auto* compare = app.add_subcommand("compare-models", "Swap two coordinate conventions");
    add_common(compare, true);
    compare->add_option("--model-a", conv_a, "First convention name");
    compare->add_option("--model-b", conv_b, "Second convention name");
    auto* report = app.add_subcommand("report", "Summarize the artifacts in an output directory");
    add_common(report, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }

    const fs::path out_dir = out.empty() ? default_out_dir() : fs::path(out);
    try {
        if (report->parsed()) {
            print_report(out_dir, std::cout);
            return exit_ok;
        }
        Scenario scenario = load_scenario(config);
        if (seed) scenario.seed = *seed;

        if (run->parsed()) {
            const auto artifacts = run_scenario(scenario, out_dir);
            if (!quiet) {
                for (const auto& v : artifacts.verdicts) {
                    std::cout << v.check.name << ": " << v.measured << " us/day -> " << (v.pass ? "pass" : "fail")
                              << '\n';
                }
                for (const auto& f : artifacts.files) std::cout << "wrote " << f.string() << '\n';
            }
        } else if (sweep->parsed()) {
            const auto s = run_sweep(scenario, out_dir, threads);
            if (!quiet) {
                std::cout << "faithfulness " << s.faithfulness << " (" << s.passing << " of " << s.samples
                          << " below " << s.epsilon << " s)\n"
                          << "tuned worst pair " << s.tuned.worst_pair_error << " s\n"
                          << "secular off " << s.secular_off.divergence_rate * 1e6 << " us/day\n"
                          << "drift off " << s.drift_off.divergence_rate * 1e6 << " us/day\n";
            }
        } else if (compare->parsed()) {
            const auto r = run_compare_models(scenario, conv_a, conv_b, out_dir);
            if (!quiet) {
                std::cout << "max pairwise delta " << r.max_pairwise_delta << " s\n"
                          << "max label delta " << r.max_label_delta << " s\n";
            }
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        return fail(exit_config, "config", e.what(), e.key(), e.line());
    } catch (const std::exception& e) {
        return fail(exit_runtime, "runtime", e.what());
    }
}
