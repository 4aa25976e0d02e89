// bbm-modlab: run config-driven experiments, list what exists, print the schema.
//
// exit codes: 0 all checks passed, 1 some check failed, 2 config rejected,
//             3 hypothesis violation, 4 numerical divergence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bbm/experiments.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& outdir_flag) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config file '" << config_path << "'\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    bbm::json raw;
    try {
        raw = bbm::json::parse(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }

    std::string outdir = outdir_flag;
    if (outdir.empty()) {
        if (const char* env = std::getenv("BBM_MODLAB_OUT")) outdir = env;
    }

    bbm::ExperimentOutcome outcome;
    try {
        outcome = bbm::run_config(raw, outdir);
    } catch (const bbm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bbm::HypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    std::cout << "experiment: " << outcome.summary.at("experiment").get<std::string>() << "\n";
    std::cout << "run id:     " << outcome.run_id << "\n";
    std::cout << "output dir: " << outcome.dir << "\n";
    for (const auto& ch : outcome.manifest.at("checks")) {
        std::cout << (ch.at("pass").get<bool>() ? "  PASS  " : "  FAIL  ")
                  << ch.at("name").get<std::string>();
        if (ch.contains("value"))
            std::cout << "  (value " << ch.at("value").get<double>() << ", limit "
                      << ch.at("limit").get<double>() << ")";
        std::cout << "\n";
    }
    if (outcome.diverged) {
        std::cout << "result: diverged (partial outputs written)\n";
        return 4;
    }
    std::cout << "result: " << (outcome.all_pass ? "all checks passed" : "some checks FAILED")
              << "\n";
    return outcome.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a regularized long-wave model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir_flag;
    auto* run = app.add_subcommand("run", "resolve and run a JSON experiment config");
    run->add_option("config", config_path, "path to the config file")->required();
    run->add_option("--outdir", outdir_flag,
                    "output root (overrides config and BBM_MODLAB_OUT)");

    auto* list = app.add_subcommand("list", "list experiments and quotient kinds");
    auto* schema = app.add_subcommand("schema", "print the config schema as JSON");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::cout << bbm::list_experiments();
        return 0;
    }
    if (schema->parsed()) {
        std::cout << bbm::schema_text();
        return 0;
    }
    return run_command(config_path, outdir_flag);
}
