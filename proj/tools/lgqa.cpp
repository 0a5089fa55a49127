// lgqa <subcommand> --config <path> [--out <dir>] [--workers N] [--seed S]
// lgqa rerun --manifest <path> [--out <dir>] [--workers N]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lgqa/cli/commands.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Options {
    std::string config;
    std::string manifest;
    std::string out = "out";
    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace lgqa;
    CLI::App app{"Leggett-Garg tests of a dissipative single-qubit anneal"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cli::kVersion);

    Options opt;
    std::optional<cli::Command> chosen;
    for (cli::Command c : {cli::Command::anneal, cli::Command::lgi, cli::Command::resenergy,
                           cli::Command::classical_lgi}) {
        auto* sub = app.add_subcommand(cli::to_string(c));
        sub->add_option("--config", opt.config, "JSON configuration file")->required();
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--workers", opt.workers, "worker threads (0 = all cores)")->capture_default_str();
        sub->add_option("--seed", opt.seed, "override experiment.master_seed");
        sub->callback([&chosen, c] { chosen = c; });
    }
    auto* rerun = app.add_subcommand("rerun", "repeat the run recorded in a manifest.json");
    rerun->add_option("--manifest", opt.manifest, "manifest.json from an earlier run")->required();
    rerun->add_option("--out", opt.out, "output directory")->capture_default_str();
    rerun->add_option("--workers", opt.workers, "worker threads (0 = all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    cli::Command cmd{};
    cli::RunConfig rc;
    try {
        if (rerun->parsed()) {
            auto m = cli::read_manifest(opt.manifest);
            cmd = m.command;
            rc = std::move(m.config);
        } else {
            cmd = *chosen;
            rc = cli::parse_config(opt.config);
            if (opt.seed) {
                rc.experiment.master_seed = *opt.seed;
                rc.langevin.master_seed = *opt.seed;
            }
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto res = cli::run_command(cmd, rc, opt.out, Parallelism{opt.workers});
        for (const auto& p : res.outputs) std::cout << p.string() << '\n';
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
