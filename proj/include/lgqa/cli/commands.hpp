#pragma once

// Subcommand drivers: each maps a RunConfig to one experiment family and
// writes CSV results plus a manifest.json describing the run.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lgqa/cli/config.hpp"
#include "lgqa/classical.hpp"
#include "lgqa/experiments.hpp"

namespace lgqa::cli {

inline constexpr const char* kToolName = "lgqa";
inline constexpr const char* kVersion = "0.1.0";

enum class Command { anneal, lgi, resenergy, classical_lgi };

inline std::string to_string(Command c) {
    switch (c) {
        case Command::anneal: return "anneal";
        case Command::lgi: return "lgi";
        case Command::resenergy: return "resenergy";
        case Command::classical_lgi: return "classical-lgi";
    }
    return "?";
}

inline Command command_from_string(const std::string& s) {
    for (Command c : {Command::anneal, Command::lgi, Command::resenergy, Command::classical_lgi}) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("unknown subcommand \"" + s + "\"");
}

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

struct RunResult {
    std::vector<std::filesystem::path> outputs;
};

namespace detail {

inline void write_k3_rows(CsvWriter& csv, const std::vector<LgiPoint>& points) {
    for (const auto& r : k3_results(points)) {
        csv.row({fmt(r.tau), std::string(to_string(r.variant)), fmt(r.value), fmt(r.stderr_)});
    }
}

inline void write_correlators(const std::filesystem::path& path, const std::vector<LgiPoint>& points) {
    CsvWriter csv(path, {"tau", "c12", "c12_stderr", "c23", "c23_stderr", "c13", "c13_stderr", "n"});
    for (const auto& p : points) {
        csv.row({fmt(p.tau), fmt(p.c12.mean), fmt(p.c12.stderr_), fmt(p.c23.mean), fmt(p.c23.stderr_),
                 fmt(p.c13.mean), fmt(p.c13.stderr_), std::to_string(p.c12.n)});
    }
}

}  // namespace detail

inline RunResult run_anneal(const RunConfig& rc, const std::filesystem::path& out) {
    const AnnealRun run = run_single_anneal(rc.experiment);
    RunResult res;
    res.outputs = {out / "anneal.csv", out / "anneal_trace.csv"};
    {
        CsvWriter csv(res.outputs[0], {"t_f", "res_energy", "fidelity"});
        csv.row({fmt(rc.experiment.sched.t_f), fmt(run.res_energy), fmt(run.fidelity)});
    }
    CsvWriter trace(res.outputs[1], {"t", "sigma_x", "sigma_z", "ground_population"});
    for (const auto& p : run.trace) trace.row({fmt(p.t), fmt(p.sigma_x), fmt(p.sigma_z), fmt(p.ground_population)});
    return res;
}

inline RunResult run_lgi(const RunConfig& rc, const std::filesystem::path& out, const Parallelism& par,
                         bool classical) {
    const std::string stem = classical ? "classical_lgi" : "lgi";
    const std::vector<LgiPoint> points =
        classical ? classical_lgi_sweep(rc.langevin, rc.experiment.sched, rc.experiment.tau_grid, par)
                  : lgi_sweep(rc.experiment, par);
    RunResult res;
    res.outputs = {out / (stem + ".csv"), out / (stem + "_correlators.csv")};
    {
        CsvWriter csv(res.outputs[0], {"tau", "variant", "k3", "stderr"});
        detail::write_k3_rows(csv, points);
    }
    detail::write_correlators(res.outputs[1], points);
    return res;
}

inline RunResult run_resenergy(const RunConfig& rc, const std::filesystem::path& out, const Parallelism& par) {
    const auto rows = resenergy_sweep(rc.experiment, rc.d_grid, par);
    RunResult res;
    res.outputs = {out / "resenergy.csv", out / "resenergy_detail.csv"};
    CsvWriter csv(res.outputs[0], {"D", "tau", "res_energy", "fidelity"});
    CsvWriter detail(res.outputs[1], {"D", "tau", "res_energy_stderr", "fidelity_stderr", "p_up", "coherence_re",
                                      "coherence_im", "n"});
    for (const auto& r : rows) {
        csv.row({fmt(r.D), fmt(r.tau), fmt(r.res_energy), fmt(r.fidelity)});
        detail.row({fmt(r.D), fmt(r.tau), fmt(r.res_energy_stderr), fmt(r.fidelity_stderr),
                    fmt(r.mean_state.p_up()), fmt(r.mean_state.coherence().real()),
                    fmt(r.mean_state.coherence().imag()), std::to_string(r.n)});
    }
    return res;
}

/// Runs `cmd` and writes its outputs and manifest.json into `out`.
inline RunResult run_command(Command cmd, const RunConfig& rc, const std::filesystem::path& out,
                             const Parallelism& par = {}) {
    std::filesystem::create_directories(out);
    const auto start = std::chrono::steady_clock::now();
    RunResult res;
    switch (cmd) {
        case Command::anneal: res = run_anneal(rc, out); break;
        case Command::lgi: res = run_lgi(rc, out, par, rc.experiment.dynamics == Dynamics::classical); break;
        case Command::resenergy: res = run_resenergy(rc, out, par); break;
        case Command::classical_lgi: res = run_lgi(rc, out, par, true); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json outputs = json::array();
    for (const auto& p : res.outputs) outputs.push_back(p.filename().string());
    const json manifest{{"tool", kToolName},
                        {"version", kVersion},
                        {"subcommand", to_string(cmd)},
                        {"config", serialize(rc)},
                        {"master_seed", rc.experiment.master_seed},
                        {"wall_clock_seconds", wall},
                        {"outputs", outputs}};
    const auto manifest_path = out / "manifest.json";
    std::ofstream(manifest_path) << manifest.dump(2) << '\n';
    res.outputs.push_back(manifest_path);
    return res;
}

struct ManifestRun {
    Command command;
    RunConfig config;
};

/// Reads back the subcommand and resolved config recorded in a manifest.
inline ManifestRun read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("manifest: cannot open " + path);
    json m;
    try {
        m = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("manifest: malformed JSON: ") + e.what());
    }
    if (!m.is_object() || !m.contains("subcommand") || !m.contains("config") || !m["subcommand"].is_string()) {
        throw ConfigError("manifest: missing subcommand or config");
    }
    return {command_from_string(m["subcommand"].get<std::string>()), config_from_json(m["config"])};
}

}  // namespace lgqa::cli
