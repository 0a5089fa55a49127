#pragma once

// JSON run configuration. Parsing is strict: unknown keys, wrong types and
// out-of-range values are rejected with the offending key path, and every
// default is materialized so serialize() records the complete run.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgqa/classical.hpp"
#include "lgqa/experiments.hpp"

namespace lgqa::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<double> default_d_grid() { return {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}; }

struct RunConfig {
    ExperimentConfig experiment;
    /// Readout variances for the resenergy sweep.
    std::vector<double> d_grid = default_d_grid();
    /// n_traj and master_seed always mirror `experiment`.
    LangevinParams langevin;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

class Section {
public:
    Section(const json& root, std::string path) : path_(std::move(path)) {
        if (root.is_null()) return;
        if (!root.is_object()) throw ConfigError(where() + ": expected an object");
        obj_ = &root;
    }

    void allow(std::initializer_list<const char*> keys) const {
        if (!obj_) return;
        const std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& [k, v] : obj_->items()) {
            if (!known.count(k)) throw ConfigError(key(k) + ": unknown key");
        }
    }

    [[nodiscard]] bool has(const char* k) const { return obj_ && obj_->contains(k); }
    [[nodiscard]] const json& at(const char* k) const { return obj_->at(k); }
    [[nodiscard]] std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    [[nodiscard]] std::string where() const { return path_.empty() ? "config" : path_; }

    [[nodiscard]] double number(const char* k, double fallback) const {
        if (!has(k)) return fallback;
        const json& v = at(k);
        if (!v.is_number()) throw ConfigError(key(k) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(key(k) + ": must be finite");
        return x;
    }

    [[nodiscard]] bool boolean(const char* k, bool fallback) const {
        if (!has(k)) return fallback;
        if (!at(k).is_boolean()) throw ConfigError(key(k) + ": expected true or false");
        return at(k).get<bool>();
    }

    [[nodiscard]] std::uint64_t unsigned_integer(const char* k, std::uint64_t fallback) const {
        if (!has(k)) return fallback;
        const json& v = at(k);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) throw ConfigError(key(k) + ": must be >= 0");
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (x >= 0.0 && x < 1.8e19 && x == std::floor(x)) return static_cast<std::uint64_t>(x);
        }
        throw ConfigError(key(k) + ": expected a non-negative integer");
    }

    [[nodiscard]] std::string string(const char* k, const std::string& fallback) const {
        if (!has(k)) return fallback;
        if (!at(k).is_string()) throw ConfigError(key(k) + ": expected a string");
        return at(k).get<std::string>();
    }

    [[nodiscard]] std::vector<double> numbers(const char* k, const std::vector<double>& fallback) const {
        if (!has(k)) return fallback;
        const json& v = at(k);
        if (!v.is_array()) throw ConfigError(key(k) + ": expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                throw ConfigError(key(k) + "[" + std::to_string(i) + "]: expected a finite number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

private:
    const json* obj_ = nullptr;
    std::string path_;
};

inline void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path + ": " + what);
}

inline const json& child(const json& root, const char* k) {
    static const json null_json;
    return root.contains(k) ? root.at(k) : null_json;
}

}  // namespace detail

/// Builds a RunConfig from a parsed JSON document.
inline RunConfig config_from_json(const json& root) {
    using detail::require;
    const detail::Section top(root, "");
    top.allow({"anneal", "bath", "measurement", "integrator", "experiment", "langevin"});

    RunConfig rc;
    ExperimentConfig& ec = rc.experiment;

    const detail::Section an(detail::child(root, "anneal"), "anneal");
    an.allow({"gamma_x", "gamma_z", "t_f"});
    ec.sched.gamma_x = an.number("gamma_x", ec.sched.gamma_x);
    ec.sched.gamma_z = an.number("gamma_z", ec.sched.gamma_z);
    ec.sched.t_f = an.number("t_f", ec.sched.t_f);
    require(ec.sched.gamma_x > 0.0, "anneal.gamma_x", "must be > 0");
    require(ec.sched.gamma_z > 0.0, "anneal.gamma_z", "must be > 0");
    require(ec.sched.t_f > 0.0, "anneal.t_f", "must be > 0");

    const detail::Section bath(detail::child(root, "bath"), "bath");
    bath.allow({"alpha", "beta", "omega_c", "lamb_shift"});
    ec.bath.alpha = bath.number("alpha", ec.bath.alpha);
    ec.bath.beta = bath.number("beta", ec.bath.beta);
    ec.bath.omega_c = bath.number("omega_c", ec.bath.omega_c);
    ec.bath.lamb_shift = bath.boolean("lamb_shift", ec.bath.lamb_shift);
    require(ec.bath.alpha >= 0.0, "bath.alpha", "must be >= 0");
    require(ec.bath.beta > 0.0, "bath.beta", "must be > 0");
    require(ec.bath.omega_c > 0.0, "bath.omega_c", "must be > 0");

    const detail::Section meas(detail::child(root, "measurement"), "measurement");
    meas.allow({"D"});
    ec.meas.D = meas.number("D", ec.meas.D);
    require(ec.meas.D > 0.0, "measurement.D", "must be > 0");

    const detail::Section integ(detail::child(root, "integrator"), "integrator");
    integ.allow({"dt", "method", "renormalize"});
    ec.integ.dt = integ.number("dt", ec.integ.dt);
    require(ec.integ.dt > 0.0, "integrator.dt", "must be > 0");
    require(ec.integ.dt <= ec.sched.t_f / 100.0 * (1.0 + 1e-12), "integrator.dt", "must be <= anneal.t_f/100");
    require(integ.string("method", "rk4") == "rk4", "integrator.method", "only \"rk4\" is supported");
    ec.integ.renormalize = integ.boolean("renormalize", ec.integ.renormalize);

    const detail::Section ex(detail::child(root, "experiment"), "experiment");
    ex.allow({"n_traj", "master_seed", "tau_grid", "mode", "dynamics", "d_grid"});
    ec.n_traj = static_cast<std::size_t>(ex.unsigned_integer("n_traj", ec.n_traj));
    require(ec.n_traj >= 1, "experiment.n_traj", "must be >= 1");
    ec.master_seed = ex.unsigned_integer("master_seed", ec.master_seed);
    ec.tau_grid = ex.numbers("tau_grid", default_tau_grid(ec.sched.t_f));
    for (std::size_t i = 0; i < ec.tau_grid.size(); ++i) {
        const double tau = ec.tau_grid[i];
        require(tau >= 0.0 && ec.integ.snap(2.0 * tau) <= ec.sched.t_f * (1.0 + 1e-12),
                "experiment.tau_grid[" + std::to_string(i) + "]", "must lie in [0, anneal.t_f/2]");
    }
    const std::string mode = ex.string("mode", "weak");
    require(mode == "weak" || mode == "projective", "experiment.mode", "expected \"weak\" or \"projective\"");
    ec.mode = mode == "weak" ? MeasurementMode::weak : MeasurementMode::projective;
    const std::string dyn = ex.string("dynamics", "quantum");
    require(dyn == "quantum" || dyn == "classical", "experiment.dynamics", "expected \"quantum\" or \"classical\"");
    ec.dynamics = dyn == "quantum" ? Dynamics::quantum : Dynamics::classical;
    rc.d_grid = ex.numbers("d_grid", rc.d_grid);
    for (std::size_t i = 0; i < rc.d_grid.size(); ++i) {
        require(rc.d_grid[i] > 0.0, "experiment.d_grid[" + std::to_string(i) + "]", "must be > 0");
    }

    const detail::Section lv(detail::child(root, "langevin"), "langevin");
    lv.allow({"eta", "beta", "dt", "precession_factor"});
    LangevinParams& lp = rc.langevin;
    lp.eta = lv.number("eta", eta_from_alpha(ec.bath.alpha));
    lp.beta = lv.number("beta", ec.bath.beta);
    lp.dt = lv.number("dt", ec.integ.dt);
    lp.precession_factor = lv.number("precession_factor", lp.precession_factor);
    lp.n_traj = ec.n_traj;
    lp.master_seed = ec.master_seed;
    require(lp.eta >= 0.0, "langevin.eta", "must be >= 0");
    require(lp.beta > 0.0, "langevin.beta", "must be > 0");
    require(lp.dt > 0.0, "langevin.dt", "must be > 0");
    require(lp.precession_factor > 0.0, "langevin.precession_factor", "must be > 0");

    try {
        ec.validate();
        lp.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return rc;
}

inline RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return config_from_json(root);
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Fully materialized JSON form; parse(serialize(c)) == c.
inline json serialize(const RunConfig& rc) {
    const ExperimentConfig& ec = rc.experiment;
    const LangevinParams& lp = rc.langevin;
    return json{
        {"anneal", {{"gamma_x", ec.sched.gamma_x}, {"gamma_z", ec.sched.gamma_z}, {"t_f", ec.sched.t_f}}},
        {"bath",
         {{"alpha", ec.bath.alpha},
          {"beta", ec.bath.beta},
          {"omega_c", ec.bath.omega_c},
          {"lamb_shift", ec.bath.lamb_shift}}},
        {"measurement", {{"D", ec.meas.D}}},
        {"integrator", {{"dt", ec.integ.dt}, {"method", "rk4"}, {"renormalize", ec.integ.renormalize}}},
        {"experiment",
         {{"n_traj", ec.n_traj},
          {"master_seed", ec.master_seed},
          {"tau_grid", ec.tau_grid},
          {"mode", ec.mode == MeasurementMode::weak ? "weak" : "projective"},
          {"dynamics", ec.dynamics == Dynamics::quantum ? "quantum" : "classical"},
          {"d_grid", rc.d_grid}}},
        {"langevin",
         {{"eta", lp.eta}, {"beta", lp.beta}, {"dt", lp.dt}, {"precession_factor", lp.precession_factor}}},
    };
}

}  // namespace lgqa::cli
