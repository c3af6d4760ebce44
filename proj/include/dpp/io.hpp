#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/errors.hpp"

namespace dpp {

// Shortest text form that round-trips a double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV with "# " comment lines carrying the run configuration and seed, then a
// header row and numeric rows at full precision.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : own_(path), out_(&own_) {
        if (!own_) throw PreconditionError("cannot open '" + path + "' for writing");
    }
    explicit CsvWriter(std::ostream& out) : out_(&out) {}

    void comment(const std::string& line) { *out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            *out_ << (i ? "," : "") << cols[i];
        *out_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            *out_ << (i ? "," : "") << fmt17(vals[i]);
        *out_ << "\n";
    }

    void raw_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            *out_ << (i ? "," : "") << cells[i];
        *out_ << "\n";
    }

  private:
    std::ofstream own_;
    std::ostream* out_;
};

// JSON-lines stream; by convention the first record carries the run
// configuration, every later record one sample or snapshot.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::string& path) : own_(path), out_(&own_) {
        if (!own_) throw PreconditionError("cannot open '" + path + "' for writing");
    }
    explicit JsonlWriter(std::ostream& out) : out_(&out) {}

    void record(const nlohmann::json& j) { *out_ << j.dump() << "\n"; }

  private:
    std::ofstream own_;
    std::ostream* out_;
};

// Bag of run parameters shared by the command-line drivers. Serialized to and
// from JSON losslessly; command-line flags override file values field by
// field.
struct ExperimentConfig {
    std::string kernel = "sine";
    double window_lo = -10.0;
    double window_hi = 10.0;
    int n_nodes = defaults::n_nodes;
    std::uint64_t seed = 1;
    std::int64_t samples = 1000;
    int workers = 1;
    std::vector<std::pair<double, double>> schedule = {{5.0, 0.2}, {7.5, 0.1}, {10.0, 0.05}};
    double anchor = 0.0;
    double anchor_b = 0.1;
    double eps = 0.05;
    double cutoff_radius = 5.0;
    double cutoff_delta = 0.1;
    double dt = 1e-3;
    double t_final = 1.0;
    std::int64_t trajectories = 100;
    std::string drift = "closed_form_hermite";
    double confinement = 1.0;
    int bins = 12;
    std::string observable = "bump:0:1";
    std::string out;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    ExperimentConfig, kernel, window_lo, window_hi, n_nodes, seed, samples, workers,
    schedule, anchor, anchor_b, eps, cutoff_radius, cutoff_delta, dt, t_final,
    trajectories, drift, confinement, bins, observable, out)

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("bad config file: ") + e.what());
    }
    try {
        return j.get<ExperimentConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("bad config value: ") + e.what());
    }
}

inline void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw PreconditionError("cannot open '" + path + "' for writing");
    out << nlohmann::json(cfg).dump(2) << "\n";
}

inline nlohmann::json configuration_to_json(const Configuration& c) {
    return nlohmann::json(c.points);
}

}  // namespace dpp
