#pragma once

#include "critsense/channels.hpp"
#include "critsense/fermion.hpp"
#include "critsense/models.hpp"
#include "critsense/policy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace critsense {

inline constexpr int kSchemaVersion = 1;
std::string code_version();

/// Validation failure on a named configuration field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error("xcli", "config", field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Scenario { qfi_scaling, theta_curves, channel_sweep, deformed, subsystem, hadamard };
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ThetaGrid {
    std::string spacing = "log";  // "log" or "linear"
    double lo = 1e-3;
    double hi = 1.0;
    int points = 64;

    std::vector<double> values() const;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::qfi_scaling;
    ModelSpec model;
    std::optional<ChannelSpec> channel;
    /// Probe labels: critical (= critical_fm), critical_fm, critical_afm, ghz, spin_coherent, oat.
    std::vector<std::string> probes{"critical"};
    ThetaGrid theta;
    std::vector<int> L_list;
    std::vector<int> L_sub_list;
    std::vector<double> p_list;
    std::vector<double> beta_list;
    std::uint64_t seed = 0;
    int shots = 10000;
    std::string output = "out";
    /// Set when the document names its scenario.
    bool scenario_given = false;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses a JSON document; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string to_json(const ExperimentConfig& c);
std::string to_json(const ModelSpec& m);
ModelSpec model_from_json(const std::string& json_text);
/// FNV-1a of the canonical JSON form, ignoring the output directory.
std::string config_hash(const ExperimentConfig& c);

struct ExperimentRecord {
    std::string scenario;
    std::string model;
    double J = 0.0;
    double h = 0.0;
    double delta_xxz = 0.0;
    std::string channel;
    double p = 0.0;
    std::optional<double> beta;
    std::string probe;
    int L = 0;
    int L_sub = 0;
    double theta = 0.0;
    std::string observable;
    double value = 0.0;
    std::optional<double> reference;
    std::optional<double> variance;
    std::optional<double> delta_theta;
    std::optional<double> qfi;
    std::optional<double> fit_exponent;
    std::optional<double> fit_prefactor;
    std::optional<double> fit_r_squared;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string code_version;
};

/// Runs the scenario; records come back sorted by (L, theta, p).
std::vector<ExperimentRecord> run(const ExperimentConfig& config);
/// Power-law fit of value against L over records with the given probe and observable.
PowerLawFit fit(const std::vector<ExperimentRecord>& records, const std::string& probe, const std::string& observable);
void sort_records(std::vector<ExperimentRecord>& records);

/// Header plus one row per record, 17 significant digits, written atomically.
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
/// Long-format table (figure, series, x, y) written atomically.
void emit_plotdata(const std::vector<ExperimentRecord>& records, const std::string& path);
std::string csv_text(const std::vector<ExperimentRecord>& records);
std::string plotdata_text(const std::vector<ExperimentRecord>& records);

/// Writes the text to path through a temporary file and rename.
void atomic_write(const std::string& path, const std::string& text);

/// Full CLI entry; returns the process exit code (0, 2 or 3).
int cli_main(int argc, char** argv);

} // namespace critsense
