#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampi {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { mimo_ser, cs_rsnr, se_predict, thresholds, denoiser_check };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::cs_rsnr;
    // system
    int n = 0;
    std::optional<int> m;                  // exactly one of m / beta_list
    std::vector<double> beta_list;
    std::string constellation;             // mimo / thresholds
    std::optional<double> kappa;           // cs
    std::optional<double> lambda;          // laplace prior (thresholds, fixed-lambda runs)
    // noise
    std::vector<double> snr_db_list;
    std::optional<double> n0;              // alternative to snr_db_list
    std::optional<double> evm_db;
    std::optional<double> nt;              // alternative to evm_db
    // run
    std::vector<std::string> algorithms;
    int trials = 1;
    int t_max = 100;
    std::uint64_t seed = 1;
    std::string output = "results.csv";
    bool timing = true;       // presets disable it so reruns are byte-identical
    bool db_average = true;   // per-trial dB values averaged in dB
};

struct ResultRow {
    std::string experiment;
    std::string algorithm;
    double beta = 0.0;
    double snr_db = 0.0;
    double evm_db = 0.0;
    int n = 0;
    int m = 0;
    int trials = 0;
    int failures = 0;
    std::string metric_name;
    double metric_mean = 0.0;
    double metric_stderr = 0.0;
    double seconds = 0.0;
};

struct TrialRecord {
    int point = 0;  // sweep-point index
    std::string algorithm;
    int trial = 0;
    double value = 0.0;
    bool failed = false;
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<TrialRecord> raw;  // per-trial metrics, ordered deterministically
};

/// Parse/validate a JSON config document. Throws ConfigError with a
/// line-referenced message on parse errors and a field-referenced message on
/// semantic ones.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Runs the configured sweep. Trials execute on a bounded worker pool;
/// aggregation is deterministic given (config, seed) regardless of thread
/// count. Per-trial numerical failures are counted and excluded, never
/// fatal. Rows are passed to on_row as each sweep cell finishes.
RunResult run_experiment(const ExperimentConfig& cfg, int threads = 1,
                         const std::function<void(const ResultRow&)>& on_row = {});

std::string format_g9(double v);
void emit_csv_header(std::ostream& os);
void emit_csv_row(std::ostream& os, const ResultRow& row);
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_json(const std::vector<ResultRow>& rows, std::ostream& os);
std::vector<ResultRow> parse_json_table(std::istream& is);

}  // namespace ampi
