#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semint {

inline constexpr const char* kToolVersion = "0.1.0";

// Raised while reading or checking a scenario configuration; maps to the
// validation exit code. Runtime breaches keep their own types and map to
// the invariant exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInvariant = 3;

// Runs a scenario and writes report, trace artifacts, and manifest into
// out_dir. Reports and traces are byte-identical for a fixed (config, seed);
// wall-clock timestamps live only in the manifest.
struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::string> outputs;  // file names written into out_dir
    std::string error;
};

RunOutcome run_scenario_text(const std::string& scenario_json, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override = {},
                             std::optional<int> jobs_override = {});
RunOutcome run_scenario_file(const std::string& scenario_path, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override = {},
                             std::optional<int> jobs_override = {});

struct ValidationResult {
    bool ok = false;
    std::vector<std::string> diagnostics;
};

ValidationResult validate_scenario_text(const std::string& scenario_json);
ValidationResult validate_scenario_file(const std::string& scenario_path);

// Extracts plot data from a report written by run_scenario_*.
// Kinds: convergence (N,label,freq), saturation (trial,replica,cells_on_Y1),
// compare (N,estimator,l1,saturated,K).
struct PlotResult {
    int exit_code = kExitOk;
    std::string csv;
    std::string error;
};

PlotResult plot_report_text(const std::string& report_json, const std::string& kind);
PlotResult plot_report_file(const std::string& report_path, const std::string& kind);

}  // namespace semint
