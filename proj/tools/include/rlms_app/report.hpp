#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <rlms/experiment.hpp>

#include "rlms_app/config.hpp"

namespace rlms::app {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything one `run` produces before it is written out.
struct RunArtifacts {
    std::vector<MsdTrace> traces;
    std::optional<SweepResult> sweep;
    std::size_t probe_iteration = 0;
};

RunArtifacts execute(const ScenarioConfig& config, RunOptions options = {});

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Header `iteration,msd_linear,msd_db,stderr`, one row per iteration.
std::string msd_csv(const MsdTrace& trace);

/// Header `filter,steady_state_msd_linear,steady_state_msd_db`.
std::string summary_csv(const std::vector<MsdTrace>& traces);

/// Header `eta_factor,filter,probe_iteration,msd_linear,msd_db`.
std::string sweep_csv(const SweepResult& sweep, std::size_t probe_iteration);

/// `msd_<filter>.csv` with characters outside [A-Za-z0-9._-] replaced by '_'.
std::string msd_file_name(const std::string& filter);

/// Writes the msd, summary and (if present) sweep CSVs plus
/// resolved_config.json into `dir`, creating it if needed. Returns the paths
/// written. Throws OutputError.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                                                 const RunArtifacts& artifacts);

} // namespace rlms::app
