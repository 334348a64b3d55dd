#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "nlcoh/cli/run_config.hpp"
#include "nlcoh/coherence/coherence.hpp"
#include "nlcoh/nn/forward_model.hpp"
#include "nlcoh/sweep/sweep.hpp"

namespace nlcoh {

// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2, exit_data = 3, exit_divergence = 4 };

// Simulates a benchmark dataset into config.out.
FramedDataset cmd_simulate(const RunConfig& config, std::ostream& log);

// Trains the forward benchmark on config.data and stores y_z, the checkpoint
// and the loss curve next to the data.
ForwardModelResult cmd_train_forward(const RunConfig& config, std::ostream& log);

// Lambda sweep on config.data; writes the trace, plot data, chosen state and
// per-step snapshots into config.out.
SweepResult cmd_sweep(const RunConfig& config, std::ostream& log);

// Forward model (when y_z is missing), sweep and coherence report into config.out.
CoherenceSummary cmd_estimate(const RunConfig& config, std::ostream& log);

// Figure CSVs and a text summary from a finished estimate run.
void cmd_report(const std::filesystem::path& run_dir, std::ostream& log);

// Files cmd_report needs from a run directory.
std::vector<std::filesystem::path> missing_run_artifacts(const std::filesystem::path& run_dir);

}  // namespace nlcoh
