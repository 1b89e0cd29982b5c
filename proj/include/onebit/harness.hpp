#pragma once

// Monte-Carlo engine. Trial t at SNR index s draws everything from the stream
// stream_seed(master_seed, s, t), always in the same order and independent of
// the estimator and detector, so two configurations that share a seed see the
// same channels, symbols and noise.

#include <cstddef>
#include <string>
#include <vector>

#include "onebit/config.hpp"
#include "onebit/metrics.hpp"

namespace onebit {

struct RunOptions {
    int threads = 1;   // 0 selects the hardware concurrency
};

/// One trial of the configured pipeline. `config` must already be valid.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t snr_index, int trial);

/// All trials of one SNR point, returned in trial order.
std::vector<TrialRecord> run_point(const ExperimentConfig& config, std::size_t snr_index,
                                   const RunOptions& options = {});

/// Validates `config` (ConfigError before any compute) and runs every point.
/// The table does not depend on the thread count.
MetricTable run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct ScenarioInfo {
    std::string name;
    std::string description;
};

std::vector<ScenarioInfo> list_scenarios();

} // namespace onebit
