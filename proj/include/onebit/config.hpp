#pragma once

// Experiment description, read from a flat `key = value` text file.
//
//   # comments start with '#'
//   scenario = flat_iid
//   K = 4
//   snr_grid_dB = 0, 10, 20, 30
//
// Unknown keys are errors. emit_config() writes every field, so
// parse_config(emit_config(c)) == c.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onebit/constellation.hpp"
#include "onebit/detection.hpp"
#include "onebit/gaussian.hpp"

namespace onebit {

enum class Scenario { flat_iid, flat_correlated, ofdm };
enum class Estimator { svm, svm_correlated, joint_ce_dd, perfect_csi };
enum class Detector { svm_two_stage, svm_stage1, ml, ofdm_svm };

Scenario parse_scenario(std::string_view name);
Estimator parse_estimator(std::string_view name);
Detector parse_detector(std::string_view name);
std::string_view to_string(Scenario s);
std::string_view to_string(Estimator e);
std::string_view to_string(Detector d);

struct ExperimentConfig {
    Scenario scenario = Scenario::flat_iid;
    int users = 4;                     // K
    int antennas = 32;                 // N
    int pilot_slots = 20;              // T_t
    std::optional<int> data_slots;     // T_d; block_length - T_t when absent
    int block_length = 500;
    Modulation modulation = Modulation::qpsk;
    std::vector<double> snr_grid_db{0.0, 10.0, 20.0, 30.0};
    Estimator estimator = Estimator::svm;
    Detector detector = Detector::svm_two_stage;
    int trials = 100;
    std::uint64_t master_seed = 1;

    double penalty = 1.0;              // C
    double tol = 1e-6;                 // solver duality-gap target
    int max_epochs = 10000;
    std::optional<double> gamma_override;
    HammingWeights hamming_weights = HammingWeights::llr;
    LogCdfMode ml_log_cdf = LogCdfMode::safeguarded;
    int ce_dd_rounds = 1;

    // flat_correlated
    double angle_spread_deg = 10.0;
    double element_spacing = 0.5;      // wavelengths
    double mean_angle_limit_deg = 60.0;

    // ofdm
    int subcarriers = 256;             // Nc
    int cyclic_prefix = 16;            // Ncp
    int taps = 8;                      // L
    int ofdm_data_symbols = 1;         // 0 runs channel estimation only

    int data_slot_count() const { return data_slots.value_or(block_length - pilot_slots); }

    /// Throws ConfigError naming the offending key.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& config);

} // namespace onebit
