#include "onebit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "onebit/channel.hpp"
#include "onebit/detection.hpp"
#include "onebit/estimation.hpp"
#include "onebit/lifting.hpp"
#include "onebit/ofdm.hpp"

namespace onebit {

namespace {

SolverOptions solver_options(const ExperimentConfig& c) {
    SolverOptions o;
    o.tol = c.tol;
    o.max_epochs = c.max_epochs;
    return o;
}

TwoStageOptions detection_options(const ExperimentConfig& c) {
    TwoStageOptions o;
    o.penalty = c.penalty;
    o.solver = solver_options(c);
    o.gamma_override = c.gamma_override;
    o.weights = c.hamming_weights;
    o.second_stage = c.detector == Detector::svm_two_stage;
    return o;
}

int unconverged_rows(const ChannelEstimate& e) {
    return static_cast<int>(std::count(e.converged.begin(), e.converged.end(), false));
}

BlockDetection detect(const ExperimentConfig& c, const QuantizedMatrix& y, const ComplexMatrix& channel,
                      const Constellation& constellation, Snr snr) {
    if (c.detector == Detector::ml) {
        return ml_detect_block(y, channel, constellation, snr, c.ml_log_cdf);
    }
    return two_stage_detect(y, channel, constellation, snr, detection_options(c));
}

TrialRecord flat_trial(const ExperimentConfig& c, Snr snr, Rng& rng) {
    const int k = c.users;
    const int n = c.antennas;
    const int td = c.data_slot_count();
    const Constellation qpsk = Constellation::qpsk();
    const Constellation constellation = Constellation::make(c.modulation);

    // Fixed draw order: angles, channel, pilots, data, pilot noise, data noise.
    ChannelRealization channel;
    if (c.scenario == Scenario::flat_correlated) {
        CorrelationSpec spec;
        spec.element_spacing = c.element_spacing;
        spec.angle_spread_deg = c.angle_spread_deg;
        for (int u = 0; u < k; ++u) {
            spec.mean_angles_deg.push_back(rng.uniform(-c.mean_angle_limit_deg, c.mean_angle_limit_deg));
        }
        channel = gen_correlated_channel(laplacian_covariance(spec, n), rng);
    } else {
        channel = gen_iid_channel(n, k, rng);
    }
    const Eigen::MatrixXi pilot_idx = gen_symbol_indices(k, c.pilot_slots, qpsk, rng);
    const Eigen::MatrixXi data_idx = gen_symbol_indices(k, td, constellation, rng);
    const ComplexMatrix pilots = symbols_from_indices(pilot_idx, qpsk);
    const ComplexMatrix data = symbols_from_indices(data_idx, constellation);
    const double n0 = snr.noise_power();
    const ComplexMatrix pilot_noise = awgn(n, c.pilot_slots, n0, rng);
    const ComplexMatrix data_noise = awgn(n, td, n0, rng);

    const QuantizedMatrix y_pilot = one_bit_quantize(channel.H * pilots + pilot_noise);
    const QuantizedMatrix y_data = one_bit_quantize(channel.H * data + data_noise);

    TrialRecord rec;
    const SolverOptions solver = solver_options(c);
    ComplexMatrix estimate;
    double flagged = 0.0;

    if (c.estimator == Estimator::perfect_csi) {
        estimate = channel.H;
    } else {
        const CeRealForms ce = realify_ce(y_pilot, pilots);
        ChannelEstimate est;
        if (c.estimator == Estimator::svm_correlated) {
            const MahalanobisSpec spec = MahalanobisSpec::from_covariances(lift_covariances(channel.covariances));
            est = svm_ce_correlated(ce.Y, ce.X, spec, c.penalty, solver);
        } else {
            est = svm_ce_uncorrelated(ce.Y, ce.X, c.penalty, solver);
        }
        flagged += est.flagged_count() + unconverged_rows(est);

        if (c.estimator == Estimator::joint_ce_dd) {
            for (int round = 0; round < c.ce_dd_rounds; ++round) {
                const BlockDetection det = detect(c, y_data, est.H, constellation, snr);
                flagged += det.flagged + det.unconverged;
                const CeRealForms dd = realify_ce(y_data, det.symbols(constellation));
                est = joint_ce_dd_refine(ce.Y, ce.X, dd.Y, dd.X, c.penalty, solver, &est);
                flagged += est.flagged_count() + unconverged_rows(est);
            }
        }
        estimate = est.H;
        rec.nmse = normalized_squared_error(estimate, channel.H);
    }

    const BlockDetection det = detect(c, y_data, estimate, constellation, snr);
    flagged += det.flagged + det.unconverged;
    const double bits = static_cast<double>(k) * td * constellation.bits_per_symbol();
    rec.ber = static_cast<double>(count_bit_errors(data_idx, det.indices)) / bits;
    if (c.detector == Detector::svm_two_stage) {
        rec.mean_candidates = det.mean_cardinality();
    }
    rec.flagged_rows = flagged;
    return rec;
}

TrialRecord ofdm_trial(const ExperimentConfig& c, Snr snr, Rng& rng) {
    const int k = c.users;
    const int n = c.antennas;
    const int nc = c.subcarriers;
    const Constellation qpsk = Constellation::qpsk();
    const Constellation constellation = Constellation::make(c.modulation);

    // Fixed draw order: taps, pilot symbol, data symbols, pilot noise, data noise.
    const ChannelRealization channel = gen_freq_selective(n, k, c.taps, rng);
    const ComplexMatrix pilots = symbols_from_indices(gen_symbol_indices(k, nc, qpsk, rng), qpsk);
    std::vector<Eigen::MatrixXi> data_idx;
    for (int s = 0; s < c.ofdm_data_symbols; ++s) {
        data_idx.push_back(gen_symbol_indices(k, nc, constellation, rng));
    }
    const double n0 = snr.noise_power();
    const QuantizedMatrix y_pilot = simulate_ofdm_rx(channel.taps, c.taps, pilots, n0, rng);
    std::vector<QuantizedMatrix> y_data;
    for (const auto& idx : data_idx) {
        y_data.push_back(simulate_ofdm_rx(channel.taps, c.taps, symbols_from_indices(idx, constellation), n0, rng));
    }

    TrialRecord rec;
    const SolverOptions solver = solver_options(c);
    double flagged = 0.0;
    ComplexMatrix taps = channel.taps;
    if (c.estimator == Estimator::svm) {
        const OfdmChannelEstimate est = svm_ce_ofdm(y_pilot, pilots, c.taps, c.penalty, solver);
        for (std::size_t i = 0; i < est.flagged.size(); ++i) {
            flagged += (est.flagged[i] ? 1 : 0) + (est.converged[i] ? 0 : 1);
        }
        taps = est.taps;
        rec.nmse = ofdm_nmse(taps, channel.taps, k);
    }

    if (y_data.empty()) {
        rec.flagged_rows = flagged;
        return rec;
    }
    const RowMatrix features = ofdm_detection_features(taps, c.taps, nc);
    long errors = 0;
    for (std::size_t s = 0; s < y_data.size(); ++s) {
        const OfdmDetection det = svm_detect_ofdm_features(y_data[s], features, k, constellation, c.penalty, solver);
        flagged += (det.flagged ? 1 : 0) + (det.converged ? 0 : 1);
        errors += count_bit_errors(data_idx[s], det.indices);
    }
    const double bits = static_cast<double>(k) * nc * constellation.bits_per_symbol() * c.ofdm_data_symbols;
    rec.ber = static_cast<double>(errors) / bits;
    rec.flagged_rows = flagged;
    return rec;
}

} // namespace

TrialRecord run_trial(const ExperimentConfig& config, std::size_t snr_index, int trial) {
    Rng rng(stream_seed(config.master_seed, snr_index, static_cast<std::uint64_t>(trial)));
    const Snr snr = Snr::from_db(config.snr_grid_db.at(snr_index));
    if (config.scenario == Scenario::ofdm) {
        return ofdm_trial(config, snr, rng);
    }
    return flat_trial(config, snr, rng);
}

std::vector<TrialRecord> run_point(const ExperimentConfig& config, std::size_t snr_index,
                                   const RunOptions& options) {
    const int trials = config.trials;
    std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
    int workers = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, trials);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
            try {
                records[static_cast<std::size_t>(t)] = run_trial(config, snr_index, t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(trials);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return records;
}

MetricTable run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    MetricTable table;
    for (std::size_t s = 0; s < config.snr_grid_db.size(); ++s) {
        table.add_point(config.snr_grid_db[s], run_point(config, s, options));
    }
    return table;
}

std::vector<ScenarioInfo> list_scenarios() {
    return {
        {"flat_iid", "flat block fading, i.i.d. CN(0,1) channel; estimators svm, joint_ce_dd, perfect_csi"},
        {"flat_correlated", "flat block fading, ULA with Laplacian angle spread; adds estimator svm_correlated"},
        {"ofdm", "L-tap frequency-selective channel with cyclic-prefix OFDM; detector ofdm_svm"},
    };
}

} // namespace onebit
