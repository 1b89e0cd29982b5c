#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "onebit/channel.hpp"
#include "onebit/config.hpp"
#include "onebit/harness.hpp"
#include "onebit/lifting.hpp"
#include "onebit/ofdm.hpp"
#include "onebit/testing/oracles.hpp"

namespace onebit::testing {

namespace {

// Each check returns an empty string on success, otherwise what went wrong.
using Check = std::function<std::string()>;

std::string solver_vs_dual_faces() {
    Rng rng(stream_seed(7, 1));
    SolverOptions opts;
    opts.tol = 1e-9;
    for (int i = 0; i < 100; ++i) {
        const SvmProblem p = random_small_svm(rng);
        const SvmSolution s = solve_soft_margin(p, opts);
        const QpOracleResult o = dual_face_qp(p.features, p.labels, p.penalty);
        if (std::abs(s.objective - o.objective) > 1e-6 || (s.weights - o.weights).cwiseAbs().maxCoeff() > 1e-4) {
            return "instance " + std::to_string(i) + " differs from the oracle";
        }
    }
    return {};
}

std::string mahalanobis_vs_oracle() {
    Rng rng(stream_seed(7, 2));
    SolverOptions opts;
    opts.tol = 1e-10;
    for (int trial = 0; trial < 20; ++trial) {
        RealMatrix a(4, 4);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a.data()[i] = rng.gaussian();
        }
        const RealMatrix cov = a * a.transpose() + 0.2 * RealMatrix::Identity(4, 4);
        MahalanobisConstraints c;
        const int p = 2 + rng.uniform_index(4);
        c.points.resize(p, 2);
        c.labels.resize(p);
        for (int q = 0; q < p; ++q) {
            c.points(q, 0) = rng.gaussian();
            c.points(q, 1) = rng.gaussian();
            c.labels[q] = rng.uniform_index(2) ? 1.0 : -1.0;
            c.antennas.push_back(rng.uniform_index(2));
        }
        const MahalanobisSolution s =
            solve_mahalanobis_margin(c, MahalanobisSpec::from_covariances({cov}), 1.0, opts);
        const ComplexMatrix o = mahalanobis_oracle(c, {cov}, 1.0);
        if ((s.channel - o).cwiseAbs().maxCoeff() > 1e-5) {
            return "instance " + std::to_string(trial) + " differs from the oracle";
        }
    }
    return {};
}

RowMatrix random_detection_rows(int n, int k, Rng& rng) {
    return block_lift(gen_iid_channel(n, k, rng).H);
}

RealVector observe(const RowMatrix& rows, const RealVector& x, double rho, Rng& rng) {
    RealVector y = rows * x;
    const double sd = std::sqrt(0.5 / rho);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        y[i] = sign_of(y[i] + sd * rng.gaussian());
    }
    return y;
}

std::string ml_vs_brute_force() {
    Rng rng(stream_seed(7, 3));
    const Constellation qpsk = Constellation::qpsk();
    const Snr snr = Snr::from_db(10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const RowMatrix rows = random_detection_rows(4, 2, rng);
        const SymbolVector sent{rng.uniform_index(4), rng.uniform_index(4)};
        const RealVector y = observe(rows, lift_symbols(sent, qpsk), snr.linear(), rng);
        const SymbolVector got = ml_detect(y, rows, snr, qpsk);
        const BruteForceResult ref = brute_force_ml(y, rows, snr.linear(), qpsk);
        // The library's tail approximation below t = -8 may reorder near-ties only.
        const long double got_score = exact_log_likelihood(y, rows, lift_symbols(got, qpsk), snr.linear());
        if (std::find(ref.best.begin(), ref.best.end(), got) == ref.best.end() && got_score < ref.score - 1e-2L) {
            return "instance " + std::to_string(trial) + " is not a likelihood maximizer";
        }
    }
    return {};
}

std::string hamming_vs_brute_force() {
    Rng rng(stream_seed(7, 4));
    const Constellation qpsk = Constellation::qpsk();
    const Snr snr = Snr::from_db(5.0);
    TwoStageOptions opts;
    opts.gamma_override = 1e9;
    opts.weights = HammingWeights::unweighted;
    for (int trial = 0; trial < 100; ++trial) {
        const RowMatrix rows = random_detection_rows(4, 2, rng);
        const SymbolVector sent{rng.uniform_index(4), rng.uniform_index(4)};
        const RealVector y = observe(rows, lift_symbols(sent, qpsk), snr.linear(), rng);
        const DetectionResult got = detect_vector(y, rows, qpsk, snr, opts);
        const BruteForceResult ref = brute_force_min_hamming(y, rows, snr.linear(), qpsk, false);
        if (got.candidate_cardinality != 16 ||
            std::find(ref.best.begin(), ref.best.end(), got.final) == ref.best.end()) {
            return "instance " + std::to_string(trial) + " is not a Hamming minimizer";
        }
    }
    return {};
}

std::string ofdm_vs_cp_reference() {
    Rng rng(stream_seed(7, 5));
    const Constellation qpsk = Constellation::qpsk();
    for (int trial = 0; trial < 3; ++trial) {
        const int taps = 1 + trial * 2;
        const ChannelRealization ch = gen_freq_selective(3, 2, taps, rng);
        const ComplexMatrix x = gen_symbols(2, 16, qpsk, rng);
        const ComplexMatrix got = ofdm_time_domain(ch.taps, taps, x);
        const ComplexMatrix ref = cp_ofdm_reference(ch.taps, taps, x, taps - 1 + trial);
        if ((got - ref).cwiseAbs().maxCoeff() > 1e-10) {
            return "L = " + std::to_string(taps) + " differs from the cyclic-prefix reference";
        }
    }
    return {};
}

std::string covariance_vs_quadrature() {
    for (const double mean : {-40.0, 0.0, 25.0}) {
        const ComplexMatrix c = laplacian_covariance(mean, 10.0, 0.5, 4);
        for (int lag = 1; lag < 4; ++lag) {
            if (std::abs(c(lag, 0) - laplacian_correlation(mean, 10.0, 0.5, lag)) > 5e-6) {
                return "mean " + std::to_string(mean) + " lag " + std::to_string(lag);
            }
        }
    }
    return {};
}

std::string config_round_trip() {
    ExperimentConfig c;
    c.scenario = Scenario::flat_correlated;
    c.estimator = Estimator::svm_correlated;
    c.snr_grid_db = {-2.5, 0.1, 17.0};
    c.gamma_override = 2.25;
    c.master_seed = 18446744073709551615ULL;
    if (!(parse_config(emit_config(c)) == c)) {
        return "parse(emit(config)) != config";
    }
    return {};
}

std::string threads_do_not_change_results() {
    ExperimentConfig c;
    c.users = 2;
    c.antennas = 8;
    c.pilot_slots = 8;
    c.block_length = 24;
    c.snr_grid_db = {5.0};
    c.trials = 6;
    c.estimator = Estimator::joint_ce_dd;
    RunOptions one;
    RunOptions three;
    three.threads = 3;
    if (!(run_experiment(c, one) == run_experiment(c, three))) {
        return "metric table depends on the thread count";
    }
    return {};
}

} // namespace

int run_selftest(std::ostream& out) {
    const std::pair<const char*, Check> checks[] = {
        {"solver_matches_dual_face_oracle", solver_vs_dual_faces},
        {"mahalanobis_matches_cholesky_oracle", mahalanobis_vs_oracle},
        {"ml_matches_brute_force_likelihood", ml_vs_brute_force},
        {"hamming_select_matches_exhaustive_search", hamming_vs_brute_force},
        {"ofdm_matches_cyclic_prefix_reference", ofdm_vs_cp_reference},
        {"covariance_matches_adaptive_quadrature", covariance_vs_quadrature},
        {"config_round_trip", config_round_trip},
        {"thread_count_determinism", threads_do_not_change_results},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        std::string problem;
        try {
            problem = check();
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        if (problem.empty()) {
            out << "PASS " << name << '\n';
        } else {
            out << "FAIL " << name << ": " << problem << '\n';
            ++failures;
        }
    }
    return failures;
}

} // namespace onebit::testing
