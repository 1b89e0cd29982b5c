#pragma once

// Frequency-selective OFDM with one-bit time-domain sampling.
//
// With a cyclic prefix of at least L-1 samples the channel from user k to
// antenna i acts on one OFDM symbol as the circulant matrix G_{i,k} whose first
// column is the zero-padded tap vector. The transmitted time-domain block is
// F^H x_k with the unitary DFT F (F^H F = I).

#include <vector>

#include "onebit/channel.hpp"
#include "onebit/constellation.hpp"
#include "onebit/lifting.hpp"
#include "onebit/svm.hpp"

namespace onebit {

struct OfdmConfig {
    int subcarriers = 256;     // Nc, a power of two
    int cyclic_prefix = 16;    // Ncp
    int taps = 8;              // L
    Modulation modulation = Modulation::qpsk;

    /// Throws InvalidInput unless L - 1 <= Ncp <= Nc and Nc is a power of two.
    void validate() const;
};

/// Column j is `first_column` cyclically shifted down by j.
ComplexMatrix circulant(const ComplexVector& first_column);

/// Unitary DFT matrix, F(m, n) = exp(-j 2 pi m n / Nc) / sqrt(Nc).
ComplexMatrix unitary_dft(int size);

/// F^H x for each row of `frequency_domain` (one user's symbols per row).
ComplexMatrix inverse_dft(const ComplexMatrix& frequency_domain);

/// Noiseless received time-domain samples, N x Nc: sum_k G_{i,k} F^H x_k.
/// `taps` is N x (K*L) with column k*L + l holding tap l of user k.
ComplexMatrix ofdm_time_domain(const ComplexMatrix& taps, int tap_count,
                               const ComplexMatrix& symbols_fd);

/// One-bit time-domain observation of one OFDM symbol (K x Nc symbols).
/// A noise power of zero gives the noiseless signs.
QuantizedMatrix simulate_ofdm_rx(const ComplexMatrix& taps, int tap_count,
                                 const ComplexMatrix& symbols_fd, double noise_power, Rng& rng);

/// Real training points for tap estimation, 2Nc x 2KL: rows of
/// [Re Phi, -Im Phi; Im Phi, Re Phi] where Phi = [Phi_1,L ... Phi_K,L] and
/// Phi_k,L is the first L columns of circulant(F^H x_k).
RowMatrix ofdm_pilot_features(const ComplexMatrix& pilots_fd, int tap_count);

struct OfdmChannelEstimate {
    ComplexMatrix taps;              // N x (K*L), |row|^2 = K
    std::vector<bool> converged;
    std::vector<bool> flagged;
    long epochs = 0;
};

/// Per-antenna SVM tap estimation from one pilot OFDM symbol. Throws
/// InvalidInput when the problem is underdetermined (Nc < K L).
OfdmChannelEstimate svm_ce_ofdm(const QuantizedMatrix& y_td, const ComplexMatrix& pilots_fd,
                                int tap_count, double penalty = 1.0,
                                const SolverOptions& options = {});

/// Complex G^FD (N Nc x K Nc): block (i, k) = circulant(g_{i,k}) F^H.
ComplexMatrix frequency_domain_channel(const ComplexMatrix& taps, int tap_count, int subcarriers);

/// Real training points for joint detection, 2 N Nc x 2 K Nc: the block lifting
/// of frequency_domain_channel().
RowMatrix ofdm_detection_features(const ComplexMatrix& taps, int tap_count, int subcarriers);

struct OfdmDetection {
    Eigen::MatrixXi indices;   // K x Nc
    RealVector soft;           // 2 K Nc, scaled to unit average symbol power
    bool converged = true;
    bool flagged = false;
    int epochs = 0;
};

/// Joint SVM detection of all users and subcarriers from one OFDM symbol. The
/// channel is first brought to total tap power N K, so any positive scaling of
/// it gives the same result; estimated taps already have that power.
OfdmDetection svm_detect_ofdm(const QuantizedMatrix& y_td, const ComplexMatrix& taps, int tap_count,
                              const Constellation& constellation, double penalty = 1.0,
                              const SolverOptions& options = {});

/// Same, with precomputed detection features.
OfdmDetection svm_detect_ofdm_features(const QuantizedMatrix& y_td, FeaturesRef features, int users,
                              const Constellation& constellation, double penalty = 1.0,
                              const SolverOptions& options = {});

/// sum |h_hat - h|^2 over all taps / (K N).
double ofdm_nmse(const ComplexMatrix& estimate, const ComplexMatrix& truth, int users);

} // namespace onebit
