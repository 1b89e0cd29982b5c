#pragma once

// Random channel, symbol and noise generation.
//
// Every generator is a pure function of its parameters and the Rng state it
// is handed. Monte-Carlo trials obtain independent streams via stream_seed().

#include <cstdint>
#include <random>
#include <vector>

#include "onebit/constellation.hpp"
#include "onebit/types.hpp"

namespace onebit {

/// Mixes a master seed with stream coordinates (splitmix64 finalizer chain).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    /// Draw from CN(0, variance): real and imaginary parts each N(0, variance/2).
    Complex complex_gaussian(double variance);
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int uniform_index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

enum class ChannelKind { iid, correlated, freq_selective };

struct ChannelRealization {
    ComplexMatrix H;                          // N x K flat channel (empty for freq_selective)
    ChannelKind kind = ChannelKind::iid;
    ComplexMatrix taps;                       // N x (K*L), column k*L + l is tap l of user k
    int tap_count = 0;                        // L
    std::vector<ComplexMatrix> covariances;   // per-user N x N, correlated only
};

/// Uniform linear array with a Laplacian power angle spectrum per user.
struct CorrelationSpec {
    double element_spacing = 0.5;       // wavelengths
    double angle_spread_deg = 10.0;     // standard deviation of the Laplacian
    std::vector<double> mean_angles_deg;
    int quadrature_points = 4096;
    double window_spreads = 10.0;       // integrate over mean +- this many spreads (capped at pi)
};

/// N x K matrix of i.i.d. CN(0,1) entries. Requires N >= K >= 1.
ChannelRealization gen_iid_channel(int n, int k, Rng& rng);

/// Spatial covariance of one user, [C]_{mn} = E exp(j 2 pi d (m-n) sin theta)
/// under a Laplacian angle density, by composite trapezoid quadrature. The
/// result is Hermitian Toeplitz with an exact unit diagonal.
ComplexMatrix laplacian_covariance(double mean_angle_deg, double angle_spread_deg,
                                   double element_spacing, int n, int quadrature_points = 4096,
                                   double window_spreads = 10.0);

/// One covariance per entry of spec.mean_angles_deg.
std::vector<ComplexMatrix> laplacian_covariance(const CorrelationSpec& spec, int n);

/// Column k drawn as C_k^{1/2} g with g ~ CN(0, I). Throws InvalidInput for
/// covariances that are not Hermitian positive semidefinite.
ChannelRealization gen_correlated_channel(const std::vector<ComplexMatrix>& covariances, Rng& rng);

/// L-tap channel, every tap i.i.d. CN(0, 1/L).
ChannelRealization gen_freq_selective(int n, int k, int taps, Rng& rng);

/// K x T matrix of uniformly drawn constellation indices.
Eigen::MatrixXi gen_symbol_indices(int k, int t, const Constellation& constellation, Rng& rng);

ComplexMatrix symbols_from_indices(const Eigen::MatrixXi& indices, const Constellation& constellation);

/// K x T matrix of uniform i.i.d. constellation symbols.
ComplexMatrix gen_symbols(int k, int t, const Constellation& constellation, Rng& rng);

/// rows x cols matrix of i.i.d. CN(0, N0) noise.
ComplexMatrix awgn(int rows, int cols, double noise_power, Rng& rng);

/// N0 = 10^(-snr_db / 10), so that SNR = 1/N0.
double noise_power_from_snr_db(double snr_db);

/// Hermitian PSD square root via eigendecomposition (negative eigenvalues
/// clipped to zero). Throws InvalidInput if `c` is not Hermitian PSD.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& c);

} // namespace onebit
