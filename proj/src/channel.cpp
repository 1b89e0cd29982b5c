#include "onebit/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace onebit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double deg = std::numbers::pi / 180.0;

} // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

Complex Rng::complex_gaussian(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
}

ChannelRealization gen_iid_channel(int n, int k, Rng& rng) {
    if (k < 1 || n < k) {
        throw InvalidInput("iid channel requires N >= K >= 1");
    }
    ChannelRealization out;
    out.kind = ChannelKind::iid;
    out.H.resize(n, k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) {
            out.H(i, j) = rng.complex_gaussian(1.0);
        }
    }
    return out;
}

ComplexMatrix laplacian_covariance(double mean_angle_deg, double angle_spread_deg,
                                   double element_spacing, int n, int quadrature_points,
                                   double window_spreads) {
    if (!(angle_spread_deg > 0.0) || !std::isfinite(angle_spread_deg)) {
        throw InvalidInput("angle spread must be positive");
    }
    if (!(element_spacing > 0.0) || n < 1 || quadrature_points < 3 || !(window_spreads > 0.0)) {
        throw InvalidInput("invalid correlation spec");
    }
    const double mean = mean_angle_deg * deg;
    const double spread = angle_spread_deg * deg;
    const double half_width = std::min(window_spreads * spread, std::numbers::pi);
    const double step = 2.0 * half_width / (quadrature_points - 1);
    const double decay = std::sqrt(2.0) / spread;

    std::vector<double> weight(static_cast<std::size_t>(quadrature_points));
    std::vector<double> phase(static_cast<std::size_t>(quadrature_points));
    double mass = 0.0;
    for (int p = 0; p < quadrature_points; ++p) {
        const double offset = -half_width + p * step;
        const double trapezoid = (p == 0 || p == quadrature_points - 1) ? 0.5 : 1.0;
        const double w = trapezoid * std::exp(-decay * std::abs(offset));
        weight[static_cast<std::size_t>(p)] = w;
        phase[static_cast<std::size_t>(p)] =
            2.0 * std::numbers::pi * element_spacing * std::sin(mean + offset);
        mass += w;
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw InvalidInput("angle quadrature did not produce a finite positive mass");
    }

    std::vector<Complex> lag(static_cast<std::size_t>(n));
    lag[0] = 1.0;
    for (int d = 1; d < n; ++d) {
        Complex acc = 0.0;
        for (int p = 0; p < quadrature_points; ++p) {
            acc += weight[static_cast<std::size_t>(p)] *
                   std::polar(1.0, d * phase[static_cast<std::size_t>(p)]);
        }
        lag[static_cast<std::size_t>(d)] = acc / mass;
    }

    ComplexMatrix c(n, n);
    for (int m = 0; m < n; ++m) {
        for (int col = 0; col < n; ++col) {
            const Complex v = lag[static_cast<std::size_t>(std::abs(m - col))];
            c(m, col) = m >= col ? v : std::conj(v);
        }
    }
    return c;
}

std::vector<ComplexMatrix> laplacian_covariance(const CorrelationSpec& spec, int n) {
    std::vector<ComplexMatrix> out;
    out.reserve(spec.mean_angles_deg.size());
    for (const double mean : spec.mean_angles_deg) {
        out.push_back(laplacian_covariance(mean, spec.angle_spread_deg, spec.element_spacing, n,
                                           spec.quadrature_points, spec.window_spreads));
    }
    return out;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& c) {
    if (c.rows() != c.cols() || c.rows() == 0) {
        throw InvalidInput("covariance must be square and non-empty");
    }
    const double scale = c.cwiseAbs().maxCoeff();
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0)) {
        throw InvalidInput("covariance is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (c + c.adjoint()));
    const RealVector& lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-8 * std::max(lambda.maxCoeff(), 1e-300)) {
        throw InvalidInput("covariance is not positive semidefinite");
    }
    const RealVector root = lambda.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

ChannelRealization gen_correlated_channel(const std::vector<ComplexMatrix>& covariances, Rng& rng) {
    if (covariances.empty()) {
        throw InvalidInput("need one covariance per user");
    }
    const Eigen::Index n = covariances.front().rows();
    ChannelRealization out;
    out.kind = ChannelKind::correlated;
    out.H.resize(n, static_cast<Eigen::Index>(covariances.size()));
    for (std::size_t k = 0; k < covariances.size(); ++k) {
        if (covariances[k].rows() != n) {
            throw InvalidInput("all covariances must share the antenna count");
        }
        const ComplexMatrix root = hermitian_sqrt(covariances[k]);
        ComplexVector g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            g[i] = rng.complex_gaussian(1.0);
        }
        out.H.col(static_cast<Eigen::Index>(k)) = root * g;
    }
    out.covariances = covariances;
    return out;
}

ChannelRealization gen_freq_selective(int n, int k, int taps, Rng& rng) {
    if (taps < 1 || k < 1 || n < 1) {
        throw InvalidInput("frequency-selective channel requires N, K, L >= 1");
    }
    ChannelRealization out;
    out.kind = ChannelKind::freq_selective;
    out.tap_count = taps;
    out.taps.resize(n, static_cast<Eigen::Index>(k) * taps);
    const double variance = 1.0 / taps;
    for (Eigen::Index c = 0; c < out.taps.cols(); ++c) {
        for (int i = 0; i < n; ++i) {
            out.taps(i, c) = rng.complex_gaussian(variance);
        }
    }
    return out;
}

Eigen::MatrixXi gen_symbol_indices(int k, int t, const Constellation& constellation, Rng& rng) {
    if (k < 1 || t < 0) {
        throw InvalidInput("symbol block needs K >= 1 and T >= 0");
    }
    Eigen::MatrixXi idx(k, t);
    for (int col = 0; col < t; ++col) {
        for (int row = 0; row < k; ++row) {
            idx(row, col) = rng.uniform_index(constellation.size());
        }
    }
    return idx;
}

ComplexMatrix symbols_from_indices(const Eigen::MatrixXi& indices, const Constellation& constellation) {
    ComplexMatrix out(indices.rows(), indices.cols());
    for (Eigen::Index c = 0; c < indices.cols(); ++c) {
        for (Eigen::Index r = 0; r < indices.rows(); ++r) {
            out(r, c) = constellation.point(indices(r, c));
        }
    }
    return out;
}

ComplexMatrix gen_symbols(int k, int t, const Constellation& constellation, Rng& rng) {
    return symbols_from_indices(gen_symbol_indices(k, t, constellation, rng), constellation);
}

ComplexMatrix awgn(int rows, int cols, double noise_power, Rng& rng) {
    if (!(noise_power > 0.0)) {
        throw InvalidInput("noise power must be positive");
    }
    ComplexMatrix out(rows, cols);
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            out(r, c) = rng.complex_gaussian(noise_power);
        }
    }
    return out;
}

double noise_power_from_snr_db(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0);
}

} // namespace onebit
