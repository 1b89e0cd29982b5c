#include "onebit/ofdm.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace onebit {

namespace {

std::vector<Complex> twiddles(int size, double sign) {
    std::vector<Complex> w(static_cast<std::size_t>(size));
    for (int m = 0; m < size; ++m) {
        w[static_cast<std::size_t>(m)] = std::polar(1.0, sign * 2.0 * std::numbers::pi * m / size);
    }
    return w;
}

void check_taps(const ComplexMatrix& taps, int tap_count) {
    if (tap_count < 1 || taps.cols() % tap_count != 0 || taps.cols() == 0) {
        throw InvalidInput("ofdm: tap matrix needs K*L columns with L >= 1");
    }
}

} // namespace

void OfdmConfig::validate() const {
    if (subcarriers < 1 || !std::has_single_bit(static_cast<unsigned>(subcarriers))) {
        throw InvalidInput("ofdm: subcarrier count must be a power of two");
    }
    if (taps < 1 || taps - 1 > cyclic_prefix || cyclic_prefix > subcarriers) {
        throw InvalidInput("ofdm: need L - 1 <= Ncp <= Nc");
    }
}

ComplexMatrix circulant(const ComplexVector& first_column) {
    const Eigen::Index n = first_column.size();
    if (n == 0) {
        throw InvalidInput("circulant: empty first column");
    }
    ComplexMatrix c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index r = 0; r < n; ++r) {
            c(r, j) = first_column[(r - j + n) % n];
        }
    }
    return c;
}

ComplexMatrix unitary_dft(int size) {
    const auto w = twiddles(size, -1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    ComplexMatrix f(size, size);
    for (int m = 0; m < size; ++m) {
        for (int n = 0; n < size; ++n) {
            f(m, n) = scale * w[static_cast<std::size_t>((static_cast<long>(m) * n) % size)];
        }
    }
    return f;
}

ComplexMatrix inverse_dft(const ComplexMatrix& frequency_domain) {
    const auto size = static_cast<int>(frequency_domain.cols());
    const auto w = twiddles(size, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    ComplexMatrix out(frequency_domain.rows(), size);
    for (Eigen::Index r = 0; r < frequency_domain.rows(); ++r) {
        for (int n = 0; n < size; ++n) {
            Complex acc = 0.0;
            for (int j = 0; j < size; ++j) {
                acc += frequency_domain(r, j) * w[static_cast<std::size_t>((static_cast<long>(n) * j) % size)];
            }
            out(r, n) = scale * acc;
        }
    }
    return out;
}

ComplexMatrix ofdm_time_domain(const ComplexMatrix& taps, int tap_count, const ComplexMatrix& symbols_fd) {
    check_taps(taps, tap_count);
    const Eigen::Index users = taps.cols() / tap_count;
    if (symbols_fd.rows() != users) {
        throw InvalidInput("ofdm: symbol block must have one row per user");
    }
    const Eigen::Index nc = symbols_fd.cols();
    if (tap_count > nc) {
        throw InvalidInput("ofdm: more taps than subcarriers");
    }
    // Rows of `transmitted` are the per-user time-domain blocks F^H x_k.
    const ComplexMatrix transmitted = inverse_dft(symbols_fd);
    ComplexMatrix out = ComplexMatrix::Zero(taps.rows(), nc);
    for (Eigen::Index i = 0; i < taps.rows(); ++i) {
        for (Eigen::Index k = 0; k < users; ++k) {
            for (int l = 0; l < tap_count; ++l) {
                const Complex g = taps(i, k * tap_count + l);
                for (Eigen::Index n = 0; n < nc; ++n) {
                    out(i, n) += g * transmitted(k, (n - l + nc) % nc);
                }
            }
        }
    }
    return out;
}

QuantizedMatrix simulate_ofdm_rx(const ComplexMatrix& taps, int tap_count,
                                 const ComplexMatrix& symbols_fd, double noise_power, Rng& rng) {
    ComplexMatrix r = ofdm_time_domain(taps, tap_count, symbols_fd);
    if (noise_power < 0.0) {
        throw InvalidInput("ofdm: noise power must be nonnegative");
    }
    if (noise_power > 0.0) {
        r += awgn(static_cast<int>(r.rows()), static_cast<int>(r.cols()), noise_power, rng);
    }
    return one_bit_quantize(r);
}

RowMatrix ofdm_pilot_features(const ComplexMatrix& pilots_fd, int tap_count) {
    const Eigen::Index users = pilots_fd.rows();
    const Eigen::Index nc = pilots_fd.cols();
    if (tap_count < 1 || tap_count > nc) {
        throw InvalidInput("ofdm: tap count must lie in [1, Nc]");
    }
    const ComplexMatrix phi_first = inverse_dft(pilots_fd);
    const Eigen::Index width = users * tap_count;
    ComplexMatrix phi(nc, width);
    for (Eigen::Index k = 0; k < users; ++k) {
        for (int l = 0; l < tap_count; ++l) {
            for (Eigen::Index n = 0; n < nc; ++n) {
                phi(n, k * tap_count + l) = phi_first(k, (n - l + nc) % nc);
            }
        }
    }
    return block_lift(phi);
}

OfdmChannelEstimate svm_ce_ofdm(const QuantizedMatrix& y_td, const ComplexMatrix& pilots_fd,
                                int tap_count, double penalty, const SolverOptions& options) {
    const Eigen::Index users = pilots_fd.rows();
    const Eigen::Index nc = pilots_fd.cols();
    if (y_td.cols() != nc) {
        throw InvalidInput("svm_ce_ofdm: observation length differs from the subcarrier count");
    }
    if (nc < users * tap_count) {
        throw InvalidInput("svm_ce_ofdm: 2Nc constraints cannot determine 2KL unknowns");
    }
    const RowMatrix features = ofdm_pilot_features(pilots_fd, tap_count);
    const Eigen::Index width = users * tap_count;
    const double target = std::sqrt(static_cast<double>(users));

    OfdmChannelEstimate out;
    out.taps.resize(y_td.rows(), width);
    out.converged.assign(static_cast<std::size_t>(y_td.rows()), false);
    out.flagged.assign(static_cast<std::size_t>(y_td.rows()), false);
    RealVector labels(2 * nc);
    for (Eigen::Index i = 0; i < y_td.rows(); ++i) {
        labels.head(nc) = y_td.row(i).real().transpose();
        labels.tail(nc) = y_td.row(i).imag().transpose();
        const SvmSolution sol = solve_soft_margin(features, labels, penalty, options);
        const auto idx = static_cast<std::size_t>(i);
        out.converged[idx] = sol.converged;
        out.epochs += sol.iterations;
        const double norm = sol.weights.norm();
        RealVector h = RealVector::Zero(2 * width);
        if (norm > 0.0) {
            h = sol.weights * (target / norm);
        } else {
            out.flagged[idx] = true;
        }
        out.taps.row(i).real() = h.head(width).transpose();
        out.taps.row(i).imag() = h.tail(width).transpose();
    }
    return out;
}

ComplexMatrix frequency_domain_channel(const ComplexMatrix& taps, int tap_count, int subcarriers) {
    check_taps(taps, tap_count);
    const Eigen::Index n = taps.rows();
    const Eigen::Index users = taps.cols() / tap_count;
    const auto fwd = twiddles(subcarriers, -1.0);
    const auto inv = twiddles(subcarriers, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(subcarriers));

    ComplexMatrix g(n * subcarriers, users * subcarriers);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < users; ++k) {
            for (int j = 0; j < subcarriers; ++j) {
                // Eigenvalue of circulant(g_ik) on the j-th Fourier vector.
                Complex lambda = 0.0;
                for (int l = 0; l < tap_count; ++l) {
                    lambda += taps(i, k * tap_count + l) *
                              fwd[static_cast<std::size_t>((static_cast<long>(l) * j) % subcarriers)];
                }
                for (int t = 0; t < subcarriers; ++t) {
                    g(i * subcarriers + t, k * subcarriers + j) =
                        scale * lambda * inv[static_cast<std::size_t>((static_cast<long>(t) * j) % subcarriers)];
                }
            }
        }
    }
    return g;
}

RowMatrix ofdm_detection_features(const ComplexMatrix& taps, int tap_count, int subcarriers) {
    const ComplexMatrix g = frequency_domain_channel(taps, tap_count, subcarriers);
    const Eigen::Index rows = g.rows();
    const Eigen::Index cols = g.cols();
    RowMatrix out(2 * rows, 2 * cols);
    out.topLeftCorner(rows, cols) = g.real();
    out.topRightCorner(rows, cols) = -g.imag();
    out.bottomLeftCorner(rows, cols) = g.imag();
    out.bottomRightCorner(rows, cols) = g.real();
    return out;
}

OfdmDetection svm_detect_ofdm(const QuantizedMatrix& y_td, const ComplexMatrix& taps, int tap_count,
                              const Constellation& constellation, double penalty,
                              const SolverOptions& options) {
    const RowMatrix features = ofdm_detection_features(taps, tap_count, static_cast<int>(y_td.cols()));
    return svm_detect_ofdm_features(y_td, features, static_cast<int>(taps.cols() / tap_count), constellation,
                           penalty, options);
}

OfdmDetection svm_detect_ofdm_features(const QuantizedMatrix& y_td, FeaturesRef features, int users,
                              const Constellation& constellation, double penalty,
                              const SolverOptions& options) {
    const Eigen::Index nc = y_td.cols();
    const Eigen::Index n = y_td.rows();
    if (features.rows() != 2 * n * nc || features.cols() != 2 * users * nc) {
        throw InvalidInput("svm_detect_ofdm: features do not match N, K and Nc");
    }
    RealVector labels(2 * n * nc);
    for (Eigen::Index i = 0; i < n; ++i) {
        labels.segment(i * nc, nc) = y_td.row(i).real().transpose();
        labels.segment(n * nc + i * nc, nc) = y_td.row(i).imag().transpose();
    }
    // Solve as if the channel were rescaled to sum |g|^2 = N K, the estimator's
    // convention; scaling the features by a equals scaling C by a^2.
    const double power = features.squaredNorm();
    if (!(power > 0.0)) {
        throw InvalidInput("svm_detect_ofdm: channel is identically zero");
    }
    const double reference = 2.0 * static_cast<double>(nc) * static_cast<double>(n) * users;
    const SvmSolution sol = solve_soft_margin(features, labels, penalty * reference / power, options);

    OfdmDetection out;
    out.converged = sol.converged;
    out.epochs = sol.iterations;
    const Eigen::Index symbols = static_cast<Eigen::Index>(users) * nc;
    const double norm = sol.weights.norm();
    if (norm > 0.0) {
        out.soft = sol.weights * (std::sqrt(static_cast<double>(symbols)) / norm);
    } else {
        out.soft = RealVector::Zero(2 * symbols);
        out.flagged = true;
    }
    out.indices.resize(users, nc);
    for (int k = 0; k < users; ++k) {
        for (Eigen::Index j = 0; j < nc; ++j) {
            const Eigen::Index at = k * nc + j;
            out.indices(k, j) = out.flagged ? 0 : constellation.slice(Complex(out.soft[at], out.soft[symbols + at]));
        }
    }
    return out;
}

double ofdm_nmse(const ComplexMatrix& estimate, const ComplexMatrix& truth, int users) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw InvalidInput("ofdm_nmse: shapes differ");
    }
    return (estimate - truth).squaredNorm() / (static_cast<double>(users) * static_cast<double>(truth.rows()));
}

} // namespace onebit
