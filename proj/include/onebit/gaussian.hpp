#pragma once

#include <cmath>
#include <string_view>

namespace onebit {

/// Signal-to-noise ratio rho = 1/N0, carried in dB with a linear view.
class Snr {
public:
    static Snr from_db(double db) noexcept { return Snr(db); }
    double db() const noexcept { return db_; }
    double linear() const noexcept { return std::pow(10.0, db_ / 10.0); }
    double noise_power() const noexcept { return std::pow(10.0, -db_ / 10.0); }

private:
    explicit Snr(double db) noexcept : db_(db) {}
    double db_;
};

/// How log Phi(t) is evaluated in likelihood metrics.
enum class LogCdfMode {
    // erfc-based for t >= -8, leading asymptotic term below; never -inf.
    safeguarded,
    // Phi(-a) ~ 1/2 exp(-0.374 a^2 - 0.777 a) for a >= 0.
    osd_approx,
    // log of the double-precision Phi; underflows to -inf for t below about -38.
    plain,
};

LogCdfMode parse_log_cdf_mode(std::string_view name);
std::string_view to_string(LogCdfMode mode);

/// log of the standard Gaussian CDF.
double log_normal_cdf(double t, LogCdfMode mode = LogCdfMode::safeguarded) noexcept;

} // namespace onebit
