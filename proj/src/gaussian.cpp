#include "onebit/gaussian.hpp"

#include <numbers>
#include <string>

#include "onebit/types.hpp"

namespace onebit {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;
const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);

double osd_tail(double a) noexcept {
    return 0.5 * std::exp(-0.374 * a * a - 0.777 * a);
}

} // namespace

LogCdfMode parse_log_cdf_mode(std::string_view name) {
    if (name == "safeguarded") {
        return LogCdfMode::safeguarded;
    }
    if (name == "osd_approx") {
        return LogCdfMode::osd_approx;
    }
    if (name == "plain") {
        return LogCdfMode::plain;
    }
    throw InvalidInput("unknown log-cdf mode '" + std::string(name) + "'");
}

std::string_view to_string(LogCdfMode mode) {
    switch (mode) {
    case LogCdfMode::safeguarded:
        return "safeguarded";
    case LogCdfMode::osd_approx:
        return "osd_approx";
    case LogCdfMode::plain:
        return "plain";
    }
    return "?";
}

double log_normal_cdf(double t, LogCdfMode mode) noexcept {
    switch (mode) {
    case LogCdfMode::plain:
        return std::log(0.5 * std::erfc(-t * inv_sqrt2));
    case LogCdfMode::osd_approx:
        return t < 0.0 ? std::log(0.5) - 0.374 * t * t + 0.777 * t : std::log1p(-osd_tail(t));
    case LogCdfMode::safeguarded:
        break;
    }
    if (t < -8.0) {
        return -0.5 * t * t - half_log_2pi - std::log(-t);
    }
    if (t > 0.0) {
        return std::log1p(-0.5 * std::erfc(t * inv_sqrt2));
    }
    return std::log(0.5 * std::erfc(-t * inv_sqrt2));
}

} // namespace onebit
