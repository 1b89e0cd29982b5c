#include "onebit/constellation.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace onebit {

Modulation parse_modulation(std::string_view name) {
    if (name == "qpsk" || name == "QPSK") {
        return Modulation::qpsk;
    }
    if (name == "16qam" || name == "16QAM" || name == "qam16") {
        return Modulation::qam16;
    }
    throw InvalidInput("unknown constellation '" + std::string(name) + "'");
}

std::string_view to_string(Modulation m) {
    switch (m) {
    case Modulation::qpsk:
        return "qpsk";
    case Modulation::qam16:
        return "16qam";
    }
    return "?";
}

Constellation Constellation::qpsk() {
    // label b1 b0: b1 selects the sign of the in-phase part, b0 the quadrature.
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<Complex> points(4);
    for (int label = 0; label < 4; ++label) {
        points[static_cast<std::size_t>(label)] =
            Complex((label & 2) ? -a : a, (label & 1) ? -a : a);
    }
    return Constellation(Modulation::qpsk, std::move(points), 2);
}

Constellation Constellation::qam16() {
    // Per-axis Gray map 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
    constexpr double level[4] = {-3.0, -1.0, 3.0, 1.0};
    const double scale = 1.0 / std::sqrt(10.0);
    std::vector<Complex> points(16);
    for (int label = 0; label < 16; ++label) {
        points[static_cast<std::size_t>(label)] =
            scale * Complex(level[(label >> 2) & 3], level[label & 3]);
    }
    return Constellation(Modulation::qam16, std::move(points), 4);
}

Constellation Constellation::make(Modulation m) {
    return m == Modulation::qpsk ? qpsk() : qam16();
}

int Constellation::slice(Complex z) const noexcept {
    int best = 0;
    double best_d = std::norm(z - points_[0]);
    for (int i = 1; i < size(); ++i) {
        const double d = std::norm(z - points_[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

int Constellation::bit_errors(int a, int b) noexcept {
    return std::popcount(static_cast<unsigned>(a ^ b));
}

} // namespace onebit
