#pragma once

#include <string_view>
#include <vector>

#include "onebit/types.hpp"

namespace onebit {

enum class Modulation { qpsk, qam16 };

Modulation parse_modulation(std::string_view name);
std::string_view to_string(Modulation m);

/// Unit-average-energy symbol alphabet with Gray labelling. The index of a
/// point is its bit label, so bit errors are popcount(sent ^ detected).
class Constellation {
public:
    static Constellation qpsk();
    static Constellation qam16();
    static Constellation make(Modulation m);

    Modulation modulation() const noexcept { return modulation_; }
    std::string_view name() const noexcept { return to_string(modulation_); }
    const std::vector<Complex>& points() const noexcept { return points_; }
    int size() const noexcept { return static_cast<int>(points_.size()); }
    int bits_per_symbol() const noexcept { return bits_; }
    Complex point(int index) const { return points_.at(static_cast<std::size_t>(index)); }

    /// Nearest point; exact ties resolve to the lowest index.
    int slice(Complex z) const noexcept;

    /// Number of differing label bits between two indices.
    static int bit_errors(int a, int b) noexcept;

private:
    Constellation(Modulation m, std::vector<Complex> points, int bits)
        : modulation_(m), points_(std::move(points)), bits_(bits) {}

    Modulation modulation_;
    std::vector<Complex> points_;
    int bits_;
};

} // namespace onebit
